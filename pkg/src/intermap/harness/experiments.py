"""Experiment runners. Each ``run_*`` returns a :class:`ResultTable`.

Work items are independent and carry their own RNG stream, so results are
gathered in item order and do not depend on the worker count.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from threadpoolctl import threadpool_limits

from .. import circuit as circ
from ..core import MapSpec, DETERMINISTIC, RngStream, beta_condition, predicted_beta
from ..isrm import (
    build_isrm_unitary,
    circuit_phase_vector,
    build_random_phase_circuit,
    random_circuit_spec,
)
from ..map_operator import (
    build_symmetry_S,
    build_unitary,
    desymmetrize,
    fourier_matrix,
    matrix_power_apply,
)
from ..observables import (
    fit_power_law,
    ipr_columns,
    linear_histogram,
    log_histogram,
    meyer_wallach_columns,
    porter_thomas_cdf,
)
from ..spectral import (
    eigensystem,
    kappa_estimate,
    ks_distance,
    poisson_cdf,
    pool,
    semi_poisson_cdf,
    trace_series,
    unfold_spacings,
    wigner_coe_cdf,
    wigner_cue_cdf,
)
from .cache import get_matrix
from .config import ConfigError, ExperimentConfig
from .table import ResultTable, provenance

log = logging.getLogger(__name__)

SPACING_BINS = np.linspace(0.0, 4.0, 41)
DENSE_VERIFY_MAX = 8
SCATTER_MAX = 8


class NumericalCheckError(RuntimeError):
    pass


def _limited(args):
    fn, item = args
    with threadpool_limits(1):
        return fn(item)


def map_ordered(fn, items, workers: int = 1) -> list:
    """``[fn(x) for x in items]``, optionally across processes, in item order."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        with threadpool_limits(1):
            return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool_:
        return list(pool_.map(_limited, [(fn, x) for x in items], chunksize=1))


def _table(kind: str, config: ExperimentConfig) -> ResultTable:
    return ResultTable(kind, provenance(config.spec(config.n_qubits[0]).digest(), config.seed))


def _spacing_hist(s: np.ndarray):
    counts, edges = np.histogram(s, bins=SPACING_BINS)
    density = counts / (s.size * np.diff(edges))
    return (edges[1:] + edges[:-1]) / 2, density


# -- spacing (deterministic map, desymmetrized, alpha and 1 - alpha pooled) ----

def _spacing_item(args):
    spec, cache_dir = args
    U = get_matrix(spec, "q", cache_dir)
    if spec.N % 4 == 0:
        return [eigensystem(B).phases for _, B in desymmetrize(U)]
    return [eigensystem(U).phases]


def run_spacing(config: ExperimentConfig) -> ResultTable:
    if config.variant != DETERMINISTIC:
        raise ConfigError("spacing runs on the deterministic map; use isrm_stats for random variants")
    table = _table("spacing", config)
    alphas = (config.alpha, config.alpha.complement())
    items = [(config.spec(n_q, a), config.cache_dir) for n_q in config.n_qubits for a in alphas]
    results = map_ordered(_spacing_item, items, config.workers)
    for i, n_q in enumerate(config.n_qubits):
        N = 2**n_q
        blocks = results[2 * i] + results[2 * i + 1]
        sample = pool(unfold_spacings(ph) for ph in blocks)
        beta = predicted_beta(config.alpha, N)
        if config.alpha.is_rational and beta is None:
            log.warning("alpha=%s, N=%d: a N != +-1 mod b, no semi-Poisson prediction", config.alpha, N)
        ks_sp = ks_distance(sample, lambda s: semi_poisson_cdf(beta, s)) if beta is not None else math.nan
        ks_p = ks_distance(sample, poisson_cdf)
        ks_c = ks_distance(sample, wigner_coe_cdf)
        if sample.n_degenerate:
            log.warning("N=%d: %d degenerate spacings kept as zeros", N, sample.n_degenerate)
        centers, density = _spacing_hist(sample.s)
        block = "pooled" if N % 4 == 0 else "full"
        for c, d in zip(centers, density):
            table.add(
                alpha=config.alpha.encode(), N=N, block=block, s_bin_center=float(c), density=float(d),
                ks_sp=ks_sp, ks_poisson=ks_p, ks_coe=ks_c,
                beta=math.nan if beta is None else beta, n_spacings=len(sample),
                spec_hash=config.spec(n_q).digest(),
            )
    return table


# -- ISRM spacing classes -------------------------------------------------------

def _isrm_unitary(spec, phase_source: str, n_s: int):
    if phase_source == "circuit":
        rcs = random_circuit_spec(spec.n_q, n_s, spec.rng())
        return build_isrm_unitary(circuit_phase_vector(rcs), spec.alpha)
    return get_matrix(spec, "p")


def _isrm_stats_item(args):
    spec, phase_source, n_s = args
    return eigensystem(_isrm_unitary(spec, phase_source, n_s), check=True).phases


def run_isrm_stats(config: ExperimentConfig) -> ResultTable:
    if config.variant == DETERMINISTIC:
        raise ConfigError("isrm_stats needs an ISRM variant")
    table = _table("isrm_stats", config)
    n_s = config.n_s[0]
    for n_q in config.n_qubits:
        N = 2**n_q
        items = [(config.spec(n_q, realization=k), config.phase_source, n_s) for k in range(config.ensemble)]
        phases = map_ordered(_isrm_stats_item, items, config.workers)
        sample = pool(unfold_spacings(ph) for ph in phases)
        beta = predicted_beta(config.alpha, N, config.variant)
        if config.alpha.is_rational and beta is None:
            log.warning("alpha=%s, N=%d: a N != +-1 mod b, no semi-Poisson prediction", config.alpha, N)
        ks = {
            "ks_sp": ks_distance(sample, lambda s: semi_poisson_cdf(beta, s)) if beta is not None else math.nan,
            "ks_poisson": ks_distance(sample, poisson_cdf),
            "ks_coe": ks_distance(sample, wigner_coe_cdf),
            "ks_cue": ks_distance(sample, wigner_cue_cdf),
        }
        centers, density = _spacing_hist(sample.s)
        for c, d in zip(centers, density):
            table.add(
                variant=config.variant, phase_source=config.phase_source, alpha=config.alpha.encode(),
                N=N, s_bin_center=float(c), density=float(d), beta=math.nan if beta is None else beta,
                n_spacings=len(sample), spec_hash=config.spec(n_q).digest(), **ks,
            )
    return table


# -- form factor ----------------------------------------------------------------

def _formfactor_item(args):
    spec, window, shots, cache_dir = args
    from ..circuit import scattering_trace

    U = get_matrix(spec, "q", cache_dir)
    eig = eigensystem(U)
    ts = trace_series(eig, window)
    est = kappa_estimate(ts, window)
    out = {"t": ts.t, "kappa": est.kappa, "ff": est.form_factor, "kappa_sq": est.kappa_sq}
    if spec.variant == DETERMINISTIC and spec.N % 4 == 0:
        s_diag = np.real(np.diag(build_symmetry_S(spec.N)))
        weight = np.einsum("kj,k,kj->j", eig.vectors.conj(), s_diag, eig.vectors).real
        n = np.arange(window + 1)
        out["ts"] = np.exp(1j * np.outer(n, eig.phases)) @ weight
    if spec.n_q <= SCATTER_MAX:
        rng = RngStream(spec.seed, 2**32 + spec.n_q).generator()
        out["scatter"] = np.array(
            [scattering_trace(eig, n, shots or None, rng) * spec.N for n in range(window + 1)]
        )
    return out


def run_formfactor(config: ExperimentConfig) -> ResultTable:
    table = _table("formfactor", config)
    window = config.kappa_window()
    items = [(config.spec(n_q), window, config.scattering_shots, config.cache_dir) for n_q in config.n_qubits]
    results = map_ordered(_formfactor_item, items, config.workers)
    for n_q, res in zip(config.n_qubits, results):
        N = 2**n_q
        if config.alpha.is_rational and not beta_condition(config.alpha, N):
            log.warning("alpha=%s, N=%d: a N != +-1 mod b, kappa has no semi-Poisson reading", config.alpha, N)
        for n in range(window + 1):
            t = res["t"][n]
            row = dict(
                alpha=config.alpha.encode(), N=N, n=n, re_t=float(t.real), im_t=float(t.imag),
                kappa_re=res["kappa"].real, kappa_im=res["kappa"].imag, ff=res["ff"], kappa_sq=res["kappa_sq"],
                spec_hash=config.spec(n_q).digest(),
            )
            if "ts" in res:
                ts = res["ts"][n]
                row.update(re_ts=float(ts.real), im_ts=float(ts.imag),
                           re_diff=float((t - ts).real), im_diff=float((t - ts).imag))
            if "scatter" in res:
                row.update(re_scatter=float(res["scatter"][n].real), im_scatter=float(res["scatter"][n].imag))
            table.add(**row)
    return table


# -- iterates: intensity and entanglement distributions ------------------------

def _iterates_item(args):
    spec, windows, cache_dir = args
    U = get_matrix(spec, "q", cache_dir)
    if spec.variant == DETERMINISTIC and spec.N % 4 == 0:
        U = desymmetrize(U).even
    eig = eigensystem(U)
    M = U.shape[0]
    W = fourier_matrix(M)
    out = {}
    for lo, hi in windows:
        ys = {"q": [], "p": []}
        qs = {"q": [], "p": []}
        for n in range(lo, hi):
            Un = matrix_power_apply(eig, n)
            for rep, mat in (("q", Un), ("p", W @ Un @ W.conj().T)):
                ys[rep].append((M * np.abs(mat) ** 2).ravel())
                qs[rep].append(meyer_wallach_columns(mat))
        for rep in ("q", "p"):
            out[(rep, lo, hi)] = (np.concatenate(ys[rep]), np.concatenate(qs[rep]))
    return out


def run_iterates(config: ExperimentConfig) -> ResultTable:
    table = _table("iterates", config)
    n_q = config.n_qubits[-1]
    count = 1 if config.variant == DETERMINISTIC else config.ensemble
    items = [(config.spec(n_q, realization=k), config.iterate_windows, config.cache_dir) for k in range(count)]
    results = map_ordered(_iterates_item, items, config.workers)
    N = 2**n_q
    for key in results[0]:
        rep, lo, hi = key
        y = np.concatenate([r[key][0] for r in results])
        q = np.concatenate([r[key][1] for r in results])
        ks = ks_distance(y, porter_thomas_cdf)
        common = dict(variant=config.variant, alpha=config.alpha.encode(), N=N, representation=rep,
                      window_lo=lo, window_hi=hi)
        for c, d in zip(*log_histogram(y)):
            table.add(bin_center=float(c), density=float(d), stat_kind="intensity", ks_porter_thomas=ks, **common)
        for c, d in zip(*linear_histogram(q)):
            table.add(bin_center=float(c), density=float(d), stat_kind="Q", ks_porter_thomas=math.nan, **common)
    return table


# -- IPR scaling -------------------------------------------------------------------

def _ipr_item(args):
    spec, n_iter = args
    U = get_matrix(spec, "p")
    eig = eigensystem(U)
    return ipr_columns(eig.vectors), ipr_columns(matrix_power_apply(eig, n_iter))


def run_ipr(config: ExperimentConfig) -> ResultTable:
    table = _table("ipr", config)
    points = []
    for n_q in config.n_qubits:
        N = 2**n_q
        if config.alpha.is_rational and not beta_condition(config.alpha, N):
            log.warning("skipping N=%d: alpha=%s violates a N = +-1 mod b", N, config.alpha)
            continue
        points.append(n_q)
    count = 1 if config.variant == DETERMINISTIC else config.ensemble
    items = [(config.spec(n_q, realization=k), config.column_iterate) for n_q in points for k in range(count)]
    results = map_ordered(_ipr_item, items, config.workers)
    series = {"eigvec": [], "column": []}
    for i, n_q in enumerate(points):
        chunk = results[i * count : (i + 1) * count]
        for j, name in enumerate(("eigvec", "column")):
            xi = np.concatenate([c[j] for c in chunk])
            series[name].append((2**n_q, float(xi.mean()), float(xi.std()), xi.size))
    for name, pts in series.items():
        if len(pts) >= 3:
            fit = fit_power_law([p[0] for p in pts], [p[1] for p in pts])
            gamma, resid = fit.gamma, fit.residual
        else:
            log.warning("%s series has %d points; no exponent fitted", name, len(pts))
            gamma = resid = math.nan
        for N, mean, std, cnt in pts:
            table.add(variant=config.variant, alpha=config.alpha.encode(), N=N, series=name,
                      mean_xi=mean, std_xi=std, count=cnt, gamma=gamma, residual=resid,
                      spec_hash=config.spec(int(math.log2(N))).digest())
    return table


# -- circuit verification -----------------------------------------------------------

def expected_map_counts(n_q: int, mode: str) -> tuple:
    """(one-qubit, two-qubit) gates of the map circuit."""
    if mode == circ.PAPER:
        return 3 * n_q, 2 * n_q**2 - n_q
    return 4 * n_q, 3 * n_q * (n_q - 1) // 2


def expected_isrm_counts(n_q: int, n_s: int) -> tuple:
    return 4 * n_q + n_s, n_q**2 - n_q + 2 * n_s


def _global_phase_dev(A, B) -> float:
    return circ.max_deviation_up_to_phase(A, B)


def run_circuit_verify(config: ExperimentConfig) -> ResultTable:
    table = _table("circuit_verify", config)
    for n_q in config.n_qubits:
        spec = MapSpec(n_q, config.alpha)
        c = circ.build_map_circuit(spec, config.counting)
        counts = circ.count_gates(c)
        e1, e2 = expected_map_counts(n_q, config.counting)
        dev = qdev = math.nan
        if n_q <= DENSE_VERIFY_MAX:
            target = build_unitary(spec, "q")
            dev = _global_phase_dev(target, circ.circuit_unitary(c))
            other = circ.OPTIMIZED if config.counting == circ.PAPER else circ.PAPER
            dev = max(dev, _global_phase_dev(target, circ.circuit_unitary(circ.build_map_circuit(spec, other))))
            qdev = float(np.max(np.abs(circ.circuit_unitary(circ.build_qft(n_q)) - fourier_matrix(2**n_q))))
        ok = counts.one_qubit == e1 and counts.two_qubit == e2
        passed = ok and (math.isnan(dev) or dev < 1e-9) and (math.isnan(qdev) or qdev < 1e-10)
        table.add(n_q=n_q, circuit="map", n_s=0, one_qubit=counts.one_qubit, two_qubit=counts.two_qubit,
                  total=counts.total, expected_one=e1, expected_two=e2, expected_total=e1 + e2,
                  counts_ok=ok, max_deviation=dev, qft_deviation=qdev, passed=passed,
                  spec_hash=spec.digest())
        if n_q < 2:
            continue
        for n_s in config.n_s:
            rng = RngStream(config.seed, n_q * 1000 + n_s).generator()
            rcs = random_circuit_spec(n_q, n_s, rng)
            phase_part = build_random_phase_circuit(rcs)
            pc = circ.count_gates(phase_part)
            full = circ.build_isrm_circuit(config.alpha, phase_part)
            fc = circ.count_gates(full)
            e1, e2 = expected_isrm_counts(n_q, n_s)
            pdev = fdev = math.nan
            if n_q <= DENSE_VERIFY_MAX:
                D = circ.circuit_unitary(phase_part)
                diag = circuit_phase_vector(rcs, bit_reversed=False).phi
                ideal = np.diag(np.exp(1j * diag))
                pdev = _global_phase_dev(ideal, D)
                target = build_isrm_unitary(circuit_phase_vector(rcs), config.alpha, "q")
                fdev = _global_phase_dev(target, circ.circuit_unitary(full))
            p_ok = pc.total == 3 * n_s + n_q
            table.add(n_q=n_q, circuit="isrm_phase", n_s=n_s, one_qubit=pc.one_qubit, two_qubit=pc.two_qubit,
                      total=pc.total, expected_one=n_q + n_s, expected_two=2 * n_s, expected_total=3 * n_s + n_q,
                      counts_ok=p_ok, max_deviation=pdev, qft_deviation=math.nan,
                      passed=p_ok and (math.isnan(pdev) or pdev < 1e-10), spec_hash=spec.digest())
            f_ok = fc.one_qubit == e1 and fc.two_qubit == e2
            table.add(n_q=n_q, circuit="isrm", n_s=n_s, one_qubit=fc.one_qubit, two_qubit=fc.two_qubit,
                      total=fc.total, expected_one=e1, expected_two=e2, expected_total=e1 + e2,
                      counts_ok=f_ok, max_deviation=fdev, qft_deviation=math.nan,
                      passed=f_ok and (math.isnan(fdev) or fdev < 1e-9), spec_hash=spec.digest())
    return table


RUNNERS = {
    "spacing": run_spacing,
    "isrm_stats": run_isrm_stats,
    "formfactor": run_formfactor,
    "iterates": run_iterates,
    "ipr": run_ipr,
    "circuit_verify": run_circuit_verify,
}


def run(config: ExperimentConfig) -> ResultTable:
    return RUNNERS[config.experiment](config)


def failed_checks(table: ResultTable) -> list:
    if table.kind == "circuit_verify":
        return [r for r in table.rows if not r["passed"]]
    return []
