"""Eigenphases, unfolded spacings, reference laws and trace statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import linalg, special

from .core import unitarity_residual

TWO_PI = 2 * math.pi
DEGENERATE_SPACING = 1e-12


class EigenError(RuntimeError):
    pass


@dataclass(frozen=True)
class EigenSystem:
    """Sorted eigenphases in [0, 2pi) with orthonormal eigenvectors as columns."""

    phases: np.ndarray
    vectors: np.ndarray
    source: Optional[str] = None

    @property
    def N(self) -> int:
        return self.phases.shape[0]


def eigensystem(U: np.ndarray, source: Optional[str] = None, check: bool = True) -> EigenSystem:
    """Diagonalize a unitary through its complex Schur form.

    For a normal matrix the Schur form is diagonal and the Schur vectors are
    an orthonormal eigenbasis, even inside degenerate eigenspaces.
    """
    U = np.asarray(U, dtype=complex)
    if check:
        res = unitarity_residual(U)
        if res > 1e-8:
            raise EigenError(f"matrix is not unitary (residual {res:.2e})")
    try:
        T, Z = linalg.schur(U, output="complex")
    except linalg.LinAlgError as exc:
        raise EigenError(f"Schur decomposition failed: {exc}") from exc
    lam = np.diag(T)
    off = np.max(np.abs(np.triu(T, 1))) if T.shape[0] > 1 else 0.0
    modulus = np.max(np.abs(np.abs(lam) - 1)) if lam.size else 0.0
    if off > 1e-7 or modulus > 1e-8:
        raise EigenError(f"non-normal Schur form: off-diagonal {off:.2e}, |lambda|-1 {modulus:.2e}")
    phases = np.mod(np.angle(lam), TWO_PI)
    phases[phases >= TWO_PI] = 0.0
    order = np.argsort(phases, kind="stable")
    return EigenSystem(phases[order], Z[:, order], source)


def eigenphases(U: np.ndarray) -> np.ndarray:
    lam = linalg.eigvals(U)
    return np.sort(np.mod(np.angle(lam), TWO_PI))


def eigen_residual(U: np.ndarray, eig: EigenSystem) -> float:
    V = eig.vectors
    return float(np.max(np.linalg.norm(U @ V - V * np.exp(1j * eig.phases), axis=0)))


@dataclass(frozen=True)
class SpacingSample:
    s: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def n_degenerate(self) -> int:
        return int(np.sum(self.s < DEGENERATE_SPACING))

    def __len__(self):
        return self.s.shape[0]


def unfold_spacings(phases: np.ndarray, **meta) -> SpacingSample:
    """Nearest-neighbour spacings on the circle, scaled to unit mean."""
    th = np.sort(np.asarray(phases, dtype=float))
    N = th.shape[0]
    if N == 0:
        raise ValueError("empty spectrum")
    gaps = np.diff(np.append(th, th[0] + TWO_PI))
    # gaps sum to 2 pi up to rounding; normalizing by the sum makes the mean 1 to the last bit
    s = gaps * (N / gaps.sum())
    return SpacingSample(s, dict(meta))


def pool(samples) -> SpacingSample:
    samples = list(samples)
    return SpacingSample(np.concatenate([x.s for x in samples]), {"pooled": len(samples)})


# -- reference spacing laws --------------------------------------------------

def semi_poisson_norm(beta: float) -> float:
    return (beta + 1) ** (beta + 1) / special.gamma(beta + 1)


def semi_poisson_pdf(beta: float, s):
    if beta <= -1:
        raise ValueError("beta must exceed -1")
    s = np.asarray(s, dtype=float)
    return semi_poisson_norm(beta) * s**beta * np.exp(-(beta + 1) * s)


def semi_poisson_cdf(beta: float, s):
    if beta <= -1:
        raise ValueError("beta must exceed -1")
    s = np.clip(np.asarray(s, dtype=float), 0.0, None)
    return special.gammainc(beta + 1, (beta + 1) * s)


def poisson_cdf(s):
    return semi_poisson_cdf(0.0, s)


def wigner_coe_pdf(s):
    s = np.asarray(s, dtype=float)
    return math.pi / 2 * s * np.exp(-math.pi * s**2 / 4)


def wigner_coe_cdf(s):
    s = np.clip(np.asarray(s, dtype=float), 0.0, None)
    return -np.expm1(-math.pi * s**2 / 4)


def wigner_cue_pdf(s):
    s = np.asarray(s, dtype=float)
    return 32 / math.pi**2 * s**2 * np.exp(-4 * s**2 / math.pi)


def wigner_cue_cdf(s):
    s = np.clip(np.asarray(s, dtype=float), 0.0, None)
    return special.erf(2 * s / math.sqrt(math.pi)) - 4 * s / math.pi * np.exp(-4 * s**2 / math.pi)


def reference_cdf(name: str, beta: Optional[float] = None) -> Callable:
    if name == "semi_poisson":
        return lambda s: semi_poisson_cdf(beta, s)
    return {"poisson": poisson_cdf, "coe": wigner_coe_cdf, "cue": wigner_cue_cdf}[name]


def ks_distance(sample, cdf: Callable) -> float:
    """Sup distance between the empirical CDF and ``cdf``, both one-sided limits included."""
    s = sample.s if isinstance(sample, SpacingSample) else np.asarray(sample, dtype=float)
    if s.size == 0:
        raise ValueError("KS distance of an empty sample")
    x = np.sort(s)
    n = x.size
    F = np.asarray(cdf(x), dtype=float)
    upper = np.arange(1, n + 1) / n - F
    lower = F - np.arange(n) / n
    return float(max(upper.max(), lower.max()))


# -- traces and number variance ------------------------------------------------

@dataclass(frozen=True)
class TraceSeries:
    n: np.ndarray
    t: np.ndarray
    N: int


def trace_series(eig, n_max: int) -> TraceSeries:
    phases = eig.phases if hasattr(eig, "phases") else np.asarray(eig)
    n = np.arange(n_max + 1)
    t = np.exp(1j * np.outer(n, phases)).sum(axis=1)
    N = phases.shape[0]
    t[0] = N
    return TraceSeries(n, t, N)


@dataclass(frozen=True)
class KappaEstimate:
    """Short-time trace statistics over ``n = 1..window``.

    ``kappa`` is the mean of ``t_n/sqrt(N)``; ``form_factor`` is the mean of
    ``|t_n|^2/N``.
    """

    kappa: complex
    form_factor: float
    window: int

    @property
    def kappa_sq(self) -> float:
        return abs(self.kappa) ** 2


def kappa_estimate(ts: TraceSeries, window: int) -> KappaEstimate:
    if window < 1:
        raise ValueError("window must be >= 1")
    if window > ts.n[-1]:
        raise ValueError(f"trace series only reaches n={ts.n[-1]}")
    t = ts.t[1 : window + 1]
    kappa = complex(t.mean() / math.sqrt(ts.N))
    ff = float(np.mean(np.abs(t) ** 2) / ts.N)
    return KappaEstimate(kappa, ff, window)


def default_window(alpha) -> int:
    """``3b`` for rational ``a/b``; 9 otherwise."""
    return 3 * alpha.b if alpha.is_rational else 9


def number_variance(phases, L_values, n_windows: Optional[int] = None) -> np.ndarray:
    """Sigma^2(L) for a circular spectrum unfolded to unit mean spacing.

    Windows ``[x0, x0 + L)`` start at ``n_windows`` equispaced offsets
    (default: 4N) and wrap around the circle.
    """
    th = np.sort(np.mod(np.asarray(phases, dtype=float), TWO_PI))
    N = th.shape[0]
    x = th * N / TWO_PI
    ext = np.concatenate([x - N, x, x + N])
    m = n_windows or 4 * N
    x0 = (np.arange(m) + 0.5) * N / m
    out = []
    for L in np.atleast_1d(L_values):
        if L > N:
            raise ValueError("window longer than the spectrum")
        counts = np.searchsorted(ext, x0 + L, side="left") - np.searchsorted(ext, x0, side="left")
        out.append(np.mean((counts - L) ** 2))
    return np.array(out)
