import logging
import math

import numpy as np
import pytest

from intermap.core import Alpha, ISRM_NONSYMMETRIC, ISRM_SYMMETRIC, MapSpec
from intermap.harness import ConfigError, build_config, run
from intermap.harness.cache import (
    CacheError,
    cache_matrix,
    cache_path,
    decode_header,
    encode_header,
    get_matrix,
    load_matrix,
    write_matrix,
)
from intermap.harness.cli import main
from intermap.harness.config import read_config_file, replace
from intermap.harness.experiments import map_ordered
from intermap.harness.table import PROVENANCE, SCHEMAS, ResultTable, provenance
from intermap.isrm import realize
from intermap.map_operator import build_unitary


def _cfg(**raw):
    return build_config({k: str(v) for k, v in raw.items()})


# -- configuration -----------------------------------------------------------

def test_config_parsing(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# pooled spacings at desk scale\nexperiment = spacing\nalpha = 1/5\nn_qubits = 6..8  # range\n")
    config = build_config(read_config_file(path))
    assert config.alpha == Alpha.rational(1, 5)
    assert config.n_qubits == (6, 7, 8)
    assert config.kappa_window() == 15


def test_config_rejects_unknown_key(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("experiment = spacing\nsize = 3\n")
    with pytest.raises(ConfigError, match="unknown key"):
        read_config_file(path)
    with pytest.raises(ConfigError):
        build_config({"experiment": "spacing", "size": "3"})


@pytest.mark.parametrize(
    "raw",
    [
        {"experiment": "nope"},
        {"experiment": "spacing", "variant": "chaotic"},
        {"experiment": "spacing", "n_qubits": "9..7"},
        {"experiment": "spacing", "ensemble": "0"},
        {"experiment": "spacing", "alpha": "1/0"},
        {"experiment": "iterates", "iterate_windows": "5:5"},
        {"experiment": "spacing", "phase_model": "gaussian", "sigma": "-1"},
        {"alpha": "1/3"},
    ],
)
def test_config_validation(raw):
    with pytest.raises(ConfigError):
        build_config(raw)


def test_config_aliases():
    config = _cfg(experiment="isrm-stats", variant="isrm-sym", counting="optimized", window="auto")
    assert config.experiment == "isrm_stats"
    assert config.variant == ISRM_SYMMETRIC
    assert config.window is None
    assert replace(config, ensemble=3).ensemble == 3


# -- tables --------------------------------------------------------------------

def test_table_schema_and_provenance():
    table = ResultTable("ipr", provenance("abc", 7))
    table.add(variant="v", alpha="1/3", N=64, series="eigvec", mean_xi=1.5, std_xi=0.1, count=3,
              gamma=math.nan, residual=math.nan)
    with pytest.raises(KeyError):
        table.add(bogus=1)
    header, row = table.to_csv().splitlines()
    assert header.split(",") == list(SCHEMAS["ipr"] + PROVENANCE)
    assert row.endswith(",abc,7,0.1.0")
    assert ",nan," in row


def test_table_sorting_and_write(tmp_path):
    table = ResultTable("formfactor", provenance("h", 1))
    for n in (2, 0, 1):
        table.add(alpha="1/3", N=8, n=n)
    assert table.column("n") == [0, 1, 2]
    path = table.write(tmp_path)
    assert path.read_text() == table.to_csv()
    assert (tmp_path / "formfactor.gp").read_text().startswith("# companion plot")


# -- cache -------------------------------------------------------------------

def test_cache_round_trip_bitwise(tmp_path):
    for spec in (MapSpec(4, Alpha.rational(1, 3)),
                 MapSpec(3, Alpha.parse("golden"), ISRM_NONSYMMETRIC, seed=2**63 + 5, realization=7)):
        U = realize(spec)
        path = write_matrix(tmp_path / f"{spec.digest()}.iqmp", spec, U)
        assert load_matrix(path).tobytes() == U.tobytes()
        head = decode_header(path.read_bytes())
        assert head["alpha"] == spec.alpha
        assert (head["n_q"], head["variant"], head["seed"], head["realization"]) == (
            spec.n_q, spec.variant, spec.seed, spec.realization)


def test_cache_rejects_corruption(tmp_path):
    spec = MapSpec(2, Alpha.rational(1, 3))
    path = write_matrix(tmp_path / "m.iqmp", spec, build_unitary(spec))
    data = bytearray(path.read_bytes())
    bad = tmp_path / "bad.iqmp"
    bad.write_bytes(b"XXXX" + bytes(data[4:]))
    with pytest.raises(CacheError, match="magic"):
        load_matrix(bad)
    data[4] = 9
    bad.write_bytes(bytes(data))
    with pytest.raises(CacheError, match="version"):
        load_matrix(bad)
    path.write_bytes(path.read_bytes()[:-16])
    with pytest.raises(CacheError):
        load_matrix(path)
    with pytest.raises(CacheError):
        decode_header(b"IQMP")
    with pytest.raises(CacheError):
        encode_header(MapSpec(2, Alpha.rational(-1, 3)))


def test_cache_hit_skips_rebuild(tmp_path, caplog, monkeypatch):
    spec = MapSpec(5, Alpha.rational(1, 3), ISRM_NONSYMMETRIC, seed=3)
    with caplog.at_level(logging.INFO, logger="intermap.harness.cache"):
        first = get_matrix(spec, "p", tmp_path)
        assert "cache miss" in caplog.text
        caplog.clear()
        import intermap.isrm as isrm

        def boom(*_):
            raise AssertionError("rebuilt on a cache hit")

        monkeypatch.setattr(isrm, "realize", boom)
        second = get_matrix(spec, "p", tmp_path)
        assert "cache hit" in caplog.text
    assert np.array_equal(first, second)
    assert cache_path(spec, tmp_path).exists()
    assert cache_matrix(spec, tmp_path) == cache_path(spec, tmp_path)


def test_cached_position_matrix(tmp_path):
    spec = MapSpec(4, Alpha.rational(1, 5))
    assert np.allclose(get_matrix(spec, "q", tmp_path), build_unitary(spec, "q"), atol=1e-13)


# -- experiments ----------------------------------------------------------------

def _square(x):
    return x * x


def test_map_ordered_keeps_order():
    assert map_ordered(_square, range(6), workers=1) == map_ordered(_square, range(6), workers=2)


def test_circuit_verify_examples():
    table = run(_cfg(experiment="circuit_verify", n_qubits="2..8", n_s="4,8,16"))
    assert all(r["passed"] for r in table.rows)
    (m3,) = table.where(circuit="map", n_q=3)
    assert (m3["total"], m3["two_qubit"]) == (24, 15)
    (i4,) = table.where(circuit="isrm", n_q=4, n_s=8)
    assert (i4["one_qubit"], i4["two_qubit"]) == (24, 28)
    (m6,) = table.where(circuit="map", n_q=6)
    assert m6["max_deviation"] < 1e-9 and m6["qft_deviation"] < 1e-10


def test_formfactor_rows():
    table = run(_cfg(experiment="formfactor", n_qubits="6", alpha="1/3"))
    rows = table.where(N=64)
    assert [r["n"] for r in rows] == list(range(10))
    assert rows[0]["re_ts"] == pytest.approx(0, abs=1e-9)
    for r in rows:
        assert r["re_scatter"] == pytest.approx(r["re_t"], abs=1e-6)
        assert r["im_scatter"] == pytest.approx(r["im_t"], abs=1e-6)
        assert r["re_diff"] == pytest.approx(r["re_t"] - r["re_ts"], abs=1e-12)


def test_iterates_identity_q_point_mass():
    table = run(_cfg(experiment="iterates", n_qubits="4", alpha="0/1", variant="isrm-nonsym",
                     phase_model="gaussian", sigma="0", ensemble="2", iterate_windows="1:3"))
    q_rows = [r for r in table.where(stat_kind="Q", representation="q") if r["density"] > 0]
    assert len(q_rows) == 1 and q_rows[0]["bin_center"] < 0.02


def test_ipr_warns_and_skips(caplog):
    with caplog.at_level(logging.WARNING):
        table = run(_cfg(experiment="ipr", alpha="1/5", n_qubits="5..8", variant="isrm-nonsym",
                         ensemble="2", column_iterate="50"))
    assert "skipping N=32" in caplog.text and "skipping N=128" in caplog.text
    assert sorted({r["N"] for r in table.rows}) == [64, 256]


def test_spacing_rejects_random_variant():
    with pytest.raises(ConfigError):
        run(_cfg(experiment="spacing", variant="isrm-nonsym"))


@pytest.mark.parametrize(
    "raw",
    [
        dict(experiment="spacing", n_qubits="5..6", alpha="1/3"),
        dict(experiment="isrm_stats", n_qubits="5", variant="isrm-nonsym", ensemble="4"),
        dict(experiment="ipr", n_qubits="4..6", variant="isrm-nonsym", ensemble="3", column_iterate="100"),
        dict(experiment="iterates", n_qubits="4", variant="isrm-sym", ensemble="3", iterate_windows="10:12"),
        dict(experiment="formfactor", n_qubits="5..6", alpha="golden"),
    ],
)
def test_determinism_across_workers(raw, tmp_path):
    csvs = []
    for workers in ("1", "2", "1"):
        csvs.append(run(_cfg(workers=workers, **raw)).to_csv())
    assert csvs[0] == csvs[1] == csvs[2]


# -- command line ----------------------------------------------------------------

def test_cli_unknown_key_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert main(["spacing", "--config", str(bad)]) == 2
    assert main(["spacing", "--set", "colour=blue"]) == 2
    assert "unknown key" in capsys.readouterr().err
    with pytest.raises(SystemExit) as info:
        main(["teleport"])
    assert info.value.code == 2


def test_cli_circuit_verify(tmp_path, capsys):
    assert main(["circuit-verify", "--n-qubits", "2..4", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "circuit_verify.csv").exists()
    assert str(tmp_path / "circuit_verify.csv") in capsys.readouterr().out


def test_cli_circuit_emits_gatelist(capsys):
    from intermap.circuit import build_map_circuit, parse_gatelist

    assert main(["circuit", "--n-qubits", "3", "--alpha", "1/3"]) == 0
    text = capsys.readouterr().out
    assert parse_gatelist(text) == build_map_circuit(MapSpec(3, Alpha.rational(1, 3)))


def test_cli_numerical_failure_exit_code(monkeypatch, capsys):
    import intermap.harness.cli as cli
    from intermap.map_operator import SymmetryError

    def broken(config):
        raise SymmetryError(0.3)

    monkeypatch.setattr(cli, "run", broken)
    assert main(["spacing", "--n-qubits", "4"]) == 3
    assert "numerical check failed" in capsys.readouterr().err
