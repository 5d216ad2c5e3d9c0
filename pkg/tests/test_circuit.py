import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from intermap.circuit import (
    CNOT,
    OPTIMIZED,
    PAPER,
    Circuit,
    CPhase,
    Gate,
    GateListError,
    H,
    Phase1,
    Rz,
    bit_reverse_indices,
    build_isrm_circuit,
    build_map_circuit,
    build_qft,
    build_s_gate,
    circuit_unitary,
    count_gates,
    emit_gatelist,
    max_deviation_up_to_phase,
    parse_gatelist,
    scattering_trace,
    simulate,
)
from intermap.core import Alpha, MapSpec
from intermap.isrm import build_random_phase_circuit, random_circuit_spec
from intermap.map_operator import build_symmetry_S, build_unitary, fourier_matrix
from intermap.spectral import eigensystem


def _random_circuit(n_q, n_gates, rng):
    gates = []
    for _ in range(n_gates):
        kind = rng.choice(["H", "P1", "RZ", "CP", "CNOT"])
        i, j = (int(x) for x in rng.choice(n_q, 2, replace=False))
        theta = float(rng.uniform(-math.pi, math.pi))
        gates.append({"H": H(i), "P1": Phase1(i, theta), "RZ": Rz(i, theta),
                      "CP": CPhase(i, j, theta), "CNOT": CNOT(i, j)}[kind])
    return Circuit(n_q, gates)


def test_gate_validation():
    with pytest.raises(ValueError):
        CNOT(1, 1)
    with pytest.raises(ValueError):
        Gate("T", (0,))
    with pytest.raises(ValueError):
        Gate("CP", (0,), 0.1)
    with pytest.raises(IndexError):
        Circuit(2, [H(2)])


def test_single_gate_matrices():
    assert np.allclose(circuit_unitary(Circuit(1, [H(0)])), np.array([[1, 1], [1, -1]]) / math.sqrt(2))
    assert np.allclose(circuit_unitary(Circuit(1, [Phase1(0, 0.3)])), np.diag([1, np.exp(0.3j)]))
    assert np.allclose(circuit_unitary(Circuit(1, [Rz(0, 0.3)])), np.diag([np.exp(0.15j), np.exp(-0.15j)]))
    assert np.allclose(circuit_unitary(Circuit(2, [CPhase(0, 1, 0.3)])), np.diag([1, 1, 1, np.exp(0.3j)]))
    # control is qubit 0 (lowest bit): |01> -> |11>, i.e. index 1 <-> 3
    cx = circuit_unitary(Circuit(2, [CNOT(0, 1)]))
    assert np.array_equal(cx.real.astype(int), np.eye(4, dtype=int)[[0, 3, 2, 1]])


def test_qft_small_cases():
    qft1 = build_qft(1)
    assert qft1.gates == (H(0),)
    assert np.allclose(circuit_unitary(qft1), np.array([[1, 1], [1, -1]]) / math.sqrt(2))
    assert len(build_qft(3)) == 6


@pytest.mark.parametrize("n_q", range(1, 7))
def test_qft_equals_fourier_matrix(n_q):
    qft = build_qft(n_q)
    assert qft.bit_reversed
    assert all(g.kind in ("H", "CP") for g in qft.gates)
    assert np.max(np.abs(circuit_unitary(qft) - fourier_matrix(2**n_q))) < 1e-10


def test_bit_reverse_indices():
    assert list(bit_reverse_indices(3)) == [0, 4, 2, 6, 1, 5, 3, 7]


def test_simulate_trivial(rng):
    psi = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    psi /= np.linalg.norm(psi)
    assert np.array_equal(simulate(Circuit(3), psi), psi)
    assert np.max(np.abs(simulate(Circuit(3, [H(0), H(0)]), psi) - psi)) < 1e-15
    with pytest.raises(ValueError):
        simulate(Circuit(3), psi[:4])


def test_simulate_norm_drift(rng):
    c = _random_circuit(6, 50, rng)
    psi = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    psi /= np.linalg.norm(psi)
    assert abs(np.linalg.norm(simulate(c, psi)) - 1) < 1e-12


@pytest.mark.parametrize("n_q", range(2, 9))
@pytest.mark.parametrize("mode", [PAPER, OPTIMIZED])
def test_map_circuit_equals_matrix(n_q, mode, alpha):
    spec = MapSpec(n_q, alpha)
    dev = max_deviation_up_to_phase(build_unitary(spec, "q"), circuit_unitary(build_map_circuit(spec, mode)))
    assert dev < 1e-9


def test_counting_modes_agree():
    spec = MapSpec(5, Alpha.rational(1, 3))
    a = circuit_unitary(build_map_circuit(spec, PAPER))
    b = circuit_unitary(build_map_circuit(spec, OPTIMIZED))
    assert np.max(np.abs(a - b)) < 1e-10


@pytest.mark.parametrize("n_q, total, two", [(3, 24, 15), (5, 60, 45)])
def test_map_counts_examples(n_q, total, two):
    counts = count_gates(build_map_circuit(MapSpec(n_q, Alpha.rational(1, 3)), PAPER))
    assert (counts.total, counts.two_qubit) == (total, two)
    assert counts.counting_mode == PAPER
    assert counts.paired == n_q


@pytest.mark.parametrize("n_q", range(2, 13))
def test_map_count_formulas(n_q):
    spec = MapSpec(n_q, Alpha.rational(1, 3))
    paper = count_gates(build_map_circuit(spec, PAPER))
    assert paper.total == 2 * n_q**2 + 2 * n_q
    assert paper.two_qubit == 2 * n_q**2 - n_q
    opt = count_gates(build_map_circuit(spec, OPTIMIZED))
    assert opt.one_qubit == 4 * n_q
    assert opt.two_qubit == 3 * n_q * (n_q - 1) // 2


def test_isrm_counts_example(rng):
    phase = build_random_phase_circuit(random_circuit_spec(4, 8, rng))
    counts = count_gates(build_isrm_circuit(Alpha.rational(1, 3), phase))
    assert (counts.one_qubit, counts.two_qubit) == (24, 28)


def test_s_gate():
    s2 = build_s_gate(2)
    assert np.allclose(circuit_unitary(s2), np.diag([1, -1, 1, -1]))
    assert np.allclose(circuit_unitary(s2 + s2), np.eye(4))
    assert np.max(np.abs(circuit_unitary(build_s_gate(8)) - build_symmetry_S(256))) < 1e-15


def test_gatelist_lines():
    assert emit_gatelist(Circuit(1, [H(0)])).splitlines()[1] == "H 0"
    assert emit_gatelist(Circuit(4, [CPhase(1, 3, -0.5)])).splitlines()[1] == "CP 1 3 -0.5"


@pytest.mark.parametrize("mode", [PAPER, OPTIMIZED])
def test_gatelist_round_trip(mode, alpha):
    c = build_map_circuit(MapSpec(4, alpha), mode)
    assert parse_gatelist(emit_gatelist(c)) == c


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=10))
def test_gatelist_angles_exact(angles):
    c = Circuit(3, [CPhase(0, 2, a) for a in angles] + [Rz(1, a) for a in angles])
    assert parse_gatelist(emit_gatelist(c)) == c


def test_gatelist_errors_report_line():
    with pytest.raises(GateListError) as info:
        parse_gatelist("QUBITS 2\nH 0\nCP 0 1\n")
    assert info.value.lineno == 3
    with pytest.raises(GateListError):
        parse_gatelist("RZ 0 0.1 pair\n")
    assert parse_gatelist("# comment\nH 1  # trailing\n").n_q == 2


def test_scattering_trace_trivial():
    ident = eigensystem(np.eye(8, dtype=complex))
    assert scattering_trace(ident, 1) == pytest.approx(1.0, abs=1e-12)
    assert scattering_trace(MapSpec(4, Alpha.rational(1, 3)), 0) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        scattering_trace(ident, -1)


@pytest.mark.parametrize("n", range(0, 21))
def test_scattering_trace_matches_eigenphases(n):
    spec = MapSpec(6, Alpha.rational(1, 3))
    eig = eigensystem(build_unitary(spec, "q"))
    expected = np.exp(1j * n * eig.phases).sum() / spec.N
    assert abs(scattering_trace(eig, n) - expected) < 1e-8


def test_scattering_trace_shots_estimate():
    eig = eigensystem(build_unitary(MapSpec(5, Alpha.rational(1, 3)), "q"))
    exact = scattering_trace(eig, 3)
    est = scattering_trace(eig, 3, shots=20000, rng=np.random.default_rng(1))
    assert abs(est - exact) < 0.05
    again = scattering_trace(eig, 3, shots=20000, rng=np.random.default_rng(1))
    assert est == again
