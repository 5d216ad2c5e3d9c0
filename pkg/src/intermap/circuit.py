"""Gate-level construction and statevector simulation of the map circuits.

Qubit 0 is the least significant bit of the basis-state integer. The QFT is
built without reversal swaps; a circuit whose output register is
bit-reversed records it in ``Circuit.bit_reversed`` and :func:`simulate`
undoes the relabeling at the end. The map circuit runs the kinetic gates on
the reversed register and returns through the inverse QFT, so its net
permutation is the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .core import Alpha, MapSpec, DETERMINISTIC

PAPER = "paper_faithful"
OPTIMIZED = "optimized"
COUNTING_MODES = (PAPER, OPTIMIZED)

_ARITY = {"H": 1, "P1": 1, "RZ": 1, "CP": 2, "CNOT": 2}
_HADAMARD = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


class GateListError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Gate:
    """One elementary gate.

    ``pair`` marks a diagonal kinetic element (``j1 == j2``) that the
    paper-faithful tally counts as a two-qubit gate although it acts on one
    qubit.
    """

    kind: str
    qubits: tuple
    angle: float = 0.0
    pair: bool = False

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise ValueError(f"unknown gate {self.kind!r}")
        if len(self.qubits) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} acts on {_ARITY[self.kind]} qubit(s)")
        if len(self.qubits) == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError("two-qubit gate needs distinct qubits")
        if self.pair and self.kind != "P1":
            raise ValueError("only P1 gates can carry the pair tag")

    @property
    def arity(self) -> int:
        return _ARITY[self.kind]


def H(j):
    return Gate("H", (j,))


def Phase1(j, theta, pair=False):
    return Gate("P1", (j,), float(theta), pair)


def Rz(j, phi):
    return Gate("RZ", (j,), float(phi))


def CPhase(i, j, theta):
    return Gate("CP", (i, j), float(theta))


def CNOT(i, j):
    return Gate("CNOT", (i, j))


@dataclass(frozen=True)
class Circuit:
    n_q: int
    gates: tuple = ()
    bit_reversed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(not 0 <= k < self.n_q for k in g.qubits):
                raise IndexError(f"gate {g} touches a qubit outside 0..{self.n_q - 1}")

    def __len__(self):
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_q != self.n_q:
            raise ValueError("cannot concatenate circuits of different width")
        if self.bit_reversed:
            raise ValueError("cannot append after a bit-reversed output")
        return Circuit(self.n_q, self.gates + other.gates, other.bit_reversed)


@dataclass(frozen=True)
class GateCounts:
    one_qubit: int
    two_qubit: int
    counting_mode: str = OPTIMIZED
    paired: int = 0

    @property
    def total(self) -> int:
        return self.one_qubit + self.two_qubit


def bit_reverse_indices(n_q: int) -> np.ndarray:
    x = np.arange(2**n_q)
    r = np.zeros_like(x)
    for j in range(n_q):
        r |= ((x >> j) & 1) << (n_q - 1 - j)
    return r


def _qft_gates(n_q: int) -> list:
    gates = []
    for j in range(n_q - 1, -1, -1):
        gates.append(H(j))
        for k in range(j - 1, -1, -1):
            gates.append(CPhase(k, j, 2 * math.pi / 2 ** (j - k + 1)))
    return gates


def _inverse(gates: Iterable[Gate]) -> list:
    out = []
    for g in reversed(list(gates)):
        out.append(Gate(g.kind, g.qubits, -g.angle if g.angle else 0.0, g.pair))
    return out


def build_qft(n_q: int) -> Circuit:
    """DFT ``|q> -> sum_p exp(2i pi p q/N)/sqrt(N) |p>`` with bit-reversed output."""
    return Circuit(n_q, _qft_gates(n_q), bit_reversed=True)


def _alpha_kick(n_q: int, alpha: Alpha) -> list:
    gates = []
    for j in range(n_q):
        if alpha.is_rational:
            theta = 2 * math.pi * ((alpha.a * 2**j) % alpha.b) / alpha.b
        else:
            theta = 2 * math.pi * ((alpha.value() * 2**j) % 1.0)
        gates.append(Phase1(j, theta))
    return gates


def _kinetic(n_q: int, mode: str) -> list:
    N = 2**n_q
    rev = lambda j: n_q - 1 - j  # p bit j sits on this qubit after the swap-free QFT
    gates = []
    for j1 in range(n_q):
        for j2 in range(n_q):
            if j1 == j2:
                theta = -2 * math.pi * (2 ** (2 * j1) % N) / N
                gates.append(Phase1(rev(j1), theta, pair=(mode == PAPER)))
            elif mode == PAPER:
                theta = -2 * math.pi * (2 ** (j1 + j2) % N) / N
                gates.append(CPhase(rev(j1), rev(j2), theta))
            elif j1 < j2:
                theta = -2 * math.pi * (2 ** (j1 + j2 + 1) % N) / N
                gates.append(CPhase(rev(j1), rev(j2), theta))
    return gates


def build_map_circuit(spec: MapSpec, mode: str = PAPER) -> Circuit:
    if spec.variant != DETERMINISTIC:
        raise ValueError("map circuit is for the deterministic variant; see build_isrm_circuit")
    if mode not in COUNTING_MODES:
        raise ValueError(f"unknown counting mode {mode!r}")
    n = spec.n_q
    qft = _qft_gates(n)
    gates = _alpha_kick(n, spec.alpha) + qft + _kinetic(n, mode) + _inverse(qft)
    return Circuit(n, gates)


def build_isrm_circuit(alpha: Alpha, phase_circuit: Circuit) -> Circuit:
    """Map circuit with the kinetic block replaced by a diagonal phase circuit.

    The phase circuit acts on the bit-reversed momentum register, so basis
    state ``x`` there carries momentum ``reverse(x)``.
    """
    n = phase_circuit.n_q
    qft = _qft_gates(n)
    gates = _alpha_kick(n, Alpha.parse(alpha)) + qft + list(phase_circuit.gates) + _inverse(qft)
    return Circuit(n, gates)


def build_s_gate(n_q: int) -> Circuit:
    """Parity ``(-1)^q`` only depends on the lowest bit."""
    return Circuit(n_q, [Phase1(0, math.pi)])


def count_gates(circuit: Circuit) -> GateCounts:
    one = sum(1 for g in circuit.gates if g.arity == 1 and not g.pair)
    paired = sum(1 for g in circuit.gates if g.pair)
    two = sum(1 for g in circuit.gates if g.arity == 2) + paired
    mode = PAPER if paired else OPTIMIZED
    return GateCounts(one, two, mode, paired)


def _apply(gate: Gate, psi: np.ndarray, n_q: int) -> None:
    """In-place gate on axis 0 of ``psi`` (shape ``(N, ...)``)."""
    N = psi.shape[0]
    tail = psi.shape[1:]
    if gate.kind in ("H", "P1", "RZ"):
        j = gate.qubits[0]
        v = psi.reshape((N >> (j + 1), 2, 1 << j) + tail)
        if gate.kind == "H":
            a = v[:, 0].copy()
            b = v[:, 1]
            v[:, 0] = (a + b) / math.sqrt(2)
            v[:, 1] = (a - b) / math.sqrt(2)
        elif gate.kind == "P1":
            v[:, 1] *= np.exp(1j * gate.angle)
        else:
            v[:, 0] *= np.exp(0.5j * gate.angle)
            v[:, 1] *= np.exp(-0.5j * gate.angle)
        return
    i, j = gate.qubits
    idx = np.arange(N)
    if gate.kind == "CP":
        sel = idx[((idx >> i) & 1 & (idx >> j)) == 1]
        psi[sel] *= np.exp(1j * gate.angle)
    else:
        sel = idx[(((idx >> i) & 1) == 1) & (((idx >> j) & 1) == 0)]
        partner = sel | (1 << j)
        tmp = psi[sel].copy()
        psi[sel] = psi[partner]
        psi[partner] = tmp


def simulate(circuit: Circuit, psi: np.ndarray) -> np.ndarray:
    """Apply the gates in list order to a state (or to each column of a matrix)."""
    psi = np.array(psi, dtype=complex)
    if psi.shape[0] != 2**circuit.n_q:
        raise ValueError(f"state length {psi.shape[0]} does not match 2^{circuit.n_q}")
    for g in circuit.gates:
        _apply(g, psi, circuit.n_q)
    if circuit.bit_reversed:
        psi = psi[bit_reverse_indices(circuit.n_q)]
    return psi


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    return simulate(circuit, np.eye(2**circuit.n_q, dtype=complex))


def align_global_phase(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Return ``B`` rotated by the global phase that matches ``A`` at B's largest entry."""
    k = np.unravel_index(np.argmax(np.abs(B)), B.shape)
    phase = A[k] / B[k]
    return B * (phase / abs(phase))


def max_deviation_up_to_phase(A: np.ndarray, B: np.ndarray) -> float:
    return float(np.max(np.abs(A - align_global_phase(A, B))))


# -- gate-list text format -------------------------------------------------

def _fmt(x: float) -> str:
    return format(x, ".17g")


def emit_gatelist(circuit: Circuit) -> str:
    """One gate per line; a ``BITREV`` line marks a bit-reversed output."""
    lines = [f"QUBITS {circuit.n_q}"]
    for g in circuit.gates:
        if g.kind == "H":
            lines.append(f"H {g.qubits[0]}")
        elif g.kind == "CNOT":
            lines.append(f"CNOT {g.qubits[0]} {g.qubits[1]}")
        elif g.kind == "CP":
            lines.append(f"CP {g.qubits[0]} {g.qubits[1]} {_fmt(g.angle)}")
        else:
            line = f"{g.kind} {g.qubits[0]} {_fmt(g.angle)}"
            lines.append(line + " pair" if g.pair else line)
    if circuit.bit_reversed:
        lines.append("BITREV")
    return "\n".join(lines) + "\n"


def parse_gatelist(text: str, n_q: Optional[int] = None) -> Circuit:
    gates = []
    reversed_out = False
    width = n_q
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        head, args = tok[0].upper(), tok[1:]
        try:
            if head == "QUBITS":
                width = int(args[0])
            elif head == "BITREV":
                reversed_out = True
            elif head == "H" and len(args) == 1:
                gates.append(H(int(args[0])))
            elif head == "CNOT" and len(args) == 2:
                gates.append(CNOT(int(args[0]), int(args[1])))
            elif head == "CP" and len(args) == 3:
                gates.append(CPhase(int(args[0]), int(args[1]), float(args[2])))
            elif head in ("P1", "RZ") and len(args) in (2, 3):
                pair = len(args) == 3
                if pair and (head != "P1" or args[2] != "pair"):
                    raise ValueError(f"unexpected token {args[2]!r}")
                gates.append(Gate(head, (int(args[0]),), float(args[1]), pair))
            else:
                raise ValueError(f"cannot parse {raw.strip()!r}")
        except (ValueError, IndexError) as exc:
            raise GateListError(lineno, str(exc)) from None
    if width is None:
        width = 1 + max((max(g.qubits) for g in gates), default=0)
    try:
        return Circuit(width, gates, reversed_out)
    except IndexError as exc:
        raise GateListError(0, str(exc)) from None


# -- one-probe-qubit trace estimation --------------------------------------

def _probe_expectations(Un: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Probe-qubit <sigma_x>, <sigma_y> for each system input |k>.

    Column k of ``Un`` is ``U^n|k>``. The probe starts in |0>, gets H, then
    controls U^n; the joint state is ``(|0>|k> + |1>U^n|k>)/sqrt(2)``. The
    readout rotation is H (x axis) or S^dagger followed by H (y axis), and
    the returned value is P(0) - P(1).
    """
    N = Un.shape[0]
    branches = np.stack([np.eye(N, dtype=complex), Un]) / math.sqrt(2)
    out = []
    for readout in (_HADAMARD, _HADAMARD @ np.diag([1, -1j])):
        rotated = np.einsum("ab,bjk->ajk", readout, branches)
        prob = np.sum(np.abs(rotated) ** 2, axis=1)
        out.append(prob[0] - prob[1])
    return out[0], out[1]


def scattering_trace(target, n: int, shots: Optional[int] = None, rng=None) -> complex:
    """Estimate ``Tr U^n / N`` with a probe qubit on a maximally mixed register.

    ``target`` is a MapSpec, an eigensystem (``phases``/``vectors``) or a
    dense unitary. Without ``shots`` the exact expectation is returned;
    otherwise ``shots`` measurements per Pauli axis are sampled, each on a
    uniformly drawn basis state.
    """
    from .spectral import eigensystem  # local import, spectral depends on this module's siblings

    if n < 0:
        raise ValueError("n must be non-negative")
    if isinstance(target, MapSpec):
        from .isrm import realize

        eig = eigensystem(realize(target, rep="q"))
    elif isinstance(target, np.ndarray):
        eig = eigensystem(target)
    else:
        eig = target
    from .map_operator import matrix_power_apply

    sx, sy = _probe_expectations(matrix_power_apply(eig, n))
    if shots is None:
        return complex(sx.mean(), sy.mean())
    if rng is None:
        rng = np.random.default_rng()
    N = sx.shape[0]
    est = []
    for s in (sx, sy):
        k = rng.integers(0, N, size=shots)
        p0 = (1 + s[k]) / 2
        zeros = rng.random(shots) < p0
        est.append((2 * zeros.sum() - shots) / shots)
    return complex(est[0], est[1])
