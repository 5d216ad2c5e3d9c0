"""Random-phase (ISRM) variants of the map and their economical circuit."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import CNOT, Circuit, Rz, bit_reverse_indices
from .core import Alpha, MapSpec, PhaseModel, DETERMINISTIC
from .map_operator import MOMENTUM, build_unitary, unitary_from_phases


@dataclass(frozen=True)
class PhaseVector:
    phi: np.ndarray
    symmetric: bool = False

    @property
    def N(self) -> int:
        return self.phi.shape[0]


def mirror_index(N: int) -> np.ndarray:
    """``min(p, N - p)``: representative of each ``{p, N-p}`` pair."""
    p = np.arange(N)
    return np.minimum(p, (N - p) % N)


def sample_phases(N: int, model: PhaseModel = PhaseModel(), symmetric: bool = False, rng=None) -> PhaseVector:
    if rng is None:
        rng = np.random.default_rng()
    if symmetric and N % 2:
        raise ValueError("symmetric phases need even N")
    m = N // 2 + 1 if symmetric else N
    if model.kind == "uniform":
        draw = rng.uniform(0.0, 2 * math.pi, size=m)
    else:
        draw = rng.normal(0.0, model.sigma, size=m)
    phi = draw[mirror_index(N)] if symmetric else draw
    return PhaseVector(phi, symmetric)


def build_isrm_unitary(phases: PhaseVector, alpha, rep: str = MOMENTUM) -> np.ndarray:
    """``diag(exp(i phi)) W D_alpha W^dagger``."""
    return unitary_from_phases(np.asarray(phases.phi, dtype=float), Alpha.parse(alpha), rep)


def spec_phases(spec: MapSpec) -> PhaseVector:
    return sample_phases(spec.N, spec.phase_model, spec.symmetric, spec.rng())


def realize(spec: MapSpec, rep: str = MOMENTUM) -> np.ndarray:
    """Dense unitary for any variant; random ones draw from the spec's stream."""
    if spec.variant == DETERMINISTIC:
        return build_unitary(spec, rep)
    return build_isrm_unitary(spec_phases(spec), spec.alpha, rep)


# -- randomization circuit ---------------------------------------------------

@dataclass(frozen=True)
class RandomCircuitSpec:
    """Angles and CNOT pairs of the diagonal randomization circuit.

    ``phi[k]`` rotates qubit ``k``; ``phi_prime[k]`` rotates the target of
    ``pairs[k] = (control, target)``.
    """

    n_q: int
    phi: tuple
    phi_prime: tuple
    pairs: tuple

    def __post_init__(self):
        if len(self.phi) != self.n_q:
            raise ValueError("need one angle per qubit")
        if len(self.phi_prime) != len(self.pairs):
            raise ValueError("need one angle per CNOT pair")
        for i, j in self.pairs:
            if i == j or not (0 <= i < self.n_q and 0 <= j < self.n_q):
                raise ValueError(f"bad CNOT pair {(i, j)}")

    @property
    def n_s(self) -> int:
        return len(self.pairs)


def random_circuit_spec(n_q: int, n_s: int, rng=None) -> RandomCircuitSpec:
    if n_q < 2:
        raise ValueError("randomization circuit needs at least two qubits")
    if rng is None:
        rng = np.random.default_rng()
    phi = tuple(rng.uniform(0, 2 * math.pi, n_q))
    phi_prime = tuple(rng.uniform(0, 2 * math.pi, n_s))
    pairs = []
    for _ in range(n_s):
        i, j = rng.choice(n_q, size=2, replace=False)
        pairs.append((int(i), int(j)))
    return RandomCircuitSpec(n_q, phi, phi_prime, tuple(pairs))


def build_random_phase_circuit(rcs: RandomCircuitSpec) -> Circuit:
    """Gates in application order.

    The operator string is read as an ordinary product whose rightmost
    factor acts first: single-qubit rotations, then ``CNOT_k, R_k`` for
    ``k = n_s..1``, then ``CNOT_1..CNOT_{n_s}`` which undo the permutation.
    """
    gates = [Rz(k, rcs.phi[k]) for k in range(rcs.n_q)]
    for k in reversed(range(rcs.n_s)):
        i, j = rcs.pairs[k]
        gates += [CNOT(i, j), Rz(j, rcs.phi_prime[k])]
    gates += [CNOT(i, j) for i, j in rcs.pairs]
    return Circuit(rcs.n_q, gates)


def _parity(x: int, mask: int) -> int:
    return bin(x & mask).count("1") & 1


def circuit_phase_oracle(rcs: RandomCircuitSpec, basis_state: int) -> float:
    """Phase of ``basis_state`` relative to ``|0>``, from CNOT conjugation rules.

    Each rotation sees its target bit as a parity of the input bits; the
    masks are propagated through the CNOTs (``Z_j -> Z_i Z_j``) instead of
    simulating amplitudes.
    """
    masks = [1 << k for k in range(rcs.n_q)]
    total = 0.0
    for k in range(rcs.n_q):
        if _parity(basis_state, masks[k]):
            total -= rcs.phi[k]
    for k in reversed(range(rcs.n_s)):
        i, j = rcs.pairs[k]
        masks[j] ^= masks[i]
        if _parity(basis_state, masks[j]):
            total -= rcs.phi_prime[k]
    return total % (2 * math.pi)


def circuit_phase_vector(rcs: RandomCircuitSpec, bit_reversed: bool = True) -> PhaseVector:
    """Momentum-space phases realised by the circuit (relative to p = 0).

    Inside the map circuit the register is bit-reversed, so momentum ``p``
    lives on basis state ``reverse(p)``.
    """
    N = 2**rcs.n_q
    states = bit_reverse_indices(rcs.n_q) if bit_reversed else np.arange(N)
    phi = np.array([circuit_phase_oracle(rcs, int(x)) for x in states])
    return PhaseVector(phi, symmetric=False)
