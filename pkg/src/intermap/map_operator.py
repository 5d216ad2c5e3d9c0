"""The deterministic map as a dense matrix, its fast action and its parity symmetry.

Conventions
-----------
Two representations are used, tagged by the strings ``"p"`` (momentum) and
``"q"`` (position, the computational basis of the circuit). They are related
by the unitary DFT ``W`` with kernel ``<p|q> = exp(+2i pi p q / N) / sqrt(N)``,
so that ``psi_p = W psi_q``. With this sign the geometric series of
``W diag(exp(2i pi alpha q)) W^dagger`` has denominator
``1 - exp(2i pi (p - p' + N alpha) / N)``.

The operator is ``U = exp(-2i pi p^2/N) exp(2i pi alpha q)``: the alpha kick
acts first, then the kinetic phase, hence in momentum space
``U_p = D_kin W D_alpha W^dagger`` and in position space
``U_q = W^dagger D_kin W D_alpha``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import circulant

from .core import Alpha, MapSpec, DETERMINISTIC, check_power_of_two, unitarity_residual

MOMENTUM = "p"
POSITION = "q"
REPRESENTATIONS = (MOMENTUM, POSITION)

MAX_DENSE_QUBITS = 12
DEGENERACY_TOL = 1e-9


class SymmetryError(ValueError):
    """U does not commute with the parity operator S."""

    def __init__(self, norm: float):
        super().__init__(f"||US - SU||_max = {norm:.3e} exceeds tolerance")
        self.norm = norm


def _check_rep(rep: str) -> str:
    if rep not in REPRESENTATIONS:
        raise ValueError(f"representation must be 'p' or 'q', got {rep!r}")
    return rep


def classical_step(p: float, q: float, alpha) -> tuple[float, float]:
    a = Alpha.parse(alpha).value() if not isinstance(alpha, (int, float)) else alpha
    p_bar = (p + a) % 1.0
    q_bar = (q + 2 * p_bar) % 1.0
    return p_bar, q_bar


def fourier_matrix(N: int) -> np.ndarray:
    """Dense W with ``W[p, q] = exp(2i pi p q / N) / sqrt(N)``."""
    k = np.arange(N)
    return np.exp(2j * np.pi * np.outer(k, k) / N) / np.sqrt(N)


def kinetic_phases(N: int) -> np.ndarray:
    p = np.arange(N)
    # reduce p^2 mod N first; keeps the angle small and the phase exact for large N
    return -2 * np.pi * ((p * p) % N) / N


def alpha_phases(N: int, alpha: Alpha) -> np.ndarray:
    q = np.arange(N)
    if alpha.is_rational:
        return 2 * np.pi * ((alpha.a * q) % alpha.b) / alpha.b
    return 2 * np.pi * ((alpha.value() * q) % 1.0)


def q_to_p(psi_q: np.ndarray) -> np.ndarray:
    """``W psi`` along axis 0."""
    N = psi_q.shape[0]
    return np.fft.ifft(psi_q, axis=0) * np.sqrt(N)


def p_to_q(psi_p: np.ndarray) -> np.ndarray:
    """``W^dagger psi`` along axis 0."""
    N = psi_p.shape[0]
    return np.fft.fft(psi_p, axis=0) / np.sqrt(N)


def to_position(U_p: np.ndarray) -> np.ndarray:
    """``W^dagger U W`` for an operator given in momentum space."""
    return p_to_q(p_to_q(U_p).conj().T).conj().T


def to_momentum(U_q: np.ndarray) -> np.ndarray:
    """``W U W^dagger`` for an operator given in position space."""
    return q_to_p(q_to_p(U_q).conj().T).conj().T


def shift_operator(N: int, alpha: Alpha) -> np.ndarray:
    """``W D_alpha W^dagger`` in momentum space (a circulant matrix)."""
    c = np.fft.ifft(np.exp(1j * alpha_phases(N, alpha)))
    return circulant(c)


def unitary_from_phases(kinetic: np.ndarray, alpha: Alpha, rep: str = MOMENTUM) -> np.ndarray:
    """``diag(exp(i kinetic)) W D_alpha W^dagger``, optionally moved to position space."""
    _check_rep(rep)
    N = kinetic.shape[0]
    U = np.exp(1j * kinetic)[:, None] * shift_operator(N, alpha)
    return U if rep == MOMENTUM else to_position(U)


def build_unitary(spec: MapSpec, rep: str = MOMENTUM, max_qubits: int = MAX_DENSE_QUBITS) -> np.ndarray:
    if spec.variant != DETERMINISTIC:
        raise ValueError("build_unitary handles the deterministic map; use isrm for random variants")
    if spec.n_q > max_qubits:
        raise MemoryError(f"dense {spec.N}x{spec.N} matrix exceeds the n_q <= {max_qubits} cap")
    return unitary_from_phases(kinetic_phases(spec.N), spec.alpha, rep)


def closed_form_element(p: int, pp: int, spec: MapSpec) -> complex:
    """Geometric-series value of ``<p|U|p'>``.

    The kinetic phase carries the row index ``p``, consistent with the
    operator ordering above; a ``1/N`` prefactor makes the matrix unitary.
    """
    N = spec.N
    if not (0 <= p < N and 0 <= pp < N):
        raise IndexError("momentum index out of range")
    a = spec.alpha.value()
    kin = np.exp(-2j * np.pi * ((p * p) % N) / N)
    denom = 1 - np.exp(2j * np.pi * (p - pp + N * a) / N)
    if abs(denom) > DEGENERACY_TOL:
        num = 1 - np.exp(2j * np.pi * ((N * a) % 1.0))
        return complex(kin * num / (N * denom))
    shift = int(round(N * a))
    return complex(kin) if (p - pp + shift) % N == 0 else 0j


def closed_form_matrix(spec: MapSpec) -> np.ndarray:
    N = spec.N
    return np.array([[closed_form_element(p, pp, spec) for pp in range(N)] for p in range(N)])


def apply_map(psi: np.ndarray, spec: MapSpec, kinetic: np.ndarray | None = None) -> np.ndarray:
    """One step ``W^dagger D_kin W D_alpha psi`` in position space, O(N log N).

    ``kinetic`` overrides the kinetic phases (used for random-phase variants).
    """
    psi = np.asarray(psi, dtype=complex)
    N = psi.shape[0]
    check_power_of_two(N)
    if N != spec.N:
        raise ValueError(f"state length {N} does not match N={spec.N}")
    if kinetic is None:
        kinetic = kinetic_phases(N)
    phi = np.exp(1j * alpha_phases(N, spec.alpha)) * psi
    phi = np.exp(1j * kinetic) * q_to_p(phi)
    return p_to_q(phi)


def apply_map_inverse(psi: np.ndarray, spec: MapSpec, kinetic: np.ndarray | None = None) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    N = psi.shape[0]
    if kinetic is None:
        kinetic = kinetic_phases(N)
    phi = np.exp(-1j * kinetic) * q_to_p(psi)
    return np.exp(-1j * alpha_phases(N, spec.alpha)) * p_to_q(phi)


def build_symmetry_S(N: int) -> np.ndarray:
    """Parity ``diag((-1)^q)`` in position space."""
    return np.diag((-1.0) ** np.arange(N)).astype(complex)


def commutator_norm(U_q: np.ndarray) -> float:
    s = (-1.0) ** np.arange(U_q.shape[0])
    # (US - SU)_{qq'} = U_{qq'} (s_q' - s_q)
    return float(np.max(np.abs(U_q * (s[None, :] - s[:, None]))))


@dataclass(frozen=True)
class SymmetryBlocks:
    even: np.ndarray
    odd: np.ndarray
    even_index: np.ndarray
    odd_index: np.ndarray

    def __iter__(self):
        yield "even", self.even
        yield "odd", self.odd


def desymmetrize(U_q: np.ndarray, tol: float = 1e-8) -> SymmetryBlocks:
    """Split a position-space operator commuting with S into parity blocks."""
    N = U_q.shape[0]
    if N % 4:
        raise ValueError(f"parity symmetry needs N = 0 mod 4, got N={N}")
    norm = commutator_norm(U_q)
    if norm > tol:
        raise SymmetryError(norm)
    even = np.arange(0, N, 2)
    odd = np.arange(1, N, 2)
    return SymmetryBlocks(U_q[np.ix_(even, even)], U_q[np.ix_(odd, odd)], even, odd)


def matrix_power_apply(eig, n: int, column: int | None = None) -> np.ndarray:
    """Column ``column`` of ``U^n`` (or all of ``U^n``) from an eigensystem.

    ``eig`` needs ``phases`` and orthonormal ``vectors``.
    """
    V = eig.vectors
    ph = np.exp(1j * n * np.asarray(eig.phases))
    if column is None:
        return (V * ph) @ V.conj().T
    return V @ (ph * V[column].conj())


def block_residuals(blocks: SymmetryBlocks) -> tuple[float, float]:
    return unitarity_residual(blocks.even), unitarity_residual(blocks.odd)
