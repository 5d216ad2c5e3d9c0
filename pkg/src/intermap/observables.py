"""Vector statistics: intensities, Meyer-Wallach entanglement, IPR, Haar references."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import check_power_of_two

NORM_TOL = 1e-8


@dataclass(frozen=True)
class IntensitySample:
    y: np.ndarray
    representation: str
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ScalingSeries:
    N: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    count: np.ndarray
    gamma: float
    residual: float


def _check_normalized(psi: np.ndarray) -> None:
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > NORM_TOL:
        raise ValueError(f"state is not normalized (norm {norm:.12f})")


def single_qubit_purities(psi: np.ndarray, n_q: int) -> np.ndarray:
    """``Tr rho_k^2`` for every qubit k (qubit 0 is the lowest bit)."""
    out = np.empty(n_q)
    for k in range(n_q):
        v = psi.reshape(-1, 2, 1 << k)
        a, b = v[:, 0, :], v[:, 1, :]
        r00 = np.vdot(a, a).real
        r11 = np.vdot(b, b).real
        r01 = np.vdot(b, a)
        # dividing by the trace absorbs rounding in the state norm
        out[k] = (r00**2 + r11**2 + 2 * abs(r01) ** 2) / (r00 + r11) ** 2
    return out


def meyer_wallach_q(psi: np.ndarray, n_q: int | None = None) -> float:
    psi = np.asarray(psi, dtype=complex)
    n = check_power_of_two(psi.shape[0])
    if n_q is not None and n_q != n:
        raise ValueError(f"state of length {psi.shape[0]} is not an {n_q}-qubit state")
    _check_normalized(psi)
    return float(2 - 2 / n * single_qubit_purities(psi, n).sum())


def ipr(psi: np.ndarray) -> float:
    w = np.abs(np.asarray(psi)) ** 2
    s2 = w.sum()
    if s2 == 0:
        raise ValueError("IPR of the zero vector")
    return float(s2**2 / np.sum(w * w))


def ipr_columns(M: np.ndarray) -> np.ndarray:
    """IPR of every column of ``M``."""
    w = np.abs(M) ** 2
    return w.sum(axis=0) ** 2 / np.sum(w * w, axis=0)


def haar_state(N: int, rng=None) -> np.ndarray:
    if rng is None:
        rng = np.random.default_rng()
    z = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    return z / np.linalg.norm(z)


def haar_mean_q(N: int) -> float:
    """Exact Haar average of Q: ``(N - 2) / (N + 1)``."""
    return (N - 2) / (N + 1)


def column_intensities(columns: np.ndarray, representation: str, **meta) -> IntensitySample:
    """Pool ``y = N |x|^2`` over all columns of ``columns`` (shape ``(N, m)``)."""
    columns = np.asarray(columns)
    N = columns.shape[0]
    return IntensitySample((N * np.abs(columns) ** 2).ravel(), representation, dict(meta))


def porter_thomas_cdf(y):
    return -np.expm1(-np.asarray(y, dtype=float))


def fit_power_law(N, mean, std=None, count=None) -> ScalingSeries:
    """Least-squares slope of ``log2 <xi>`` against ``log2 N``."""
    N = np.asarray(N, dtype=float)
    mean = np.asarray(mean, dtype=float)
    if N.size < 3:
        raise ValueError("need at least three points for a scaling fit")
    if np.any(np.diff(N) <= 0):
        raise ValueError("N must be strictly increasing")
    x, y = np.log2(N), np.log2(mean)
    A = np.vstack([x, np.ones_like(x)]).T
    (gamma, c), *_ = np.linalg.lstsq(A, y, rcond=None)
    residual = float(np.sqrt(np.mean((A @ [gamma, c] - y) ** 2)))
    std = np.zeros_like(mean) if std is None else np.asarray(std, dtype=float)
    count = np.ones_like(mean, dtype=int) if count is None else np.asarray(count)
    return ScalingSeries(N, mean, std, count, float(gamma), residual)


def log_histogram(values, lo: float = 1e-4, hi: float = 1e2, bins: int = 60):
    """Density on logarithmic bins, normalized to unit integral over the binned range."""
    edges = np.logspace(math.log10(lo), math.log10(hi), bins + 1)
    counts, _ = np.histogram(values, bins=edges)
    total = counts.sum()
    density = counts / (total * np.diff(edges)) if total else np.zeros(bins)
    centers = np.sqrt(edges[1:] * edges[:-1])
    return centers, density


def linear_histogram(values, lo: float = 0.0, hi: float = 1.0, bins: int = 50):
    edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(values, bins=edges)
    total = counts.sum()
    density = counts / (total * np.diff(edges)) if total else np.zeros(bins)
    return (edges[1:] + edges[:-1]) / 2, density


def meyer_wallach_columns(M: np.ndarray, n_q: int | None = None) -> np.ndarray:
    """Q of every column of ``M`` (columns must be normalized)."""
    M = np.asarray(M, dtype=complex)
    n = check_power_of_two(M.shape[0])
    if n_q is not None and n_q != n:
        raise ValueError(f"{M.shape[0]} rows do not form an {n_q}-qubit register")
    norms = np.sum(np.abs(M) ** 2, axis=0)
    if np.any(np.abs(norms - 1) > NORM_TOL):
        raise ValueError("columns are not normalized")
    total = np.zeros(M.shape[1])
    for k in range(n):
        v = M.reshape(-1, 2, 1 << k, M.shape[1])
        a, b = v[:, 0], v[:, 1]
        r00 = np.sum(np.abs(a) ** 2, axis=(0, 1))
        r11 = np.sum(np.abs(b) ** 2, axis=(0, 1))
        r01 = np.sum(a * b.conj(), axis=(0, 1))
        total += (r00**2 + r11**2 + 2 * np.abs(r01) ** 2) / (r00 + r11) ** 2
    return 2 - 2 / n * total
