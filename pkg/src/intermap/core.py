"""Shared types: the map parameter, map recipes and reproducible RNG streams."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

DETERMINISTIC = "deterministic"
ISRM_NONSYMMETRIC = "isrm_nonsymmetric"
ISRM_SYMMETRIC = "isrm_symmetric"
VARIANTS = (DETERMINISTIC, ISRM_NONSYMMETRIC, ISRM_SYMMETRIC)

GOLDEN = (1 + math.sqrt(5)) / 2

UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class Alpha:
    """Map parameter, either an exact fraction ``a/b`` or a float.

    Rational values are stored reduced. Only ``value() mod 1`` enters any
    operator, but ``a`` and ``b`` are kept as given (after reduction) so that
    ``4/3`` and ``1/3`` remain distinguishable for bookkeeping.
    """

    a: Optional[int] = None
    b: Optional[int] = None
    real: Optional[float] = None

    def __post_init__(self):
        if self.real is None:
            if self.a is None or self.b is None:
                raise ValueError("rational Alpha needs both a and b")
            a, b = int(self.a), int(self.b)
            if b < 1:
                raise ValueError(f"denominator must be positive, got {b}")
            g = math.gcd(a, b)
            object.__setattr__(self, "a", a // g)
            object.__setattr__(self, "b", b // g)
        elif self.a is not None or self.b is not None:
            raise ValueError("Alpha is either rational or real, not both")

    @classmethod
    def rational(cls, a: int, b: int) -> "Alpha":
        return cls(a=a, b=b)

    @classmethod
    def from_float(cls, value: float) -> "Alpha":
        return cls(real=float(value))

    @classmethod
    def parse(cls, text: Union[str, float, "Alpha"]) -> "Alpha":
        """Accept ``"a/b"``, ``"golden"`` or a decimal literal."""
        if isinstance(text, Alpha):
            return text
        if isinstance(text, (int, float)):
            return cls.from_float(text)
        text = text.strip()
        if text.lower() in ("golden", "phi"):
            return cls.from_float(GOLDEN)
        if "/" in text:
            a, b = text.split("/")
            return cls.rational(int(a), int(b))
        return cls.from_float(float(text))

    @property
    def is_rational(self) -> bool:
        return self.real is None

    def fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("irrational alpha has no exact fraction")
        return Fraction(self.a, self.b)

    def value(self) -> float:
        """Fractional part in [0, 1)."""
        if self.is_rational:
            return (self.a % self.b) / self.b
        return self.real % 1.0

    def complement(self) -> "Alpha":
        """``1 - alpha``, exact when rational."""
        if self.is_rational:
            f = 1 - self.fraction()
            return Alpha.rational(f.numerator, f.denominator)
        return Alpha.from_float(1.0 - self.real)

    def n_alpha_integer(self, N: int) -> Optional[int]:
        """``N*alpha mod N`` when it is an integer, else None."""
        if not self.is_rational:
            return None
        if (N * self.a) % self.b:
            return None
        return (N * self.a // self.b) % N

    def encode(self) -> str:
        if self.is_rational:
            return f"{self.a}/{self.b}"
        return repr(self.real)

    def __str__(self) -> str:
        return self.encode()


def alpha_value(alpha: Alpha) -> float:
    return alpha.value()


def beta_condition(alpha: Alpha, N: int) -> bool:
    """True when ``a N = +-1 (mod b)`` for rational alpha."""
    if not alpha.is_rational or alpha.b < 2:
        return False
    r = (alpha.a * N) % alpha.b
    return r == 1 or r == alpha.b - 1


def predicted_beta(alpha: Alpha, N: int, variant: str = DETERMINISTIC) -> Optional[float]:
    """Conjectured semi-Poisson exponent, or None when nothing is predicted."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if not beta_condition(alpha, N):
        return None
    b = alpha.b
    if variant == ISRM_NONSYMMETRIC:
        return float(b - 1)
    return b / 2 - 1


@dataclass(frozen=True)
class PhaseModel:
    kind: str = "uniform"
    sigma: float = 2 * math.pi

    def __post_init__(self):
        if self.kind not in ("uniform", "gaussian"):
            raise ValueError(f"unknown phase model {self.kind!r}")
        # sigma = 0 is allowed: all phases vanish
        if not self.sigma >= 0:
            raise ValueError("sigma must be non-negative")


@dataclass(frozen=True)
class MapSpec:
    """Recipe for one unitary of the family.

    ``realization`` selects the RNG stream inside an ensemble seeded by
    ``seed``; both are ignored by the deterministic variant.
    """

    n_q: int
    alpha: Alpha
    variant: str = DETERMINISTIC
    phase_model: PhaseModel = field(default_factory=PhaseModel)
    seed: int = 0
    realization: int = 0

    def __post_init__(self):
        if not isinstance(self.alpha, Alpha):
            object.__setattr__(self, "alpha", Alpha.parse(self.alpha))
        if self.n_q < 1:
            raise ValueError("n_q must be >= 1")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")

    @property
    def N(self) -> int:
        return 2**self.n_q

    @property
    def is_random(self) -> bool:
        return self.variant != DETERMINISTIC

    @property
    def symmetric(self) -> bool:
        return self.variant == ISRM_SYMMETRIC

    def canonical(self) -> str:
        parts = [f"n_q={self.n_q}", f"alpha={self.alpha.encode()}", f"variant={self.variant}"]
        if self.is_random:
            parts += [
                f"phase_model={self.phase_model.kind}:{self.phase_model.sigma!r}",
                f"seed={self.seed}",
                f"realization={self.realization}",
            ]
        return ";".join(parts)

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]

    def rng(self) -> np.random.Generator:
        return RngStream(self.seed, self.realization).generator()


@dataclass(frozen=True)
class RngStream:
    """Seed-split random stream: equal (seed, index) pairs replay exactly."""

    master_seed: int
    stream_index: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.PCG64(ss))


def is_unitary(U: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return unitarity_residual(U) < tol


def unitarity_residual(U: np.ndarray) -> float:
    n = U.shape[0]
    return float(np.max(np.abs(U.conj().T @ U - np.eye(n))))


def check_power_of_two(n: int) -> int:
    """Return log2(n), raising for anything that is not a power of two."""
    if n < 1 or n & (n - 1):
        raise ValueError(f"length {n} is not a power of two")
    return n.bit_length() - 1
