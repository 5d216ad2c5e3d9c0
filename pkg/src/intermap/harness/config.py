"""Experiment configuration: flat ``key = value`` files plus CLI overrides."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..circuit import COUNTING_MODES, OPTIMIZED, PAPER
from ..core import Alpha, MapSpec, PhaseModel, VARIANTS, DETERMINISTIC

EXPERIMENTS = ("spacing", "formfactor", "iterates", "ipr", "circuit_verify", "isrm_stats")

VARIANT_ALIASES = {
    "det": DETERMINISTIC,
    "deterministic": DETERMINISTIC,
    "isrm-sym": "isrm_symmetric",
    "isrm_symmetric": "isrm_symmetric",
    "isrm-nonsym": "isrm_nonsymmetric",
    "isrm_nonsymmetric": "isrm_nonsymmetric",
}
COUNTING_ALIASES = {"paper": PAPER, PAPER: PAPER, "optimized": OPTIMIZED}

# key -> one-line description, listed by ``--help``
KEYS = {
    "experiment": "one of " + ", ".join(EXPERIMENTS),
    "alpha": "map parameter: a/b, decimal, or 'golden'",
    "n_qubits": "qubit count k, or an inclusive range a..b",
    "variant": "det | isrm-sym | isrm-nonsym",
    "phase_model": "uniform | gaussian (random variants)",
    "sigma": "standard deviation of gaussian phases, radians",
    "ensemble": "realizations per point (random variants)",
    "seed": "master seed; realization k uses stream k",
    "window": "iterates averaged for kappa (default 3b)",
    "iterate_windows": "comma list of lo:hi half-open iterate windows",
    "column_iterate": "iterate n whose columns enter the IPR column series",
    "counting": "paper | optimized gate tally for the map circuit",
    "n_s": "comma list of CNOT counts for the randomization circuit",
    "phase_source": "ideal | circuit phases for isrm_stats",
    "scattering_shots": "shots per Pauli axis for the probe-qubit cross-check (0 = exact)",
    "out": "output directory",
    "workers": "worker processes",
    "cache_dir": "directory for the binary matrix cache (empty = off)",
}


class ConfigError(ValueError):
    pass


def _parse_range(text: str) -> tuple:
    text = str(text).strip()
    if ".." in text:
        lo, hi = text.split("..")
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ConfigError(f"empty qubit range {text!r}")
        return tuple(range(lo, hi + 1))
    return tuple(int(x) for x in text.split(","))


def _parse_windows(text: str) -> tuple:
    out = []
    for part in str(text).split(","):
        lo, hi = part.split(":")
        lo, hi = int(lo), int(hi)
        if hi <= lo or lo < 0:
            raise ConfigError(f"bad iterate window {part!r}")
        out.append((lo, hi))
    return tuple(out)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    alpha: Alpha = field(default_factory=lambda: Alpha.rational(1, 3))
    n_qubits: tuple = (8,)
    variant: str = DETERMINISTIC
    phase_model: str = "uniform"
    sigma: float = 2 * math.pi
    ensemble: int = 50
    seed: int = 12345
    window: Optional[int] = None
    iterate_windows: tuple = ((1000, 1100), (100000, 100101))
    column_iterate: int = 100000
    counting: str = PAPER
    n_s: tuple = (4, 8, 16)
    phase_source: str = "ideal"
    scattering_shots: int = 0
    out: Path = Path("results")
    workers: int = 1
    cache_dir: Optional[Path] = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}")
        if self.counting not in COUNTING_MODES:
            raise ConfigError(f"unknown counting mode {self.counting!r}")
        if self.phase_source not in ("ideal", "circuit"):
            raise ConfigError(f"unknown phase source {self.phase_source!r}")
        if not self.n_qubits or min(self.n_qubits) < 1 or max(self.n_qubits) > 14:
            raise ConfigError("n_qubits must lie in 1..14")
        if list(self.n_qubits) != sorted(set(self.n_qubits)):
            raise ConfigError("n_qubits must be strictly increasing")
        if self.ensemble < 1 or self.workers < 1:
            raise ConfigError("ensemble and workers must be positive")
        if self.window is not None and self.window < 1:
            raise ConfigError("window must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")
        if any(n < 1 for n in self.n_s):
            raise ConfigError("n_s values must be positive")
        try:
            PhaseModel(self.phase_model, self.sigma)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def spec(self, n_q: int, alpha: Optional[Alpha] = None, realization: int = 0) -> MapSpec:
        return MapSpec(
            n_q,
            alpha or self.alpha,
            self.variant,
            PhaseModel(self.phase_model, self.sigma),
            self.seed,
            realization,
        )

    def kappa_window(self) -> int:
        if self.window is not None:
            return self.window
        return 3 * self.alpha.b if self.alpha.is_rational else 9


_CONVERTERS = {
    "experiment": lambda v: str(v).strip().replace("-", "_"),
    "alpha": Alpha.parse,
    "n_qubits": _parse_range,
    "variant": lambda v: VARIANT_ALIASES[str(v).strip().lower()],
    "phase_model": lambda v: str(v).strip().lower(),
    "sigma": float,
    "ensemble": int,
    "seed": int,
    "window": lambda v: None if str(v).strip() in ("", "auto") else int(v),
    "iterate_windows": _parse_windows,
    "column_iterate": int,
    "counting": lambda v: COUNTING_ALIASES[str(v).strip().lower()],
    "n_s": lambda v: tuple(int(x) for x in str(v).split(",")),
    "phase_source": lambda v: str(v).strip().lower(),
    "scattering_shots": int,
    "out": Path,
    "workers": int,
    "cache_dir": lambda v: Path(v) if str(v).strip() else None,
}
assert set(_CONVERTERS) == set(KEYS)


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def build_config(raw: dict) -> ExperimentConfig:
    kwargs = {}
    for key, value in raw.items():
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}")
        if value is None:
            continue
        try:
            kwargs[key] = _CONVERTERS[key](value)
        except ConfigError:
            raise
        except (ValueError, KeyError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from None
    if "experiment" not in kwargs:
        raise ConfigError("no experiment given")
    return ExperimentConfig(**kwargs)


def replace(config: ExperimentConfig, **changes) -> ExperimentConfig:
    return dataclasses.replace(config, **changes)
