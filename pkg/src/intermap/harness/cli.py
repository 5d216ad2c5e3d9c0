"""``intermap`` command line.

Exit codes: 0 success, 2 configuration error, 3 failed numerical check.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..circuit import build_isrm_circuit, build_map_circuit, emit_gatelist
from ..core import DETERMINISTIC, MapSpec
from ..isrm import build_random_phase_circuit, random_circuit_spec
from ..map_operator import SymmetryError
from ..spectral import EigenError
from .config import EXPERIMENTS, KEYS, ConfigError, build_config, read_config_file
from .experiments import NumericalCheckError, failed_checks, run

EXIT_CONFIG = 2
EXIT_NUMERIC = 3

# config keys that also have a dedicated flag
_FLAGS = ("alpha", "n_qubits", "variant", "ensemble", "seed", "window", "counting", "out", "workers")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


def _key_help() -> str:
    width = max(map(len, KEYS))
    lines = ["config file keys (key = value, '#' comments):"]
    lines += [f"  {k.ljust(width)}  {v}" for k, v in KEYS.items()]
    return "\n".join(lines)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="intermap",
        description="Quantum maps with intermediate spectral statistics: experiments and circuits.",
        epilog=_key_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("experiment", choices=[e.replace("_", "-") for e in EXPERIMENTS] + list(EXPERIMENTS) + ["circuit"])
    parser.add_argument("--config", type=Path, help="flat key = value file; flags override it")
    parser.add_argument("--alpha", help="a/b, decimal, or golden")
    parser.add_argument("--n-qubits", "--n-qubits-range", dest="n_qubits", help="k or a..b")
    parser.add_argument("--variant", help="det | isrm-sym | isrm-nonsym")
    parser.add_argument("--ensemble", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--window", type=int, help="kappa averaging window")
    parser.add_argument("--counting", help="paper | optimized")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--workers", type=int)
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any config key (repeatable)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def _emit_circuit(config) -> str:
    n_q = config.n_qubits[-1]
    if config.variant == DETERMINISTIC:
        return emit_gatelist(build_map_circuit(MapSpec(n_q, config.alpha), config.counting))
    rng = config.spec(n_q).rng()
    phase = build_random_phase_circuit(random_circuit_spec(n_q, config.n_s[0], rng))
    return emit_gatelist(build_isrm_circuit(config.alpha, phase))


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    experiment = args.experiment.replace("-", "_")
    try:
        raw = read_config_file(args.config) if args.config else {}
        for key in _FLAGS:
            value = getattr(args, key)
            if value is not None:
                raw[key] = value
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            k, v = item.split("=", 1)
            k = k.strip().replace("-", "_")
            if k not in KEYS:
                raise ConfigError(f"unknown key {k!r}")
            raw[k] = v
        raw["experiment"] = "circuit_verify" if experiment == "circuit" else experiment
        config = build_config(raw)
    except (ConfigError, OSError) as exc:
        print(f"intermap: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if experiment == "circuit":
            text = _emit_circuit(config)
            if args.out:
                config.out.mkdir(parents=True, exist_ok=True)
                (config.out / "circuit.txt").write_text(text)
            else:
                sys.stdout.write(text)
            return 0
        table = run(config)
    except ConfigError as exc:
        print(f"intermap: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SymmetryError, EigenError, NumericalCheckError) as exc:
        print(f"intermap: numerical check failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    path = table.write(config.out)
    print(path)
    failures = failed_checks(table)
    if failures:
        for r in failures:
            print(f"intermap: check failed: {r}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
