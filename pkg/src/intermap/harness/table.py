"""Result tables with fixed schemas, CSV output and companion gnuplot scripts."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

from .. import __version__

PROVENANCE = ("spec_hash", "seed", "code_version")

SCHEMAS = {
    "spacing": ("alpha", "N", "block", "s_bin_center", "density", "ks_sp", "ks_poisson", "ks_coe", "beta", "n_spacings"),
    "isrm_stats": (
        "variant", "phase_source", "alpha", "N", "s_bin_center", "density",
        "ks_sp", "ks_poisson", "ks_coe", "ks_cue", "beta", "n_spacings",
    ),
    "formfactor": (
        "alpha", "N", "n", "re_t", "im_t", "kappa_re", "kappa_im", "ff", "kappa_sq",
        "re_ts", "im_ts", "re_diff", "im_diff", "re_scatter", "im_scatter",
    ),
    "iterates": (
        "variant", "alpha", "N", "representation", "window_lo", "window_hi",
        "bin_center", "density", "stat_kind", "ks_porter_thomas",
    ),
    "ipr": ("variant", "alpha", "N", "series", "mean_xi", "std_xi", "count", "gamma", "residual"),
    "circuit_verify": (
        "n_q", "circuit", "n_s", "one_qubit", "two_qubit", "total",
        "expected_one", "expected_two", "expected_total", "counts_ok",
        "max_deviation", "qft_deviation", "passed",
    ),
}

SORT_KEYS = {
    "spacing": ("alpha", "N", "block", "s_bin_center"),
    "isrm_stats": ("variant", "alpha", "N", "s_bin_center"),
    "formfactor": ("alpha", "N", "n"),
    "iterates": ("stat_kind", "representation", "window_lo", "bin_center"),
    "ipr": ("series", "N"),
    "circuit_verify": ("circuit", "n_q", "n_s"),
}


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def _key(v):
    # mixed None/str/number columns sort deterministically
    if v is None:
        return (0, "")
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return (1, float(v))
    return (2, str(v))


@dataclass
class ResultTable:
    kind: str
    provenance: dict
    rows: list = field(default_factory=list)

    @property
    def columns(self) -> tuple:
        return SCHEMAS[self.kind] + PROVENANCE

    def add(self, **values) -> None:
        unknown = set(values) - set(self.columns)
        if unknown:
            raise KeyError(f"columns {sorted(unknown)} not in the {self.kind} schema")
        row = {c: values.get(c) for c in SCHEMAS[self.kind]}
        row.update({k: values.get(k, self.provenance.get(k)) for k in PROVENANCE})
        self.rows.append(row)

    def sorted_rows(self) -> list:
        keys = SORT_KEYS[self.kind]
        return sorted(self.rows, key=lambda r: tuple(_key(r[k]) for k in keys))

    def column(self, name: str) -> list:
        return [r[name] for r in self.sorted_rows()]

    def where(self, **match) -> list:
        return [r for r in self.sorted_rows() if all(r[k] == v for k, v in match.items())]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.sorted_rows():
            w.writerow([_fmt(r[c]) for c in self.columns])
        return buf.getvalue()

    def write(self, out_dir, stem: str | None = None) -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = stem or self.kind
        path = out_dir / f"{stem}.csv"
        path.write_text(self.to_csv())
        (out_dir / f"{stem}.gp").write_text(plot_script(self.kind, path.name))
        return path


_PLOTS = {
    "spacing": ("s", "P(s)", "s_bin_center", "density", "block"),
    "isrm_stats": ("s", "P(s)", "s_bin_center", "density", "variant"),
    "formfactor": ("n", "|Tr U^n|^2 / N", "n", None, "N"),
    "iterates": ("value", "density", "bin_center", "density", "stat_kind"),
    "ipr": ("N", "<xi>", "N", "mean_xi", "series"),
    "circuit_verify": ("n_q", "gates", "n_q", "total", "circuit"),
}


def plot_script(kind: str, csv_name: str) -> str:
    """Gnuplot commands that read ``csv_name`` by column header."""
    xl, yl, xc, yc, group = _PLOTS[kind]
    lines = [
        f"# companion plot for {csv_name}",
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{xl}'",
        f"set ylabel '{yl}'",
    ]
    if kind in ("ipr", "iterates"):
        lines.append("set logscale xy")
    if kind == "formfactor":
        lines.append(f"plot '{csv_name}' using (column('{xc}')):((column('re_t')**2+column('im_t')**2)/column('N')) with linespoints")
    else:
        lines.append(f"# rows are grouped by column '{group}'")
        lines.append(f"plot '{csv_name}' using (column('{xc}')):(column('{yc}')) with points")
    return "\n".join(lines) + "\n"


def provenance(spec_hash: str, seed: int) -> dict:
    return {"spec_hash": spec_hash, "seed": seed, "code_version": __version__}
