"""Figure rendering on top of the nsg CSV outputs.

Every figure kind is fed by a plain CSV table with a header row.  The
renderer is deliberately dumb about provenance: any file with the right
columns works, whether it came from ``nsg probe`` or was written by hand.
Output is restricted to vector formats and rendered deterministically so
that re-running a figure over unchanged data yields byte-identical files.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from matplotlib.figure import Figure

#: columns that must be present in the input table, per figure kind
REQUIRED_COLUMNS: dict[str, tuple[str, ...]] = {
    "radius_scaling": ("t", "rad_op"),
    "norms": ("t",),
    "fn_growth": ("n", "value"),
    "kahane": ("n", "ratio"),
}

#: (xscale, yscale) applied when the spec does not override them
DEFAULT_SCALES: dict[str, tuple[str, str]] = {
    "radius_scaling": ("log", "log"),
    "norms": ("linear", "linear"),
    "fn_growth": ("linear", "log"),
    "kahane": ("linear", "linear"),
}

FIGURE_KINDS: tuple[str, ...] = tuple(sorted(REQUIRED_COLUMNS))

#: suffix -> savefig metadata that strips every timestamp the backend
#: would otherwise embed (dates are the only run-dependent bytes)
_VECTOR_METADATA: dict[str, dict[str, None]] = {
    ".svg": {"Date": None},
    ".pdf": {"CreationDate": None},
}

#: fixed rcParams so identical input produces identical bytes: the hash
#: salt pins SVG element ids, and ``fonttype: none`` keeps label text as
#: text elements instead of font-dependent glyph paths
_STABLE_RC = {
    "svg.hashsalt": "plotkit",
    "svg.fonttype": "none",
    "pdf.compression": 0,
}


class RenderError(ValueError):
    """Raised when a figure cannot be produced from the given inputs."""


@dataclass(frozen=True)
class FigureSpec:
    """Everything needed to turn one CSV table into one figure.

    ``xscale``/``yscale`` default per figure kind when left as ``None``.
    """

    kind: str
    csv_path: Path
    out_path: Path
    xscale: str | None = None
    yscale: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in REQUIRED_COLUMNS:
            raise RenderError(
                f"unknown figure kind {self.kind!r}; expected one of {', '.join(FIGURE_KINDS)}"
            )
        for scale in (self.xscale, self.yscale):
            if scale not in (None, "log", "linear"):
                raise RenderError(f"axis scale must be 'log' or 'linear', got {scale!r}")

    @property
    def scales(self) -> tuple[str, str]:
        default_x, default_y = DEFAULT_SCALES[self.kind]
        return (self.xscale or default_x, self.yscale or default_y)


def _read_table(path: Path) -> tuple[list[str], list[dict[str, str]]]:
    """Read a CSV file into (header, rows), rejecting empty inputs."""
    try:
        with open(path, newline="") as handle:
            reader = csv.reader(handle)
            try:
                header = next(reader)
            except StopIteration:
                raise RenderError(f"empty CSV: {path} has no header row") from None
            rows = [dict(zip(header, line)) for line in reader if line]
    except OSError as exc:
        raise RenderError(f"cannot read {path}: {exc.strerror}") from exc
    if not rows:
        raise RenderError(f"empty CSV: {path} has a header but no data rows")
    return header, rows


def _column(rows: list[dict[str, str]], name: str) -> list[float]:
    """Extract one column as floats, skipping blank cells."""
    values = []
    for row in rows:
        cell = row.get(name, "").strip()
        if cell:
            values.append(float(cell))
    return values


def _check_columns(spec: FigureSpec, header: list[str]) -> None:
    for name in REQUIRED_COLUMNS[spec.kind]:
        if name not in header:
            raise RenderError(
                f"{spec.csv_path} is missing required column '{name}' "
                f"for figure kind {spec.kind!r}"
            )


def _draw_radius_scaling(ax, rows: list[dict[str, str]]) -> None:
    """Measured radius against the two candidate short-time laws.

    Both reference curves are pinned to the latest usable sample rather
    than fitted across the run, so the eye compares shapes, not offsets:
    the prefactor is chosen to make each curve pass through that sample
    exactly.
    """
    pairs = [
        (float(r["t"]), float(r["rad_op"]))
        for r in rows
        if r.get("t", "").strip() and r.get("rad_op", "").strip()
    ]
    pairs = [(t, rad) for t, rad in pairs if t > 0.0 and rad > 0.0]
    if not pairs:
        raise RenderError("radius_scaling needs at least one row with t > 0 and rad_op > 0")
    pairs.sort()
    times = [t for t, _ in pairs]
    radii = [rad for _, rad in pairs]
    ax.plot(times, radii, "o-", color="tab:blue", label="measured radius")

    t_anchor, rad_anchor = pairs[-1]
    c_sqrt = rad_anchor / math.sqrt(t_anchor)
    ax.plot(
        times,
        [c_sqrt * math.sqrt(t) for t in times],
        "--",
        color="tab:orange",
        label="c sqrt(t)",
    )

    # the log-compensated law only makes sense for t < 1; anchor it at
    # the latest such sample and draw it over the same range
    log_pairs = [(t, rad) for t, rad in pairs if t < 1.0]
    if log_pairs:
        t_anchor, rad_anchor = log_pairs[-1]
        c_log = rad_anchor / math.sqrt(t_anchor * math.log(1.0 / t_anchor))
        log_times = [t for t, _ in log_pairs]
        ax.plot(
            log_times,
            [c_log * math.sqrt(t * math.log(1.0 / t)) for t in log_times],
            ":",
            color="tab:green",
            label="c sqrt(t log(1/t))",
        )

    ax.set_xlabel("t")
    ax.set_ylabel("radius")
    ax.set_title("analyticity radius growth")


def _draw_norms(ax, header: list[str], rows: list[dict[str, str]]) -> None:
    """Every non-time column becomes one labelled series over t."""
    series_names = [name for name in header if name != "t"]
    if not series_names:
        raise RenderError("norms needs at least one value column besides 't'")
    drew_any = False
    for name in series_names:
        points = [
            (float(r["t"]), float(r[name]))
            for r in rows
            if r.get("t", "").strip() and r.get(name, "").strip()
        ]
        if not points:
            continue
        points.sort()
        ax.plot([t for t, _ in points], [v for _, v in points], "o-", label=name)
        drew_any = True
    if not drew_any:
        raise RenderError("norms found no numeric data in any value column")
    ax.set_xlabel("t")
    ax.set_ylabel("norm")
    ax.set_title("norm history")


def _draw_fn_growth(ax, rows: list[dict[str, str]]) -> None:
    points = sorted(
        (float(r["n"]), float(r["value"]))
        for r in rows
        if r.get("n", "").strip() and r.get("value", "").strip()
    )
    if not points:
        raise RenderError("fn_growth needs rows with both 'n' and 'value' populated")
    ax.plot([n for n, _ in points], [v for _, v in points], "s-", color="tab:purple",
            label="sup-norm of the n-th time derivative")
    ax.set_xlabel("derivative order n")
    ax.set_ylabel("value")
    ax.set_title("derivative growth")


def _draw_kahane(ax, rows: list[dict[str, str]]) -> None:
    points = sorted(
        (float(r["n"]), float(r["ratio"]))
        for r in rows
        if r.get("n", "").strip() and r.get("ratio", "").strip()
    )
    if not points:
        raise RenderError("kahane needs rows with both 'n' and 'ratio' populated")
    ax.plot([n for n, _ in points], [v for _, v in points], "-", color="tab:blue",
            label="moment ratio")
    ax.axhline(4.0, linestyle="--", color="tab:red", label="y = 4")
    ax.set_xlabel("n")
    ax.set_ylabel("ratio")
    ax.set_title("sign-pattern moment ratio")


def render(spec: FigureSpec) -> Path:
    """Render one figure and return the written path.

    Raises :class:`RenderError` for unusable inputs: an unwritable or
    non-vector output suffix, an empty table, or a table missing one of
    the columns the figure kind requires.
    """
    suffix = spec.out_path.suffix.lower()
    if suffix not in _VECTOR_METADATA:
        raise RenderError(
            f"output must be a vector image (.svg or .pdf), got '{suffix or spec.out_path.name}'"
        )

    header, rows = _read_table(spec.csv_path)
    _check_columns(spec, header)

    fig = Figure(figsize=(6.4, 4.4))
    ax = fig.add_subplot()
    if spec.kind == "radius_scaling":
        _draw_radius_scaling(ax, rows)
    elif spec.kind == "norms":
        _draw_norms(ax, header, rows)
    elif spec.kind == "fn_growth":
        _draw_fn_growth(ax, rows)
    else:
        _draw_kahane(ax, rows)

    xscale, yscale = spec.scales
    ax.set_xscale(xscale)
    ax.set_yscale(yscale)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()

    with _stable_rc():
        fig.savefig(spec.out_path, metadata=dict(_VECTOR_METADATA[suffix]))
    return spec.out_path


def _stable_rc():
    import matplotlib

    return matplotlib.rc_context(_STABLE_RC)
