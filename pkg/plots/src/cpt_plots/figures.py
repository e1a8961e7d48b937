"""Render the simulator's CSV tables as publication-style figures.

The only coupling to the simulator is the CSV files themselves: a
``# config:`` comment line, a header row, then numeric rows. Each
figure number has a frozen schema, validated against the header before
anything is drawn. Output format follows the file extension (SVG or
PNG), and rendering is deterministic: a fixed style, a fixed SVG hash
salt, and no timestamps, so re-rendering an identical CSV reproduces
the image byte for byte.

Defaults: linear axes everywhere; the decibel scale is available for
figures 3 and 4 (``scale="db"``); figure 4 draws the horizontal
separability bound unless ``separability_line=False``.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = [
    "SCHEMAS",
    "FigureSpec",
    "SchemaError",
    "read_table",
    "validate_columns",
    "render",
    "render_figure",
]

SCHEMAS = {
    1: ("delta", "re_r", "im_r", "stable"),
    3: ("omega", "s_a1", "s_a2", "s_ax", "s_ay"),
    4: ("omega", "e_a", "e_a_db", "e_b", "e_b_db"),
    5: ("phi", "var_analytic", "var_c1000", "var_c100"),
}

_DB_CAPABLE = (3, 4)

_STYLE = {
    "svg.hashsalt": "cpt-plots",
    "svg.fonttype": "none",
    "figure.dpi": 100.0,
    "savefig.dpi": 150.0,
    "font.size": 10.0,
    "axes.grid": True,
    "grid.alpha": 0.25,
    "legend.framealpha": 0.9,
    "path.simplify": False,
}


class SchemaError(ValueError):
    """The CSV header does not match the selected figure's schema."""


@dataclass(frozen=True)
class FigureSpec:
    """One rendering request: which figure, from which CSV, to which file."""

    which: int
    csv_path: str
    out_path: str
    scale: str = "linear"
    separability_line: bool = True

    def __post_init__(self):
        if self.which not in SCHEMAS:
            raise SchemaError(
                f"figure must be one of {sorted(SCHEMAS)}, got {self.which}")
        if self.scale not in ("linear", "db"):
            raise SchemaError(f"scale must be 'linear' or 'db', got {self.scale!r}")
        if self.scale == "db" and self.which not in _DB_CAPABLE:
            raise SchemaError(
                f"the decibel scale applies to figures {_DB_CAPABLE}, "
                f"not figure {self.which}")
        if not str(self.out_path).lower().endswith((".svg", ".png")):
            raise SchemaError(
                f"output must end in .svg or .png, got {self.out_path!r}")


def read_table(path):
    """Parse a simulator CSV into (config, columns, data).

    ``config`` maps the keys of the leading ``# config:`` comment to
    their string values ({} when the line is absent), ``columns`` is
    the header row, ``data`` a float array of shape (rows, columns).
    """
    config = {}
    header = None
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.startswith("config:"):
                    for token in body[len("config:"):].split():
                        key, _, value = token.partition("=")
                        config[key] = value
                continue
            if header is None:
                header = [c.strip() for c in line.split(",")]
                continue
            rows.append([float(v) for v in line.split(",")])
    if header is None:
        raise SchemaError(f"{path} has no header row")
    data = np.array(rows, dtype=float)
    if data.ndim != 2 or data.shape[1] != len(header):
        raise SchemaError(
            f"{path}: rows do not match the {len(header)}-column header")
    return config, header, data


def validate_columns(which, columns):
    """Raise SchemaError with a column diff unless the header matches."""
    expected = SCHEMAS[which]
    got = tuple(columns)
    if got == expected:
        return
    missing = [c for c in expected if c not in got]
    unexpected = [c for c in got if c not in expected]
    parts = [f"figure {which} expects columns {','.join(expected)}",
             f"got {','.join(got)}"]
    if missing:
        parts.append(f"missing: {','.join(missing)}")
    if unexpected:
        parts.append(f"unexpected: {','.join(unexpected)}")
    if not missing and not unexpected:
        parts.append("column order differs")
    raise SchemaError("; ".join(parts))


def _column(columns, data, name):
    return data[:, columns.index(name)]


def _stable_runs(flags):
    """Contiguous index runs of equal flag, each extended one point left
    so consecutive segments meet instead of leaving gaps."""
    runs = []
    start = 0
    for i in range(1, len(flags) + 1):
        if i == len(flags) or flags[i] != flags[start]:
            lo = max(start - 1, 0)
            runs.append((lo, i, bool(flags[start])))
            start = i
    return runs


def _render_fig1(columns, data, spec):
    delta = _column(columns, data, "delta")
    stable = _column(columns, data, "stable") > 0.5
    fig, axes = plt.subplots(2, 1, sharex=True, figsize=(6.4, 6.0))
    for ax, name, label in zip(
            axes, ("re_r", "im_r"),
            ("reflected amplitude, real part",
             "reflected amplitude, imaginary part")):
        values = _column(columns, data, name)
        for lo, hi, is_stable in _stable_runs(stable):
            ax.plot(delta[lo:hi], values[lo:hi], color="C0",
                    linestyle="-" if is_stable else "--", linewidth=1.4)
        ax.set_ylabel(label)
    axes[0].plot([], [], color="C0", linestyle="-", label="stable")
    axes[0].plot([], [], color="C0", linestyle="--", label="unstable")
    axes[0].legend(loc="lower right")
    axes[1].set_xlabel("two-photon half-detuning (atomic decay units)")
    fig.suptitle("Cavity reflection across the dark resonance")
    return fig


_FIG3_LABELS = (
    ("s_a1", "first circular mode"),
    ("s_a2", "second circular mode"),
    ("s_ax", "difference combination"),
    ("s_ay", "sum combination"),
)


def _render_fig3(columns, data, spec):
    omega = _column(columns, data, "omega")
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for name, label in _FIG3_LABELS:
        values = _column(columns, data, name)
        if spec.scale == "db":
            values = -10.0 * np.log10(values)
        ax.plot(omega, values, linewidth=1.4, label=label)
    ref = 0.0 if spec.scale == "db" else 1.0
    ax.axhline(ref, color="0.4", linestyle=":", linewidth=1.0)
    ax.set_xlabel("sideband frequency (atomic decay units)")
    ax.set_ylabel("noise reduction (dB)" if spec.scale == "db"
                  else "quadrature noise relative to vacuum")
    ax.legend(loc="upper right")
    fig.suptitle("Minimal output quadrature noise")
    fig.tight_layout()
    return fig


def _render_fig4(columns, data, spec):
    omega = _column(columns, data, "omega")
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for key, label in (("a", "absorptive working point"),
                       ("b", "dispersive working point")):
        name = f"e_{key}_db" if spec.scale == "db" else f"e_{key}"
        ax.plot(omega, _column(columns, data, name), linewidth=1.4,
                label=label)
    if spec.separability_line:
        bound = 0.0 if spec.scale == "db" else 2.0
        ax.axhline(bound, color="0.3", linestyle=":", linewidth=1.0)
        ax.annotate("separability bound", xy=(0.02, bound),
                    xycoords=("axes fraction", "data"),
                    textcoords="offset points", xytext=(0, 4), fontsize=8,
                    color="0.3")
    ax.set_xscale("log")
    ax.set_xlabel("sideband frequency (atomic decay units)")
    ax.set_ylabel("entanglement (dB below bound)" if spec.scale == "db"
                  else "optimized inseparability")
    ax.legend(loc="center right")
    fig.suptitle("Two-mode output entanglement")
    fig.tight_layout()
    return fig


def _render_fig5(columns, data, spec):
    phi = _column(columns, data, "phi")
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    ax.plot(phi, _column(columns, data, "var_analytic"), color="0.2",
            linewidth=1.4, label="closed form")
    ax.plot(phi, _column(columns, data, "var_c1000"), "o", color="C0",
            markersize=4, label="strong coupling")
    ax.plot(phi, _column(columns, data, "var_c100"), "s", color="C3",
            markersize=4, label="moderate coupling")
    ax.axhline(1.0, color="0.4", linestyle=":", linewidth=1.0)
    ax.set_xlabel("cavity detuning parameter")
    ax.set_ylabel("normalized population-difference variance")
    ax.legend(loc="upper right")
    fig.suptitle("Ground-state spin squeezing at the optimal drive")
    fig.tight_layout()
    return fig


_FIG_BUILDERS = {1: _render_fig1, 3: _render_fig3, 4: _render_fig4,
                 5: _render_fig5}


def render(spec):
    """Render one FigureSpec; returns the output path."""
    config, columns, data = read_table(spec.csv_path)
    validate_columns(spec.which, columns)
    with plt.rc_context(_STYLE):
        fig = _FIG_BUILDERS[spec.which](columns, data, spec)
        try:
            metadata = ({"Date": None}
                        if str(spec.out_path).lower().endswith(".svg")
                        else {"Software": None})
            fig.savefig(spec.out_path, metadata=metadata)
        finally:
            plt.close(fig)
    return spec.out_path


def render_figure(which, csv_path, out_path, scale="linear",
                  separability_line=True):
    """Convenience wrapper building the FigureSpec and rendering it."""
    return render(FigureSpec(which=int(which), csv_path=str(csv_path),
                             out_path=str(out_path), scale=scale,
                             separability_line=separability_line))
