"""Command-line front end.

Subcommands:

* ``steady``   detuning sweep of the semiclassical working point
* ``spectrum`` minimal output quadrature noise vs sideband frequency
* ``entangle`` optimized two-mode inseparability vs sideband frequency
* ``spin``     population-difference squeezing vs cavity detuning
* ``fig``      canned parameter presets writing fixed-schema CSV files

Grids use the inclusive ``start:stop:count`` syntax.  Output is CSV with
a ``# config:`` comment header (or a JSON mirror via ``--format json``),
written atomically when ``--out`` is given, to stdout otherwise.

Exit codes: 0 success, 2 configuration error, 3 unstable operating
point, 4 numerical solver failure.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import analysis, langevin, spintheory, steady
from .params import (
    ConfigError,
    NumericalError,
    SystemParams,
    UnstableOperatingPointError,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNSTABLE = 3
EXIT_SOLVER = 4

THREADS_ENV = "CPT_SIM_THREADS"


# ---------------------------------------------------------------------------
# config plumbing

def parse_grid(text):
    """Inclusive start:stop:count grid specification."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must be start:stop:count, got {text!r}")
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}") from None
    if not (np.isfinite(start) and np.isfinite(stop)):
        raise ConfigError("grid endpoints must be finite")
    if count < 1:
        raise ConfigError("grid count must be >= 1")
    if count > 1 and stop <= start:
        raise ConfigError("grid stop must exceed start")
    return np.linspace(start, stop, count)


def read_config_file(path):
    """key=value pairs, one per line; # starts a comment."""
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                key, value = line.split("=", 1)
                values[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    return values


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _as_bool(text):
    low = str(text).strip().lower()
    if low in _BOOL_TRUE:
        return True
    if low in _BOOL_FALSE:
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def resolve(args, key, conv, default):
    """CLI flag wins, then the config file, then the hard default."""
    cli_value = getattr(args, key, None)
    if cli_value is not None and cli_value is not False:
        return cli_value
    file_values = getattr(args, "_file_values", {})
    if key in file_values:
        return conv(file_values[key])
    return default


def resolve_threads(args):
    explicit = getattr(args, "threads", None)
    if explicit is not None:
        n = explicit
    else:
        env = os.environ.get(THREADS_ENV, "").strip()
        if env:
            try:
                n = int(env)
            except ValueError:
                raise ConfigError(f"{THREADS_ENV} must be an integer") from None
        else:
            n = os.cpu_count() or 1
    if n < 1:
        raise ConfigError("thread count must be >= 1")
    return n


def build_params(args, kappa_default=1.0):
    c = resolve(args, "C", float, None)
    if c is None:
        raise ConfigError("cooperativity --C is required")
    return SystemParams(
        C=float(c),
        kappa=float(resolve(args, "kappa", float, kappa_default)),
        phi=float(resolve(args, "phi", float, 0.0)),
        delta_bar=float(resolve(args, "delta", float, 0.0)),
        gamma0=float(resolve(args, "gamma0", float, 0.0)),
        N=resolve(args, "N", int, None),
    )


# ---------------------------------------------------------------------------
# output

def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".10g")


def config_line(config):
    items = " ".join(f"{k}={config[k]}" for k in sorted(config))
    return f"# config: {items}"


def _native(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def write_table(out_path, fmt, config, columns, rows):
    if fmt == "json":
        payload = {
            "config": {k: _native(v) if isinstance(v, (bool, int, float, np.generic))
                       else v for k, v in sorted(config.items())},
            "columns": list(columns),
            "rows": [[_native(v) for v in row] for row in rows],
        }
        text = json.dumps(payload, sort_keys=True) + "\n"
    else:
        lines = [config_line(config), ",".join(columns)]
        lines.extend(",".join(format_value(v) for v in row) for row in rows)
        text = "\n".join(lines) + "\n"
    if out_path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out_path)) or "."
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".cptsim-", suffix=".tmp")
    except OSError as exc:
        raise ConfigError(f"cannot write {out_path}: {exc}") from None
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, out_path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def ordered_map(fn, items, threads):
    """Apply fn over items with a worker pool, results in input order."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# subcommands

def cmd_steady(args):
    params = build_params(args)
    intensity = resolve(args, "I", float, None)
    if intensity is None:
        raise ConfigError("intracavity intensity --I is required")
    intensity = float(intensity)
    grid = parse_grid(resolve(args, "delta_range", str, None) or _missing("--delta-range"))
    exact = bool(resolve(args, "exact_stability", _as_bool, False))
    threads = resolve_threads(args)

    def one(db):
        p = SystemParams(
            C=params.C, kappa=params.kappa, phi=params.phi,
            delta_bar=float(db), gamma0=params.gamma0, N=params.N,
        )
        op = steady.operating_point(p, intensity)
        r = steady.reflectivity(intensity, float(db), p.C, p.phi)
        stable = op.stable
        if exact and stable and p.C > 0:
            model = langevin.build_model(p, intensity)
            stable = langevin.stability(model)
        return (
            float(db), intensity, op.absorption, op.phase_nl,
            op.input_intensity, float(np.real(r)), float(np.imag(r)), stable,
        )

    rows = ordered_map(one, list(grid), threads)
    config = _common_config(args, params, command="steady",
                            I=intensity, delta_range=_grid_str(grid),
                            exact_stability=exact)
    write_table(resolve(args, "out", str, None),
                resolve(args, "format", str, "csv"), config,
                ("delta", "intensity", "absorption", "phase_nl",
                 "input_intensity", "re_r", "im_r", "stable"), rows)
    return EXIT_OK


_SPECTRUM_MODES = ("a1", "a2", "ax", "ay")


def cmd_spectrum(args):
    params = build_params(args)
    intensity = resolve(args, "I", float, None)
    if intensity is None:
        raise ConfigError("intracavity intensity --I is required")
    intensity = float(intensity)
    grid = parse_grid(resolve(args, "omega_range", str, None) or _missing("--omega-range"))
    threads = resolve_threads(args)

    model = langevin.build_model(params, intensity)
    _require_stable(model)

    def one(omega):
        row = [float(omega)]
        for mode in _SPECTRUM_MODES:
            block = langevin.quadrature_block(model, mode, float(omega))
            s_star, theta = analysis.min_quadrature_spectrum(block)
            row.extend((s_star, theta))
        return tuple(row)

    rows = ordered_map(one, list(grid), threads)
    config = _common_config(args, params, command="spectrum",
                            I=intensity, omega_range=_grid_str(grid))
    columns = ["omega"]
    for mode in _SPECTRUM_MODES:
        columns.extend((f"s_{mode}", f"theta_{mode}"))
    write_table(resolve(args, "out", str, None),
                resolve(args, "format", str, "csv"), config, columns, rows)
    return EXIT_OK


def cmd_entangle(args):
    params = build_params(args)
    intensity = resolve(args, "I", float, None)
    if intensity is None:
        raise ConfigError("intracavity intensity --I is required")
    intensity = float(intensity)
    grid = parse_grid(resolve(args, "omega_range", str, None) or _missing("--omega-range"))
    seed = int(resolve(args, "seed", int, 0))
    threads = resolve_threads(args)

    model = langevin.build_model(params, intensity)
    _require_stable(model)

    def one(item):
        idx, omega = item
        sigma = langevin.quadrature_spectral_matrix(model, float(omega))
        res = analysis.optimize_entanglement(sigma, omega=float(omega),
                                             seed=seed + idx)
        return (float(omega), res.e_star,
                float(analysis.entanglement_db(res.e_star)), *res.angles)

    rows = ordered_map(one, list(enumerate(grid)), threads)
    config = _common_config(args, params, command="entangle",
                            I=intensity, omega_range=_grid_str(grid), seed=seed)
    write_table(resolve(args, "out", str, None),
                resolve(args, "format", str, "csv"), config,
                ("omega", "e_star", "e_star_db",
                 "beta", "mu", "nu", "theta_a", "theta_b"), rows)
    return EXIT_OK


def cmd_spin(args):
    params = build_params(args, kappa_default=2.0)
    if params.delta_bar <= 0:
        raise ConfigError("spin squeezing sweep requires --delta > 0")
    grid = parse_grid(resolve(args, "phi_range", str, None) or _missing("--phi-range"))
    if np.any(grid <= 0):
        raise ConfigError("phi grid must be positive for the spin sweep")
    alpha_fixed = resolve(args, "alpha", float, None)
    threads = resolve_threads(args)

    def one(phi):
        phi = float(phi)
        if alpha_fixed is None:
            alpha, _ = spintheory.optimal_alpha(phi)
        else:
            alpha = float(alpha_fixed)
        intensity = alpha * params.delta_bar * params.C / np.sqrt(1.0 + phi * phi)
        p = SystemParams(C=params.C, kappa=params.kappa, phi=phi,
                         delta_bar=params.delta_bar, gamma0=params.gamma0,
                         N=params.N)
        model = langevin.build_model(p, intensity)
        _require_stable(model)
        result = analysis.spin_measures(model)
        return (phi, alpha, result.var_jz_normalized,
                float(spintheory.jz_variance_analytic(alpha, phi)),
                result.gamma_z_fit,
                float(spintheory.gamma_z(params.delta_bar, phi, alpha)))

    rows = ordered_map(one, list(grid), threads)
    config = _common_config(args, params, command="spin",
                            phi_range=_grid_str(grid),
                            alpha="optimal" if alpha_fixed is None else alpha_fixed)
    write_table(resolve(args, "out", str, None),
                resolve(args, "format", str, "csv"), config,
                ("phi", "alpha", "var_numeric", "var_analytic",
                 "gamma_z_fit", "gamma_z_analytic"), rows)
    return EXIT_OK


# ---------------------------------------------------------------------------
# figure presets

FIG_SCHEMAS = {
    1: ("delta", "re_r", "im_r", "stable"),
    3: ("omega", "s_a1", "s_a2", "s_ax", "s_ay"),
    4: ("omega", "e_a", "e_a_db", "e_b", "e_b_db"),
    5: ("phi", "var_analytic", "var_c1000", "var_c100"),
}

FIG4_CURVES = {
    "a": dict(C=100.0, kappa=2.0, delta_bar=1.0, phi=1.0, intensity=144.0),
    "b": dict(C=1000.0, kappa=2.0, delta_bar=0.1, phi=2.0, intensity=49.0),
}


def _fig1_rows(threads):
    grid = np.linspace(-3.0, 3.0, 601)
    c, intensity, phi = 100.0, 1.0, 0.0

    def one(db):
        db = float(db)
        r = steady.reflectivity(intensity, db, c, phi)
        ds = steady.threshold_delta(intensity, c, phi)
        # tolerant compare keeps grid points landing exactly on the
        # threshold flagged symmetrically despite rounding
        return (db, float(np.real(r)), float(np.imag(r)),
                abs(db) <= ds * (1.0 + 1e-9))

    return ordered_map(one, list(grid), threads), dict(
        C=c, I=intensity, phi=phi, delta_range="-3:3:601")


def _fig3_rows(threads):
    params = SystemParams(C=100.0, kappa=2.0, phi=1.0, delta_bar=1.0)
    intensity = 144.0
    model = langevin.build_model(params, intensity)
    _require_stable(model)
    grid = np.linspace(0.0, 4.0, 401)

    def one(omega):
        row = [float(omega)]
        for mode in _SPECTRUM_MODES:
            block = langevin.quadrature_block(model, mode, float(omega))
            row.append(analysis.min_quadrature_spectrum(block)[0])
        return tuple(row)

    return ordered_map(one, list(grid), threads), dict(
        C=params.C, kappa=params.kappa, delta=params.delta_bar,
        phi=params.phi, I=intensity, omega_range="0:4:401")


def _fig4_rows(threads, seed):
    grid = np.geomspace(1e-3, 4.0, 60)
    models = {}
    for key, preset in FIG4_CURVES.items():
        params = SystemParams(C=preset["C"], kappa=preset["kappa"],
                              phi=preset["phi"], delta_bar=preset["delta_bar"])
        model = langevin.build_model(params, preset["intensity"])
        _require_stable(model)
        models[key] = model

    def one(item):
        idx, omega = item
        omega = float(omega)
        row = [omega]
        for offset, key in enumerate(("a", "b")):
            sigma = langevin.quadrature_spectral_matrix(models[key], omega)
            res = analysis.optimize_entanglement(
                sigma, omega=omega, seed=seed + 2 * idx + offset)
            row.extend((res.e_star, float(analysis.entanglement_db(res.e_star))))
        return tuple(row)

    rows = ordered_map(one, list(enumerate(grid)), threads)
    meta = dict(seed=seed, omega_grid="geomspace:1e-3:4:60")
    for key, preset in FIG4_CURVES.items():
        meta[f"curve_{key}"] = (
            f"C={preset['C']:g};kappa={preset['kappa']:g};"
            f"delta={preset['delta_bar']:g};phi={preset['phi']:g};"
            f"I={preset['intensity']:g}"
        )
    return rows, meta


def _fig5_rows(threads):
    grid = np.linspace(1.0, 5.0, 33)
    delta_bar = 0.005
    kappa = 2.0

    def one(phi):
        phi = float(phi)
        alpha, var_star = spintheory.optimal_alpha(phi)
        row = [phi, var_star]
        for c in (1000.0, 100.0):
            intensity = alpha * delta_bar * c / np.sqrt(1.0 + phi * phi)
            p = SystemParams(C=c, kappa=kappa, phi=phi, delta_bar=delta_bar)
            model = langevin.build_model(p, intensity)
            _require_stable(model)
            result = analysis.spin_measures(model, fit_width=False)
            row.append(result.var_jz_normalized)
        return tuple(row)

    return ordered_map(one, list(grid), threads), dict(
        delta=delta_bar, kappa=kappa, phi_range="1:5:33", alpha="optimal")


def cmd_fig(args):
    which = int(args.which)
    if which not in FIG_SCHEMAS:
        raise ConfigError("figure preset must be one of 1, 3, 4, 5")
    threads = resolve_threads(args)
    seed = int(resolve(args, "seed", int, 0))
    out_path = resolve(args, "out", str, None) or f"fig{which}.csv"

    if which == 1:
        rows, meta = _fig1_rows(threads)
    elif which == 3:
        rows, meta = _fig3_rows(threads)
    elif which == 4:
        rows, meta = _fig4_rows(threads, seed)
    else:
        rows, meta = _fig5_rows(threads)

    config = dict(meta, command=f"fig{which}", version=_version())
    write_table(out_path, "csv", config, FIG_SCHEMAS[which], rows)

    render_target = resolve(args, "render", str, None)
    if render_target:
        try:
            from cpt_plots.figures import render_figure
        except ImportError:
            raise ConfigError(
                "figure rendering needs the cpt-plots package "
                "(pip install -e plots/)"
            ) from None
        render_figure(which, out_path, render_target)
    return EXIT_OK


# ---------------------------------------------------------------------------
# helpers

def _missing(flag):
    raise ConfigError(f"{flag} is required")


def _grid_str(grid):
    return f"{grid[0]:g}:{grid[-1]:g}:{len(grid)}"


def _version():
    from . import __version__
    return __version__


def _require_stable(model):
    if not langevin.stability(model):
        margin = langevin.stability_margin(model)
        raise UnstableOperatingPointError(
            f"operating point is unstable (spectral abscissa {margin:.3e})"
        )


def _common_config(args, params, command, **extra):
    config = dict(
        command=command,
        C=params.C,
        kappa=params.kappa,
        phi=params.phi,
        delta=params.delta_bar,
        gamma0=params.gamma0,
        version=_version(),
    )
    if params.N is not None:
        config["N"] = params.N
    config.update(extra)
    return config


# lets values like "-3:3:601" reach grid flags instead of being read as options
_GRID_TOKEN = re.compile(r"^-\d[\d.:eE+-]*$")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cptsim",
        description="Dark-resonance cavity simulator: semiclassical working "
                    "points, output-light noise spectra, and spin squeezing.",
        epilog="Grids are inclusive start:stop:count. Exit codes: 0 ok, "
               "2 bad config, 3 unstable operating point, 4 solver failure.",
    )
    parser._negative_number_matcher = _GRID_TOKEN

    def add_sub(sub, *a, **kw):
        p = sub.add_parser(*a, **kw)
        p._negative_number_matcher = _GRID_TOKEN
        return p

    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, kappa_note="1"):
        p.add_argument("--C", type=float, help="cooperativity C")
        p.add_argument("--kappa", type=float,
                       help=f"cavity linewidth in units of the atomic decay "
                            f"(default {kappa_note})")
        p.add_argument("--phi", type=float, help="cavity detuning parameter (default 0)")
        p.add_argument("--delta", type=float,
                       help="two-photon half-detuning in units of the atomic "
                            "decay (default 0)")
        p.add_argument("--gamma0", type=float,
                       help="ground-state exchange rate (default 0)")
        p.add_argument("--N", type=int, help="atom number (bookkeeping only)")
        p.add_argument("--config", metavar="FILE",
                       help="key=value defaults file; flags take precedence")
        p.add_argument("--format", choices=("csv", "json"),
                       help="output format (default csv)")
        p.add_argument("--out", metavar="PATH",
                       help="output file (default stdout); written atomically")
        p.add_argument("--threads", type=int,
                       help=f"worker threads (default {THREADS_ENV} or all cores)")

    p = add_sub(sub, "steady", help="semiclassical detuning sweep")
    common(p)
    p.add_argument("--I", type=float, help="intracavity intensity (saturation units)")
    p.add_argument("--delta-range", dest="delta_range", metavar="START:STOP:COUNT",
                   help="two-photon detuning grid")
    p.add_argument("--exact-stability", dest="exact_stability",
                   action="store_const", const=True, default=None,
                   help="flag stability from drift eigenvalues instead of the "
                        "threshold inequality")
    p.set_defaults(func=cmd_steady)

    p = add_sub(sub, "spectrum", help="minimal output quadrature noise vs frequency")
    common(p)
    p.add_argument("--I", type=float, help="intracavity intensity (saturation units)")
    p.add_argument("--omega-range", dest="omega_range", metavar="START:STOP:COUNT",
                   help="sideband frequency grid (units of the atomic decay)")
    p.set_defaults(func=cmd_spectrum)

    p = add_sub(sub, "entangle", help="optimized two-mode inseparability vs frequency")
    common(p)
    p.add_argument("--I", type=float, help="intracavity intensity (saturation units)")
    p.add_argument("--omega-range", dest="omega_range", metavar="START:STOP:COUNT",
                   help="sideband frequency grid (units of the atomic decay)")
    p.add_argument("--seed", type=int,
                   help="seed for the extra randomized optimizer starts (default 0)")
    p.set_defaults(func=cmd_entangle)

    p = add_sub(sub, "spin", help="population-difference squeezing vs cavity detuning")
    common(p, kappa_note="2")
    p.add_argument("--phi-range", dest="phi_range", metavar="START:STOP:COUNT",
                   help="cavity detuning grid (must be positive)")
    p.add_argument("--alpha", type=float,
                   help="threshold-detuning ratio (default: exact optimum per point)")
    p.set_defaults(func=cmd_spin)

    p = add_sub(sub, "fig", help="write figure data with fixed schemas")
    p.add_argument("which", type=int, choices=(1, 3, 4, 5),
                   help="figure preset number")
    p.add_argument("--out", metavar="PATH",
                   help="output CSV (default figN.csv)")
    p.add_argument("--render", metavar="IMAGE",
                   help="also render the figure (needs the cpt-plots package)")
    p.add_argument("--seed", type=int,
                   help="seed for the entanglement optimizer starts (default 0)")
    p.add_argument("--threads", type=int,
                   help=f"worker threads (default {THREADS_ENV} or all cores)")
    p.add_argument("--config", metavar="FILE",
                   help="key=value defaults file; flags take precedence")
    p.set_defaults(func=cmd_fig)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config_path = getattr(args, "config", None)
        args._file_values = read_config_file(config_path) if config_path else {}
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnstableOperatingPointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
