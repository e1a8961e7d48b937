"""Semiclassical steady state of two cavity modes on a dark resonance.

The symmetric working point drives both modes with equal intensity I
(normalized, I = (Omega/gamma)**2) at opposite atomic detunings -delta,
+delta and opposite cavity detunings +kappa*phi, -kappa*phi. The medium
then acts on mode 1 as a loss `absorption` and a phase `nonlinear_phase`,
both odd/even in delta_bar as dictated by the 1<->2 exchange symmetry, and
the drive intensity sustaining the point follows from

    I_in = I * [(1 + absorption)**2 + (phi - nonlinear_phase)**2].

All closed forms share the denominator Q = I**2 + db**2 + I*db**2 + db**4
(db = delta_bar) of the single-atom stationary solution.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

from . import atom
from .params import BlochState, ConfigError, NumericalError, OperatingPoint, SystemParams

__all__ = [
    "absorption",
    "nonlinear_phase",
    "input_intensity",
    "threshold_delta",
    "asymptotic_cpt",
    "kerr_two_level",
    "figure_of_merit",
    "reflectivity",
    "mean_spin",
    "bloch_steady_state",
    "susceptibility_from_bloch",
    "operating_point",
    "solve_branches",
]


def _denominator(i, db):
    return i * i + db * db + i * db * db + db ** 4


def absorption(i, delta_bar, c):
    """Medium loss term A of the symmetric working point (even in delta_bar)."""
    i = np.asarray(i, dtype=float)
    db = np.asarray(delta_bar, dtype=float)
    q = _denominator(i, db)
    num = c * db * db
    with np.errstate(invalid="ignore"):
        out = np.where(q > 0.0, num / np.where(q > 0.0, q, 1.0), 0.0)
    return out if out.ndim else float(out)


def nonlinear_phase(i, delta_bar, c):
    """Medium phase term of the working point (odd in delta_bar)."""
    i = np.asarray(i, dtype=float)
    db = np.asarray(delta_bar, dtype=float)
    q = _denominator(i, db)
    num = c * db * (i - db * db)
    with np.errstate(invalid="ignore"):
        out = np.where(q > 0.0, num / np.where(q > 0.0, q, 1.0), 0.0)
    return out if out.ndim else float(out)


def input_intensity(i, delta_bar, c, phi):
    """Drive intensity that sustains intracavity intensity ``i``."""
    a = absorption(i, delta_bar, c)
    p = nonlinear_phase(i, delta_bar, c)
    out = np.asarray(i, dtype=float) * ((1.0 + a) ** 2 + (phi - p) ** 2)
    return out if out.ndim else float(out)


def threshold_delta(i, c, phi):
    """Detuning at the self-oscillation threshold, sqrt(1+phi^2) * I / C."""
    if np.any(np.asarray(c) <= 0):
        raise ConfigError("threshold requires C > 0")
    out = np.sqrt(1.0 + np.asarray(phi, dtype=float) ** 2) * np.asarray(i, dtype=float) / c
    return out if out.ndim else float(out)


def asymptotic_cpt(i, delta_bar, c):
    """Large-I dark-resonance asymptotics (C db^2 / I^2, C db / I)."""
    i = np.asarray(i, dtype=float)
    db = np.asarray(delta_bar, dtype=float)
    a = c * db * db / (i * i)
    p = c * db / i
    if a.ndim == 0:
        return float(a), float(p)
    return a, p


def kerr_two_level(c, i, delta_big):
    """Loss and phase of the far-detuned two-level (Kerr) reference medium."""
    d = np.asarray(delta_big, dtype=float)
    a = c / (2.0 * d * d)
    p = c * np.asarray(i, dtype=float) / d ** 3
    if np.ndim(a) == 0 and np.ndim(p) == 0:
        return float(a), float(p)
    return a, p


def figure_of_merit(i, delta_bar):
    """Exact phase-to-loss ratio nonlinear_phase/absorption = (I - db^2)/db."""
    db = np.asarray(delta_bar, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (np.asarray(i, dtype=float) - db * db) / db
    return out if out.ndim else float(out)


def reflectivity(i, delta_bar, c, phi, mode: int = 1):
    """Amplitude reflectivity of the driven cavity, +1 when empty on resonance.

    Mode 2 sees the opposite cavity detuning and the sign-flipped phase
    response, i.e. the complex conjugate of mode 1.
    """
    if mode not in (1, 2):
        raise ConfigError(f"mode must be 1 or 2, got {mode}")
    a = absorption(i, delta_bar, c)
    bigphi = phi - nonlinear_phase(i, delta_bar, c)
    r = ((1.0 - a) + 1j * bigphi) / ((1.0 + a) - 1j * bigphi)
    if mode == 2:
        r = np.conj(r)
    return r if np.ndim(r) else complex(r)


def mean_spin(i, delta_bar, n_atoms):
    """First-order collective ground-spin components (Jx, Jy, Jz).

    The ground coherence pins the mean spin near -x; a small Raman mismatch
    tilts it by delta_bar/I in the y direction. Valid to O(delta_bar^2).
    """
    jx = -0.5 * n_atoms
    jy = 0.5 * n_atoms * np.asarray(delta_bar, dtype=float) / np.asarray(i, dtype=float)
    jz = 0.0 * jy
    if np.ndim(jy) == 0:
        return float(jx), float(jy), float(jz)
    return np.broadcast_to(jx, jy.shape), jy, jz


def bloch_steady_state(omega_rabi: float, delta_bar: float, gamma0: float = 0.0) -> BlochState:
    """Stationary single-atom state under symmetric drive.

    omega_rabi is the single-arm Rabi frequency in units of gamma. Raises
    DegenerateSteadyStateError when the drive and gamma0 leave the ground
    manifold unresolved.
    """
    h = atom.hamiltonian(omega_rabi, omega_rabi, delta_bar)
    rho, residual = atom.steady_rho(h, atom.collapse_ops(gamma0))
    return BlochState(
        pop1=float(rho[0, 0].real),
        pop2=float(rho[1, 1].real),
        pope=float(rho[2, 2].real),
        p1=complex(rho[2, 0]),   # <|1><e|> = rho_e1
        p2=complex(rho[2, 1]),
        j12=complex(rho[1, 0]),  # <|1><2|> = rho_21
        residual=residual,
    )


def susceptibility_from_bloch(state: BlochState, omega_rabi: float, c: float) -> tuple[float, float]:
    """(absorption, nonlinear_phase) inferred from the atomic coherence.

    The mode-1 field equation reads kappa[(1+A) - i(phi - phi_nl)] alpha =
    sqrt(2 kappa) alpha_in with A + i*phi_nl = -2i C <|1><e|> / Omega, using
    the collective coupling normalization g^2 N = 2 C kappa gamma. This is
    the closed forms' independent numerical route.
    """
    if omega_rabi <= 0.0:
        raise ConfigError("susceptibility needs omega_rabi > 0")
    chi = -2j * c * state.p1 / omega_rabi
    return float(chi.real), float(chi.imag)


def operating_point(params: SystemParams, intensity: float) -> OperatingPoint:
    """Assemble the symmetric working point at intracavity intensity I."""
    if intensity < 0.0:
        raise ConfigError(f"intensity must be >= 0, got {intensity}")
    i = float(intensity)
    db = params.delta_bar
    omega = float(np.sqrt(i))
    a = absorption(i, db, params.C)
    p = nonlinear_phase(i, db, params.C)
    iin = input_intensity(i, db, params.C, params.phi)
    ds = threshold_delta(i, params.C, params.phi) if params.C > 0 else np.inf
    bloch = bloch_steady_state(omega, db, params.gamma0)
    return OperatingPoint(
        intensity=i,
        omega_rabi=omega,
        absorption=float(a),
        phase_nl=float(p),
        input_intensity=float(iin),
        delta_s=float(ds),
        stable=bool(abs(db) <= ds),
        bloch=bloch,
    )


def solve_branches(
    i_in: float,
    delta_bar: float,
    c: float,
    phi: float,
    n_grid: int = 400,
) -> list[tuple[float, bool]]:
    """All intracavity intensities satisfying the drive relation.

    Brackets sign changes of I_in(I) - i_in on a log grid spanning
    [1e-6, 1e6] * i_in and polishes each with brentq. Returns (I, stable)
    pairs sorted by I, stability from the threshold test. Raises
    NumericalError if the grid finds no bracket for i_in > 0.
    """
    if i_in < 0.0:
        raise ConfigError(f"input intensity must be >= 0, got {i_in}")
    if i_in == 0.0:
        return [(0.0, True)]

    def defect(i):
        return input_intensity(i, delta_bar, c, phi) - i_in

    grid = np.geomspace(1e-6 * i_in, 1e6 * i_in, n_grid)
    vals = defect(grid)
    roots: list[float] = []
    for k in range(len(grid) - 1):
        f0, f1 = vals[k], vals[k + 1]
        if f0 == 0.0:
            roots.append(float(grid[k]))
        elif f0 * f1 < 0.0:
            roots.append(float(brentq(defect, grid[k], grid[k + 1], xtol=1e-12, rtol=1e-15)))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    if not roots:
        raise NumericalError(
            f"no steady-state branch bracketed for I_in={i_in:g} on [1e-6,1e6]*I_in"
        )

    # dedupe near-coincident roots from adjacent brackets
    roots.sort()
    unique: list[float] = []
    for r in roots:
        if not unique or abs(r - unique[-1]) > 1e-9 * max(1.0, abs(r)):
            unique.append(r)

    ds = threshold_delta(np.array(unique), c, phi) if c > 0 else np.full(len(unique), np.inf)
    return [(r, bool(abs(delta_bar) <= d)) for r, d in zip(unique, ds)]
