"""Linearized quantum fluctuations around the symmetric working point.

The 12-component fluctuation vector stacks the two field modes with the
collective atomic sums (normalized by sqrt(N)):

    [dA1, dA1+, dA2, dA2+, dP1, dP1+, dP2, dP2+, dJ, dJ+, dPi1, dPi2]

P_i = sum |i><e| are the optical coherences, J = sum |1><2| the ground
coherence, Pi_i = sum |i><i| the ground populations (the excited population
is eliminated by trace conservation). With the collective coupling
g sqrt(N) = sqrt(2 C kappa gamma) every block depends only on
(C, kappa, delta_bar, phi, gamma0) and the working-point Rabi frequency,
so N never appears explicitly.

Conventions: d(dx)/dt = M dx + B a_in + F, with plain-ordered correlations
<xi_i(t) xi_j(t')> = D_tot[i, j] delta(t-t'). Fourier transform
x(w) = int dt e^{iwt} x(t) gives the transfer matrix T(w) = (-iw - M)^{-1},
the intracavity spectral matrix S(w) = T(w) D_tot T(-w)^T, and equal-time
covariances from M V + V M^T + D_tot = 0. Outputs follow a_out =
sqrt(2 kappa) a - a_in, so vacuum inputs give exactly flat unit quadrature
spectra for an empty cavity.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import solve_sylvester
from scipy.optimize import brentq

from . import atom, steady
from .params import NumericalError, OperatingPoint, SystemParams

__all__ = [
    "LABELS",
    "DAG_PAIR",
    "FluctuationModel",
    "build_drift",
    "build_diffusion",
    "build_model",
    "drift_eigenvalues",
    "stability_margin",
    "stability",
    "transfer",
    "spectral_matrix",
    "output_spectral_matrix",
    "quadrature_spectral_matrix",
    "mode_vector",
    "quadrature_coefficients",
    "quadrature_block",
    "output_spectrum",
    "atomic_covariance",
    "variance",
    "atomic_spectrum",
    "spin_coefficients",
    "instability_onset",
    "hwhm",
]

FIELD_LABELS = ("a1", "a1_dag", "a2", "a2_dag")
LABELS = FIELD_LABELS + atom.FLUCT_LABELS
NDIM = len(LABELS)
# involution mapping each component to its adjoint partner
DAG_PAIR = (1, 0, 3, 2, 5, 4, 7, 6, 9, 8, 10, 11)

# couplings that multiply dA1, dA1+, dA2, dA2+ inside the interaction
_COUPLING_OPS = (
    atom.unit(atom.EXC, atom.G1),  # with A1:  |e><1|
    atom.unit(atom.G1, atom.EXC),  # with A1+: |1><e|
    atom.unit(atom.EXC, atom.G2),  # with A2:  |e><2|
    atom.unit(atom.G2, atom.EXC),  # with A2+: |2><e|
)

STABILITY_TOL = 1e-12
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class FluctuationModel:
    """Drift, input coupling and noise data of the linearized dynamics."""

    params: SystemParams
    op: OperatingPoint
    rho: np.ndarray  # single-atom stationary density matrix
    drift: np.ndarray  # M, 12x12
    input_coupling: np.ndarray  # B, 12x4
    input_correlations: np.ndarray  # V_in, 4x4 plain ordering
    diffusion: np.ndarray | None = None  # D_tot, 12x12

    @property
    def labels(self) -> tuple[str, ...]:
        return LABELS


def _atomic_stationary(params: SystemParams, op: OperatingPoint):
    h = atom.hamiltonian(op.omega_rabi, op.omega_rabi, params.delta_bar)
    cops = atom.collapse_ops(params.gamma0)
    rho, _ = atom.steady_rho(h, cops)
    return h, cops, rho


def build_drift(params: SystemParams, op: OperatingPoint | float) -> FluctuationModel:
    """Assemble the drift matrix M and the input coupling B.

    ``op`` may be an OperatingPoint or a bare intracavity intensity.
    """
    if not isinstance(op, OperatingPoint):
        op = steady.operating_point(params, float(op))
    h, cops, rho = _atomic_stationary(params, op)
    kap, phi = params.kappa, params.phi
    gn = np.sqrt(2.0 * params.C * kap)  # g sqrt(N) in units of gamma

    m = np.zeros((NDIM, NDIM), dtype=complex)

    # cavity rows: dA1 sits at +kappa*phi, dA2 at -kappa*phi
    i_p1, i_p2 = LABELS.index("p1"), LABELS.index("p2")
    m[0, 0] = -kap * (1.0 - 1j * phi)
    m[1, 1] = -kap * (1.0 + 1j * phi)
    m[2, 2] = -kap * (1.0 + 1j * phi)
    m[3, 3] = -kap * (1.0 - 1j * phi)
    m[0, i_p1] = 1j * gn
    m[1, i_p1 + 1] = -1j * gn
    m[2, i_p2] = 1j * gn
    m[3, i_p2 + 1] = -1j * gn

    # atomic block: single-atom Heisenberg flow at the working point
    m_at, _ = atom.drift_block(h, cops)
    m[4:, 4:] = m_at

    # atomic response to field fluctuations: -i g sqrt(N) <[coupling, b_x]>
    for col, cop_op in enumerate(_COUPLING_OPS):
        for row, bx in enumerate(atom.FLUCT_OPS):
            comm = cop_op @ bx - bx @ cop_op
            m[4 + row, col] = -1j * gn * np.trace(rho @ comm)

    b = np.zeros((NDIM, 4))
    b[:4, :4] = np.sqrt(2.0 * kap) * np.eye(4)

    v_in = np.zeros((4, 4))
    v_in[0, 1] = 1.0  # <a1_in a1_in+>
    v_in[2, 3] = 1.0

    return FluctuationModel(
        params=params, op=op, rho=rho, drift=m, input_coupling=b, input_correlations=v_in
    )


def build_diffusion(model: FluctuationModel) -> FluctuationModel:
    """Fill in D_tot = B V_in B^T + atomic Einstein-relation block."""
    h, cops, rho = _atomic_stationary(model.params, model.op)
    d = model.input_coupling @ model.input_correlations @ model.input_coupling.T
    d = d.astype(complex)
    d[4:, 4:] += atom.einstein_diffusion(rho, cops)
    return replace(model, diffusion=d)


def build_model(params: SystemParams, op: OperatingPoint | float) -> FluctuationModel:
    """Drift plus diffusion in one call."""
    return build_diffusion(build_drift(params, op))


def drift_eigenvalues(model: FluctuationModel) -> np.ndarray:
    return np.linalg.eigvals(model.drift)


def stability_margin(model: FluctuationModel) -> float:
    """Largest real part over the drift spectrum; negative means stable."""
    return float(np.max(drift_eigenvalues(model).real))


def stability(model: FluctuationModel) -> bool:
    return stability_margin(model) < -STABILITY_TOL


def transfer(model: FluctuationModel, omega: float) -> np.ndarray:
    """T(w) = (-iw - M)^{-1}."""
    a = -1j * omega * np.eye(NDIM) - model.drift
    return np.linalg.inv(a)


def _require_diffusion(model: FluctuationModel) -> np.ndarray:
    if model.diffusion is None:
        raise ValueError("model has no diffusion block; call build_diffusion first")
    return model.diffusion


def spectral_matrix(model: FluctuationModel, omega: float) -> np.ndarray:
    """Intracavity spectral covariance S(w), plain ordering."""
    d = _require_diffusion(model)
    return transfer(model, omega) @ d @ transfer(model, -omega).T


def output_spectral_matrix(model: FluctuationModel, omega: float) -> np.ndarray:
    """4x4 spectral covariance of (dA1out, dA1out+, dA2out, dA2out+).

    Includes the interference of the intracavity field with the reflected
    input, a_out = sqrt(2 kappa) a - a_in.
    """
    d = _require_diffusion(model)
    b, v_in = model.input_coupling, model.input_correlations
    t_p = transfer(model, omega)
    t_m = transfer(model, -omega)
    sqk = np.sqrt(2.0 * model.params.kappa)
    s_xx = (t_p @ d @ t_m.T)[:4, :4]
    s_xv = (t_p @ b @ v_in)[:4, :]
    s_vx = (v_in @ b.T @ t_m.T)[:, :4]
    return sqk ** 2 * s_xx - sqk * (s_xv + s_vx) + v_in


# rows of the map from (A1, A1+, A2, A2+) to quadratures (X1, Y1, X2, Y2)
_QUAD_ROWS = np.array(
    [
        [1.0, 1.0, 0.0, 0.0],
        [-1j, 1j, 0.0, 0.0],
        [0.0, 0.0, 1.0, 1.0],
        [0.0, 0.0, -1j, 1j],
    ],
    dtype=complex,
)


def quadrature_spectral_matrix(model: FluctuationModel, omega: float) -> np.ndarray:
    """Symmetrized output quadrature spectra in (X1, Y1, X2, Y2).

    Real symmetric; the vacuum is the identity. Only this real part enters
    any single-frequency quadrature variance, so the antisymmetric
    imaginary remainder of the Hermitian spectral matrix is discarded.
    """
    s_p = output_spectral_matrix(model, omega)
    s_m = output_spectral_matrix(model, -omega)
    raw = 0.5 * (_QUAD_ROWS @ s_p @ _QUAD_ROWS.T + (_QUAD_ROWS @ s_m @ _QUAD_ROWS.T).T)
    sym = 0.5 * (raw + raw.T)
    return sym.real


def mode_vector(mode) -> np.ndarray:
    """Complex coefficients (u1, u2) of a mode u1 A1 + u2 A2.

    Accepts 'a1', 'a2', the orthogonal superpositions 'ax' (dark,
    (A2 - A1)/sqrt(2)) and 'ay' (bright, -i(A1 + A2)/sqrt(2)), or an
    explicit 2-vector, which is normalized.
    """
    if isinstance(mode, str):
        try:
            u = {
                "a1": (1.0, 0.0),
                "a2": (0.0, 1.0),
                "ax": (-1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0)),
                "ay": (-1j / np.sqrt(2.0), -1j / np.sqrt(2.0)),
            }[mode]
        except KeyError:
            raise ValueError(f"unknown mode {mode!r}") from None
        return np.array(u, dtype=complex)
    u = np.asarray(mode, dtype=complex).reshape(2)
    norm = np.linalg.norm(u)
    if norm == 0.0:
        raise ValueError("mode vector must be nonzero")
    return u / norm


def quadrature_coefficients(u: np.ndarray, theta: float) -> np.ndarray:
    """Real 4-vector v with X_u(theta) = v . (X1, Y1, X2, Y2)."""
    w = u * np.exp(-1j * theta)
    return np.array([w[0].real, -w[0].imag, w[1].real, -w[1].imag])


def quadrature_block(model: FluctuationModel, mode, omega: float) -> np.ndarray:
    """2x2 symmetrized spectral block of the mode's (X, Y) quadratures."""
    u = mode_vector(mode)
    q = quadrature_spectral_matrix(model, omega)
    vx = quadrature_coefficients(u, 0.0)
    vy = quadrature_coefficients(u, 0.5 * np.pi)
    rows = np.vstack([vx, vy])
    return rows @ q @ rows.T


def output_spectrum(model: FluctuationModel, mode, omega: float, theta: float) -> float:
    """Symmetrized output spectrum of quadrature X_theta of a mode (vacuum = 1)."""
    u = mode_vector(mode)
    v = quadrature_coefficients(u, theta)
    q = quadrature_spectral_matrix(model, omega)
    return float(v @ q @ v)


def atomic_covariance(model: FluctuationModel) -> np.ndarray:
    """Equal-time covariance V of the full fluctuation vector.

    Solves M V + V M^T + D_tot = 0. Raises NumericalError for an unstable
    drift or when cond(M) exceeds 1e12 (near-threshold solves are then
    unreliable).
    """
    d = _require_diffusion(model)
    margin = stability_margin(model)
    if margin >= -STABILITY_TOL:
        raise NumericalError(
            f"drift is not strictly stable (margin {margin:.3e}); no stationary covariance"
        )
    cond = np.linalg.cond(model.drift)
    if cond > CONDITION_LIMIT:
        raise NumericalError(f"drift condition number {cond:.3e} exceeds {CONDITION_LIMIT:.1e}")
    return solve_sylvester(model.drift, model.drift.T, -d)


def variance(model: FluctuationModel, coeffs: np.ndarray, cov: np.ndarray | None = None) -> float:
    """Symmetrized stationary variance of sum_i coeffs[i] dx_i (Hermitian combos)."""
    v = atomic_covariance(model) if cov is None else cov
    w = np.asarray(coeffs, dtype=complex)
    val = w @ (0.5 * (v + v.T)) @ w
    return float(val.real)


def atomic_spectrum(model: FluctuationModel, coeffs: np.ndarray, omega: float) -> float:
    """Symmetrized spectral density of a Hermitian combination of components."""
    w = np.asarray(coeffs, dtype=complex)
    s_p = w @ spectral_matrix(model, omega) @ w
    s_m = w @ spectral_matrix(model, -omega) @ w
    return float((0.5 * (s_p + s_m)).real)


def spin_coefficients(component: str) -> np.ndarray:
    """Coefficient vector of a collective spin fluctuation (normalized units).

    dJz = (dPi2 - dPi1)/2, dJy = (dJ - dJ+)/2i, dJx = (dJ + dJ+)/2.
    """
    w = np.zeros(NDIM, dtype=complex)
    i_j, i_pi1 = LABELS.index("j"), LABELS.index("pi1")
    if component == "jx":
        w[i_j] = 0.5
        w[i_j + 1] = 0.5
    elif component == "jy":
        w[i_j] = -0.5j
        w[i_j + 1] = 0.5j
    elif component == "jz":
        w[i_pi1] = -0.5
        w[i_pi1 + 1] = 0.5
    else:
        raise ValueError(f"unknown spin component {component!r}")
    return w


def instability_onset(
    params: SystemParams,
    intensity: float,
    delta_lo: float,
    delta_hi: float,
    n_scan: int = 60,
) -> float:
    """Detuning at which the drift spectrum first crosses into the right half plane.

    Scans delta_bar in [delta_lo, delta_hi] at fixed intracavity intensity
    and bisects the first sign change of the stability margin. Raises
    NumericalError when no crossing is bracketed.
    """
    from dataclasses import replace as dc_replace

    def margin(db: float) -> float:
        p = dc_replace(params, delta_bar=float(db))
        return stability_margin(build_drift(p, intensity))

    grid = np.linspace(delta_lo, delta_hi, n_scan)
    vals = [margin(d) for d in grid]
    for k in range(len(grid) - 1):
        if vals[k] < 0.0 <= vals[k + 1] or vals[k] <= 0.0 < vals[k + 1]:
            return float(brentq(margin, grid[k], grid[k + 1], xtol=1e-10))
    raise NumericalError("no stability crossing inside the scanned detuning range")


def hwhm(spectrum, scale_hint: float) -> float:
    """Half width at half maximum of a peaked even spectrum around w = 0.

    ``spectrum`` maps omega to a spectral density. The bracket expands
    geometrically from scale_hint/100 until the value drops below half the
    zero-frequency one.
    """
    s0 = spectrum(0.0)
    if not np.isfinite(s0) or s0 <= 0.0:
        raise NumericalError("spectrum at omega = 0 is not a positive finite value")
    half = 0.5 * s0
    lo = abs(scale_hint) / 100.0
    if lo == 0.0:
        raise ValueError("scale_hint must be nonzero")
    while spectrum(lo) <= half and lo > abs(scale_hint) * 1e-12:
        lo /= 10.0
    if spectrum(lo) <= half:
        raise NumericalError("spectrum already below half maximum at the smallest bracket")
    hi = lo
    for _ in range(200):
        hi *= 1.5
        if spectrum(hi) < half:
            break
    else:
        raise NumericalError("no half-maximum crossing found; spectrum not peaked at 0")
    return float(brentq(lambda w: spectrum(w) - half, lo, hi, xtol=1e-12, rtol=1e-12))
