"""Closed-form theory of cavity-feedback spin squeezing.

Scalar formulas for the damping rate and the steady-state variance of
the ground-state population difference when the two cavity modes act
back on the atomic spins, valid near the transparency point on the
stable side of the multistability threshold.  The control knob is
``alpha``, the ratio of the threshold detuning to the actual two-photon
half-detuning; ``alpha > 1`` means the working point is stable.

All rates are in units of the excited-state decay, all variances are
normalized so an uncorrelated ensemble gives 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ConfigError

__all__ = [
    "FeedbackConstants",
    "feedback_constants",
    "gamma_z",
    "jz_variance_analytic",
    "optimal_alpha",
    "threshold_consistency",
]


@dataclass(frozen=True)
class FeedbackConstants:
    """Bookkeeping ratios of the feedback loop acting on the spins.

    ``alpha`` is the threshold-detuning ratio.  ``drive_ratio`` is the
    detuning-to-drive quotient entering the restoring force on the
    population difference.  ``phase_gain`` and ``noise_coupling`` are
    the per-detuning conversion factors from the population difference
    to the reflected-phase shift and from the bright-mode quadrature
    noise back onto the spins; both carry an implicit cavity-coupling
    scale that cancels in every ratio used here.
    """

    alpha: float
    drive_ratio: float
    phase_gain: float
    noise_coupling: float


def feedback_constants(delta_bar, phi, omega_rabi, alpha):
    """Assemble the feedback-loop ratios for a working point."""
    if delta_bar <= 0:
        raise ConfigError("two-photon half-detuning must be positive")
    if phi <= 0:
        raise ConfigError("cavity detuning parameter must be positive")
    if omega_rabi <= 0:
        raise ConfigError("drive amplitude must be positive")
    _check_alpha(alpha)
    return FeedbackConstants(
        alpha=float(alpha),
        drive_ratio=float(delta_bar / (2.0 * np.sqrt(2.0) * omega_rabi)),
        phase_gain=float(2.0 * np.sqrt(2.0) / phi),
        noise_coupling=float(2.0 / phi),
    )


def _check_alpha(alpha):
    a = np.asarray(alpha, dtype=float)
    if np.any(a <= 1.0):
        raise ConfigError("threshold ratio must exceed 1 (stable side)")
    return a


def gamma_z(delta_bar, phi, alpha):
    """Damping rate of the population difference under cavity feedback.

    Grows linearly with the two-photon half-detuning and vanishes at the
    multistability threshold (alpha -> 1), where the restoring force
    disappears.
    """
    a = _check_alpha(alpha)
    return delta_bar * np.sqrt(1.0 + np.asarray(phi, dtype=float) ** 2) * (a - 1.0 / a)


def jz_variance_analytic(alpha, phi):
    """Normalized steady-state variance of the population difference.

    Equals 1 for an uncorrelated ensemble (alpha -> infinity) and dips
    below 1 on the stable side, with the reduction set purely by the
    threshold ratio and the cavity detuning parameter.
    """
    a = _check_alpha(alpha)
    p = np.asarray(phi, dtype=float)
    root = np.sqrt(1.0 + p**2)
    return ((a * root - p) ** 2 + 1.0) / ((1.0 + p**2) * (a**2 - 1.0))


def optimal_alpha(phi):
    """Threshold ratio minimizing the population-difference variance.

    Returns ``(alpha_star, var_star)``.  The variance bound improves
    without limit as the cavity detuning parameter grows; at phi = 0
    the optimum runs away (no feedback advantage), which is rejected.
    """
    p = np.asarray(phi, dtype=float)
    if np.any(p <= 0):
        raise ConfigError("cavity detuning parameter must be positive")
    root = np.sqrt(1.0 + p**2)
    alpha_star = (1.0 + root) / p
    var_star = 1.0 / root
    if np.ndim(phi) == 0:
        return float(alpha_star), float(var_star)
    return alpha_star, var_star


def threshold_consistency(phi):
    """Ratio of the feedback-balance detuning to the multistability threshold.

    The detuning at which the drive matches the product of the restoring
    and conversion factors divided by the threshold detuning; approaches
    1 from below as the cavity detuning parameter grows, so the two
    criteria coincide in the strongly dispersive regime.
    """
    p = np.asarray(phi, dtype=float)
    if np.any(p <= 0):
        raise ConfigError("cavity detuning parameter must be positive")
    out = p / np.sqrt(1.0 + p**2)
    return float(out) if np.ndim(phi) == 0 else out
