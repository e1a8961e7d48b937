"""Parameter containers and error types shared across the package.

All rates are expressed in units of the optical dipole decay rate gamma,
which is the time unit of the model. Intensities are saturation-normalized,
I = (Omega/gamma)**2 with Omega the single-arm Rabi frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class SimulationError(Exception):
    """Base class for runtime failures raised by this package."""


class ConfigError(SimulationError, ValueError):
    """Invalid or inconsistent parameters."""


class UnstableOperatingPointError(SimulationError):
    """A stable working point was required but the requested one is not."""


class NumericalError(SimulationError):
    """Linear algebra or root finding failed to produce a trustworthy result."""


class DegenerateSteadyStateError(NumericalError):
    """The atomic generator has more than one steady state.

    Happens with no drive and no ground-state relaxation; a small gamma0
    (e.g. 1e-9) restores a unique fixed point.
    """


@dataclass(frozen=True)
class SystemParams:
    """Physical configuration of the two-mode cavity plus Lambda medium.

    Attributes
    ----------
    C : float
        Cooperativity of the medium.
    gamma : float
        Optical dipole decay rate; the unit in which every other rate
        (kappa, gamma0, analysis frequencies) is expressed. Default 1.
    kappa : float
        Cavity amplitude bandwidth (half width), units of gamma.
    phi : float
        Normalized cavity detuning. Mode 1 sits at +kappa*phi, mode 2 at
        -kappa*phi.
    delta_bar : float
        Normalized atomic detuning delta/gamma. The two optical transitions
        are detuned by -delta and +delta respectively, so the two-photon
        (Raman) mismatch is 2*delta.
    gamma0 : float
        Ground-state coherence decay rate, units of gamma. Default 0.
    N : int or None
        Atom number, used only to convert normalized spin variances into
        absolute ones. None leaves results in normalized form.
    """

    C: float
    kappa: float
    phi: float = 0.0
    delta_bar: float = 0.0
    gamma: float = 1.0
    gamma0: float = 0.0
    N: int | None = None

    def __post_init__(self) -> None:
        if not (self.C >= 0.0 and math.isfinite(self.C)):
            raise ConfigError(f"C must be finite and >= 0, got {self.C}")
        if not (self.gamma > 0.0 and math.isfinite(self.gamma)):
            raise ConfigError(f"gamma must be finite and > 0, got {self.gamma}")
        if not (self.kappa > 0.0 and math.isfinite(self.kappa)):
            raise ConfigError(f"kappa must be finite and > 0, got {self.kappa}")
        if not math.isfinite(self.phi):
            raise ConfigError(f"phi must be finite, got {self.phi}")
        if not math.isfinite(self.delta_bar):
            raise ConfigError(f"delta_bar must be finite, got {self.delta_bar}")
        if not (self.gamma0 >= 0.0 and math.isfinite(self.gamma0)):
            raise ConfigError(f"gamma0 must be finite and >= 0, got {self.gamma0}")
        if self.N is not None and self.N < 1:
            raise ConfigError(f"N must be a positive atom number, got {self.N}")


@dataclass(frozen=True)
class BlochState:
    """Steady state of a single driven Lambda atom.

    pop1, pop2, pope are the level populations. p1 and p2 are the optical
    coherences <|1><e|> and <|2><e|>, j12 the ground coherence <|1><2|>.
    residual is the max-norm of the stationarity defect of the solved
    density matrix.
    """

    pop1: float
    pop2: float
    pope: float
    p1: complex
    p2: complex
    j12: complex
    residual: float


@dataclass(frozen=True)
class OperatingPoint:
    """Semiclassical working point of the symmetric two-mode solution.

    intensity is the normalized intracavity intensity I, omega_rabi the
    corresponding single-arm Rabi frequency sqrt(I) (units of gamma).
    absorption and phase_nl are the medium's loss and phase response,
    input_intensity the drive intensity sustaining this point, delta_s the
    detuning at the self-oscillation threshold, and stable the threshold
    test delta_bar <= delta_s.
    """

    intensity: float
    omega_rabi: float
    absorption: float
    phase_nl: float
    input_intensity: float
    delta_s: float
    stable: bool
    bloch: BlochState
