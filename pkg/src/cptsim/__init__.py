"""Two cavity modes on a Lambda-medium dark resonance.

Semiclassical working points, linearized quantum fluctuation spectra
(squeezing and two-mode entanglement of the output light), and ground-state
spin squeezing diagnostics, with closed-form references for the dispersive
feedback regime.
"""

from .params import (
    BlochState,
    ConfigError,
    DegenerateSteadyStateError,
    NumericalError,
    OperatingPoint,
    SimulationError,
    SystemParams,
    UnstableOperatingPointError,
)
from .steady import (
    absorption,
    asymptotic_cpt,
    bloch_steady_state,
    figure_of_merit,
    input_intensity,
    kerr_two_level,
    mean_spin,
    nonlinear_phase,
    operating_point,
    reflectivity,
    solve_branches,
    susceptibility_from_bloch,
    threshold_delta,
)
from .langevin import (
    FluctuationModel,
    atomic_covariance,
    atomic_spectrum,
    build_diffusion,
    build_drift,
    build_model,
    instability_onset,
    output_spectrum,
    quadrature_block,
    quadrature_spectral_matrix,
    spectral_matrix,
    stability,
    stability_margin,
)
from .analysis import (
    EPRResult,
    ModeBasis,
    SpinResult,
    dark_bright_basis,
    epr_measure,
    min_quadrature_spectrum,
    minimal_noise_eigenvalue,
    optimize_entanglement,
    spin_measures,
    transform_basis,
)
from .spintheory import (
    FeedbackConstants,
    feedback_constants,
    gamma_z,
    jz_variance_analytic,
    optimal_alpha,
    threshold_consistency,
)

__version__ = "0.1.0"
