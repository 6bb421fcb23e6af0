"""Random waves scattered by a point of magnetic flux.

Analytic vortex and charge densities of the flux-scattered Gaussian random
wave ensemble, the special-function kernels behind them, and a seeded
Monte Carlo simulator with vortex detection that cross-validates every
analytic result at desk scale.
"""

from .specfun import Accuracy, DomainError, NonConvergenceError
from .moments import FluxParameter, MomentSet, moments_by_sum, moments_closed
from .analytics import (
    DELTA_IRW,
    charge_density,
    vortex_density,
    signed_densities,
    mean_phase_gradient_azimuthal,
    asymptotic_large_R,
    expansion_small_R,
    phase_integral,
    total_charge,
    vortex_excess,
    mean_excess,
    nearest_vortex_pdf,
    nearest_vortex_conditional_mean,
    isotropic_charge_correlation,
    isotropic_like_unlike,
)
from .synthesis import (
    EnsembleSpec,
    Grid,
    SampledField,
    deterministic_ab_wave,
    sample_modal_coefficients,
    synthesize_ab_field,
    synthesize_isotropic_field,
)
from .vortices import (
    RadialHistogram,
    VortexSet,
    accumulate_radial,
    boundary_winding,
    detect_vortices,
)

__version__ = "0.1.0"
