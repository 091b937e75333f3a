"""fracmix: fractional diffusion panels with Gaussian random drift effects.

Simulation of Y^i(t) = phi_i * t + W^{H,i}(t) panels (exact Cholesky and
Davies-Harte FFT samplers), k-variation estimation of the Hurst exponent
from a single trajectory, closed-form estimators of the effect mean and
variance with exact finite-sample moments, and a reproducible Monte
Carlo experiment harness.
"""

__version__ = "0.1.0"

from .effects import (
    EffectsEstimate,
    confidence_intervals,
    continuous_mu_tilde,
    estimate_effects,
    estimate_mu,
    estimate_sigma2,
    exact_moments,
    log_marginal_likelihood,
    xi_values,
)
from .errors import (
    ConfigError,
    EmbeddingError,
    EstimationRangeError,
    FactorizationError,
    FilterOrderError,
    FracmixError,
    GridError,
    HurstRangeError,
    PanelFormatError,
    SeriesLengthError,
)
from .experiment import (
    CellSummary,
    ExperimentConfig,
    run_experiment,
    summarize_empirical,
)
from .fbm import FbmPath, sample_fbm_exact, sample_fbm_fast
from .gram import (
    GramMatrix,
    Hurst,
    SamplingGrid,
    build_gram,
    quad_form_uu,
    quad_form_uy,
)
from .hurst import (
    FILTERS,
    HurstEstimate,
    VariationFilter,
    asym_variance_a,
    e_k,
    estimate_h,
    g_scale,
    named_filter,
    pi_gamma,
    s_n,
    validate_filter,
)
from .panel import EffectsLaw, Panel, simulate_panel, transform_to_y
from .rng import RngStream

__all__ = [
    "CellSummary",
    "ConfigError",
    "EffectsEstimate",
    "EffectsLaw",
    "EmbeddingError",
    "EstimationRangeError",
    "ExperimentConfig",
    "FILTERS",
    "FactorizationError",
    "FbmPath",
    "FilterOrderError",
    "FracmixError",
    "GramMatrix",
    "GridError",
    "Hurst",
    "HurstEstimate",
    "HurstRangeError",
    "Panel",
    "PanelFormatError",
    "RngStream",
    "SamplingGrid",
    "SeriesLengthError",
    "VariationFilter",
    "asym_variance_a",
    "build_gram",
    "confidence_intervals",
    "continuous_mu_tilde",
    "e_k",
    "estimate_effects",
    "estimate_h",
    "estimate_mu",
    "estimate_sigma2",
    "exact_moments",
    "g_scale",
    "log_marginal_likelihood",
    "named_filter",
    "pi_gamma",
    "quad_form_uu",
    "quad_form_uy",
    "run_experiment",
    "s_n",
    "sample_fbm_exact",
    "sample_fbm_fast",
    "simulate_panel",
    "summarize_empirical",
    "transform_to_y",
    "validate_filter",
    "xi_values",
]
