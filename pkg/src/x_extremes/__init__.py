"""Spatial tail-dependence diagnostics and unseen extreme-event risk tools."""

from .embedding import (
    EmbeddingConfig,
    EmbeddingField,
    NeighborhoodSpec,
    baseline_metric,
    deepx_metric,
    spacetime_expectation_a,
    spacetime_expectation_b,
)
from .errors import (
    ConfigError,
    FormatError,
    NonFiniteError,
    NumericalError,
    ValidationError,
    XtremesError,
)
from .evalmetrics import (
    KernelConfig,
    PyramidConfig,
    RadialSpectrum,
    marginal_band,
    mmd_squared,
    moment_maps,
    ms_swd,
    ms_swd_tensor,
    radial_psd,
)
from .lgcp import LgcpConfig, empirical_dispersion, simulate_lgcp
from .tail import (
    ExtremalMatrix,
    SpectralSample,
    bivariate_return_amplification,
    binomial_count_pmf,
    chi_pair,
    chi_rmse,
    cooccurrence_histogram,
    extremal_correlation,
    kendall_tau,
    spectral_distribution,
    spectral_wasserstein,
)
from .tensor import (
    EmpiricalCdf,
    EnsembleTensor,
    GridMeta,
    empirical_cdf,
    load_tensor,
    rank_transform,
    save_tensor,
)
from .unseen import (
    CountryRisk,
    RandomProcessParams,
    RiskField,
    ThresholdMap,
    aggregate_country,
    analytic_fully_dependent_triplet,
    analytic_random_risks,
    analytic_random_triplet,
    build_thresholds,
    classify_hotspots,
    correlate_indicator,
    empirical_risks,
    hotspot_transition,
)

__version__ = "0.1.0"
