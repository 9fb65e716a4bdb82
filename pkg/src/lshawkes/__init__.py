"""Time-frequency spectral analysis of locally stationary Hawkes processes.

The package simulates self-exciting point processes whose baseline intensity
and fertility function drift in rescaled time, evaluates their local mean
density and local Bartlett spectrum in closed form, estimates both from
event data with kernels localized in time and frequency, and validates the
estimators' Monte-Carlo error rates.
"""

__version__ = "0.1.0"

from .bandwidth import (
    BandwidthPlan,
    mean_density_bandwidth,
    optimal_bandwidths,
    predicted_mse_rate,
)
from .curves import Curve, as_curve, constant, piecewise_linear, sampled_table, sinusoidal
from .errors import (
    BandwidthError,
    DivisionGuardError,
    ExplosionError,
    FeasibilityError,
    IngestError,
    InsufficientDataError,
    LsHawkesError,
    ModelError,
    QuadratureError,
    ResolutionError,
)
from .estimate import (
    EstimatorConfig,
    TFGrid,
    check_feasibility,
    empirical_moment,
    estimate_bartlett,
    estimate_mean_density,
    estimate_tf_grid,
    feasible_bartlett,
    feasible_mean_density,
)
from .kernels import (
    FreqKernel,
    ModulatedKernel,
    ScaledTimeKernel,
    TimeKernel,
    epanechnikov_kernel,
    freq_kernel_ft,
    freq_kernel_from_table,
    modulated_freq_kernel,
    scaled_time_kernel,
    time_kernel_from_table,
    triangle_kernel,
)
from .model import (
    BaselineCurve,
    FertilityFamily,
    LsHawkesModel,
    ValidationReport,
    baseline,
    exponential_fertility,
    fertility_ft,
    gamma_fertility,
    identify_baseline,
    load_model,
    local_bartlett,
    local_mean_density,
    model_from_dict,
    model_to_dict,
    regularized_bartlett,
    save_model,
    table_fertility,
    validate_model,
    zero_fertility,
)
from .pipeline import (
    EventTable,
    HeatmapArtifact,
    analyze,
    analyze_days,
    average_days,
    export_heatmap,
    hz_to_rad,
    import_heatmap,
    ingest_csv,
    make_synthetic_table,
    poisson_normalize,
    rad_to_hz,
    write_days_csv,
)
from .simulate import (
    EventSeries,
    SimulationConfig,
    conditional_intensity,
    derive_seed,
    simulate_frozen,
    simulate_ls_hawkes,
    simulate_replicates,
)
from .validate import (
    FrequencyBiasReport,
    MseReport,
    RateFit,
    VarianceGrowthReport,
    fit_rate,
    frequency_bias_scan,
    mse_experiment,
    variance_growth_scan,
)
