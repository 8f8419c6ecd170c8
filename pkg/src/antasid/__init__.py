"""Movement-time modeling for pointing tasks.

Implements the classical Shannon index of difficulty, its spatially
adjusted variant, and the temporally adjusted formulations built on the
binary logarithm of temporal efficiency, together with the cleanup,
regression, and statistical-comparison pipeline that compares them on
trial logs.
"""

from .formulations import (
    CalibrationBounds,
    EffectiveWidthConfig,
    Formulation,
    IdSample,
    TemporalFactorParams,
    WidthGrouping,
    WidthMethod,
    calibrate_generic_t,
    discrete_width_scale,
    effective_width_discrete,
    effective_width_sd,
    error_rate_for_unit_ratio,
    id_na,
    id_sa,
    id_ta,
    id_tsa,
    temporal_factor,
    z_from_error_rate,
)
from .ingest import (
    ColumnMapping,
    FieldSource,
    IngestError,
    load_mapping,
    read_canonical,
    write_canonical,
    convert,
)
from .pipeline import (
    AnalysisReport,
    CleanupSpec,
    CleanupStage,
    IdTable,
    PipelineError,
    analyze,
    compute_ids,
    filter_sd,
    run_cleanup,
    sd_sweep,
)
from .stats import (
    HistogramResult,
    PairwiseFResult,
    RegressionResult,
    ThroughputResult,
    TukeyResult,
    f_cdf,
    f_sf,
    histogram,
    mean_ci,
    ols_fit,
    pairwise_f_test,
    pearson_r,
    studentized_range_sf,
    throughput,
    tukey_hsd,
)
from .synth import SynthSpec, generate
from .trials import (
    AmplitudeSource,
    CleanupStageRecord,
    Dataset,
    LevelType,
    Point2,
    SourceTag,
    Trial,
    amplitude_source,
    endpoint_axis_offset,
    euclidean_distance,
    movement_amplitude,
    path_efficiency,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeSource",
    "AnalysisReport",
    "CalibrationBounds",
    "CleanupSpec",
    "CleanupStage",
    "CleanupStageRecord",
    "ColumnMapping",
    "Dataset",
    "EffectiveWidthConfig",
    "FieldSource",
    "Formulation",
    "HistogramResult",
    "IdSample",
    "IdTable",
    "IngestError",
    "LevelType",
    "PairwiseFResult",
    "PipelineError",
    "Point2",
    "RegressionResult",
    "SourceTag",
    "SynthSpec",
    "TemporalFactorParams",
    "ThroughputResult",
    "Trial",
    "TukeyResult",
    "WidthGrouping",
    "WidthMethod",
    "amplitude_source",
    "analyze",
    "calibrate_generic_t",
    "compute_ids",
    "convert",
    "discrete_width_scale",
    "effective_width_discrete",
    "effective_width_sd",
    "endpoint_axis_offset",
    "error_rate_for_unit_ratio",
    "euclidean_distance",
    "f_cdf",
    "f_sf",
    "filter_sd",
    "generate",
    "histogram",
    "id_na",
    "id_sa",
    "id_ta",
    "id_tsa",
    "load_mapping",
    "mean_ci",
    "movement_amplitude",
    "ols_fit",
    "pairwise_f_test",
    "path_efficiency",
    "pearson_r",
    "read_canonical",
    "run_cleanup",
    "sd_sweep",
    "studentized_range_sf",
    "temporal_factor",
    "throughput",
    "tukey_hsd",
    "write_canonical",
    "z_from_error_rate",
]
