"""Quantifying vague properties from exemplar sets.

An observer fixes clear cases, clear non-cases and (optionally) borderline
cases of a property, plus a bounded scalar metric over observed features.
The lowest clear-case score (eta0) and highest clear-non-case score (gamma0)
split the metric's range into exhibits / borderline / does-not-exhibit.
"""

__version__ = "0.1.0"

from .compare import (
    DisagreementReport,
    IdentityReport,
    compare_observers,
    merged_property,
    probe_grid,
    property_identity_analysis,
    shared_clear_agreement,
)
from .constructions import (
    RescaleMap,
    binarize_metric,
    build_rescale_map,
    margin,
    rescale_metric,
    trivial_faithful_metric,
)
from .core import (
    Determination,
    ExemplarSet,
    ExemplarSets,
    FaithfulnessReport,
    Metric,
    MetricKind,
    ObservationSchema,
    PropertyFramework,
    Provenance,
    SystemRecord,
    Thresholds,
    Verdict,
    Violation,
    build_framework,
    evaluate_metric,
    metric_value,
)
from .errors import UnfaithfulFramework, ValidationError, VaguenessError
from .estimator import ScoreRescaler, VaguenessClassifier
from .fileio import Scenario, ingest_systems_csv, ingest_updates_csv, load_scenario, save_scenario
from .thresholds import (
    DEFAULT_EPSILON,
    PanXReport,
    SharpnessVerdict,
    check_faithfulness,
    classify,
    classify_many,
    derive_thresholds,
    pan_x_check,
    sharpness,
)
from .update import (
    FeatureDistribution,
    GeneratorConfig,
    SimulationTrace,
    UpdateEvent,
    UpdateKind,
    apply_update,
    simulate_stream,
    swap_metric,
)
