"""Strategyproof linear regression: mechanisms, audits, and benchmarks."""

from .audit import (
    BuiltinInstance,
    GenMedParams,
    GrlParams,
    InfluenceBounds,
    LowerBoundDiagnostics,
    MechanismKind,
    MechanismSpec,
    ViolationCertificate,
    audit_gsp,
    audit_sp,
    brown_mood_spec,
    builtin_instance,
    constrained_least_squares,
    default_candidates,
    efficiency_ratio,
    fit_mechanism,
    forced_worse,
    hyperplanes_through_others,
    influence_bounds,
    lowerbound_instance,
    strictly_better,
    tukey_spec,
    verify_certificate,
)
from .core import (
    DataSet,
    Hyperplane,
    MedianSide,
    OutcomeRecord,
    median_with_side,
    order_statistic,
    outcomes,
    predict,
    predict_all,
    rss,
)
from .crm import (
    CrmConfig,
    cwa,
    directing_angle,
    directing_pair,
    equation_form_line,
    fit_crm,
)
from .datafiles import (
    InputError,
    load_mechanism_config,
    mechanism_jsonable,
    parse_mechanism,
    read_dataset,
    resolve_mechanism,
    write_dataset,
)
from .erm import (
    L1Config,
    PhantomTerm,
    QuantileConfig,
    fit_l1erm,
    fit_ols,
    fit_quantile,
    l1_risk,
    quantile_risk,
)
from .errors import (
    AdmissibilityError,
    ConfigurationError,
    ContractViolation,
    InternalInconsistency,
    NotPubliclySeparable,
    UniquenessViolation,
    UnsupportedMechanism,
)
from .grh import (
    GrhResult,
    fit_grh,
    fit_grl,
    preset_partition,
    traversal_hyperplanes,
)
from .impartial import (
    AffineResponse,
    ImpartialConfig,
    PwlResponse,
    fit_impartial,
    generalized_median,
    swap_config,
)
from .separability import (
    AgentPartition,
    Ordering,
    SeparatorWitness,
    compare_hyperplanes,
    has_weak_general_position,
    is_admissible,
    is_publicly_separable,
    is_well_separable,
    strictly_separates,
)
from .simplex import LpResult, solve_lp
from .svgplot import render_plot

__all__ = [
    "AdmissibilityError",
    "AffineResponse",
    "AgentPartition",
    "BuiltinInstance",
    "ConfigurationError",
    "ContractViolation",
    "CrmConfig",
    "DataSet",
    "GenMedParams",
    "GrhResult",
    "GrlParams",
    "Hyperplane",
    "ImpartialConfig",
    "InfluenceBounds",
    "InputError",
    "InternalInconsistency",
    "L1Config",
    "LowerBoundDiagnostics",
    "LpResult",
    "MechanismKind",
    "MechanismSpec",
    "MedianSide",
    "NotPubliclySeparable",
    "Ordering",
    "OutcomeRecord",
    "PhantomTerm",
    "PwlResponse",
    "QuantileConfig",
    "SeparatorWitness",
    "UniquenessViolation",
    "UnsupportedMechanism",
    "ViolationCertificate",
    "audit_gsp",
    "audit_sp",
    "brown_mood_spec",
    "builtin_instance",
    "compare_hyperplanes",
    "constrained_least_squares",
    "cwa",
    "default_candidates",
    "directing_angle",
    "directing_pair",
    "efficiency_ratio",
    "equation_form_line",
    "fit_crm",
    "fit_grh",
    "fit_grl",
    "fit_impartial",
    "fit_l1erm",
    "fit_mechanism",
    "fit_ols",
    "fit_quantile",
    "forced_worse",
    "generalized_median",
    "has_weak_general_position",
    "hyperplanes_through_others",
    "influence_bounds",
    "is_admissible",
    "is_publicly_separable",
    "is_well_separable",
    "l1_risk",
    "load_mechanism_config",
    "lowerbound_instance",
    "mechanism_jsonable",
    "median_with_side",
    "order_statistic",
    "outcomes",
    "parse_mechanism",
    "predict",
    "predict_all",
    "preset_partition",
    "quantile_risk",
    "read_dataset",
    "render_plot",
    "resolve_mechanism",
    "rss",
    "solve_lp",
    "strictly_better",
    "strictly_separates",
    "swap_config",
    "traversal_hyperplanes",
    "tukey_spec",
    "verify_certificate",
    "write_dataset",
]

__version__ = "0.1.0"
