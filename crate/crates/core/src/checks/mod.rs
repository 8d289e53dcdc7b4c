//! Report builders for the pointwise inequalities, the scaling law, vanishing
//! diagnostics, preservation experiments, modular estimates and fitted constants.

mod bounds;
mod dominance;
mod potential;
mod preservation;
mod relations;
mod scaling;
mod vanishing;

pub use bounds::{BoundReport, BoundStability, STABILITY_FACTOR, bound_stability, modular_bound_report};
pub use dominance::{
    DominanceName, DominanceOptions, DominanceReport, ROUNDING_TOL, check_dominance, check_dominance_labeled,
    dominance_suite, suite_passes,
};
pub use potential::{
    FittedConstantReport, HEDBERG_DILATION_TOL, HEDBERG_SPREAD_TOL, HedbergSuiteReport, RATIO_SPREAD_TOL, RatioReport,
    exponent_ratio_report, hedberg_report, hedberg_suite, relative_spread,
};
pub use preservation::{
    Coverage, PreservationReport, PropertyOutcome, Status, applicable_regimes, preservation_report,
};
pub use relations::ExponentRegime;
pub use scaling::{SCALING_TOL, ScalingReport, check_scaling};
pub use vanishing::{
    Property, PropertyDiagnosis, Thresholds, VanishingDiagnosis, VanishingOptions, VanishingReport, Verdict,
    classify_vanishing, default_n_max, diagnose_vanishing,
};
