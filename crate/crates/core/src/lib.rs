//! Combination tests for p-values built on heavy-tailed transforms, with a
//! closed-testing shortcut and a seeded simulation engine.
//!
//! The numerical core is generic over [`Real`]; the aliases below fix the
//! scalar to `f64`.

pub mod closed_testing;
pub mod combine;
pub mod distributions;
pub mod error;
pub mod scalar;
pub mod simulate;
pub mod special;

pub use closed_testing::{closed_test_bruteforce, closed_test_shortcut, BRUTE_FORCE_MAX};
pub use combine::{
    bh_adjust, bonferroni, bonferroni_as_max_statistic, combine_average, combine_standard,
    combine_weighted, fisher, rejection_threshold, transform, MethodKind,
};
pub use distributions::Family;
pub use error::{Error, Result};
pub use scalar::Real;
pub use simulate::{
    calibrate_minp, estimate_equivalence_ratio, estimate_rejection_rate, pvalue_covariance,
    tail_dependence_t, ExchangeableModel, ExperimentConfig, ExperimentReport, Sidedness,
    StatFamily,
};

pub type Distribution = distributions::HeavyTailDistribution<f64>;
pub type PValues = combine::PValueVector<f64>;
pub type Weights = combine::WeightVector<f64>;
pub type CombinedResult = combine::CombinedResult<f64>;
pub type CombinationMethod = combine::CombinationMethod<f64>;
pub type ClosedTestingResult = closed_testing::ClosedTestingResult<f64>;
