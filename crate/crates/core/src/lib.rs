//! Universal and composite hypothesis testing on finite alphabets.
//!
//! The central object is the mismatched divergence: the relative entropy
//! relaxed to a supremum over a finite-dimensional function class. It keeps
//! the geometry of an information divergence (I-projections, a Pythagorean
//! identity, error exponents) while its test statistic has dimension-, not
//! alphabet-, sized bias and variance, and a chi-squared null limit with as
//! many degrees of freedom as the class has dimensions.
//!
//! Modules:
//! - [`alphabet`]: distributions, empirical types, symbol functions, and the
//!   information functionals on them
//! - [`class`]: linear, log-linear, and partition function classes
//! - [`solver`]: the mismatched divergence program and its projections
//! - [`chi2`]: chi-squared CDF and quantiles from scratch
//! - [`rng`]: reproducible seeded streams and multinomial type sampling
//! - [`asymptotics`]: covariance matrices and limit predictions for the
//!   test statistics
//! - [`decision`]: threshold tests, calibration, and error exponents
//! - [`harness`]: reproducible Monte Carlo experiments emitting CSV tables

pub mod alphabet;
pub mod asymptotics;
pub mod chi2;
pub mod class;
pub mod decision;
pub mod error;
pub mod harness;
pub mod rng;
pub mod solver;

pub use alphabet::{
    entropy, kl_divergence, log_likelihood_ratio, log_mgf, read_distribution, twisted,
    write_distribution, Distribution, EmpiricalType, SymbolFunction,
};
pub use asymptotics::{
    feature_covariance, hessian_null, ks_distance_chi_squared, multinomial_covariance,
    predicted_alt_stats, predicted_null_stats, AsymptoticPrediction, FeatureCovariance,
    LimitKind, Scaling,
};
pub use chi2::{chi_squared_cdf, chi_squared_quantile, chi_squared_sf};
pub use class::{
    read_function_class, write_function_class, ClassKind, FunctionClass, ParameterVector,
};
pub use decision::{
    calibrate_threshold, error_exponent, hoeffding_test, mismatched_test, CalibratedTest,
    CalibrationMethod, StatisticKind, TestOutcome,
};
pub use error::{Error, Result};
pub use harness::{
    roc_trial_statistics, run_alt_stats, run_codelength, run_experiment, run_fig1,
    run_null_stats, run_roc, triangle_alternate, Experiment, ExperimentConfig, ResultTable,
    RocCurves,
};
pub use rng::{sample_type, RandomStream};
pub use solver::{
    decomposition_terms, mm_divergence, reverse_i_projection, robust_divergence,
    DecompositionTerms, MmResult, SolveStatus, SolverOptions,
};
