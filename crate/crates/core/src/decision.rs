//! Threshold tests on empirical types, threshold calibration, and the
//! worst-case error exponent of a divergence test.
//!
//! Both tests declare the alternate hypothesis when their statistic reaches
//! the threshold; ties decide for the alternate. Calibration inverts either
//! the chi-squared null limit (threshold = quantile(dof, 1 - p) / 2n) or the
//! raw large-deviations exponent (threshold = -log(p) / n). The chi-squared
//! rule tracks the actual false-alarm rate closely for moderate thresholds;
//! the exponent rule ignores the polynomial prefactor and is accurate only
//! when n * threshold is large compared to the statistic's dimension.

use crate::alphabet::{kl_divergence, Distribution, EmpiricalType};
use crate::chi2::chi_squared_quantile;
use crate::class::FunctionClass;
use crate::error::{Error, Result};
use crate::solver::{mm_divergence, SolveStatus, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatisticKind {
    /// Relative entropy of the type from the reference.
    Hoeffding,
    /// Mismatched divergence over a function class.
    Mismatched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationMethod {
    /// Invert the chi-squared null limit of 2n times the statistic.
    ChiSquared,
    /// Invert the leading large-deviations exponent exp(-n eta).
    Sanov,
}

#[derive(Debug, Clone, Copy)]
pub struct CalibratedTest {
    pub kind: StatisticKind,
    pub eta: f64,
    pub method: CalibrationMethod,
    pub sample_size: usize,
    /// Degrees of freedom behind a chi-squared threshold; echoed for Sanov.
    pub dof: usize,
}

#[derive(Debug, Clone)]
pub struct TestOutcome {
    pub statistic: f64,
    /// True declares the alternate (statistic >= threshold).
    pub decision: bool,
    /// Solve status for the mismatched statistic; None for Hoeffding.
    pub solver_status: Option<SolveStatus>,
}

/// Relative entropy test: declare when D(type/n || pi0) >= eta.
pub fn hoeffding_test(
    gamma: &EmpiricalType,
    pi0: &Distribution,
    eta: f64,
) -> Result<TestOutcome> {
    if let Some(symbol) = pi0.first_zero() {
        return Err(Error::NotFullSupport { symbol });
    }
    let statistic = kl_divergence(&gamma.as_distribution(), pi0)?;
    Ok(TestOutcome {
        statistic,
        decision: statistic >= eta,
        solver_status: None,
    })
}

/// Mismatched divergence test: declare when D_mm(type/n || pi0) >= eta.
/// A supremum that is not attained still yields the supremal value reached,
/// flagged through `solver_status`.
pub fn mismatched_test(
    gamma: &EmpiricalType,
    pi0: &Distribution,
    class: &FunctionClass,
    eta: f64,
    opts: &SolverOptions,
) -> Result<TestOutcome> {
    let res = mm_divergence(&gamma.as_distribution(), pi0, class, opts)?;
    Ok(TestOutcome {
        statistic: res.value,
        decision: res.value >= eta,
        solver_status: Some(res.status),
    })
}

/// Chooses the threshold for a target false-alarm probability.
pub fn calibrate_threshold(
    kind: StatisticKind,
    dof: usize,
    n: usize,
    p_fa: f64,
    method: CalibrationMethod,
) -> Result<CalibratedTest> {
    if n == 0 {
        return Err(Error::InvalidSampleSize { n });
    }
    if !(p_fa > 0.0 && p_fa < 1.0) || !p_fa.is_finite() {
        return Err(Error::InvalidProbability { value: p_fa });
    }
    let eta = match method {
        CalibrationMethod::ChiSquared => {
            chi_squared_quantile(dof, 1.0 - p_fa)? / (2.0 * n as f64)
        }
        CalibrationMethod::Sanov => {
            if dof == 0 {
                return Err(Error::InvalidDof);
            }
            -p_fa.ln() / n as f64
        }
    };
    Ok(CalibratedTest {
        kind,
        eta,
        method,
        sample_size: n,
        dof,
    })
}

/// Geometric mixture proportional to pi0^(1-rho) pi1^rho on the common support.
fn geometric_mixture(pi0: &Distribution, pi1: &Distribution, rho: f64) -> Distribution {
    let weights: Vec<f64> = pi0
        .weights()
        .iter()
        .zip(pi1.weights())
        .map(|(&a, &b)| {
            if a > 0.0 && b > 0.0 {
                ((1.0 - rho) * a.ln() + rho * b.ln()).exp()
            } else {
                0.0
            }
        })
        .collect();
    Distribution::new(weights).expect("mixture of equal-support distributions is nonzero")
}

/// Worst-case missed-detection exponent of the divergence test with
/// threshold eta between full alternates pi1 and the null pi0.
///
/// Finds the tilting rho where the geometric mixture sits at divergence eta
/// from pi0 (bisection to 1e-12 on the divergence) and returns its divergence
/// from pi1. Requires equal supports and 0 < eta < D(pi1 || pi0).
pub fn error_exponent(pi0: &Distribution, pi1: &Distribution, eta: f64) -> Result<f64> {
    if pi0.alphabet_size() != pi1.alphabet_size() {
        return Err(Error::AlphabetMismatch {
            left: pi0.alphabet_size(),
            right: pi1.alphabet_size(),
        });
    }
    if pi0.support() != pi1.support() {
        return Err(Error::UnequalSupports);
    }
    let max = kl_divergence(pi1, pi0)?;
    if !(eta > 0.0 && eta < max) || !eta.is_finite() {
        return Err(Error::EtaOutOfRange { value: eta, max });
    }
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    let mut mixture = geometric_mixture(pi0, pi1, 0.5);
    for _ in 0..200 {
        let rho = 0.5 * (lo + hi);
        mixture = geometric_mixture(pi0, pi1, rho);
        let g = kl_divergence(&mixture, pi0)?;
        if (g - eta).abs() <= 1e-12 || hi - lo <= 1e-16 {
            break;
        }
        if g < eta {
            lo = rho;
        } else {
            hi = rho;
        }
    }
    kl_divergence(&mixture, pi1)
}
