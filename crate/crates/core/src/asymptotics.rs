//! Limit behavior of the test statistics for i.i.d. observations.
//!
//! Null hypothesis (observations from pi0): n times the mismatched statistic
//! has limiting mean and variance d/2 where d is the class dimension, and
//! twice it converges to chi-squared with d degrees of freedom. The relative
//! entropy statistic behaves the same way with d replaced by N - 1.
//!
//! Fixed alternate pi1: sqrt(n) times the centered statistic is
//! asymptotically normal with variance Var_pi1(f_r1), and the bias of n times
//! the centered statistic converges to trace(Sigma_pi1 Sigma_tilde^{-1}) / 2,
//! with both covariances taken over the parameter gradient of f at r1 and
//! tilde the twisted reference at the population optimum.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::alphabet::{Distribution, SymbolFunction};
use crate::chi2::chi_squared_cdf;
use crate::class::FunctionClass;
use crate::error::{Error, Result};
use crate::solver::{mm_divergence, SolveStatus, SolverOptions};

const RCOND_FLOOR: f64 = 1e-12;

/// Covariance matrix of a feature vector under a distribution. Symmetric
/// positive semidefinite by construction; building one checks the numerical
/// eigenvalue floor.
#[derive(Debug, Clone)]
pub struct FeatureCovariance {
    matrix: DMatrix<f64>,
}

impl FeatureCovariance {
    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Reciprocal condition number from the symmetric eigenvalues.
    pub fn rcond(&self) -> f64 {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let max = eig.eigenvalues.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
        let min = eig
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b.abs()));
        if max == 0.0 {
            0.0
        } else {
            min / max
        }
    }
}

/// Sigma_mu(i, j) = mu(psi_i psi_j) - mu(psi_i) mu(psi_j).
pub fn feature_covariance(
    mu: &Distribution,
    features: &[SymbolFunction],
) -> Result<FeatureCovariance> {
    let n = mu.alphabet_size();
    for f in features {
        if f.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: f.len(),
            });
        }
    }
    let d = features.len();
    let means = DVector::from_iterator(d, features.iter().map(|f| mu.mean(f)));
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let second: f64 = mu
                .weights()
                .iter()
                .zip(features[i].values().iter().zip(features[j].values()))
                .map(|(&w, (&a, &b))| w * a * b)
                .sum();
            let v = second - means[i] * means[j];
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    let cov = FeatureCovariance { matrix: m };
    debug_assert!({
        let eig = SymmetricEigen::new(cov.matrix.clone());
        eig.eigenvalues.iter().all(|&l| l >= -1e-10)
    });
    Ok(cov)
}

/// Covariance of the scaled multinomial type: diag(mu) - mu mu'.
pub fn multinomial_covariance(mu: &Distribution) -> DMatrix<f64> {
    let n = mu.alphabet_size();
    DMatrix::from_fn(n, n, |i, j| {
        let v = -mu.w(i) * mu.w(j);
        if i == j {
            v + mu.w(i)
        } else {
            v
        }
    })
}

/// The N x N curvature matrix Psi' Sigma_pi0^{-1} Psi of the null statistic,
/// where Psi stacks the features as rows. Satisfies trace(M Xi) =
/// trace(M Xi M Xi) = d for Xi the multinomial covariance of pi0.
pub fn hessian_null(pi0: &Distribution, features: &[SymbolFunction]) -> Result<DMatrix<f64>> {
    if let Some(symbol) = pi0.first_zero() {
        return Err(Error::NotFullSupport { symbol });
    }
    let cov = feature_covariance(pi0, features)?;
    let rcond = cov.rcond();
    if !(rcond >= RCOND_FLOOR) {
        return Err(Error::SingularCovariance { rcond });
    }
    let d = features.len();
    let n = pi0.alphabet_size();
    let psi = DMatrix::from_fn(d, n, |i, z| features[i].v(z));
    let chol = Cholesky::new(cov.into_matrix())
        .ok_or(Error::SingularCovariance { rcond })?;
    let b = chol.solve(&psi);
    Ok(psi.transpose() * b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitKind {
    /// Twice the scaled statistic converges to chi-squared with `dof`
    /// degrees of freedom.
    ChiSquaredHalf { dof: usize },
    /// The scaled, centered statistic converges to a normal law.
    Normal { variance: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    /// Prediction applies to n times the statistic.
    TimesN,
    /// Prediction applies to sqrt(n) times the centered statistic.
    TimesSqrtN,
}

#[derive(Debug, Clone)]
pub struct AsymptoticPrediction {
    /// Null: limit of E[n D]. Alternate: limit of E[n (D - D_infinity)].
    pub bias: f64,
    /// Null: limit of Var[n D]. Alternate: limit of Var[sqrt(n) D].
    pub variance: f64,
    pub limit: LimitKind,
    pub scaling: Scaling,
}

/// Null limit: mean and variance dof/2, chi-squared shape.
pub fn predicted_null_stats(dof: usize) -> AsymptoticPrediction {
    AsymptoticPrediction {
        bias: dof as f64 / 2.0,
        variance: dof as f64 / 2.0,
        limit: LimitKind::ChiSquaredHalf { dof },
        scaling: Scaling::TimesN,
    }
}

/// Alternate limit for observations from pi1 tested against pi0 over the
/// class. Requires the population optimum to be attained.
pub fn predicted_alt_stats(
    pi1: &Distribution,
    pi0: &Distribution,
    class: &FunctionClass,
    opts: &SolverOptions,
) -> Result<AsymptoticPrediction> {
    let res = mm_divergence(pi1, pi0, class, opts)?;
    if res.status != SolveStatus::Converged {
        return Err(Error::NotAttained {
            status: res.status.as_str(),
        });
    }
    let psir = class.feature_gradient(&res.r_star)?;
    let sigma_alt = feature_covariance(pi1, &psir)?;
    let sigma_tilde = feature_covariance(&res.twisted_dist, &psir)?;
    let rcond = sigma_tilde.rcond();
    if !(rcond >= RCOND_FLOOR) {
        return Err(Error::SingularCovariance { rcond });
    }
    let chol = Cholesky::new(sigma_tilde.into_matrix())
        .ok_or(Error::SingularCovariance { rcond })?;
    let ratio = chol.solve(sigma_alt.as_matrix());
    let bias = 0.5 * ratio.trace();

    let f = class.evaluate(&res.r_star)?;
    let mean = pi1.mean(&f);
    let second: f64 = pi1
        .weights()
        .iter()
        .zip(f.values())
        .map(|(&w, &v)| w * v * v)
        .sum();
    let variance = second - mean * mean;
    Ok(AsymptoticPrediction {
        bias,
        variance,
        limit: LimitKind::Normal { variance },
        scaling: Scaling::TimesSqrtN,
    })
}

/// Kolmogorov-Smirnov distance between a sample and the chi-squared CDF with
/// `dof` degrees of freedom.
pub fn ks_distance_chi_squared(samples: &[f64], dof: usize) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let mut ks = 0.0_f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = chi_squared_cdf(dof, x);
        let hi = (i + 1) as f64 / m - f;
        let lo = f - i as f64 / m;
        ks = ks.max(hi).max(lo);
    }
    ks
}
