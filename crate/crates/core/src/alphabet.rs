//! Probability distributions on a finite alphabet {0, .., N-1}, empirical
//! types, real-valued symbol functions, and the information functionals
//! built from them: relative entropy, Shannon entropy, the log moment
//! generating function, and exponential twisting.

use std::fs;
use std::path::Path;

use crate::error::{with_path, Error, Result};

/// Probability distribution on {0, .., N-1}. Weights are nonnegative and sum
/// to one; construction normalizes, so any nonnegative, nonzero weight vector
/// is accepted.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    weights: Vec<f64>,
}

impl Distribution {
    /// Builds a distribution from raw nonnegative weights, normalizing their sum.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::AlphabetTooSmall { n: weights.len() });
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteEntry { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeWeight { index, value });
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::AllZero);
        }
        let weights = weights.iter().map(|w| w / total).collect();
        Ok(Self { weights })
    }

    /// Uniform distribution on n symbols.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn alphabet_size(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight of symbol z.
    pub fn w(&self, z: usize) -> f64 {
        self.weights[z]
    }

    pub fn full_support(&self) -> bool {
        self.weights.iter().all(|&w| w > 0.0)
    }

    /// Index of a zero-weight symbol, if any.
    pub fn first_zero(&self) -> Option<usize> {
        self.weights.iter().position(|&w| w == 0.0)
    }

    /// Support pattern as a bit vector, used for equal-support checks.
    pub fn support(&self) -> Vec<bool> {
        self.weights.iter().map(|&w| w > 0.0).collect()
    }

    /// Expectation of f under this distribution. Zero-weight symbols are
    /// skipped, so f may be arbitrary (finite) off the support.
    pub fn mean(&self, f: &SymbolFunction) -> f64 {
        debug_assert_eq!(self.alphabet_size(), f.len());
        self.weights
            .iter()
            .zip(f.values())
            .filter(|(&w, _)| w > 0.0)
            .map(|(&w, &v)| w * v)
            .sum()
    }
}

/// Empirical type of a length-n observation sequence: per-symbol counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalType {
    counts: Vec<u64>,
    n: u64,
}

impl EmpiricalType {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::AlphabetTooSmall { n: counts.len() });
        }
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidSampleSize { n: 0 });
        }
        Ok(Self { counts, n })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn sample_size(&self) -> u64 {
        self.n
    }

    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }

    /// The empirical distribution counts / n.
    pub fn as_distribution(&self) -> Distribution {
        let n = self.n as f64;
        Distribution::new(self.counts.iter().map(|&c| c as f64 / n).collect())
            .expect("type has positive total count")
    }
}

/// Real-valued function on the alphabet, stored as one value per symbol.
/// All values are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFunction {
    values: Vec<f64>,
}

impl SymbolFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteEntry { index, value });
            }
        }
        Ok(Self { values })
    }

    pub fn zero(n: usize) -> Self {
        Self { values: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn v(&self, z: usize) -> f64 {
        self.values[z]
    }

    /// Pointwise sum with a scaled function: self + c * other.
    pub fn add_scaled(&self, c: f64, other: &SymbolFunction) -> SymbolFunction {
        debug_assert_eq!(self.len(), other.len());
        SymbolFunction {
            values: self
                .values
                .iter()
                .zip(other.values())
                .map(|(&a, &b)| a + c * b)
                .collect(),
        }
    }

    /// Pointwise difference self - other.
    pub fn sub(&self, other: &SymbolFunction) -> SymbolFunction {
        self.add_scaled(-1.0, other)
    }

    /// Pointwise shift by a constant.
    pub fn shift(&self, c: f64) -> SymbolFunction {
        SymbolFunction {
            values: self.values.iter().map(|&v| v + c).collect(),
        }
    }
}

/// Log-likelihood ratio log(nu1(z) / nu2(z)) as a symbol function. The two
/// distributions must have identical supports; symbols outside the common
/// support get value 0, which never enters any expectation taken under a
/// distribution with that same support.
pub fn log_likelihood_ratio(nu1: &Distribution, nu2: &Distribution) -> Result<SymbolFunction> {
    check_same_alphabet(nu1, nu2)?;
    if nu1.support() != nu2.support() {
        return Err(Error::UnequalSupports);
    }
    let values = nu1
        .weights()
        .iter()
        .zip(nu2.weights())
        .map(|(&a, &b)| if a > 0.0 { (a / b).ln() } else { 0.0 })
        .collect();
    SymbolFunction::new(values)
}

fn check_same_alphabet(a: &Distribution, b: &Distribution) -> Result<()> {
    if a.alphabet_size() != b.alphabet_size() {
        return Err(Error::AlphabetMismatch {
            left: a.alphabet_size(),
            right: b.alphabet_size(),
        });
    }
    Ok(())
}

/// Relative entropy D(mu || nu) in nats. Terms with mu(z) = 0 contribute 0;
/// any z with mu(z) > 0 and nu(z) = 0 makes the value +infinity. Infinity is
/// an ordinary return value here, not an error.
pub fn kl_divergence(mu: &Distribution, nu: &Distribution) -> Result<f64> {
    check_same_alphabet(mu, nu)?;
    let mut sum = 0.0;
    for (&p, &q) in mu.weights().iter().zip(nu.weights()) {
        if p > 0.0 {
            if q == 0.0 {
                return Ok(f64::INFINITY);
            }
            sum += p * (p / q).ln();
        }
    }
    // rounding can leave a tiny negative value for nearly equal arguments
    Ok(sum.max(0.0))
}

/// Shannon entropy in nats.
pub fn entropy(mu: &Distribution) -> f64 {
    -mu.weights()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

/// Log moment generating function Lambda_pi(f) = log sum_z pi(z) exp(f(z)),
/// evaluated with a max shift so values of |f| up to ~700 stay exact.
/// Zero-weight symbols are excluded, so f there is irrelevant.
pub fn log_mgf(pi: &Distribution, f: &SymbolFunction) -> Result<f64> {
    if pi.alphabet_size() != f.len() {
        return Err(Error::DimensionMismatch {
            expected: pi.alphabet_size(),
            got: f.len(),
        });
    }
    let m = pi
        .weights()
        .iter()
        .zip(f.values())
        .filter(|(&w, _)| w > 0.0)
        .map(|(_, &v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = pi
        .weights()
        .iter()
        .zip(f.values())
        .filter(|(&w, _)| w > 0.0)
        .map(|(&w, &v)| w * (v - m).exp())
        .sum();
    Ok(m + sum.ln())
}

/// Exponentially twisted distribution pi_f(z) proportional to pi(z) exp(f(z)).
/// The support of the result equals the support of pi.
pub fn twisted(pi: &Distribution, f: &SymbolFunction) -> Result<Distribution> {
    let lambda = log_mgf(pi, f)?;
    let weights = pi
        .weights()
        .iter()
        .zip(f.values())
        .map(|(&w, &v)| if w > 0.0 { w * (v - lambda).exp() } else { 0.0 })
        .collect();
    Distribution::new(weights)
}

/// Reads a distribution file: one weight per line, '#' starts a comment,
/// blank lines ignored. Weights are normalized on construction.
pub fn read_distribution(path: &Path) -> Result<Distribution> {
    let text = with_path(path, fs::read_to_string(path))?;
    let mut weights = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let value: f64 = line.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            message: format!("expected a number, got {line:?}"),
        })?;
        weights.push(value);
    }
    Distribution::new(weights)
}

/// Writes a distribution in the same one-weight-per-line format.
pub fn write_distribution(path: &Path, dist: &Distribution) -> Result<()> {
    let mut out = String::new();
    for w in dist.weights() {
        out.push_str(&format!("{w}\n"));
    }
    with_path(path, fs::write(path, out))?;
    Ok(())
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}
