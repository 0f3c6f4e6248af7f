//! Finite-dimensional function classes over the alphabet. A class is a
//! parametrized family f_r of symbol functions:
//!
//!   linear      f_r(z) = r'psi(z)
//!   log-linear  f_r(z) = log(1 + r'psi(z)), feasible iff the argument is
//!               positive at every symbol; features are mean-zero under the
//!               reference distribution
//!   partition   linear span of indicators of disjoint cells
//!
//! Construction validates that the features together with the constant
//! function are linearly independent on the support of the reference
//! distribution, so downstream covariance matrices are nonsingular.

use std::fs;
use std::path::Path;

use crate::alphabet::{strip_comment, Distribution, SymbolFunction};
use crate::error::{with_path, Error, Result};

/// Parameter vectors r live in R^d with d = class dimension.
pub type ParameterVector = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    Linear,
    LogLinear,
    Partition,
}

impl ClassKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassKind::Linear => "linear",
            ClassKind::LogLinear => "loglinear",
            ClassKind::Partition => "partition",
        }
    }
}

#[derive(Debug, Clone)]
pub struct FunctionClass {
    kind: ClassKind,
    alphabet_size: usize,
    features: Vec<SymbolFunction>,
}

impl FunctionClass {
    /// Linear class spanned by the given features.
    pub fn linear(features: Vec<SymbolFunction>, reference: &Distribution) -> Result<Self> {
        let alphabet_size = validate_shapes(&features, reference)?;
        check_rank(&features, reference)?;
        Ok(Self {
            kind: ClassKind::Linear,
            alphabet_size,
            features,
        })
    }

    /// Log-linear class. With `center` set, features are shifted to mean zero
    /// under the reference; otherwise they must already be centered.
    pub fn log_linear(
        features: Vec<SymbolFunction>,
        reference: &Distribution,
        center: bool,
    ) -> Result<Self> {
        let alphabet_size = validate_shapes(&features, reference)?;
        let features = if center {
            features
                .iter()
                .map(|f| f.shift(-reference.mean(f)))
                .collect::<Vec<_>>()
        } else {
            for (index, f) in features.iter().enumerate() {
                let mean = reference.mean(f);
                if mean.abs() > 1e-10 {
                    return Err(Error::NotCentered { index, mean });
                }
            }
            features
        };
        check_rank(&features, reference)?;
        Ok(Self {
            kind: ClassKind::LogLinear,
            alphabet_size,
            features,
        })
    }

    /// Partition class: indicators of disjoint, non-empty cells. A cell equal
    /// to the whole alphabet is rejected (its indicator is constant), and the
    /// cells must not jointly cover the alphabet, or the indicators and the
    /// constant become dependent.
    pub fn partition(
        cells: &[Vec<usize>],
        reference: &Distribution,
    ) -> Result<Self> {
        let n = reference.alphabet_size();
        let mut owner = vec![usize::MAX; n];
        let mut features = Vec::with_capacity(cells.len());
        for (index, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::EmptySet { index });
            }
            let mut values = vec![0.0; n];
            for &z in cell {
                if z >= n {
                    return Err(Error::DimensionMismatch { expected: n, got: z + 1 });
                }
                if owner[z] != usize::MAX {
                    return Err(Error::OverlappingSets { symbol: z });
                }
                owner[z] = index;
                values[z] = 1.0;
            }
            if cell.len() == n {
                return Err(Error::DegeneratePartition { index });
            }
            features.push(SymbolFunction::new(values)?);
        }
        let alphabet_size = validate_shapes(&features, reference)?;
        check_rank(&features, reference)?;
        Ok(Self {
            kind: ClassKind::Partition,
            alphabet_size,
            features,
        })
    }

    pub fn kind(&self) -> ClassKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.features.len()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn features(&self) -> &[SymbolFunction] {
        &self.features
    }

    fn check_parameter(&self, r: &[f64]) -> Result<()> {
        if r.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: r.len(),
            });
        }
        Ok(())
    }

    /// Inner products r'psi(z) for all z.
    fn linear_form(&self, r: &[f64]) -> Vec<f64> {
        let mut s = vec![0.0; self.alphabet_size];
        for (coef, feature) in r.iter().zip(&self.features) {
            if *coef == 0.0 {
                continue;
            }
            for (acc, &v) in s.iter_mut().zip(feature.values()) {
                *acc += coef * v;
            }
        }
        s
    }

    /// min_z (1 + r'psi(z)), the distance of the log-linear argument from its
    /// boundary. Infinite for classes with no boundary.
    pub fn feasibility_margin(&self, r: &[f64]) -> Result<f64> {
        self.check_parameter(r)?;
        match self.kind {
            ClassKind::LogLinear => Ok(self
                .linear_form(r)
                .iter()
                .map(|&s| 1.0 + s)
                .fold(f64::INFINITY, f64::min)),
            _ => Ok(f64::INFINITY),
        }
    }

    /// The function f_r.
    pub fn evaluate(&self, r: &[f64]) -> Result<SymbolFunction> {
        self.check_parameter(r)?;
        let s = self.linear_form(r);
        match self.kind {
            ClassKind::Linear | ClassKind::Partition => SymbolFunction::new(s),
            ClassKind::LogLinear => {
                let min_value = s.iter().map(|&x| 1.0 + x).fold(f64::INFINITY, f64::min);
                if min_value <= 0.0 {
                    return Err(Error::InfeasibleParameter { min_value });
                }
                SymbolFunction::new(s.iter().map(|&x| x.ln_1p()).collect())
            }
        }
    }

    /// Gradient of f_r with respect to r, one symbol function per coordinate.
    pub fn feature_gradient(&self, r: &[f64]) -> Result<Vec<SymbolFunction>> {
        self.check_parameter(r)?;
        match self.kind {
            ClassKind::Linear | ClassKind::Partition => Ok(self.features.clone()),
            ClassKind::LogLinear => {
                let s = self.linear_form(r);
                let min_value = s.iter().map(|&x| 1.0 + x).fold(f64::INFINITY, f64::min);
                if min_value <= 0.0 {
                    return Err(Error::InfeasibleParameter { min_value });
                }
                self.features
                    .iter()
                    .map(|f| {
                        SymbolFunction::new(
                            f.values()
                                .iter()
                                .zip(&s)
                                .map(|(&v, &x)| v / (1.0 + x))
                                .collect(),
                        )
                    })
                    .collect()
            }
        }
    }
}

fn validate_shapes(features: &[SymbolFunction], reference: &Distribution) -> Result<usize> {
    let n = reference.alphabet_size();
    if features.is_empty() {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    for f in features {
        if f.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: f.len(),
            });
        }
    }
    Ok(n)
}

/// Verifies that {1, psi_1, .., psi_d} restricted to the support of the
/// reference are linearly independent, by pivoted modified Gram-Schmidt.
/// A pivot smaller than 1e-9 times the largest original column norm counts
/// as dependent.
fn check_rank(features: &[SymbolFunction], reference: &Distribution) -> Result<()> {
    let support: Vec<usize> = (0..reference.alphabet_size())
        .filter(|&z| reference.w(z) > 0.0)
        .collect();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(features.len() + 1);
    cols.push(vec![1.0; support.len()]);
    for f in features {
        cols.push(support.iter().map(|&z| f.v(z)).collect());
    }
    if cols.len() > support.len() {
        return Err(Error::DependentFeatures);
    }
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = 1e-9
        * cols
            .iter()
            .map(|c| norm(c))
            .fold(0.0_f64, f64::max);
    let mut remaining: Vec<Vec<f64>> = cols;
    while !remaining.is_empty() {
        // pivot: remaining column with the largest residual norm
        let (best, best_norm) = remaining
            .iter()
            .enumerate()
            .map(|(i, c)| (i, norm(c)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("remaining is non-empty");
        if best_norm < tol {
            return Err(Error::DependentFeatures);
        }
        let q: Vec<f64> = remaining
            .swap_remove(best)
            .iter()
            .map(|x| x / best_norm)
            .collect();
        for c in &mut remaining {
            let proj: f64 = q.iter().zip(c.iter()).map(|(a, b)| a * b).sum();
            for (x, &qi) in c.iter_mut().zip(&q) {
                *x -= proj * qi;
            }
        }
    }
    Ok(())
}

/// Reads a function class file. Format:
///
/// ```text
/// kind=linear            # or loglinear, partition
/// center=true            # optional, loglinear only
/// 0.5  -1.0  0.5         # one feature per row, one column per symbol
/// ...
/// ```
///
/// '#' starts a comment anywhere; blank lines are ignored. Partition rows
/// must be 0/1 indicators of the cells.
pub fn read_function_class(path: &Path, reference: &Distribution) -> Result<FunctionClass> {
    let text = with_path(path, fs::read_to_string(path))?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut kind: Option<&str> = None;
    let mut center = false;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        // feature rows never contain '=', so any such line is a header
        if let Some((key, value)) = line.split_once('=') {
            match key.trim() {
                "kind" => {
                    kind = Some(match value.trim() {
                        "linear" => "linear",
                        "loglinear" => "loglinear",
                        "partition" => "partition",
                        other => {
                            return Err(parse_err(
                                lineno + 1,
                                format!(
                                    "unknown kind {other:?} (expected linear, loglinear, partition)"
                                ),
                            ))
                        }
                    });
                }
                "center" => {
                    center = match value.trim() {
                        "true" => true,
                        "false" => false,
                        other => {
                            return Err(parse_err(
                                lineno + 1,
                                format!("center must be true or false, got {other:?}"),
                            ))
                        }
                    }
                }
                other => {
                    return Err(parse_err(lineno + 1, format!("unknown header key {other:?}")))
                }
            }
            continue;
        }
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| parse_err(lineno + 1, format!("expected a number, got {tok:?}")))
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    let kind = kind.ok_or_else(|| parse_err(0, "missing kind= line".into()))?;
    if rows.is_empty() {
        return Err(parse_err(0, "no feature rows".into()));
    }
    let n = reference.alphabet_size();
    for row in &rows {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
    }
    match kind {
        "linear" => {
            let features = rows
                .into_iter()
                .map(SymbolFunction::new)
                .collect::<Result<Vec<_>>>()?;
            FunctionClass::linear(features, reference)
        }
        "loglinear" => {
            let features = rows
                .into_iter()
                .map(SymbolFunction::new)
                .collect::<Result<Vec<_>>>()?;
            FunctionClass::log_linear(features, reference, center)
        }
        "partition" => {
            let mut cells = Vec::with_capacity(rows.len());
            for row in &rows {
                let mut cell = Vec::new();
                for (z, &v) in row.iter().enumerate() {
                    if v == 1.0 {
                        cell.push(z);
                    } else if v != 0.0 {
                        return Err(Error::Config(format!(
                            "partition rows must be 0/1 indicators, got {v}"
                        )));
                    }
                }
                cells.push(cell);
            }
            FunctionClass::partition(&cells, reference)
        }
        _ => unreachable!(),
    }
}

/// Writes a class in the format accepted by `read_function_class`.
pub fn write_function_class(path: &Path, class: &FunctionClass) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("kind={}\n", class.kind().as_str()));
    if class.kind() == ClassKind::LogLinear {
        // features are stored centered; re-centering on read is a no-op
        out.push_str("center=true\n");
    }
    for f in class.features() {
        let row: Vec<String> = f.values().iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    with_path(path, fs::write(path, out))?;
    Ok(())
}
