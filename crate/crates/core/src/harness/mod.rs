//! Reproducible Monte Carlo experiments. Each runner consumes an
//! [`ExperimentConfig`], draws every random quantity from streams derived
//! from the single seed (index 0 for setup draws such as random features,
//! indices 1.. for trials), and emits a [`ResultTable`]. Trials are
//! parallelized but collected in index order, so output is identical for any
//! worker count.

pub mod config;
pub mod table;

pub use config::{Experiment, ExperimentConfig};
pub use table::ResultTable;

use rayon::prelude::*;

use crate::alphabet::{kl_divergence, log_likelihood_ratio, Distribution, SymbolFunction};
use crate::asymptotics::{ks_distance_chi_squared, predicted_alt_stats};
use crate::chi2::chi_squared_sf;
use crate::class::FunctionClass;
use crate::error::{Error, Result};
use crate::rng::{sample_type, RandomStream};
use crate::solver::{mm_divergence, SolverOptions};

/// Dispatches to the runner for the configured experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Fig1 => run_fig1(cfg),
        Experiment::Roc => run_roc(cfg),
        Experiment::NullStats => run_null_stats(cfg),
        Experiment::AltStats => run_alt_stats(cfg),
        Experiment::Codelength => run_codelength(cfg),
    }
}

/// Symmetric triangular alternate on an odd alphabet N = 2m - 1:
/// weight (m - |k - (m-1)|) / m^2 at symbol k, peaking at m/m^2 in the middle.
pub fn triangle_alternate(n: usize) -> Result<Distribution> {
    if n % 2 == 0 {
        return Err(Error::EvenAlphabet { n });
    }
    let m = (n + 1) / 2;
    let weights: Vec<f64> = (0..n)
        .map(|k| (m as f64 - (k as f64 - (m as f64 - 1.0)).abs()) / (m * m) as f64)
        .collect();
    Distribution::new(weights)
}

/// Draws `random_count` features with independent standard normal values per
/// symbol from stream (seed, 0), centers them under pi0, and prepends the
/// fixed features. Redraws the random block until the full set passes the
/// construction-time rank check.
fn feature_pool(
    pi0: &Distribution,
    fixed: Vec<SymbolFunction>,
    random_count: usize,
    seed: u64,
) -> Result<Vec<SymbolFunction>> {
    let n = pi0.alphabet_size();
    let mut stream = RandomStream::derive(seed, 0);
    for _ in 0..100 {
        let mut features = fixed.clone();
        for _ in 0..random_count {
            let raw: Vec<f64> = (0..n).map(|_| stream.standard_normal()).collect();
            let f = SymbolFunction::new(raw)?;
            features.push(f.shift(-pi0.mean(&f)));
        }
        match FunctionClass::linear(features.clone(), pi0) {
            Ok(_) => return Ok(features),
            Err(Error::DependentFeatures) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::DependentFeatures)
}

fn class_prefix(features: &[SymbolFunction], d: usize, pi0: &Distribution) -> Result<FunctionClass> {
    FunctionClass::linear(features[..d].to_vec(), pi0)
}

/// Mean and unbiased sample variance.
fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Threshold at the empirical (1 - p) quantile of the null statistics, with
/// the false-alarm rate it actually achieves. `sorted` must be ascending.
fn empirical_threshold(sorted: &[f64], p: f64) -> (f64, f64) {
    let t = sorted.len();
    let j = ((1.0 - p) * t as f64).ceil() as usize;
    let j = j.min(t - 1);
    let eta = sorted[j];
    let below = sorted.partition_point(|&s| s < eta);
    (eta, (t - below) as f64 / t as f64)
}

fn exceed_fraction(sorted: &[f64], eta: f64) -> f64 {
    let below = sorted.partition_point(|&s| s < eta);
    (sorted.len() - below) as f64 / sorted.len() as f64
}

/// False-alarm probability of the relative entropy test across thresholds,
/// against the chi-squared and pure-exponent approximations.
pub fn run_fig1(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let pi0 = Distribution::uniform(cfg.alphabet_size)?;
    let dof = cfg.alphabet_size - 1;
    let mut table = ResultTable::new(&["n", "eta", "p_fa_mc", "p_fa_chisq", "p_fa_sanov", "trials"]);
    cfg.echo_meta(&mut table);

    for (ni, &n) in cfg.sample_sizes.iter().enumerate() {
        let offset = 1 + (ni * cfg.trials) as u64;
        let mut stats: Vec<f64> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| -> Result<f64> {
                let mut stream = RandomStream::derive(cfg.seed, offset + t as u64);
                let gamma = sample_type(&pi0, n, &mut stream)?;
                kl_divergence(&gamma.as_distribution(), &pi0)
            })
            .collect::<Result<Vec<_>>>()?;
        stats.sort_by(f64::total_cmp);
        for &eta in &cfg.eta_grid {
            let p_mc = exceed_fraction(&stats, eta);
            let p_chisq = chi_squared_sf(dof, 2.0 * n as f64 * eta);
            let p_sanov = (-(n as f64) * eta).exp();
            table.push_row(vec![n as f64, eta, p_mc, p_chisq, p_sanov, cfg.trials as f64]);
        }
    }
    Ok(table)
}

/// Per-trial statistics behind the ROC experiment: one curve per class
/// dimension plus the relative entropy reference, under both hypotheses.
pub struct RocCurves {
    pub d_list: Vec<usize>,
    /// null[k][t]: statistic of null trial t on curve k (curves follow
    /// d_list order, last curve is the relative entropy statistic).
    pub null: Vec<Vec<f64>>,
    pub alt: Vec<Vec<f64>>,
}

/// Draws both hypotheses and evaluates every curve's statistic per trial.
pub fn roc_trial_statistics(cfg: &ExperimentConfig, n: usize, offset: u64) -> Result<RocCurves> {
    let pi0 = Distribution::uniform(cfg.alphabet_size)?;
    let pi1 = triangle_alternate(cfg.alphabet_size)?;
    let max_d = *cfg.d_list.iter().max().expect("validated non-empty");
    let fixed = if cfg.include_llr {
        vec![log_likelihood_ratio(&pi1, &pi0)?]
    } else {
        Vec::new()
    };
    let pool = feature_pool(&pi0, fixed, max_d - cfg.include_llr as usize, cfg.seed)?;
    let classes: Vec<FunctionClass> = cfg
        .d_list
        .iter()
        .map(|&d| class_prefix(&pool, d, &pi0))
        .collect::<Result<_>>()?;
    let opts = SolverOptions::default();

    let run_hypothesis = |source: &Distribution, base: u64| -> Result<Vec<Vec<f64>>> {
        let per_trial: Vec<Vec<f64>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| -> Result<Vec<f64>> {
                let mut stream = RandomStream::derive(cfg.seed, base + t as u64);
                let gamma = sample_type(source, n, &mut stream)?;
                let mu = gamma.as_distribution();
                let mut row = Vec::with_capacity(classes.len() + 1);
                for class in &classes {
                    row.push(mm_divergence(&mu, &pi0, class, &opts)?.value);
                }
                row.push(kl_divergence(&mu, &pi0)?);
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        let curves = classes.len() + 1;
        let mut out = vec![Vec::with_capacity(cfg.trials); curves];
        for row in per_trial {
            for (k, v) in row.into_iter().enumerate() {
                out[k].push(v);
            }
        }
        Ok(out)
    };

    Ok(RocCurves {
        d_list: cfg.d_list.clone(),
        null: run_hypothesis(&pi0, offset)?,
        alt: run_hypothesis(&pi1, offset + cfg.trials as u64)?,
    })
}

/// Detection probability against false-alarm rate across class dimensions,
/// with the relative entropy test as the final row group (kind = 1).
pub fn run_roc(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut table =
        ResultTable::new(&["d", "eta", "p_fa", "p_d", "p_fa_target", "kind", "n"]);
    cfg.echo_meta(&mut table);
    for (ni, &n) in cfg.sample_sizes.iter().enumerate() {
        let offset = 1 + (ni * 2 * cfg.trials) as u64;
        let curves = roc_trial_statistics(cfg, n, offset)?;
        let hoeffding_d = (cfg.alphabet_size - 1) as f64;
        for (k, nulls) in curves.null.iter().enumerate() {
            let mut sorted = nulls.clone();
            sorted.sort_by(f64::total_cmp);
            let mut alt_sorted = curves.alt[k].clone();
            alt_sorted.sort_by(f64::total_cmp);
            let (d, kind) = if k < curves.d_list.len() {
                (curves.d_list[k] as f64, 0.0)
            } else {
                (hoeffding_d, 1.0)
            };
            for &p in &cfg.p_fa_grid {
                let (eta, p_fa) = empirical_threshold(&sorted, p);
                let p_d = exceed_fraction(&alt_sorted, eta);
                table.push_row(vec![d, eta, p_fa, p_d, p, kind, n as f64]);
            }
        }
    }
    Ok(table)
}

/// Null-hypothesis moments of the scaled statistics and the fit of twice the
/// scaled statistic to its chi-squared limit. The relative entropy statistic
/// appears as kind = 1 rows with d = N - 1.
pub fn run_null_stats(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let pi0 = Distribution::uniform(cfg.alphabet_size)?;
    let max_d = *cfg.d_list.iter().max().expect("validated non-empty");
    let pool = feature_pool(&pi0, Vec::new(), max_d, cfg.seed)?;
    let classes: Vec<FunctionClass> = cfg
        .d_list
        .iter()
        .map(|&d| class_prefix(&pool, d, &pi0))
        .collect::<Result<_>>()?;
    let opts = SolverOptions::default();

    let mut table =
        ResultTable::new(&["kind", "n", "d", "mean_n_stat", "var_n_stat", "ks", "trials"]);
    cfg.echo_meta(&mut table);

    for (ni, &n) in cfg.sample_sizes.iter().enumerate() {
        let offset = 1 + (ni * cfg.trials) as u64;
        let per_trial: Vec<Vec<f64>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| -> Result<Vec<f64>> {
                let mut stream = RandomStream::derive(cfg.seed, offset + t as u64);
                let gamma = sample_type(&pi0, n, &mut stream)?;
                let mu = gamma.as_distribution();
                let mut row = Vec::with_capacity(classes.len() + 1);
                for class in &classes {
                    row.push(mm_divergence(&mu, &pi0, class, &opts)?.value);
                }
                row.push(kl_divergence(&mu, &pi0)?);
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;

        for (k, &d) in cfg
            .d_list
            .iter()
            .chain(std::iter::once(&(cfg.alphabet_size - 1)))
            .enumerate()
        {
            let scaled: Vec<f64> = per_trial.iter().map(|row| n as f64 * row[k]).collect();
            let (mean, var) = mean_var(&scaled);
            let doubled: Vec<f64> = scaled.iter().map(|&x| 2.0 * x).collect();
            let ks = ks_distance_chi_squared(&doubled, d);
            let kind = if k < cfg.d_list.len() { 0.0 } else { 1.0 };
            table.push_row(vec![
                kind,
                n as f64,
                d as f64,
                mean,
                var,
                ks,
                cfg.trials as f64,
            ]);
        }
    }
    Ok(table)
}

/// Alternate-hypothesis bias and variance of the mismatched statistic against
/// the predicted limits. The bias is reported both raw and with a zero-mean
/// control variate subtracted (the linear statistic n <type/n - pi1, f_r1>),
/// which removes most of the Monte Carlo error at these scales.
pub fn run_alt_stats(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let pi0 = Distribution::uniform(cfg.alphabet_size)?;
    let pi1 = triangle_alternate(cfg.alphabet_size)?;
    let max_d = *cfg.d_list.iter().max().expect("validated non-empty");
    let fixed = if cfg.include_llr {
        vec![log_likelihood_ratio(&pi1, &pi0)?]
    } else {
        Vec::new()
    };
    let pool = feature_pool(&pi0, fixed, max_d - cfg.include_llr as usize, cfg.seed)?;
    let opts = SolverOptions::default();

    let mut table = ResultTable::new(&[
        "n",
        "d",
        "bias_mc",
        "bias_mc_cv",
        "bias_pred",
        "var_sqrtn_mc",
        "var_pred",
        "trials",
    ]);
    cfg.echo_meta(&mut table);

    for (ni, &n) in cfg.sample_sizes.iter().enumerate() {
        let offset = 1 + (ni * cfg.trials) as u64;
        let types: Vec<Distribution> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| -> Result<Distribution> {
                let mut stream = RandomStream::derive(cfg.seed, offset + t as u64);
                Ok(sample_type(&pi1, n, &mut stream)?.as_distribution())
            })
            .collect::<Result<Vec<_>>>()?;

        for &d in &cfg.d_list {
            let class = class_prefix(&pool, d, &pi0)?;
            let population = mm_divergence(&pi1, &pi0, &class, &opts)?;
            let f1 = class.evaluate(&population.r_star)?;
            let pred = predicted_alt_stats(&pi1, &pi0, &class, &opts)?;
            let f1_mean = pi1.mean(&f1);

            let stats: Vec<(f64, f64)> = types
                .par_iter()
                .map(|mu| -> Result<(f64, f64)> {
                    let v = mm_divergence(mu, &pi0, &class, &opts)?.value;
                    Ok((v, mu.mean(&f1) - f1_mean))
                })
                .collect::<Result<Vec<_>>>()?;

            let centered: Vec<f64> = stats
                .iter()
                .map(|(v, _)| n as f64 * (v - population.value))
                .collect();
            let with_cv: Vec<f64> = stats
                .iter()
                .map(|(v, lin)| n as f64 * (v - population.value - lin))
                .collect();
            let values: Vec<f64> = stats.iter().map(|(v, _)| *v).collect();
            let (bias_mc, _) = mean_var(&centered);
            let (bias_cv, _) = mean_var(&with_cv);
            let (_, var_v) = mean_var(&values);
            table.push_row(vec![
                n as f64,
                d as f64,
                bias_mc,
                bias_cv,
                pred.bias,
                n as f64 * var_v,
                pred.variance,
                cfg.trials as f64,
            ]);
        }
    }
    Ok(table)
}

/// Excess codelength of the two-part code that describes the type and then
/// codes for it when the type is epsilon/2-interior, falling back to the
/// uniform code otherwise.
pub fn run_codelength(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let pi = Distribution::uniform(cfg.alphabet_size)?;
    let uniform = Distribution::uniform(cfg.alphabet_size)?;
    let min_weight = pi
        .weights()
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b));
    if cfg.epsilon >= min_weight {
        return Err(Error::EpsilonTooLarge {
            epsilon: cfg.epsilon,
            min_weight,
        });
    }

    let mut table = ResultTable::new(&[
        "n",
        "mean_n_excess",
        "var_n_excess",
        "fallback_rate",
        "trials",
    ]);
    cfg.echo_meta(&mut table);

    for (ni, &n) in cfg.sample_sizes.iter().enumerate() {
        let offset = 1 + (ni * cfg.trials) as u64;
        let results: Vec<(f64, bool)> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| -> Result<(f64, bool)> {
                let mut stream = RandomStream::derive(cfg.seed, offset + t as u64);
                let gamma = sample_type(&pi, n, &mut stream)?;
                let mu = gamma.as_distribution();
                let interior = mu.weights().iter().all(|&w| w > cfg.epsilon / 2.0);
                let excess = if interior {
                    kl_divergence(&pi, &mu)?
                } else {
                    kl_divergence(&pi, &uniform)?
                };
                Ok((n as f64 * excess, !interior))
            })
            .collect::<Result<Vec<_>>>()?;

        let scaled: Vec<f64> = results.iter().map(|(x, _)| *x).collect();
        let fallbacks = results.iter().filter(|(_, f)| *f).count();
        let (mean, var) = mean_var(&scaled);
        table.push_row(vec![
            n as f64,
            mean,
            var,
            fallbacks as f64 / cfg.trials as f64,
            cfg.trials as f64,
        ]);
    }
    Ok(table)
}
