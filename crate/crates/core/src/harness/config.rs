//! Experiment selection and configuration. Config files are plain
//! `key = value` lines ('#' comments allowed); every key has an
//! experiment-specific default so a file can be as short as
//! `experiment = fig1`. List values are comma-separated.

use std::fs;
use std::path::{Path, PathBuf};

use crate::alphabet::strip_comment;
use crate::error::{with_path, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    /// False-alarm probability of the relative entropy test against its
    /// chi-squared and pure-exponent approximations, over a threshold grid.
    Fig1,
    /// Detection probability versus false-alarm rate of the mismatched test
    /// across class dimensions, with the relative entropy test as reference.
    Roc,
    /// Null-hypothesis mean, variance, and distributional fit of the scaled
    /// statistics.
    NullStats,
    /// Alternate-hypothesis bias and variance against their predicted limits.
    AltStats,
    /// Excess codelength of a two-part type-based code.
    Codelength,
}

impl Experiment {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "fig1" => Ok(Experiment::Fig1),
            "roc" => Ok(Experiment::Roc),
            "nullstats" => Ok(Experiment::NullStats),
            "altstats" => Ok(Experiment::AltStats),
            "codelength" => Ok(Experiment::Codelength),
            other => Err(Error::Config(format!(
                "unknown experiment {other:?} (expected fig1, roc, nullstats, altstats, codelength)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::Fig1 => "fig1",
            Experiment::Roc => "roc",
            Experiment::NullStats => "nullstats",
            Experiment::AltStats => "altstats",
            Experiment::Codelength => "codelength",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Alphabet size N.
    pub alphabet_size: usize,
    /// Observation lengths n.
    pub sample_sizes: Vec<usize>,
    /// Class dimensions to sweep.
    pub d_list: Vec<usize>,
    /// Monte Carlo trials per cell (per hypothesis where two are sampled).
    pub trials: usize,
    pub seed: u64,
    /// Target false-alarm probabilities (roc).
    pub p_fa_grid: Vec<f64>,
    /// Thresholds to tabulate (fig1).
    pub eta_grid: Vec<f64>,
    /// Interior margin of the type-code region (codelength).
    pub epsilon: f64,
    /// Put the log likelihood ratio in the class span (roc, altstats).
    pub include_llr: bool,
    pub out_path: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Baseline configuration for an experiment; every field can be
    /// overridden afterwards.
    pub fn defaults(experiment: Experiment) -> Self {
        let base = Self {
            experiment,
            alphabet_size: 0,
            sample_sizes: Vec::new(),
            d_list: Vec::new(),
            trials: 0,
            seed: 42,
            p_fa_grid: Vec::new(),
            eta_grid: Vec::new(),
            epsilon: 0.0,
            include_llr: true,
            out_path: None,
        };
        match experiment {
            Experiment::Fig1 => Self {
                alphabet_size: 20,
                sample_sizes: vec![1000],
                trials: 1_000_000,
                // spans false-alarm rates from roughly 0.5 down past 1e-4
                // for N = 20 and n = 1000
                eta_grid: log_spaced(0.008, 0.030, 25),
                ..base
            },
            Experiment::Roc => Self {
                alphabet_size: 19,
                sample_sizes: vec![40],
                d_list: vec![1, 5, 10, 18],
                trials: 100_000,
                p_fa_grid: vec![0.05, 0.1, 0.2, 0.3],
                ..base
            },
            Experiment::NullStats => Self {
                alphabet_size: 8,
                sample_sizes: vec![2000],
                d_list: vec![3],
                trials: 100_000,
                ..base
            },
            Experiment::AltStats => Self {
                alphabet_size: 5,
                sample_sizes: vec![5000],
                d_list: vec![1],
                trials: 200_000,
                ..base
            },
            Experiment::Codelength => Self {
                alphabet_size: 6,
                sample_sizes: vec![4000],
                trials: 100_000,
                epsilon: 0.05,
                ..base
            },
        }
    }

    /// Reads a config file. The `experiment` key selects the defaults; any
    /// other keys override them.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = with_path(path, fs::read_to_string(path))?;
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message: format!("expected key = value, got {line:?}"),
            })?;
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        let experiment = pairs
            .iter()
            .find(|(k, _)| k == "experiment")
            .map(|(_, v)| Experiment::from_name(v))
            .transpose()?
            .ok_or_else(|| Error::Config("config file must set experiment".into()))?;
        let mut cfg = Self::defaults(experiment);
        for (key, value) in &pairs {
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one key = value override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("invalid {what}: {value:?}"));
        match key {
            "experiment" => {
                // already consumed to pick defaults; accept and verify
                let e = Experiment::from_name(value)?;
                if e != self.experiment {
                    return Err(Error::Config(
                        "experiment key conflicts with selected experiment".into(),
                    ));
                }
            }
            "N" => self.alphabet_size = value.parse().map_err(|_| bad("N"))?,
            "n" => self.sample_sizes = parse_list(value).ok_or_else(|| bad("n"))?,
            "d_list" => self.d_list = parse_list(value).ok_or_else(|| bad("d_list"))?,
            "trials" => self.trials = value.parse().map_err(|_| bad("trials"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "p_fa_grid" => {
                self.p_fa_grid = parse_list(value).ok_or_else(|| bad("p_fa_grid"))?
            }
            "eta_grid" => self.eta_grid = parse_list(value).ok_or_else(|| bad("eta_grid"))?,
            "epsilon" => self.epsilon = value.parse().map_err(|_| bad("epsilon"))?,
            "include_llr" => {
                self.include_llr = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(bad("include_llr")),
                }
            }
            "out" => self.out_path = Some(PathBuf::from(value)),
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphabet_size < 2 {
            return Err(Error::AlphabetTooSmall {
                n: self.alphabet_size,
            });
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.contains(&0) {
            return Err(Error::InvalidSampleSize {
                n: *self.sample_sizes.iter().min().unwrap_or(&0),
            });
        }
        match self.experiment {
            Experiment::Fig1 => {
                if self.eta_grid.is_empty() || self.eta_grid.iter().any(|&e| e <= 0.0) {
                    return Err(Error::Config("eta_grid must hold positive thresholds".into()));
                }
            }
            Experiment::Roc => {
                if self.alphabet_size % 2 == 0 {
                    return Err(Error::EvenAlphabet {
                        n: self.alphabet_size,
                    });
                }
                self.check_d_list()?;
                if self.p_fa_grid.is_empty()
                    || self.p_fa_grid.iter().any(|&p| !(p > 0.0 && p < 1.0))
                {
                    return Err(Error::Config(
                        "p_fa_grid must hold probabilities in (0, 1)".into(),
                    ));
                }
            }
            Experiment::NullStats => self.check_d_list()?,
            Experiment::AltStats => {
                if self.alphabet_size % 2 == 0 {
                    return Err(Error::EvenAlphabet {
                        n: self.alphabet_size,
                    });
                }
                self.check_d_list()?;
            }
            Experiment::Codelength => {
                if !(self.epsilon > 0.0) {
                    return Err(Error::Config("epsilon must be positive".into()));
                }
            }
        }
        Ok(())
    }

    fn check_d_list(&self) -> Result<()> {
        if self.d_list.is_empty() {
            return Err(Error::Config("d_list must not be empty".into()));
        }
        for &d in &self.d_list {
            if d == 0 || d > self.alphabet_size - 1 {
                return Err(Error::Config(format!(
                    "class dimension {d} out of range 1..={}",
                    self.alphabet_size - 1
                )));
            }
        }
        Ok(())
    }

    /// Meta block shared by every experiment's output table.
    pub fn echo_meta(&self, table: &mut super::ResultTable) {
        table.push_meta("experiment", self.experiment.as_str());
        table.push_meta("version", env!("CARGO_PKG_VERSION"));
        table.push_meta("seed", self.seed);
        table.push_meta("N", self.alphabet_size);
        table.push_meta("n", join(&self.sample_sizes));
        table.push_meta("trials", self.trials);
        if !self.d_list.is_empty() {
            table.push_meta("d_list", join(&self.d_list));
        }
        if !self.p_fa_grid.is_empty() {
            table.push_meta("p_fa_grid", join(&self.p_fa_grid));
        }
        if !self.eta_grid.is_empty() {
            table.push_meta("eta_grid", join(&self.eta_grid));
        }
        if self.experiment == Experiment::Codelength {
            table.push_meta("epsilon", self.epsilon);
        }
        if matches!(self.experiment, Experiment::Roc | Experiment::AltStats) {
            table.push_meta("include_llr", self.include_llr);
        }
    }
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_list<T: std::str::FromStr>(value: &str) -> Option<Vec<T>> {
    let items: std::result::Result<Vec<T>, _> = value
        .split(',')
        .map(|tok| tok.trim().parse::<T>())
        .collect();
    items.ok().filter(|v| !v.is_empty())
}

fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (llo + (lhi - llo) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
