//! Command line front end. Every subcommand produces a result table: with
//! --out the table is written as CSV to the file and a one-line summary goes
//! to stdout, otherwise the CSV itself goes to stdout with the summary
//! appended as a final comment line.
//!
//! Exit codes: 0 on success, 1 for bad input or usage, 2 when a computation
//! could not be carried to the requested accuracy.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mmtest::{
    calibrate_threshold, entropy, error_exponent, kl_divergence, mm_divergence,
    read_distribution, read_function_class, run_experiment, CalibrationMethod, Error, Experiment,
    ExperimentConfig, Result, ResultTable, SolveStatus, SolverOptions, StatisticKind,
};

#[derive(Parser)]
#[command(name = "mmtest", version, about = "Hypothesis testing on finite alphabets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Relative entropy between two distributions
    Divergence {
        /// First distribution file (the divergence is taken from this one)
        #[arg(long, value_name = "FILE")]
        nu1: PathBuf,
        /// Second distribution file
        #[arg(long, value_name = "FILE")]
        nu2: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Mismatched divergence of mu from pi over a function class
    Mmdiv {
        #[arg(long, value_name = "FILE")]
        mu: PathBuf,
        #[arg(long, value_name = "FILE")]
        pi: PathBuf,
        /// Function class file; its reference distribution is pi
        #[arg(long, value_name = "FILE")]
        class: PathBuf,
        /// Gradient norm at which the solver declares convergence
        #[arg(long, default_value_t = 1e-10)]
        grad_tol: f64,
        #[arg(long, default_value_t = 200)]
        max_iterations: usize,
        /// Fail (exit code 2) unless the solver converged; by default a
        /// non-converged status is reported in the output instead
        #[arg(long)]
        require_converged: bool,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Threshold that meets a target false-alarm probability
    Calibrate {
        /// Degrees of freedom of the statistic's null limit
        #[arg(long)]
        dof: usize,
        /// Sample size the threshold is for
        #[arg(long)]
        n: usize,
        /// Target false-alarm probability in (0, 1)
        #[arg(long)]
        p_fa: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Chisq)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = StatisticArg::Mismatched)]
        statistic: StatisticArg,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Worst-case miss exponent of the divergence test at a threshold
    Exponent {
        /// Null distribution file
        #[arg(long, value_name = "FILE")]
        pi0: PathBuf,
        /// Alternate distribution file
        #[arg(long, value_name = "FILE")]
        pi1: PathBuf,
        /// Threshold, or a comma separated list of thresholds
        #[arg(long, value_name = "ETA[,ETA...]")]
        eta: String,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Run a named Monte Carlo experiment
    Experiment {
        /// One of: fig1, roc, nullstats, altstats, codelength
        name: String,
        /// Config file of key = value overrides; must name the same experiment
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Extra key = value overrides, applied after the config file
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    /// Invert the chi-squared null limit
    Chisq,
    /// Invert the raw large-deviations exponent
    Sanov,
}

#[derive(Clone, Copy, ValueEnum)]
enum StatisticArg {
    Mismatched,
    Hoeffding,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn emit(table: &ResultTable, out: Option<&Path>, summary: &str) -> Result<()> {
    match out {
        Some(path) => {
            table.write_csv(path)?;
            println!("{summary}");
            println!("wrote {}", path.display());
        }
        None => {
            print!("{}", table.to_csv());
            println!("# summary: {summary}");
        }
    }
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Divergence { nu1, nu2, out } => {
            let left = read_distribution(&nu1)?;
            let right = read_distribution(&nu2)?;
            let kl = kl_divergence(&left, &right)?;
            let mut table =
                ResultTable::new(&["kl", "kl_reverse", "entropy_nu1", "entropy_nu2"]);
            table.push_meta("nu1", nu1.display());
            table.push_meta("nu2", nu2.display());
            table.push_row(vec![
                kl,
                kl_divergence(&right, &left)?,
                entropy(&left),
                entropy(&right),
            ]);
            emit(&table, out.as_deref(), &format!("D(nu1 || nu2) = {kl}"))
        }
        Command::Mmdiv {
            mu,
            pi,
            class,
            grad_tol,
            max_iterations,
            require_converged,
            out,
        } => {
            let mu_dist = read_distribution(&mu)?;
            let pi_dist = read_distribution(&pi)?;
            let fclass = read_function_class(&class, &pi_dist)?;
            let opts = SolverOptions {
                grad_tol,
                max_iterations,
                ..SolverOptions::default()
            };
            let result = mm_divergence(&mu_dist, &pi_dist, &fclass, &opts)?;
            if require_converged && result.status != SolveStatus::Converged {
                return Err(Error::NotAttained {
                    status: result.status.as_str(),
                });
            }
            let mut table = ResultTable::new(&["symbol", "mu", "pi", "twisted"]);
            table.push_meta("class", fclass.kind().as_str());
            table.push_meta("dimension", fclass.dimension());
            table.push_meta("value", result.value);
            table.push_meta("status", result.status.as_str());
            table.push_meta("iterations", result.iterations);
            table.push_meta("gradient_norm", result.gradient_norm);
            let r_text: Vec<String> = result.r_star.iter().map(f64::to_string).collect();
            table.push_meta("r_star", r_text.join(","));
            for z in 0..mu_dist.alphabet_size() {
                table.push_row(vec![
                    z as f64,
                    mu_dist.w(z),
                    pi_dist.w(z),
                    result.twisted_dist.w(z),
                ]);
            }
            let summary = format!(
                "D-MM = {} status={} iterations={}",
                result.value,
                result.status.as_str(),
                result.iterations
            );
            emit(&table, out.as_deref(), &summary)
        }
        Command::Calibrate {
            dof,
            n,
            p_fa,
            method,
            statistic,
            out,
        } => {
            let kind = match statistic {
                StatisticArg::Mismatched => StatisticKind::Mismatched,
                StatisticArg::Hoeffding => StatisticKind::Hoeffding,
            };
            let method = match method {
                MethodArg::Chisq => CalibrationMethod::ChiSquared,
                MethodArg::Sanov => CalibrationMethod::Sanov,
            };
            let cal = calibrate_threshold(kind, dof, n, p_fa, method)?;
            let mut table = ResultTable::new(&["dof", "n", "p_fa", "eta"]);
            table.push_meta(
                "method",
                match method {
                    CalibrationMethod::ChiSquared => "chisq",
                    CalibrationMethod::Sanov => "sanov",
                },
            );
            table.push_meta(
                "statistic",
                match kind {
                    StatisticKind::Mismatched => "mismatched",
                    StatisticKind::Hoeffding => "hoeffding",
                },
            );
            table.push_row(vec![dof as f64, n as f64, p_fa, cal.eta]);
            emit(
                &table,
                out.as_deref(),
                &format!("eta = {} (dof {dof}, n {n}, p_fa {p_fa})", cal.eta),
            )
        }
        Command::Exponent { pi0, pi1, eta, out } => {
            let null = read_distribution(&pi0)?;
            let alt = read_distribution(&pi1)?;
            let etas: Vec<f64> = eta
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("invalid eta value {s:?}")))
                })
                .collect::<Result<_>>()?;
            let mut table = ResultTable::new(&["eta", "exponent"]);
            table.push_meta("pi0", pi0.display());
            table.push_meta("pi1", pi1.display());
            let mut last = 0.0;
            for &e in &etas {
                last = error_exponent(&null, &alt, e)?;
                table.push_row(vec![e, last]);
            }
            let summary = if etas.len() == 1 {
                format!("exponent = {last} at eta = {}", etas[0])
            } else {
                format!("{} thresholds, last exponent = {last}", etas.len())
            };
            emit(&table, out.as_deref(), &summary)
        }
        Command::Experiment {
            name,
            config,
            seed,
            trials,
            sets,
            out,
        } => {
            let experiment = Experiment::from_name(&name)?;
            let mut cfg = match config {
                Some(path) => {
                    let cfg = ExperimentConfig::from_file(&path)?;
                    if cfg.experiment != experiment {
                        return Err(Error::Config(format!(
                            "config file is for {:?} but the command names {:?}",
                            cfg.experiment.as_str(),
                            experiment.as_str()
                        )));
                    }
                    cfg
                }
                None => ExperimentConfig::defaults(experiment),
            };
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(trials) = trials {
                cfg.trials = trials;
            }
            for pair in &sets {
                let (key, value) = pair.split_once('=').ok_or_else(|| {
                    Error::Config(format!("--set expects key=value, got {pair:?}"))
                })?;
                cfg.set(key.trim(), value.trim())?;
            }
            if let Some(out) = out {
                cfg.out_path = Some(out);
            }
            let table = run_experiment(&cfg)?;
            let summary = format!(
                "{}: {} rows, trials={}, seed={}",
                experiment.as_str(),
                table.rows().len(),
                cfg.trials,
                cfg.seed
            );
            emit(&table, cfg.out_path.as_deref(), &summary)
        }
    }
}
