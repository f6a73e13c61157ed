//! Command-line interface.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use wpc_core::bootstrap::{BootstrapConfig, KSelection, MarginSpec};
use wpc_core::sim::{
    run_experiment_with_progress, run_trial, ExperimentConfig, Progress, SimModel, SimSpec,
    SweepParam,
};
use wpc_core::{CvConfig, KernelSpec, TestConfig, TieBreak};

use crate::ci_matrix::ci_matrix;
use crate::input::{self, InputError};
use crate::report::{self, Format, SimulateReport, TestReport};

const OUTPUT_HELP: &str = "\
Output (stdout unless --output is given; wall time and progress go to stderr):
  test       JSON keys statistic, p_value, quantile, reject, alpha, B, k_selected, seed
             CSV columns statistic,p_value,quantile,reject,alpha,B,k1,k2,seed
  simulate   as test, preceded by model, n, d, a, c (JSON also beta1, beta2)
  sweep      CSV columns param,value,freq,se,mean_p,auc,trials (one row per value)
             JSON: model, param, trials, alpha, B, seed, cells[] with per-trial p_values
  ci-matrix  JSON: variables, alpha, B, seed, p_values and adjacency (p x p, null diagonal)
             CSV columns i,j,var_i,var_j,p_value,edge,k1,k2 (one row per pair, 1-based)

Input CSV for test: header x1..xd,y1,y2 (any order), at least 10 rows.
Input CSV for ci-matrix: any header, at least 3 numeric columns and 10 rows.

Exit status: 0 success, 1 internal error, 2 invalid input or arguments.";

#[derive(Debug, Parser)]
#[command(
    name = "wpc",
    version,
    about = "Weighted partial copula test of conditional independence Y1 _||_ Y2 | X",
    after_help = OUTPUT_HELP
)]
pub struct Cli {
    /// Worker threads [default: available cores].
    #[arg(long, global = true, env = "WPC_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test Y1 _||_ Y2 | X on a CSV file.
    Test {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        test: TestArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Generate one dataset from a synthetic model and test it.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        test: TestArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rejection frequencies of repeated simulations over a parameter grid.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        /// Swept parameter.
        #[arg(long, value_parser = parse_param)]
        param: SweepParam,
        /// Comma-separated values of the swept parameter.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Also simulate null datasets (a = 0) and report the ROC AUC.
        #[arg(long)]
        auc: bool,
        /// Ceiling on trials * B * n^2 summed over the grid.
        #[arg(long, default_value_t = 1e14)]
        cost_ceiling: f64,
        #[arg(long)]
        quiet: bool,
        #[command(flatten)]
        test: TestArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Test every pair of columns given all remaining columns.
    CiMatrix {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        test: TestArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MarginKind {
    /// k-nearest neighbors.
    Knn,
    /// Gaussian linear regression without intercept.
    Lr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Ties {
    /// Seeded random order within tied pseudo-observations.
    Random,
    /// Tied pseudo-observations share their largest rank.
    Max,
}

#[derive(Debug, Clone, Args)]
pub struct TestArgs {
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Bootstrap replicates.
    #[arg(long = "B", default_value_t = 200)]
    pub replicates: usize,
    #[arg(long, value_enum, default_value_t = MarginKind::Knn)]
    pub margin: MarginKind,
    /// Neighbors for both margins (skips cross-validation).
    #[arg(long, conflicts_with_all = ["k1", "k2"])]
    pub k: Option<usize>,
    #[arg(long, requires = "k2")]
    pub k1: Option<usize>,
    #[arg(long, requires = "k1")]
    pub k2: Option<usize>,
    /// Cross-validation folds.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Scale s of the weight w(t) = exp(-|t|^2 / s^2).
    #[arg(long, default_value_t = 1.0)]
    pub kernel_scale: f64,
    /// z-score the covariates first.
    #[arg(long)]
    pub standardize: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep the original margins in the bootstrap instead of refitting them.
    #[arg(long)]
    pub no_refit: bool,
    /// Re-run the cross-validation on every bootstrap sample.
    #[arg(long, conflicts_with = "no_refit")]
    pub reselect_k: bool,
    #[arg(long, value_enum, default_value_t = Ties::Random)]
    pub ties: Ties,
    /// Run even above the cost ceiling.
    #[arg(long)]
    pub force: bool,
}

impl TestArgs {
    pub fn config(&self) -> Result<TestConfig, CliError> {
        let margin = match self.margin {
            MarginKind::Lr => {
                if self.k.is_some() || self.k1.is_some() {
                    return Err(CliError::Usage(
                        "--k/--k1/--k2 apply to --margin knn only".into(),
                    ));
                }
                MarginSpec::Lr
            }
            MarginKind::Knn => match (self.k, self.k1, self.k2) {
                (Some(k), _, _) => MarginSpec::Knn(KSelection::Fixed(k, k)),
                (None, Some(k1), Some(k2)) => MarginSpec::Knn(KSelection::Fixed(k1, k2)),
                _ => MarginSpec::Knn(KSelection::Cv(CvConfig {
                    folds: self.folds,
                    grid: None,
                    seed: self.seed,
                })),
            },
        };
        Ok(TestConfig {
            margin,
            kernel: KernelSpec::gaussian(self.kernel_scale)?,
            bootstrap: BootstrapConfig {
                replicates: self.replicates,
                alpha: self.alpha,
                seed: self.seed,
                refit_margins: !self.no_refit,
                reselect_k: self.reselect_k,
                force: self.force,
                ..Default::default()
            },
            standardize: self.standardize,
            ties: match self.ties {
                Ties::Random => TieBreak::Random(self.seed),
                Ties::Max => TieBreak::Max,
            },
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_parser = parse_model)]
    pub model: SimModel,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Dependence parameter; a = 0 is the null hypothesis.
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,
    /// Disturbance magnitude (disturbed_linear only).
    #[arg(long, default_value_t = 0.0)]
    pub c: f64,
}

impl ModelArgs {
    fn spec(&self, seed: u64) -> Result<SimSpec, CliError> {
        Ok(SimSpec::new(
            self.model, self.n, self.d, self.a, self.c, seed,
        )?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file [default: stdout].
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl OutputArgs {
    fn open(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match &self.output {
            Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
                CliError::Usage(format!("cannot create {}: {e}", path.display()))
            })?)),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn write(&self, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), CliError> {
        let mut out = self.open()?;
        f(&mut out)?;
        out.flush()?;
        Ok(())
    }
}

fn parse_model(s: &str) -> Result<SimModel, String> {
    SimModel::from_name(s).ok_or_else(|| {
        let valid: Vec<&str> = SimModel::ALL.iter().map(|m| m.name()).collect();
        format!("unknown model '{s}' (valid models: {})", valid.join(", "))
    })
}

fn parse_param(s: &str) -> Result<SweepParam, String> {
    SweepParam::from_name(s).ok_or_else(|| format!("unknown parameter '{s}' (valid: a, c, n, d)"))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] wpc_core::Error),
    #[error("write failed: {0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    /// 2 for problems with the input or arguments, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Usage(_) => 2,
            CliError::Core(wpc_core::Error::Numerical(_)) => 1,
            CliError::Core(_) => 2,
            CliError::Io(_) | CliError::Internal(_) => 1,
        }
    }
}

fn init_threads(threads: Option<usize>) -> Result<(), CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    builder
        .build_global()
        .map_err(|e| CliError::Internal(e.to_string()))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    init_threads(cli.threads)?;
    let started = Instant::now();
    match cli.command {
        Command::Test {
            input,
            test,
            output,
        } => {
            let data = input::read_dataset(&input)?;
            let outcome = wpc_core::run_test(&data, &test.config()?)?;
            let report = TestReport::new(&outcome, test.seed);
            output.write(|w| report::write_test(w, &report, output.format))?;
        }
        Command::Simulate {
            model,
            test,
            output,
        } => {
            let spec = model.spec(test.seed)?;
            let mut cfg = test.config()?;
            // Same guard as `test`, which run_trial leaves to the caller.
            let cost = (cfg.bootstrap.replicates * spec.n * spec.n) as f64;
            if cost > cfg.bootstrap.cost_ceiling && !cfg.bootstrap.force {
                return Err(wpc_core::Error::CostExceeded {
                    cost,
                    ceiling: cfg.bootstrap.cost_ceiling,
                }
                .into());
            }
            cfg.bootstrap.force = true;
            let outcome = run_trial(&spec, 0, 0, &cfg)?;
            let report = SimulateReport::new(&spec, &outcome);
            output.write(|w| report::write_simulate(w, &report, output.format))?;
        }
        Command::Sweep {
            model,
            param,
            values,
            trials,
            auc,
            cost_ceiling,
            quiet,
            test,
            output,
        } => {
            let spec = model.spec(test.seed)?;
            let cfg = ExperimentConfig {
                trials,
                test: test.config()?,
                with_auc: auc,
                cost_ceiling,
                force: test.force,
            };
            let total = values.len() * trials * if auc { 2 } else { 1 };
            let done = AtomicUsize::new(0);
            let step = (total / 20).max(1);
            let progress = |_: Progress| {
                let k = done.fetch_add(1, Ordering::Relaxed) + 1;
                if !quiet && (k.is_multiple_of(step) || k == total) {
                    eprintln!("[wpc] {k}/{total} trials");
                }
            };
            let report = run_experiment_with_progress(&spec, param, &values, &cfg, &progress)?;
            output.write(|w| {
                report::write_experiment(
                    w,
                    &report,
                    test.alpha,
                    test.replicates,
                    test.seed,
                    output.format,
                )
            })?;
        }
        Command::CiMatrix {
            input,
            test,
            output,
        } => {
            let table = input::read_matrix(&input)?;
            let matrix = ci_matrix(&table.columns, &test.config()?)?;
            output.write(|w| {
                report::write_matrix(
                    w,
                    &table.names,
                    &matrix,
                    test.alpha,
                    test.replicates,
                    test.seed,
                    output.format,
                )
            })?;
        }
    }
    eprintln!("[wpc] wall time {:.2}s", started.elapsed().as_secs_f64());
    Ok(())
}
