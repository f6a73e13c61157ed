//! Output formats. Field and column order is fixed; floats use the shortest
//! representation that round-trips.

use std::io::{self, Write};

use serde::Serialize;
use wpc_core::sim::{ExperimentReport, SimSpec};
use wpc_core::TestOutcome;

use crate::ci_matrix::{pairs, CiMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Result of `wpc test`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub statistic: f64,
    pub p_value: f64,
    pub quantile: f64,
    pub reject: bool,
    pub alpha: f64,
    #[serde(rename = "B")]
    pub replicates: usize,
    pub k_selected: Option<[usize; 2]>,
    pub seed: u64,
}

impl TestReport {
    pub fn new(outcome: &TestOutcome, seed: u64) -> Self {
        Self {
            statistic: outcome.statistic,
            p_value: outcome.p_value,
            quantile: outcome.quantile,
            reject: outcome.reject,
            alpha: outcome.alpha,
            replicates: outcome.boot_stats.len(),
            k_selected: outcome.k_selected.map(|(a, b)| [a, b]),
            seed,
        }
    }
}

const TEST_COLUMNS: &str = "statistic,p_value,quantile,reject,alpha,B,k1,k2,seed";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn test_row(r: &TestReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        r.statistic,
        r.p_value,
        r.quantile,
        r.reject,
        r.alpha,
        r.replicates,
        opt(r.k_selected.map(|k| k[0])),
        opt(r.k_selected.map(|k| k[1])),
        r.seed
    )
}

/// Result of `wpc simulate`: the model settings and one test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateReport {
    pub model: &'static str,
    pub n: usize,
    pub d: usize,
    pub a: f64,
    pub c: f64,
    pub beta1: Vec<f64>,
    pub beta2: Vec<f64>,
    #[serde(flatten)]
    pub test: TestReport,
}

impl SimulateReport {
    pub fn new(spec: &SimSpec, outcome: &TestOutcome) -> Self {
        Self {
            model: spec.model.name(),
            n: spec.n,
            d: spec.d,
            a: spec.a,
            c: spec.c,
            beta1: spec.beta1.clone(),
            beta2: spec.beta2.clone(),
            test: TestReport::new(outcome, spec.seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct CellJson<'a> {
    value: f64,
    freq: f64,
    se: f64,
    mean_p: f64,
    auc: Option<f64>,
    trials: usize,
    rejections: usize,
    p_values: &'a [f64],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct ExperimentJson<'a> {
    model: &'static str,
    param: &'static str,
    trials: usize,
    alpha: f64,
    #[serde(rename = "B")]
    replicates: usize,
    seed: u64,
    cells: Vec<CellJson<'a>>,
}

/// Columns of the experiment CSV.
pub const EXPERIMENT_COLUMNS: &str = "param,value,freq,se,mean_p,auc,trials";

pub fn write_experiment<W: Write + ?Sized>(
    out: &mut W,
    report: &ExperimentReport,
    alpha: f64,
    replicates: usize,
    seed: u64,
    format: Format,
) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "{EXPERIMENT_COLUMNS}")?;
            for c in &report.cells {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    report.param.name(),
                    c.value,
                    c.rejection_freq,
                    c.std_err,
                    c.mean_p_value,
                    opt(c.auc),
                    c.trials
                )?;
            }
            Ok(())
        }
        Format::Json => {
            let json = ExperimentJson {
                model: report.model.name(),
                param: report.param.name(),
                trials: report.trials,
                alpha,
                replicates,
                seed,
                cells: report
                    .cells
                    .iter()
                    .map(|c| CellJson {
                        value: c.value,
                        freq: c.rejection_freq,
                        se: c.std_err,
                        mean_p: c.mean_p_value,
                        auc: c.auc,
                        trials: c.trials,
                        rejections: c.rejections,
                        p_values: &c.p_values,
                    })
                    .collect(),
            };
            write_json(out, &json)
        }
    }
}

pub fn write_test<W: Write + ?Sized>(
    out: &mut W,
    report: &TestReport,
    format: Format,
) -> io::Result<()> {
    match format {
        Format::Json => write_json(out, report),
        Format::Csv => writeln!(out, "{TEST_COLUMNS}\n{}", test_row(report)),
    }
}

pub fn write_simulate<W: Write + ?Sized>(
    out: &mut W,
    report: &SimulateReport,
    format: Format,
) -> io::Result<()> {
    match format {
        Format::Json => write_json(out, report),
        Format::Csv => writeln!(
            out,
            "model,n,d,a,c,{TEST_COLUMNS}\n{},{},{},{},{},{}",
            report.model,
            report.n,
            report.d,
            report.a,
            report.c,
            test_row(&report.test)
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct MatrixJson<'a> {
    variables: &'a [String],
    alpha: f64,
    #[serde(rename = "B")]
    replicates: usize,
    seed: u64,
    p_values: &'a [Vec<Option<f64>>],
    adjacency: Vec<Vec<Option<u8>>>,
}

/// Columns of the long-format pair CSV.
pub const MATRIX_COLUMNS: &str = "i,j,var_i,var_j,p_value,edge,k1,k2";

pub fn write_matrix<W: Write + ?Sized>(
    out: &mut W,
    names: &[String],
    matrix: &CiMatrix,
    alpha: f64,
    replicates: usize,
    seed: u64,
    format: Format,
) -> io::Result<()> {
    match format {
        Format::Json => {
            let adjacency = matrix
                .adjacency
                .iter()
                .map(|row| row.iter().map(|e| e.map(u8::from)).collect())
                .collect();
            let json = MatrixJson {
                variables: names,
                alpha,
                replicates,
                seed,
                p_values: &matrix.p_values,
                adjacency,
            };
            write_json(out, &json)
        }
        Format::Csv => {
            writeln!(out, "{MATRIX_COLUMNS}")?;
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(out);
            for (&(i, j), o) in pairs(names.len()).iter().zip(&matrix.outcomes) {
                w.write_record([
                    (i + 1).to_string(),
                    (j + 1).to_string(),
                    names[i].clone(),
                    names[j].clone(),
                    o.p_value.to_string(),
                    u8::from(o.reject).to_string(),
                    opt(o.k_selected.map(|k| k.0)),
                    opt(o.k_selected.map(|k| k.1)),
                ])?;
            }
            w.flush()
        }
    }
}

fn write_json<W: Write + ?Sized, T: Serialize>(out: &mut W, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}
