//! Command-line front end: argument parsing, dispatch and report serialization.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use fastscc::simlab::{
    run_rejection_experiment, run_selection_experiment, ExperimentReport, ExperimentSettings, Method, Preset,
};
use fastscc::{
    grid_curves, ingest_csv, pairwise, select_k, test_h0k, ClusterAlgorithm, ClusterConfig, ClusterTestResult,
    CorrectionMethod, CsvColumns, Dataset, ErrorCategory, Execution, KSelectionResult, PairwiseMatrix, ProcedureConfig,
    WeightScheme,
};
use serde::{Deserialize, Serialize};

pub const THREADS_ENV: &str = "FASTSCC_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Select,
    TestK,
    Pairwise,
    Simulate,
    Bench,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "fastscc",
    version,
    about = "Clustering and comparison of right-censored survival curves"
)]
pub struct Args {
    #[arg(long, value_enum, default_value = "select")]
    pub mode: Mode,
    /// Delimited input with a header row.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "time")]
    pub time_col: String,
    #[arg(long, default_value = "status")]
    pub status_col: String,
    #[arg(long, default_value = "group")]
    pub group_col: String,
    #[arg(long, default_value = ",")]
    pub delimiter: char,
    /// Significance level; repeatable in simulate and bench modes.
    #[arg(long = "alpha")]
    pub alpha: Vec<f64>,
    #[arg(long, default_value = "bonferroni")]
    pub correction: String,
    #[arg(long = "test", default_value = "logrank")]
    pub test: String,
    #[arg(long, default_value_t = 0.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 50)]
    pub grid_points: usize,
    #[arg(long, default_value = "kmeans")]
    pub cluster: String,
    #[arg(long, default_value_t = 100)]
    pub restarts: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Number of clusters for test-k.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    pub effect_a: f64,
    #[arg(long, default_value_t = 5.0)]
    pub censor_bound: f64,
    #[arg(long, default_value_t = 100)]
    pub n_per_group: usize,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    /// Add the bootstrap reference with this many resamples (simulate and bench).
    #[arg(long)]
    pub bootstrap_b: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

/// Scenario settings for simulate and bench.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub scenario: Preset,
    pub effect: f64,
    pub censor_bound: f64,
    pub n_per_group: usize,
    pub repetitions: usize,
    pub bootstrap_resamples: Option<usize>,
}

/// Validated run settings, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub input: Option<PathBuf>,
    pub columns: CsvColumns,
    pub alphas: Vec<f64>,
    pub procedure: ProcedureConfig,
    pub k: Option<usize>,
    pub simulation: Option<SimulationConfig>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub category: ErrorCategory,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            category: ErrorCategory::Usage,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.category {
            ErrorCategory::Usage => 2,
            ErrorCategory::Data => 3,
            ErrorCategory::Numerical => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<fastscc::Error> for CliError {
    fn from(e: fastscc::Error) -> Self {
        Self {
            category: e.category(),
            message: e.to_string(),
        }
    }
}

impl RunConfig {
    pub fn from_args(args: &Args) -> Result<Self, CliError> {
        let simulated = matches!(args.mode, Mode::Simulate | Mode::Bench);
        let alphas = if args.alpha.is_empty() {
            vec![0.05]
        } else {
            args.alpha.clone()
        };
        if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return Err(CliError::usage(format!("alpha must lie in (0, 1), got {a}")));
        }
        if !simulated && alphas.len() > 1 {
            return Err(CliError::usage(
                "--alpha may be repeated only in simulate and bench modes",
            ));
        }
        if simulated && args.input.is_some() {
            return Err(CliError::usage("--input conflicts with simulate and bench modes"));
        }
        if !simulated && args.input.is_none() {
            return Err(CliError::usage("--input is required in this mode"));
        }
        if !simulated && (args.scenario.is_some() || args.bootstrap_b.is_some()) {
            return Err(CliError::usage(
                "--scenario and --bootstrap-b apply to simulate and bench modes only",
            ));
        }
        if args.k.is_some() != (args.mode == Mode::TestK) {
            return Err(CliError::usage(
                "--k is required by test-k mode and accepted by no other mode",
            ));
        }
        if !args.delimiter.is_ascii() {
            return Err(CliError::usage("delimiter must be a single ASCII character"));
        }

        let cluster = ClusterConfig {
            algorithm: ClusterAlgorithm::from_str(&args.cluster)?,
            restarts: args.restarts,
            seed: args.seed,
            ..ClusterConfig::default()
        };
        cluster.validate()?;
        let procedure = ProcedureConfig {
            weights: WeightScheme::parse(&args.test, args.rho, args.gamma)?,
            correction: CorrectionMethod::from_str(&args.correction)?,
            grid_points: args.grid_points,
            cluster,
            ..ProcedureConfig::default()
        };

        let simulation = if simulated {
            let name = args
                .scenario
                .as_deref()
                .ok_or_else(|| CliError::usage("--scenario is required"))?;
            Some(SimulationConfig {
                scenario: Preset::from_str(name)?,
                effect: args.effect_a,
                censor_bound: args.censor_bound,
                n_per_group: args.n_per_group,
                repetitions: args.reps,
                bootstrap_resamples: args.bootstrap_b,
            })
        } else {
            None
        };

        Ok(Self {
            mode: args.mode,
            input: args.input.clone(),
            columns: CsvColumns {
                time: args.time_col.clone(),
                status: args.status_col.clone(),
                group: args.group_col.clone(),
                delimiter: args.delimiter as u8,
            },
            alphas,
            procedure,
            k: args.k,
            simulation,
            format: args.format,
        })
    }
}

/// Curve of one population on the common grid, with its cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub population: usize,
    pub name: String,
    pub group: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionOutput {
    pub populations: Vec<String>,
    pub selection: KSelectionResult,
    pub grid: Vec<f64>,
    pub curves: Vec<CurveRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutput {
    pub populations: Vec<String>,
    pub result: ClusterTestResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseOutput {
    pub populations: Vec<String>,
    pub matrix: PairwiseMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "output", rename_all = "kebab-case")]
pub enum Output {
    Select(SelectionOutput),
    TestK(TestOutput),
    Pairwise(PairwiseOutput),
    Simulate(ExperimentReport),
    Bench(ExperimentReport),
}

/// Self-describing result document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub result: Output,
}

fn load(config: &RunConfig) -> Result<Dataset, CliError> {
    let path = config
        .input
        .as_ref()
        .ok_or_else(|| CliError::usage("--input is required"))?;
    Ok(ingest_csv(path, &config.columns)?)
}

pub fn execute(config: &RunConfig) -> Result<Report, CliError> {
    let alpha = config.alphas[0];
    let result = match config.mode {
        Mode::Select => {
            let data = load(config)?;
            let selection = select_k(&data.samples, alpha, &config.procedure, None)?;
            let curves = grid_curves(&data.samples, config.procedure.grid_points)?;
            let chosen = selection.chosen().map(|r| r.partition.clone());
            let grid = curves[0].grid().points().to_vec();
            let curves = curves
                .into_iter()
                .enumerate()
                .map(|(j, c)| CurveRecord {
                    population: j,
                    name: data.names[j].clone(),
                    group: chosen.as_ref().map_or(0, |p| p.cluster_of(j)),
                    values: c.values().to_vec(),
                })
                .collect();
            Output::Select(SelectionOutput {
                populations: data.names,
                selection,
                grid,
                curves,
            })
        }
        Mode::TestK => {
            let data = load(config)?;
            let k = config.k.ok_or_else(|| CliError::usage("--k is required"))?;
            let result = test_h0k(&data.samples, k, &config.procedure)?;
            Output::TestK(TestOutput {
                populations: data.names,
                result,
            })
        }
        Mode::Pairwise => {
            let data = load(config)?;
            let matrix = pairwise(
                &data.samples,
                config.procedure.weights,
                config.procedure.correction,
                Execution::default(),
            )?;
            Output::Pairwise(PairwiseOutput {
                populations: data.names,
                matrix,
            })
        }
        Mode::Simulate | Mode::Bench => {
            let report = simulate(config)?;
            if config.mode == Mode::Bench {
                Output::Bench(report)
            } else {
                Output::Simulate(report)
            }
        }
    };
    Ok(Report {
        tool: "fastscc".into(),
        version: fastscc::VERSION.into(),
        config: config.clone(),
        result,
    })
}

fn simulate(config: &RunConfig) -> Result<ExperimentReport, CliError> {
    let sim = config
        .simulation
        .as_ref()
        .ok_or_else(|| CliError::usage("--scenario is required"))?;
    let spec = sim.scenario.spec(
        sim.effect,
        sim.censor_bound,
        sim.n_per_group,
        config.procedure.cluster.seed,
    );
    let mut methods = vec![Method::FastScc {
        correction: config.procedure.correction,
    }];
    if let Some(b) = sim.bootstrap_resamples {
        methods.push(Method::Bootstrap { resamples: b });
    }
    let mut settings = ExperimentSettings::new(spec, methods, sim.repetitions);
    settings.procedure = config.procedure;
    settings.bootstrap.grid_points = config.procedure.grid_points;
    settings.bootstrap.cluster = config.procedure.cluster;
    settings.bootstrap.seed = config.procedure.cluster.seed;
    settings.record_timing = config.mode == Mode::Bench;
    let report = if sim.scenario == Preset::II {
        if config.alphas.len() > 1 {
            return Err(CliError::usage("selection experiments take a single --alpha"));
        }
        run_selection_experiment(&settings, config.alphas[0])?
    } else {
        run_rejection_experiment(&settings, sim.scenario.null_k(), &config.alphas)?
    };
    Ok(report)
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".into(), |v| v.to_string())
}

fn test_row(r: &ClusterTestResult) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}",
        r.k,
        r.wss,
        r.tested_groups,
        r.final_p,
        join(r.partition.assignment(), ",")
    )
}

/// Tab-separated rendering of the main table of a report.
pub fn to_tsv(report: &Report) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    match &report.result {
        Output::Select(s) => {
            line("k\twss\ttested_groups\tfinal_p\tassignment\tchosen".into());
            for r in &s.selection.trajectory {
                line(format!("{}\t{}", test_row(r), r.k == s.selection.chosen_k));
            }
        }
        Output::TestK(t) => {
            line("k\twss\ttested_groups\tfinal_p\tassignment".into());
            line(test_row(&t.result));
        }
        Output::Pairwise(PairwiseOutput { populations, matrix: m }) => {
            line("row\tcolumn\traw_p\tadjusted_p".into());
            for (i, (raw, adj)) in m.raw.iter().zip(&m.adjusted).enumerate() {
                for (j, (r, a)) in raw.iter().zip(adj).enumerate() {
                    line(format!(
                        "{}\t{}\t{}\t{}",
                        populations[i],
                        populations[j],
                        opt(*r),
                        opt(*a)
                    ));
                }
            }
        }
        Output::Simulate(r) | Output::Bench(r) => {
            line("scenario\tmethod\tk\tn_per_group\tcensor_bound\teffect\talpha\trepetitions\trate\tmean_seconds\tci95_seconds".into());
            for row in &r.rows {
                line(format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    row.scenario,
                    row.method,
                    row.k,
                    row.n_per_group,
                    row.censor_bound,
                    row.effect,
                    row.alpha,
                    row.repetitions,
                    row.rate,
                    opt(row.mean_seconds),
                    opt(row.ci95_seconds)
                ));
            }
        }
    }
    out
}

pub fn render(report: &Report) -> Result<String, CliError> {
    match report.config.format {
        Format::Json => serde_json::to_string_pretty(report)
            .map(|s| s + "\n")
            .map_err(|e| CliError {
                category: ErrorCategory::Data,
                message: e.to_string(),
            }),
        Format::Tsv => Ok(to_tsv(report)),
    }
}

/// Runs a validated configuration and returns the rendered report.
pub fn run(config: &RunConfig) -> Result<String, CliError> {
    render(&execute(config)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(argv: &[&str]) -> Result<RunConfig, CliError> {
        RunConfig::from_args(&Args::try_parse_from(std::iter::once("fastscc").chain(argv.iter().copied())).unwrap())
    }

    #[test]
    fn exit_codes_by_category() {
        assert_eq!(CliError::usage("x").exit_code(), 2);
        assert_eq!(CliError::from(fastscc::Error::NoRecords).exit_code(), 3);
        assert_eq!(CliError::from(fastscc::Error::NoEvents).exit_code(), 4);
    }

    #[test]
    fn alpha_defaults_and_repeats() {
        assert_eq!(parse(&["--input", "a.csv"]).unwrap().alphas, [0.05]);
        let sim = parse(&[
            "--mode",
            "simulate",
            "--scenario",
            "ib",
            "--alpha",
            "0.05",
            "--alpha",
            "0.1",
        ])
        .unwrap();
        assert_eq!(sim.alphas, [0.05, 0.1]);
        assert!(parse(&["--input", "a.csv", "--alpha", "0.05", "--alpha", "0.1"]).is_err());
    }

    #[test]
    fn weight_options_reach_procedure() {
        let cfg = parse(&["--input", "a.csv", "--test", "fh", "--rho", "1", "--gamma", "0.5"]).unwrap();
        assert_eq!(cfg.procedure.weights, WeightScheme::parse("fh", 1.0, 0.5).unwrap());
        assert_eq!(
            parse(&["--input", "a.csv", "--test", "nope"]).unwrap_err().exit_code(),
            2
        );
    }

    #[test]
    fn simulate_needs_scenario() {
        assert_eq!(parse(&["--mode", "simulate"]).unwrap_err().exit_code(), 2);
        assert_eq!(
            parse(&["--mode", "bench", "--scenario", "v"]).unwrap_err().exit_code(),
            2
        );
    }
}
