use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bootstrap::{bootstrap_select_k, bootstrap_test_h0k, BootstrapConfig};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::padjust::CorrectionMethod;
use crate::procedure::{select_k, test_h0k, ProcedureConfig};
use crate::simlab::ScenarioSpec;
use crate::survival::PopulationSample;

/// A procedure evaluated by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Method {
    /// Log-rank clustering procedure with the given correction.
    FastScc { correction: CorrectionMethod },
    /// Resampling baseline with `resamples` bootstrap draws.
    Bootstrap { resamples: usize },
}

impl Method {
    pub const FAST_BONFERRONI: Method = Method::FastScc {
        correction: CorrectionMethod::Bonferroni,
    };
    pub const FAST_UNCORRECTED: Method = Method::FastScc {
        correction: CorrectionMethod::None,
    };

    /// Short label used in the report tables (D_F, D_FNC, D_H, ...).
    pub fn label(&self) -> String {
        match self {
            Method::FastScc { correction } => match correction {
                CorrectionMethod::Bonferroni => "D_F".into(),
                CorrectionMethod::None => "D_FNC".into(),
                CorrectionMethod::Holm => "D_H".into(),
                CorrectionMethod::BH => "D_BH".into(),
                CorrectionMethod::Hommel => "D_HOM".into(),
                other => format!("D_{}", other.name().to_ascii_uppercase()),
            },
            Method::Bootstrap { resamples } => format!("BOOT{resamples}"),
        }
    }

    fn test(
        &self,
        data: &[PopulationSample],
        k: usize,
        procedure: &ProcedureConfig,
        bootstrap: &BootstrapConfig,
    ) -> Result<f64> {
        match *self {
            Method::FastScc { correction } => test_h0k(
                data,
                k,
                &ProcedureConfig {
                    correction,
                    ..*procedure
                },
            )
            .map(|r| r.final_p),
            Method::Bootstrap { resamples } => bootstrap_test_h0k(
                data,
                k,
                &BootstrapConfig {
                    resamples,
                    ..*bootstrap
                },
            )
            .map(|r| r.p_value),
        }
    }

    fn select(
        &self,
        data: &[PopulationSample],
        alpha: f64,
        procedure: &ProcedureConfig,
        bootstrap: &BootstrapConfig,
    ) -> Result<crate::procedure::KSelectionResult> {
        match *self {
            Method::FastScc { correction } => select_k(
                data,
                alpha,
                &ProcedureConfig {
                    correction,
                    ..*procedure
                },
                None,
            ),
            Method::Bootstrap { resamples } => bootstrap_select_k(
                data,
                alpha,
                &BootstrapConfig {
                    resamples,
                    ..*bootstrap
                },
                None,
            ),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    /// `fastscc`, `fastscc-nc`, `fastscc-<correction>` or `bootstrap[-B]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        match s.as_str() {
            "fastscc" | "d_f" => return Ok(Method::FAST_BONFERRONI),
            "fastscc-nc" | "fastscc_nocorrection" | "d_fnc" => return Ok(Method::FAST_UNCORRECTED),
            "bootstrap" => return Ok(Method::Bootstrap { resamples: 500 }),
            _ => {}
        }
        if let Some(c) = s.strip_prefix("fastscc-") {
            return Ok(Method::FastScc { correction: c.parse()? });
        }
        if let Some(b) = s.strip_prefix("bootstrap-") {
            let resamples = b
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad resample count in '{s}'")))?;
            return Ok(Method::Bootstrap { resamples });
        }
        Err(Error::InvalidArgument(format!("unknown method '{s}'")))
    }
}

/// Shared settings of the Monte-Carlo experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSettings {
    pub scenario: ScenarioSpec,
    pub methods: Vec<Method>,
    pub repetitions: usize,
    pub procedure: ProcedureConfig,
    pub bootstrap: BootstrapConfig,
    /// Record per-run wall-clock times (makes the report non-reproducible).
    pub record_timing: bool,
    pub execution: Execution,
}

impl ExperimentSettings {
    pub fn new(scenario: ScenarioSpec, methods: Vec<Method>, repetitions: usize) -> Self {
        Self {
            scenario,
            methods,
            repetitions,
            procedure: ProcedureConfig::default(),
            bootstrap: BootstrapConfig::default(),
            record_timing: false,
            execution: Execution::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidArgument("repetitions must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument("no methods to evaluate".into()));
        }
        self.scenario.validate()
    }

    /// Inner loops run sequentially when the repetitions are spread over threads.
    fn inner_configs(&self) -> (ProcedureConfig, BootstrapConfig) {
        let mut procedure = self.procedure;
        let mut bootstrap = self.bootstrap;
        if self.execution.is_parallel() {
            procedure.cluster.execution = Execution::Sequential;
            bootstrap.cluster.execution = Execution::Sequential;
            bootstrap.execution = Execution::Sequential;
        }
        (procedure, bootstrap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    /// Proportion of repetitions rejecting H0(K).
    Rejection,
    /// Proportion of repetitions recovering the generating partition.
    Selection,
}

/// One row per (scenario, method, n, alpha).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub scenario: String,
    pub method: String,
    pub k: usize,
    pub n_per_group: usize,
    pub censor_bound: f64,
    pub effect: f64,
    pub alpha: f64,
    pub repetitions: usize,
    pub rate: f64,
    pub mean_seconds: Option<f64>,
    pub ci95_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentReport {
    pub fn rate(&self, method: &Method, alpha: f64) -> Option<f64> {
        let label = method.label();
        self.rows
            .iter()
            .find(|r| r.method == label && r.alpha == alpha)
            .map(|r| r.rate)
    }
}

struct RepOutcome {
    value: Vec<f64>,
    seconds: Vec<f64>,
}

fn timed<T>(record: bool, f: impl FnOnce() -> T) -> (T, f64) {
    if record {
        let start = Instant::now();
        let out = f();
        (out, start.elapsed().as_secs_f64())
    } else {
        (f(), 0.0)
    }
}

fn mean_ci(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, 1.96 * (var / n).sqrt())
}

fn build_rows(
    settings: &ExperimentSettings,
    k: usize,
    alphas: &[f64],
    outcomes: &[RepOutcome],
    hit: impl Fn(f64, f64) -> bool,
) -> Vec<ExperimentRow> {
    let mut rows = Vec::new();
    for (mi, method) in settings.methods.iter().enumerate() {
        let timing = settings.record_timing.then(|| {
            let secs: Vec<f64> = outcomes.iter().map(|o| o.seconds[mi]).collect();
            mean_ci(&secs)
        });
        for &alpha in alphas {
            let hits = outcomes.iter().filter(|o| hit(o.value[mi], alpha)).count();
            rows.push(ExperimentRow {
                scenario: settings.scenario.name.clone(),
                method: method.label(),
                k,
                n_per_group: settings.scenario.n_per_group,
                censor_bound: settings.scenario.censor_bound,
                effect: settings.scenario.effect,
                alpha,
                repetitions: outcomes.len(),
                rate: hits as f64 / outcomes.len() as f64,
                mean_seconds: timing.map(|t| t.0),
                ci95_seconds: timing.map(|t| t.1),
            });
        }
    }
    rows
}

/// Rejection proportions of H0(`k_null`) at each level in `alphas`. Every
/// method sees the same simulated datasets.
pub fn run_rejection_experiment(
    settings: &ExperimentSettings,
    k_null: usize,
    alphas: &[f64],
) -> Result<ExperimentReport> {
    settings.validate()?;
    if alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) || alphas.is_empty() {
        return Err(Error::InvalidArgument("alphas must lie in (0, 1)".into()));
    }
    let (procedure, bootstrap) = settings.inner_configs();
    let outcomes = settings
        .execution
        .map(settings.repetitions, |rep| -> Result<RepOutcome> {
            let data = settings.scenario.generate(rep as u64)?;
            let mut value = Vec::with_capacity(settings.methods.len());
            let mut seconds = Vec::with_capacity(settings.methods.len());
            for m in &settings.methods {
                let (p, s) = timed(settings.record_timing, || m.test(&data, k_null, &procedure, &bootstrap));
                value.push(p?);
                seconds.push(s);
            }
            Ok(RepOutcome { value, seconds })
        });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport {
        kind: ExperimentKind::Rejection,
        rows: build_rows(settings, k_null, alphas, &outcomes, |p, alpha| p < alpha),
    })
}

/// Proportion of repetitions where sequential selection picks the true
/// number of groups and reproduces the generating partition exactly.
pub fn run_selection_experiment(settings: &ExperimentSettings, alpha: f64) -> Result<ExperimentReport> {
    settings.validate()?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument("alpha must lie in (0, 1)".into()));
    }
    let truth = settings.scenario.true_partition();
    let (procedure, bootstrap) = settings.inner_configs();
    let outcomes = settings
        .execution
        .map(settings.repetitions, |rep| -> Result<RepOutcome> {
            let data = settings.scenario.generate(rep as u64)?;
            let mut value = Vec::with_capacity(settings.methods.len());
            let mut seconds = Vec::with_capacity(settings.methods.len());
            for m in &settings.methods {
                let (sel, s) = timed(settings.record_timing, || {
                    m.select(&data, alpha, &procedure, &bootstrap)
                });
                let sel = sel?;
                let success = sel.chosen_k == truth.k() && sel.chosen().is_some_and(|r| r.partition == truth);
                value.push(if success { 1.0 } else { 0.0 });
                seconds.push(s);
            }
            Ok(RepOutcome { value, seconds })
        });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport {
        kind: ExperimentKind::Selection,
        rows: build_rows(settings, truth.k(), &[alpha], &outcomes, |v, _| v == 1.0),
    })
}

/// What a single timed run executes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum TimedRun {
    /// One test of H0(k).
    Test { k: usize },
    /// A full sequential selection at level `alpha`.
    Select { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub scenario: String,
    pub n_per_group: usize,
    pub run: TimedRun,
    pub baseline: String,
    pub candidate: String,
    pub baseline_seconds: f64,
    pub candidate_seconds: f64,
    /// baseline / candidate
    pub ratio: f64,
    pub runs: usize,
}

/// Median-of-`runs` wall-clock of one full run of each method on the same
/// dataset (repetition 0 of the scenario). Data generation is not timed.
pub fn run_timing(
    scenario: &ScenarioSpec,
    run: TimedRun,
    baseline: Method,
    candidate: Method,
    runs: usize,
    procedure: &ProcedureConfig,
    bootstrap: &BootstrapConfig,
) -> Result<TimingReport> {
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be >= 1".into()));
    }
    let data = scenario.generate(0)?;
    let once = |m: &Method| -> Result<f64> {
        let start = Instant::now();
        match run {
            TimedRun::Test { k } => {
                m.test(&data, k, procedure, bootstrap)?;
            }
            TimedRun::Select { alpha } => {
                m.select(&data, alpha, procedure, bootstrap)?;
            }
        }
        Ok(start.elapsed().as_secs_f64())
    };
    // warm-up, then interleave so drift affects both methods alike
    once(&candidate)?;
    let mut b = Vec::with_capacity(runs);
    let mut c = Vec::with_capacity(runs);
    for _ in 0..runs {
        b.push(once(&baseline)?);
        c.push(once(&candidate)?);
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        }
    };
    let baseline_seconds = median(&mut b);
    let candidate_seconds = median(&mut c);
    Ok(TimingReport {
        scenario: scenario.name.clone(),
        n_per_group: scenario.n_per_group,
        run,
        baseline: baseline.label(),
        candidate: candidate.label(),
        baseline_seconds,
        candidate_seconds,
        ratio: baseline_seconds / candidate_seconds,
        runs,
    })
}
