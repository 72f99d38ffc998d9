#![allow(clippy::excessive_precision)]

//! Command-line front end for the odds-xgamma lifetime family.
//!
//! `fit` and `gof` estimate parameters from a dataset (a file or a built-in
//! name); `eval`, `quantile` and `sample` work with a fully specified model;
//! `moments`, `entropy`, `reliability`, `order-stat` and `residual` expose
//! the distributional summaries with a choice of series or quadrature
//! evaluation; `plot-data` emits function grids (and an optional histogram
//! overlay) as data files for external plotting.
//!
//! Results go to standard output (or `--out`) as JSON by default, CSV on
//! request; `sample` and `plot-data` default to CSV. Errors are reported as
//! one-line JSON on standard error and mapped to exit codes: 2 for usage
//! and domain problems, 3 for data problems, 4 for numerical
//! non-convergence. A fit that completes but fails its convergence
//! diagnostics still prints its result, then exits with code 4.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use oxg_core::data;
use oxg_core::{
    fit, ks_critical_01, ks_statistic, mean_deviations, moment_set, order_stat_pdf, renyi_entropy,
    residual_moment, reversed_residual_moment, stress_strength, BaselineKind, BaselineModel,
    Dataset, EvalMethod, FitResult, OxgDistribution, OxgError, Result, TruncationMode,
    TruncationPolicy,
};

#[derive(Parser)]
#[command(
    name = "oxg",
    version,
    about = "Odds xgamma-G lifetime distributions: evaluation, simulation, and fitting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the model to a dataset by maximum likelihood.
    Fit(FitArgs),
    /// Evaluate density, distribution, survival and hazard at a point.
    Eval(EvalArgs),
    /// Draw a seeded pseudo-random sample.
    Sample(SampleArgs),
    /// Invert the distribution function at a probability.
    Quantile(QuantileArgs),
    /// Raw moments, shape summaries and mean deviations.
    Moments(MomentsArgs),
    /// Renyi entropy of a given order.
    Entropy(EntropyArgs),
    /// Stress-strength reliability P(stress < strength).
    Reliability(ReliabilityArgs),
    /// Density of a single order statistic at a point.
    OrderStat(OrderStatArgs),
    /// Residual and reversed residual life moments at an age.
    Residual(ResidualArgs),
    /// Fit plus goodness-of-fit diagnostics for a dataset.
    Gof(GofArgs),
    /// Emit plotting grids (x, pdf, cdf, survival, hazards) as CSV.
    PlotData(PlotDataArgs),
    /// List the built-in datasets.
    Datasets(DatasetsArgs),
}

// ---------------------------------------------------------------------------
// Shared argument groups
// ---------------------------------------------------------------------------

#[derive(Args)]
struct BaselineArgs {
    /// Baseline family: uniform, exponential, burr-xii or normal.
    #[arg(long)]
    baseline: BaselineKind,
    /// Scale parameter (uniform, exponential, burr-xii).
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Shape parameter (burr-xii).
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Location parameter (normal).
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    /// Scale parameter (normal).
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
}

impl BaselineArgs {
    fn model(&self) -> Result<BaselineModel> {
        let kind = self.baseline;
        let (required, forbidden) = match kind {
            BaselineKind::Uniform | BaselineKind::Exponential => (
                vec![("theta", self.theta)],
                vec![("alpha", self.alpha), ("mu", self.mu), ("sigma", self.sigma)],
            ),
            BaselineKind::BurrXii => (
                vec![("alpha", self.alpha), ("theta", self.theta)],
                vec![("mu", self.mu), ("sigma", self.sigma)],
            ),
            BaselineKind::Normal => (
                vec![("mu", self.mu), ("sigma", self.sigma)],
                vec![("theta", self.theta), ("alpha", self.alpha)],
            ),
        };
        for (name, value) in &forbidden {
            if value.is_some() {
                return Err(OxgError::InvalidParameter(format!(
                    "--{name} is not a parameter of the {kind} baseline"
                )));
            }
        }
        let mut params = Vec::with_capacity(required.len());
        for (name, value) in &required {
            params.push(value.ok_or_else(|| {
                OxgError::InvalidParameter(format!(
                    "--{name} is required for the {kind} baseline"
                ))
            })?);
        }
        BaselineModel::from_kind(kind, &params)
    }
}

#[derive(Args)]
struct ModelArgs {
    /// Shape parameter of the xgamma generator.
    #[arg(long, allow_negative_numbers = true)]
    lambda: f64,
    #[command(flatten)]
    baseline: BaselineArgs,
}

impl ModelArgs {
    fn distribution(&self) -> Result<OxgDistribution> {
        OxgDistribution::new(self.lambda, self.baseline.model()?)
    }
}

#[derive(Args)]
struct PolicyArgs {
    /// Highest series index retained by block summation.
    #[arg(long, default_value_t = 40)]
    max_index: usize,
    /// Relative tail tolerance for adaptive series truncation.
    #[arg(long, default_value_t = 1e-10)]
    tail_tol: f64,
}

impl PolicyArgs {
    fn policy(&self) -> Result<TruncationPolicy> {
        TruncationPolicy::new(self.max_index, self.tail_tol, TruncationMode::AdaptiveUntilTail)
    }
}

#[derive(Args)]
struct MethodArgs {
    /// Evaluation method: series or quadrature.
    #[arg(long, default_value = "series")]
    method: EvalMethod,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the result to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: json or csv.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
}

impl OutputArgs {
    fn format(&self, default: Format) -> Result<Format> {
        match self.format.as_deref() {
            None => Ok(default),
            Some("json") => Ok(Format::Json),
            Some("csv") => Ok(Format::Csv),
            Some(other) => Err(OxgError::InvalidParameter(format!(
                "unknown format '{other}' (expected json or csv)"
            ))),
        }
    }
}

// ---------------------------------------------------------------------------
// Per-command arguments
// ---------------------------------------------------------------------------

#[derive(Args)]
struct FitArgs {
    /// Dataset: a file path or a built-in name (see `oxg datasets`).
    #[arg(long)]
    data: String,
    /// Baseline family to fit.
    #[arg(long)]
    baseline: BaselineKind,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Point at which to evaluate the functions.
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of draws.
    #[arg(long)]
    n: usize,
    /// Pseudo-random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct QuantileArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Probability in (0, 1).
    #[arg(long, allow_negative_numbers = true)]
    u: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct MomentsArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    method: MethodArgs,
    #[command(flatten)]
    policy: PolicyArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct EntropyArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Entropy order (positive, not 1); the series method needs an
    /// integer order, quadrature accepts any.
    #[arg(long, allow_negative_numbers = true)]
    beta: f64,
    #[command(flatten)]
    method: MethodArgs,
    #[command(flatten)]
    policy: PolicyArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ReliabilityArgs {
    /// Shape parameter of the strength distribution.
    #[arg(long, allow_negative_numbers = true)]
    lambda1: f64,
    /// Shape parameter of the stress distribution.
    #[arg(long, allow_negative_numbers = true)]
    lambda2: f64,
    #[command(flatten)]
    baseline: BaselineArgs,
    #[command(flatten)]
    method: MethodArgs,
    #[command(flatten)]
    policy: PolicyArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OrderStatArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Rank of the order statistic (1-based).
    #[arg(long)]
    r: usize,
    /// Sample size.
    #[arg(long)]
    n: usize,
    /// Point at which to evaluate the density.
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ResidualArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Moment order.
    #[arg(long, default_value_t = 1)]
    r: u32,
    /// Age at which residual life is taken.
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    #[command(flatten)]
    method: MethodArgs,
    #[command(flatten)]
    policy: PolicyArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct GofArgs {
    /// Dataset: a file path or a built-in name (see `oxg datasets`).
    #[arg(long)]
    data: String,
    /// Baseline family to fit.
    #[arg(long)]
    baseline: BaselineKind,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PlotDataArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Optional dataset for a histogram overlay section.
    #[arg(long)]
    data: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct DatasetsArgs {
    #[command(flatten)]
    output: OutputArgs,
}

// ---------------------------------------------------------------------------
// Entry point and error mapping
// ---------------------------------------------------------------------------

struct Outcome {
    body: String,
    out: Option<PathBuf>,
    /// Error reported after the body is written (result printed, nonzero
    /// exit), e.g. a fit whose diagnostics flag non-convergence.
    post_error: Option<OxgError>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match execute(cli.command) {
        Ok(o) => o,
        Err(e) => return report(&e),
    };
    if let Err(e) = deliver(&outcome) {
        return report(&e);
    }
    match outcome.post_error {
        Some(e) => report(&e),
        None => ExitCode::SUCCESS,
    }
}

fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Fit(a) => cmd_fit(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Quantile(a) => cmd_quantile(a),
        Command::Moments(a) => cmd_moments(a),
        Command::Entropy(a) => cmd_entropy(a),
        Command::Reliability(a) => cmd_reliability(a),
        Command::OrderStat(a) => cmd_order_stat(a),
        Command::Residual(a) => cmd_residual(a),
        Command::Gof(a) => cmd_gof(a),
        Command::PlotData(a) => cmd_plot_data(a),
        Command::Datasets(a) => cmd_datasets(a),
    }
}

fn deliver(outcome: &Outcome) -> Result<()> {
    match &outcome.out {
        Some(path) => std::fs::write(path, &outcome.body).map_err(|e| {
            OxgError::Data(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            use std::io::Write;
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            match lock.write_all(outcome.body.as_bytes()).and_then(|_| lock.flush()) {
                Ok(()) => Ok(()),
                // A closed pipe (e.g. `oxg ... | head`) is not an error.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(OxgError::Data(format!("cannot write to stdout: {e}"))),
            }
        }
    }
}

#[derive(Serialize)]
struct ErrorBody {
    kind: &'static str,
    message: String,
}

#[derive(Serialize)]
struct ErrorEnvelope {
    error: ErrorBody,
}

fn classify(e: &OxgError) -> (&'static str, u8) {
    match e {
        OxgError::InvalidParameter(_) => ("invalid-parameter", 2),
        OxgError::Domain(_) => ("domain", 2),
        OxgError::InfiniteOdds => ("infinite-odds", 2),
        OxgError::Unsupported(_) => ("unsupported", 2),
        OxgError::Data(_) => ("data", 3),
        OxgError::NonConvergence(_) => ("non-convergence", 4),
    }
}

fn report(e: &OxgError) -> ExitCode {
    let (kind, code) = classify(e);
    let envelope = ErrorEnvelope {
        error: ErrorBody {
            kind,
            message: e.to_string(),
        },
    };
    eprintln!("{}", serde_json::to_string(&envelope).expect("error is serializable"));
    ExitCode::from(code)
}

// ---------------------------------------------------------------------------
// Rendering helpers
// ---------------------------------------------------------------------------

/// CSV floats carry 17 significant digits so they round-trip exactly.
fn csv_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn json_body<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report is serializable");
    s.push('\n');
    s
}

fn params_object(pairs: &[(&str, f64)]) -> serde_json::Map<String, serde_json::Value> {
    let mut map = serde_json::Map::new();
    for (name, value) in pairs {
        map.insert((*name).to_string(), serde_json::Value::from(*value));
    }
    map
}

/// One header row plus one data row.
fn kv_csv(columns: &[(&str, String)]) -> String {
    let header: Vec<&str> = columns.iter().map(|(name, _)| *name).collect();
    let values: Vec<&str> = columns.iter().map(|(_, v)| v.as_str()).collect();
    format!("{}\n{}\n", header.join(","), values.join(","))
}

// ---------------------------------------------------------------------------
// fit / gof
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct FitReport {
    dataset: String,
    n: usize,
    baseline: String,
    params: serde_json::Map<String, serde_json::Value>,
    log_likelihood: f64,
    aic: f64,
    converged: bool,
    iterations: usize,
    score_norm: f64,
    restarts: usize,
}

fn fit_report(ds: &Dataset, r: &FitResult) -> FitReport {
    FitReport {
        dataset: ds.name.clone(),
        n: ds.len(),
        baseline: r.baseline.kind().to_string(),
        params: params_object(&r.named_params()),
        log_likelihood: r.log_likelihood,
        aic: r.aic,
        converged: r.converged,
        iterations: r.iterations,
        score_norm: r.score_norm,
        restarts: r.restarts_used,
    }
}

fn fit_csv_columns(ds: &Dataset, r: &FitResult) -> Vec<(&'static str, String)> {
    let mut cols: Vec<(&'static str, String)> = vec![
        ("dataset", ds.name.clone()),
        ("n", ds.len().to_string()),
        ("baseline", r.baseline.kind().to_string()),
    ];
    for (name, value) in r.named_params() {
        cols.push((name, csv_num(value)));
    }
    cols.push(("log_likelihood", csv_num(r.log_likelihood)));
    cols.push(("aic", csv_num(r.aic)));
    cols.push(("converged", r.converged.to_string()));
    cols.push(("iterations", r.iterations.to_string()));
    cols.push(("score_norm", csv_num(r.score_norm)));
    cols.push(("restarts", r.restarts_used.to_string()));
    cols
}

fn convergence_post_error(r: &FitResult) -> Option<OxgError> {
    if r.converged {
        None
    } else {
        Some(OxgError::NonConvergence(format!(
            "fit completed without meeting the convergence diagnostics \
             (score norm {:.3e}); the reported estimate may be unreliable",
            r.score_norm
        )))
    }
}

fn cmd_fit(a: FitArgs) -> Result<Outcome> {
    let ds = data::load(&a.data)?;
    let r = fit(&ds.observations, a.baseline)?;
    let body = match a.output.format(Format::Json)? {
        Format::Json => json_body(&fit_report(&ds, &r)),
        Format::Csv => kv_csv(&fit_csv_columns(&ds, &r)),
    };
    Ok(Outcome {
        body,
        out: a.output.out,
        post_error: convergence_post_error(&r),
    })
}

#[derive(Serialize)]
struct GofReport {
    #[serde(flatten)]
    fit: FitReport,
    ks_statistic: f64,
    ks_critical_1pct: f64,
}

fn cmd_gof(a: GofArgs) -> Result<Outcome> {
    let ds = data::load(&a.data)?;
    let r = fit(&ds.observations, a.baseline)?;
    let d = r.distribution()?;
    let ks = ks_statistic(&d, &ds.observations)?;
    let critical = ks_critical_01(ds.len());
    let body = match a.output.format(Format::Json)? {
        Format::Json => json_body(&GofReport {
            fit: fit_report(&ds, &r),
            ks_statistic: ks,
            ks_critical_1pct: critical,
        }),
        Format::Csv => {
            let mut cols = fit_csv_columns(&ds, &r);
            cols.push(("ks_statistic", csv_num(ks)));
            cols.push(("ks_critical_1pct", csv_num(critical)));
            kv_csv(&cols)
        }
    };
    Ok(Outcome {
        body,
        out: a.output.out,
        post_error: convergence_post_error(&r),
    })
}

// ---------------------------------------------------------------------------
// eval / quantile / sample
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct EvalReport {
    x: f64,
    pdf: f64,
    log_pdf: f64,
    cdf: f64,
    survival: f64,
    hazard: f64,
    reversed_hazard: f64,
}

fn cmd_eval(a: EvalArgs) -> Result<Outcome> {
    let d = a.model.distribution()?;
    let x = a.t;
    let report = EvalReport {
        x,
        pdf: d.pdf(x),
        log_pdf: d.log_pdf(x),
        cdf: d.cdf(x),
        survival: d.survival(x),
        hazard: d.hazard(x),
        // Undefined below the support (F = 0); reported as null/nan rather
        // than failing the whole evaluation.
        reversed_hazard: d.reversed_hazard(x).unwrap_or(f64::NAN),
    };
    let body = match a.output.format(Format::Json)? {
        Format::Json => json_body(&report),
        Format::Csv => kv_csv(&[
            ("x", csv_num(report.x)),
            ("pdf", csv_num(report.pdf)),
            ("log_pdf", csv_num(report.log_pdf)),
            ("cdf", csv_num(report.cdf)),
            ("survival", csv_num(report.survival)),
            ("hazard", csv_num(report.hazard)),
            ("reversed_hazard", csv_num(report.reversed_hazard)),
        ]),
    };
    Ok(Outcome {
        body,
        out: a.output.out,
        post_error: None,
    })
}

#[derive(Serialize)]
struct QuantileReport {
    u: f64,
    x: f64,
    /// F(x) echoed back as a round-trip check.
    check: f64,
}

fn cmd_quantile(a: QuantileArgs) -> Result<Outcome> {
    let d = a.model.distribution()?;
    let x = d.quantile(a.u)?;
    let report = QuantileReport {
        u: a.u,
        x,
        check: d.cdf(x),
    };
    let body = match a.output.format(Format::Json)? {
        Format::Json => json_body(&report),
        Format::Csv => kv_csv(&[
            ("u", csv_num(report.u)),
            ("x", csv_num(report.x)),
            ("check", csv_num(report.check)),
        ]),
    };
    Ok(Outcome {
        body,
        out: a.output.out,
        post_error: None,
    })
}

#[derive(Serialize)]
struct SampleReport {
    seed: u64,
    n: usize,
    values: Vec<f64>,
}

fn cmd_sample(a: SampleArgs) -> Result<Outcome> {
    let d = a.model.distribution()?;
    let values = d.sample(a.n, a.seed)?;
    let body = match a.output.format(Format::Csv)? {
        Format::Json => json_body(&SampleReport {
            seed: a.seed,
            n: a.n,
            values,
        }),
        Format::Csv => {
            let mut s = String::from("x\n");
            for v in &values {
                s.push_str(&csv_num(*v));
                s.push('\n');
            }
            s
        }
    };
    Ok(Outcome {
        body,
        out: a.output.out,
        post_error: None,
    })
}

// ---------------------------------------------------------------------------
// moments / entropy / reliability / order-stat / residual
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct MomentsReport {
    method: String,
    converged: bool,
    raw_moments: [f64; 4],
    mean: f64,
    variance: f64,
    skewness: f64,
    kurtosis: f64,
    median: f64,
    mean_deviation_about_mean: f64,
    mean_deviation_about_median: f64,
}

fn cmd_moments(a: MomentsArgs) -> Result<Outcome> {
    let d = a.model.distribution()?;
    let policy = a.policy.policy()?;
    let method = a.method.method;
    let ms = moment_set(&d, &policy, method)?;
    let md = mean_deviations(&d, &policy, method)?;
    let report = MomentsReport {
        method: method.to_string(),
        converged: ms.converged && md.converged,
        raw_moments: ms.raw_moments,
        mean: ms.mean,
        variance: ms.variance,
        skewness: ms.skewness,
        kurtosis: ms.kurtosis,
        median: md.median,
        mean_deviation_about_mean: md.about_mean,
        mean_deviation_about_median: md.about_median,
    };
    let body = match a.output.format(Format::Json)? {
        Format::Json => json_body(&report),
        Format::Csv => kv_csv(&[
            ("method", report.method.clone()),
            ("converged", report.converged.to_string()),
            ("m1", csv_num(report.raw_moments[0])),
            ("m2", csv_num(report.raw_moments[1])),
            ("m3", csv_num(report.raw_moments[2])),
            ("m4", csv_num(report.raw_moments[3])),
            ("mean", csv_num(report.mean)),
            ("variance", csv_num(report.variance)),
            ("skewness", csv_num(report.skewness)),
            ("kurtosis", csv_num(report.kurtosis)),
            ("median", csv_num(report.median)),
            ("mean_deviation_about_mean", csv_num(report.mean_deviation_about_mean)),
            ("mean_deviation_about_median", csv_num(report.mean_deviation_about_median)),
        ]),
    };
    Ok(Outcome {
        body,
        out: a.output.out,
        post_error: None,
    })
}

#[derive(Serialize)]
struct EntropyReport {
    beta: f64,
    method: String,
    entropy: f64,
    converged: bool,
    blocks_used: usize,
}

fn cmd_entropy(a: EntropyArgs) -> Result<Outcome> {
    let d = a.model.distribution()?;
    let policy = a.policy.policy()?;
    let h = renyi_entropy(&d, a.beta, &policy, a.method.method)?;
    let report = EntropyReport {
        beta: a.beta,
        method: a.method.method.to_string(),
        entropy: h.value,
        converged: h.converged,
        blocks_used: h.blocks_used,
    };
    let body = match a.output.format(Format::Json)? {
        Format::Json => json_body(&report),
        Format::Csv => kv_csv(&[
            ("beta", csv_num(report.beta)),
            ("method", report.method.clone()),
            ("entropy", csv_num(report.entropy)),
            ("converged", report.converged.to_string()),
            ("blocks_used", report.blocks_used.to_string()),
        ]),
    };
    Ok(Outcome {
        body,
        out: a.output.out,
        post_error: None,
    })
}

#[derive(Serialize)]
struct ReliabilityReport {
    lambda1: f64,
    lambda2: f64,
    baseline: String,
    method: String,
    value: f64,
    converged: bool,
    blocks_used: usize,
}

fn cmd_reliability(a: ReliabilityArgs) -> Result<Outcome> {
    let baseline = a.baseline.model()?;
    let strength = OxgDistribution::new(a.lambda1, baseline)?;
    let stress = OxgDistribution::new(a.lambda2, baseline)?;
    let policy = a.policy.policy()?;
    let r = stress_strength(&strength, &stress, &policy, a.method.method)?;
    let report = ReliabilityReport {
        lambda1: a.lambda1,
        lambda2: a.lambda2,
        baseline: baseline.kind().to_string(),
        method: a.method.method.to_string(),
        value: r.value,
        converged: r.converged,
        blocks_used: r.blocks_used,
    };
    let body = match a.output.format(Format::Json)? {
        Format::Json => json_body(&report),
        Format::Csv => kv_csv(&[
            ("lambda1", csv_num(report.lambda1)),
            ("lambda2", csv_num(report.lambda2)),
            ("baseline", report.baseline.clone()),
            ("method", report.method.clone()),
            ("value", csv_num(report.value)),
            ("converged", report.converged.to_string()),
            ("blocks_used", report.blocks_used.to_string()),
        ]),
    };
    Ok(Outcome {
        body,
        out: a.output.out,
        post_error: None,
    })
}

#[derive(Serialize)]
struct OrderStatReport {
    rank: usize,
    n: usize,
    x: f64,
    pdf: f64,
}

fn cmd_order_stat(a: OrderStatArgs) -> Result<Outcome> {
    let d = a.model.distribution()?;
    let pdf = order_stat_pdf(&d, a.r, a.n, a.t)?;
    let report = OrderStatReport {
        rank: a.r,
        n: a.n,
        x: a.t,
        pdf,
    };
    let body = match a.output.format(Format::Json)? {
        Format::Json => json_body(&report),
        Format::Csv => kv_csv(&[
            ("rank", report.rank.to_string()),
            ("n", report.n.to_string()),
            ("x", csv_num(report.x)),
            ("pdf", csv_num(report.pdf)),
        ]),
    };
    Ok(Outcome {
        body,
        out: a.output.out,
        post_error: None,
    })
}

#[derive(Serialize)]
struct ResidualReport {
    order: u32,
    t: f64,
    method: String,
    residual_moment: f64,
    residual_converged: bool,
    reversed_moment: f64,
    reversed_converged: bool,
}

fn cmd_residual(a: ResidualArgs) -> Result<Outcome> {
    let d = a.model.distribution()?;
    let policy = a.policy.policy()?;
    let method = a.method.method;
    let res = residual_moment(&d, a.r, a.t, &policy, method)?;
    let rev = reversed_residual_moment(&d, a.r, a.t, &policy, method)?;
    let report = ResidualReport {
        order: a.r,
        t: a.t,
        method: method.to_string(),
        residual_moment: res.value,
        residual_converged: res.converged,
        reversed_moment: rev.value,
        reversed_converged: rev.converged,
    };
    let body = match a.output.format(Format::Json)? {
        Format::Json => json_body(&report),
        Format::Csv => kv_csv(&[
            ("order", report.order.to_string()),
            ("t", csv_num(report.t)),
            ("method", report.method.clone()),
            ("residual_moment", csv_num(report.residual_moment)),
            ("residual_converged", report.residual_converged.to_string()),
            ("reversed_moment", csv_num(report.reversed_moment)),
            ("reversed_converged", report.reversed_converged.to_string()),
        ]),
    };
    Ok(Outcome {
        body,
        out: a.output.out,
        post_error: None,
    })
}

// ---------------------------------------------------------------------------
// plot-data / datasets
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct GridRow {
    x: f64,
    pdf: f64,
    cdf: f64,
    survival: f64,
    hazard: f64,
    reversed_hazard: f64,
}

#[derive(Serialize)]
struct BinRow {
    bin_left: f64,
    bin_right: f64,
    count: usize,
    density: f64,
}

#[derive(Serialize)]
struct PlotReport {
    baseline: String,
    params: serde_json::Map<String, serde_json::Value>,
    grid: Vec<GridRow>,
    histogram: Option<Vec<BinRow>>,
}

const PLOT_POINTS: usize = 512;
const PLOT_TAIL: f64 = 1e-4;

fn plot_grid(d: &OxgDistribution) -> Result<Vec<GridRow>> {
    let mut rows = Vec::with_capacity(PLOT_POINTS);
    let span = 1.0 - 2.0 * PLOT_TAIL;
    for i in 0..PLOT_POINTS {
        let u = PLOT_TAIL + span * i as f64 / (PLOT_POINTS - 1) as f64;
        let x = d.quantile(u)?;
        rows.push(GridRow {
            x,
            pdf: d.pdf(x),
            cdf: d.cdf(x),
            survival: d.survival(x),
            hazard: d.hazard(x),
            reversed_hazard: d.reversed_hazard(x).unwrap_or(f64::NAN),
        });
    }
    Ok(rows)
}

/// Sturges bins over [min, max] with density normalised to unit area.
fn histogram(obs: &[f64]) -> Vec<BinRow> {
    let n = obs.len();
    let lo = obs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = obs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return vec![BinRow {
            bin_left: lo,
            bin_right: hi,
            count: n,
            density: f64::NAN,
        }];
    }
    let bins = (n as f64).log2().ceil() as usize + 1;
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in obs {
        let idx = (((x - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    counts
        .iter()
        .enumerate()
        .map(|(i, &count)| BinRow {
            bin_left: lo + i as f64 * width,
            bin_right: lo + (i + 1) as f64 * width,
            count,
            density: count as f64 / (n as f64 * width),
        })
        .collect()
}

fn cmd_plot_data(a: PlotDataArgs) -> Result<Outcome> {
    let d = a.model.distribution()?;
    let grid = plot_grid(&d)?;
    let hist = match &a.data {
        Some(spec) => Some(histogram(&data::load(spec)?.observations)),
        None => None,
    };
    let body = match a.output.format(Format::Csv)? {
        Format::Json => {
            let mut pairs = vec![("lambda", d.lambda())];
            for (name, value) in d
                .baseline()
                .param_names()
                .iter()
                .zip(d.baseline().params())
            {
                pairs.push((name, value));
            }
            json_body(&PlotReport {
                baseline: d.baseline().kind().to_string(),
                params: params_object(&pairs),
                grid,
                histogram: hist,
            })
        }
        Format::Csv => {
            let mut s = String::from("x,pdf,cdf,survival,hazard,reversed_hazard\n");
            for r in &grid {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    csv_num(r.x),
                    csv_num(r.pdf),
                    csv_num(r.cdf),
                    csv_num(r.survival),
                    csv_num(r.hazard),
                    csv_num(r.reversed_hazard),
                ));
            }
            if let Some(bins) = &hist {
                s.push_str("\nbin_left,bin_right,count,density\n");
                for b in bins {
                    s.push_str(&format!(
                        "{},{},{},{}\n",
                        csv_num(b.bin_left),
                        csv_num(b.bin_right),
                        b.count,
                        csv_num(b.density),
                    ));
                }
            }
            s
        }
    };
    Ok(Outcome {
        body,
        out: a.output.out,
        post_error: None,
    })
}

#[derive(Serialize)]
struct DatasetInfo {
    name: String,
    n: usize,
    min: f64,
    max: f64,
}

fn cmd_datasets(a: DatasetsArgs) -> Result<Outcome> {
    let infos: Vec<DatasetInfo> = data::builtin_names()
        .iter()
        .map(|name| {
            let ds = data::builtin(name).expect("builtin names resolve");
            let min = ds.observations.iter().copied().fold(f64::INFINITY, f64::min);
            let max = ds
                .observations
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            DatasetInfo {
                name: ds.name,
                n: ds.observations.len(),
                min,
                max,
            }
        })
        .collect();
    let body = match a.output.format(Format::Json)? {
        Format::Json => json_body(&infos),
        Format::Csv => {
            let mut s = String::from("name,n,min,max\n");
            for i in &infos {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    i.name,
                    i.n,
                    csv_num(i.min),
                    csv_num(i.max)
                ));
            }
            s
        }
    };
    Ok(Outcome {
        body,
        out: a.output.out,
        post_error: None,
    })
}
