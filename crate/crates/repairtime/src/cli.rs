//! Command-line surface. Every prediction, fitting, and simulation
//! capability of the library is reachable through one subcommand; output is
//! an aligned table, CSV, or JSON, written to stdout or to --out.
//!
//! Grid-shaped commands (several targets) report per-row failures on stderr
//! and keep going; the exit status is zero only if every row succeeded.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use crate::classical::{ks_statistic, mle_fit, scaled_mle_fit, wald_pi, MleFit};
use crate::data::load_lifetimes;
use crate::error::{Error, Result};
use crate::model::{
    extract_hybrid_sample, HybridSample, HybridScheme, PredictionTarget, RayleighParams,
};
use crate::montecarlo::{run_model_check, run_performance_study, Method, SimConfig};
use crate::numerics::QuadratureSpec;
use crate::predictions::{PointPredictions, PredictionInterval};
use crate::report::{
    FitReport, GridPoint, GridReport, IntervalReport, IntervalRow, ModelCheckReport,
    OutputFormat, PointReport, PointRow, SensitivityReport, StudyReport, plot_csv,
};
use crate::scaled::{
    scaled_equitailed_pi, scaled_hpd_pi, scaled_point_predictions, scaled_predictive_pdf,
    scaled_predictive_survival,
};
use crate::twoparam::{sensitivity_curve, Hyperparams, PredictiveContext};

#[derive(Debug, Parser)]
#[command(
    name = "repairtime",
    version,
    about = "Predict minimal-repair times of series systems from hybrid-censored lifetime data"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = FormatChoice::Table)]
    format: FormatChoice,
    /// Units label echoed into output headers (the data file's time unit).
    #[arg(long, global = true)]
    units: Option<String>,
    /// Write the document to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatChoice {
    Table,
    Csv,
    Json,
}

impl From<FormatChoice> for OutputFormat {
    fn from(choice: FormatChoice) -> Self {
        match choice {
            FormatChoice::Table => OutputFormat::Table,
            FormatChoice::Csv => OutputFormat::Csv,
            FormatChoice::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelChoice {
    /// Scale-only model (location known to be zero); closed-form posterior.
    Scaled,
    /// Location-scale model with a normal prior on the location.
    TwoParam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LossChoice {
    All,
    Sel,
    Ael,
    Mode,
}

impl LossChoice {
    fn column(self) -> Option<String> {
        match self {
            LossChoice::All => None,
            LossChoice::Sel => Some("sel".into()),
            LossChoice::Ael => Some("ael".into()),
            LossChoice::Mode => Some("mode".into()),
        }
    }
}

/// Data file plus the censoring design it was collected under.
#[derive(Debug, Args)]
struct DataArgs {
    /// Lifetime file: whitespace/comma separated values, '#' comments.
    #[arg(long)]
    data: PathBuf,
    /// Number of units on test (default: the number of values in the file).
    #[arg(long)]
    n: Option<usize>,
    /// Failure count at which the test stops (default: n).
    #[arg(long)]
    r: Option<usize>,
    /// Time at which the test stops (default: just past the largest value,
    /// i.e. no time censoring).
    #[arg(long = "T")]
    t: Option<f64>,
}

impl DataArgs {
    fn sample(&self) -> Result<HybridSample> {
        let values = load_lifetimes(&self.data)?;
        let n = self.n.unwrap_or(values.len());
        let r = self.r.unwrap_or(n);
        let t = self.t.unwrap_or_else(|| {
            values.iter().fold(0.0_f64, |acc, &v| acc.max(v)) + 1.0
        });
        let scheme = HybridScheme::new(n, r, t)?;
        extract_hybrid_sample(&values, scheme)
    }
}

/// Posterior model choice and its prior hyperparameters.
#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelChoice::TwoParam)]
    model: ModelChoice,
    /// Prior mean of the location (two-param model only).
    #[arg(long, default_value_t = 0.0)]
    xi: f64,
    /// Prior precision of the location; prior variance is 1/(2 tau).
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
}

/// Target grid: the cartesian product of the requested m and k values,
/// ordered by k then m.
#[derive(Debug, Args)]
struct TargetGridArgs {
    /// Repair indices m (repeatable or comma-separated).
    #[arg(long = "m", value_delimiter = ',', default_values_t = [1u32, 2, 3, 4])]
    m: Vec<u32>,
    /// Series component counts k.
    #[arg(long = "k", value_delimiter = ',', default_values_t = [1u32, 2, 3])]
    k: Vec<u32>,
}

impl TargetGridArgs {
    fn targets(&self) -> Result<Vec<PredictionTarget>> {
        let mut ms = self.m.clone();
        let mut ks = self.k.clone();
        ms.sort_unstable();
        ms.dedup();
        ks.sort_unstable();
        ks.dedup();
        let mut targets = Vec::with_capacity(ms.len() * ks.len());
        for &k in &ks {
            for &m in &ms {
                targets.push(PredictionTarget::new(m, k)?);
            }
        }
        Ok(targets)
    }
}

/// A single prediction target.
#[derive(Debug, Args)]
struct TargetArg {
    /// Repair index m.
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Series component count k.
    #[arg(long, default_value_t = 1)]
    k: u32,
}

impl TargetArg {
    fn target(&self) -> Result<PredictionTarget> {
        PredictionTarget::new(self.m, self.k)
    }
}

/// Evaluation grid for curve commands.
#[derive(Debug, Args)]
struct CurveArgs {
    /// Left end of the grid (default: the 0.9995 predictive quantile's
    /// mirror, i.e. the lower 99.9% interval endpoint).
    #[arg(long)]
    from: Option<f64>,
    /// Right end of the grid (default: the upper 99.9% interval endpoint).
    #[arg(long)]
    to: Option<f64>,
    /// Number of grid points.
    #[arg(long, default_value_t = 200)]
    points: usize,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 17)]
    r: usize,
    #[arg(long = "T", default_value_t = 2.0)]
    t: f64,
    /// True location of the simulated lifetimes.
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    /// True scale of the simulated lifetimes.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Prior mean handed to the Bayesian predictors.
    #[arg(long, default_value_t = 0.0)]
    xi: f64,
    /// Prior precision handed to the Bayesian predictors.
    #[arg(long, default_value_t = 0.005)]
    tau: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Number of replications.
    #[arg(long = "N", default_value_t = 2000)]
    replications: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Interval methods to evaluate (comma-separated).
    #[arg(
        long,
        value_delimiter = ',',
        value_parser = parse_method,
        default_values_t = [Method::BayesEquitailed, Method::BayesHpd]
    )]
    methods: Vec<Method>,
    /// Repair indices m.
    #[arg(long = "m", value_delimiter = ',', default_values_t = [1u32, 2, 3])]
    m: Vec<u32>,
    /// Series component counts k.
    #[arg(long = "k", value_delimiter = ',', default_values_t = [1u32, 2, 3])]
    k: Vec<u32>,
}

fn parse_method(s: &str) -> Result<Method> {
    Method::from_str(s)
}

#[derive(Debug, Args)]
struct ModelCheckArgs {
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 16)]
    r: usize,
    #[arg(long = "T", default_value_t = 2.0)]
    t: f64,
    /// True location of the simulated lifetimes.
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    /// True scale of the simulated lifetimes.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Repair index m of the checked target.
    #[arg(long, default_value_t = 3)]
    m: u32,
    /// Series component count k of the checked target.
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Number of replications.
    #[arg(long = "N", default_value_t = 2000)]
    replications: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Point predictions (mean, median, mode) for each target.
    Predict {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        targets: TargetGridArgs,
        /// Restrict text output to one predictor's column.
        #[arg(long, value_enum, default_value_t = LossChoice::All)]
        loss: LossChoice,
    },
    /// Equi-tailed and highest-density prediction intervals per target.
    Interval {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        targets: TargetGridArgs,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Highest-density prediction intervals per target.
    Hpd {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        targets: TargetGridArgs,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Predictive density curve for one target.
    Density {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        target: TargetArg,
        #[command(flatten)]
        curve: CurveArgs,
    },
    /// Predictive survival curve for one target.
    Survival {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        target: TargetArg,
        #[command(flatten)]
        curve: CurveArgs,
    },
    /// Maximum-likelihood fit with a Kolmogorov-Smirnov fit statistic.
    Mle {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value_t = ModelChoice::TwoParam)]
        model: ModelChoice,
    },
    /// Plug-in (Wald) prediction intervals from the maximum-likelihood fit.
    Wald {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value_t = ModelChoice::TwoParam)]
        model: ModelChoice,
        #[command(flatten)]
        targets: TargetGridArgs,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Predictor performance study (risks, widths, coverage) by simulation.
    Simulate(SimulateArgs),
    /// Prior model check: select the precision hyperparameter from replicas.
    ModelCheck(ModelCheckArgs),
    /// Posterior-mean sensitivity to the prior precision.
    Sensitivity {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        target: TargetArg,
        /// Prior mean of the location.
        #[arg(long, default_value_t = 0.0)]
        xi: f64,
        /// Precision exponents l; each scans tau = 0.5 * 10^(-l).
        #[arg(long = "l", value_delimiter = ',', default_values_t = [-2.0, -1.0, 0.0, 1.0, 2.0])]
        l: Vec<f64>,
    },
}

/// Prediction engine shared by the data-driven commands: the posterior is
/// prepared once and retargeted per (m, k).
enum Engine {
    Scaled(HybridSample),
    TwoParam(PredictiveContext),
}

impl Engine {
    fn new(sample: HybridSample, model: &ModelArgs) -> Result<Self> {
        match model.model {
            ModelChoice::Scaled => Ok(Engine::Scaled(sample)),
            ModelChoice::TwoParam => {
                let hyper = Hyperparams::new(model.xi, model.tau)?;
                let seed_target = PredictionTarget::new(1, 1).expect("static target is valid");
                Ok(Engine::TwoParam(PredictiveContext::new(
                    sample,
                    hyper,
                    seed_target,
                    QuadratureSpec::reporting(),
                )?))
            }
        }
    }

    fn points(&self, t: &PredictionTarget) -> Result<PointPredictions> {
        match self {
            Engine::Scaled(s) => scaled_point_predictions(s, t),
            Engine::TwoParam(ctx) => {
                let ctx = ctx.with_target(*t);
                Ok(PointPredictions {
                    sel: ctx.point_sel()?,
                    ael: ctx.point_ael()?,
                    mode: ctx.point_mode()?,
                })
            }
        }
    }

    fn equitailed(&self, t: &PredictionTarget, alpha: f64) -> Result<PredictionInterval> {
        match self {
            Engine::Scaled(s) => scaled_equitailed_pi(s, t, alpha),
            Engine::TwoParam(ctx) => ctx.with_target(*t).equitailed_pi(alpha),
        }
    }

    fn hpd(&self, t: &PredictionTarget, alpha: f64) -> Result<PredictionInterval> {
        match self {
            Engine::Scaled(s) => scaled_hpd_pi(s, t, alpha),
            Engine::TwoParam(ctx) => ctx.with_target(*t).hpd_pi(alpha),
        }
    }

    fn pdf(&self, t: &PredictionTarget, u: f64) -> Result<f64> {
        match self {
            Engine::Scaled(s) => scaled_predictive_pdf(u, s, t),
            Engine::TwoParam(ctx) => ctx.with_target(*t).predictive_pdf(u),
        }
    }

    fn survival(&self, t: &PredictionTarget, z: f64) -> Result<f64> {
        match self {
            Engine::Scaled(s) => scaled_predictive_survival(z, s, t),
            Engine::TwoParam(ctx) => ctx.with_target(*t).predictive_survival(z),
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn report_row_failure(t: &PredictionTarget, what: &str, e: &Error) {
    eprintln!("error: {what} for m={}, k={}: {e}", t.m(), t.k());
}

fn interval_row(t: &PredictionTarget, pi: PredictionInterval) -> IntervalRow {
    IntervalRow {
        m: t.m(),
        k: t.k(),
        kind: pi.kind,
        lower: pi.lower,
        upper: pi.upper,
        width: pi.width(),
        level: pi.level,
    }
}

fn fit_for(sample: &HybridSample, model: ModelChoice) -> Result<(MleFit, &'static str)> {
    match model {
        ModelChoice::TwoParam => Ok((mle_fit(sample)?, "two-param")),
        ModelChoice::Scaled => Ok((scaled_mle_fit(sample)?, "scaled")),
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let format: OutputFormat = cli.format.into();
    let units = cli.units;
    let out = cli.out.as_deref();
    let include_equitailed = matches!(cli.command, Command::Interval { .. });
    let is_density = matches!(cli.command, Command::Density { .. });
    match cli.command {
        Command::Predict {
            data,
            model,
            targets,
            loss,
        } => {
            let engine = Engine::new(data.sample()?, &model)?;
            let mut rows = Vec::new();
            let mut all_ok = true;
            for t in targets.targets()? {
                match engine.points(&t) {
                    Ok(p) => rows.push(PointRow {
                        m: t.m(),
                        k: t.k(),
                        sel: p.sel,
                        ael: p.ael,
                        mode: p.mode,
                    }),
                    Err(e) => {
                        all_ok = false;
                        report_row_failure(&t, "point prediction", &e);
                    }
                }
            }
            let report = PointReport {
                units,
                loss: loss.column(),
                rows,
            };
            emit(&report.render(format)?, out)?;
            Ok(all_ok)
        }
        Command::Interval {
            data,
            model,
            targets,
            alpha,
        }
        | Command::Hpd {
            data,
            model,
            targets,
            alpha,
        } => {
            let engine = Engine::new(data.sample()?, &model)?;
            let mut rows = Vec::new();
            let mut all_ok = true;
            for t in targets.targets()? {
                if include_equitailed {
                    match engine.equitailed(&t, alpha) {
                        Ok(pi) => rows.push(interval_row(&t, pi)),
                        Err(e) => {
                            all_ok = false;
                            report_row_failure(&t, "equi-tailed interval", &e);
                        }
                    }
                }
                match engine.hpd(&t, alpha) {
                    Ok(pi) => rows.push(interval_row(&t, pi)),
                    Err(e) => {
                        all_ok = false;
                        report_row_failure(&t, "highest-density interval", &e);
                    }
                }
            }
            let report = IntervalReport { units, rows };
            emit(&report.render(format)?, out)?;
            Ok(all_ok)
        }
        Command::Density {
            data,
            model,
            target,
            curve,
        }
        | Command::Survival {
            data,
            model,
            target,
            curve,
        } => {
            let engine = Engine::new(data.sample()?, &model)?;
            let t = target.target()?;
            let (from, to) = curve_range(&engine, &t, &curve)?;
            if curve.points < 2 {
                return Err(Error::Domain(format!(
                    "a curve needs at least 2 grid points, got {}",
                    curve.points
                )));
            }
            let mut rows = Vec::new();
            let mut all_ok = true;
            for i in 0..curve.points {
                let u = from + (to - from) * i as f64 / (curve.points - 1) as f64;
                let value = if is_density {
                    engine.pdf(&t, u)
                } else {
                    engine.survival(&t, u)
                };
                match value {
                    Ok(v) => rows.push(GridPoint { u, value: v }),
                    Err(e) => {
                        all_ok = false;
                        eprintln!("error: curve value at u={u}: {e}");
                    }
                }
            }
            let report = GridReport {
                units,
                quantity: if is_density { "density" } else { "survival" }.into(),
                m: t.m(),
                k: t.k(),
                rows,
            };
            emit(&report.render(format)?, out)?;
            Ok(all_ok)
        }
        Command::Mle { data, model } => {
            let sample = data.sample()?;
            let (fit, label) = fit_for(&sample, model)?;
            let params = RayleighParams::new(fit.mu_hat, fit.sigma_hat)?;
            let ks_d = ks_statistic(sample.observations(), &params)?;
            let report = FitReport {
                model: label.into(),
                mu_hat: fit.mu_hat,
                sigma_hat: fit.sigma_hat,
                converged: fit.converged,
                boundary: fit.boundary,
                printed_score_residual: fit.printed_score_residual,
                log_likelihood: fit.log_likelihood,
                ks_d: Some(ks_d),
                units,
            };
            emit(&report.render(format)?, out)?;
            Ok(true)
        }
        Command::Wald {
            data,
            model,
            targets,
            alpha,
        } => {
            let sample = data.sample()?;
            let (fit, _) = fit_for(&sample, model)?;
            let mut rows = Vec::new();
            let mut all_ok = true;
            for t in targets.targets()? {
                match wald_pi(&fit, t, alpha) {
                    Ok(pi) => rows.push(interval_row(&t, pi)),
                    Err(e) => {
                        all_ok = false;
                        report_row_failure(&t, "plug-in interval", &e);
                    }
                }
            }
            let report = IntervalReport { units, rows };
            emit(&report.render(format)?, out)?;
            Ok(all_ok)
        }
        Command::Simulate(args) => {
            let mut ms = args.m.clone();
            let mut ks = args.k.clone();
            ms.sort_unstable();
            ms.dedup();
            ks.sort_unstable();
            ks.dedup();
            let mut targets = Vec::new();
            for &k in &ks {
                for &m in &ms {
                    targets.push(PredictionTarget::new(m, k)?);
                }
            }
            let cfg = SimConfig {
                n: args.n,
                r: args.r,
                t: args.t,
                true_params: RayleighParams::new(args.mu, args.sigma)?,
                hyper: Hyperparams::new(args.xi, args.tau)?,
                targets,
                alpha: args.alpha,
                replications: args.replications,
                seed: args.seed,
                methods: args.methods.clone(),
                quad: QuadratureSpec::monte_carlo(),
            };
            let study = run_performance_study(&cfg)?;
            let report = StudyReport {
                replications: study.replications,
                discarded: study.discarded,
                units,
                rows: study.rows,
            };
            emit(&report.render(format)?, out)?;
            Ok(true)
        }
        Command::ModelCheck(args) => {
            let cfg = SimConfig {
                n: args.n,
                r: args.r,
                t: args.t,
                true_params: RayleighParams::new(args.mu, args.sigma)?,
                // The check scans its own precision grid around a centered
                // prior, so only xi = 0 enters.
                hyper: Hyperparams::new(0.0, 0.005)?,
                targets: vec![PredictionTarget::new(args.m, args.k)?],
                alpha: 0.05,
                replications: args.replications,
                seed: args.seed,
                methods: vec![Method::BayesEquitailed],
                quad: QuadratureSpec::monte_carlo(),
            };
            let result = run_model_check(&cfg)?;
            if let Some(path) = out {
                let stem = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or("model_check");
                let sim_path = path.with_file_name(format!("{stem}_ecdf_sim.csv"));
                let pred_path = path.with_file_name(format!("{stem}_ecdf_pred.csv"));
                fs::write(&sim_path, plot_csv(("u", "ecdf"), &result.ecdf_sim))?;
                fs::write(&pred_path, plot_csv(("u", "ecdf"), &result.ecdf_pred))?;
            }
            let report = ModelCheckReport {
                units,
                m: args.m,
                k: args.k,
                result,
            };
            emit(&report.render(format)?, out)?;
            Ok(true)
        }
        Command::Sensitivity {
            data,
            target,
            xi,
            l,
        } => {
            let sample = data.sample()?;
            let t = target.target()?;
            let rows = sensitivity_curve(&sample, &t, xi, &l, &QuadratureSpec::reporting())?;
            let report = SensitivityReport {
                units,
                m: t.m(),
                k: t.k(),
                xi,
                rows,
            };
            emit(&report.render(format)?, out)?;
            Ok(true)
        }
    }
}

/// Default curve range: the 99.9% equi-tailed interval, overridable per end.
fn curve_range(engine: &Engine, t: &PredictionTarget, curve: &CurveArgs) -> Result<(f64, f64)> {
    let (mut from, mut to) = (curve.from, curve.to);
    if from.is_none() || to.is_none() {
        let wide = engine.equitailed(t, 0.001)?;
        from = from.or(Some(wide.lower));
        to = to.or(Some(wide.upper));
    }
    let (from, to) = (from.expect("filled above"), to.expect("filled above"));
    if !(from < to) {
        return Err(Error::Domain(format!(
            "curve range must satisfy from < to, got [{from}, {to}]"
        )));
    }
    Ok((from, to))
}
