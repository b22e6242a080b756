//! Subcommands of the `impact` binary.
//!
//! Each subcommand validates its flags, computes an in-memory table and
//! writes it as CSV or JSON lines. Diagnostics go to standard error.

pub mod table;

use std::collections::BTreeSet;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use impact_core::log::{read_log, write_log, EventLog};
use impact_core::model::{
    cumulative_rate, follower_rate, peak_age, per_follower_rate, DiscreteSums, ModelParams,
    DEFAULT_REL_TOL,
};
use impact_core::pipeline::{aggregate_all_cohorts, follower_histories, CohortSeries, LogIndex};
use impact_core::{fit_all_cohorts, simulate_population, FitError, SimConfig, Stratum};

use table::{write_table, CareerRow, CohortRow, CurveRow, FitRow, Format, PeakRow};

#[derive(Debug, Parser)]
#[command(name = "impact", version, about = "Career-impact model, simulator and log analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate f, F and G_s over a grid of ages.
    ModelCurves(ModelCurvesArgs),
    /// Solve for the age at which G_s peaks.
    PeakAge(PeakAgeArgs),
    /// Simulate a population of careers into an event log.
    Simulate(SimulateArgs),
    /// Median career curves per career-length stratum.
    Analyze(AnalyzeArgs),
    /// Fit power laws to aggregated retweet cohorts.
    Fit(FitArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, default_value_t = 0.8, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub epsilon: f64,
    /// Initial followers.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub s: f64,
}

impl ModelArgs {
    pub fn params(&self) -> Result<ModelParams> {
        Ok(ModelParams::new(self.c, self.alpha, self.epsilon, self.s)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ModelCurvesArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub step: f64,
    /// Use sums over integer ages starting at 1 instead of the integral.
    #[arg(long)]
    pub discrete: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PeakAgeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = DEFAULT_REL_TOL, allow_negative_numbers = true)]
    pub rel_tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub arrival_rate: f64,
    #[arg(long, default_value_t = 1)]
    pub tweets_per_week: u32,
    #[arg(long, default_value_t = 300)]
    pub horizon_weeks: u32,
    #[arg(long, default_value_t = 100)]
    pub n_users: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Add floor(rate * t) - floor(rate * (t - 1)) followers in week t.
    #[arg(long)]
    pub deterministic_arrivals: bool,
    /// Let the initial followers retweet as if they arrived in week 0.
    #[arg(long)]
    pub initial_followers_retweet: bool,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl SimulateArgs {
    pub fn config(&self) -> Result<SimConfig> {
        let config = SimConfig {
            deterministic_arrivals: self.deterministic_arrivals,
            initial_followers_retweet: self.initial_followers_retweet,
            ..SimConfig::new(
                self.model.params()?,
                self.arrival_rate,
                self.tweets_per_week,
                self.horizon_weeks,
                self.n_users,
                self.seed,
            )
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Event log in the line-delimited canonical format.
    #[arg(long)]
    pub input: PathBuf,
    /// Malformed lines tolerated before failing.
    #[arg(long, default_value_t = 0)]
    pub max_errors: usize,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Career-length stratum `LO..HI` (half-open); repeatable.
    #[arg(long = "stratum", value_name = "LO..HI")]
    pub strata: Vec<Stratum>,
    /// Divide weekly means by the interpolated follower count.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, default_value_t = 5)]
    pub smooth_width: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Restrict to these users; repeatable.
    #[arg(long = "user")]
    pub users: Vec<u64>,
    /// Only users whose career spans at least this many weeks.
    #[arg(long)]
    pub min_career_weeks: Option<u32>,
    /// Also write the aggregated cohorts to this file.
    #[arg(long)]
    pub cohorts_output: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::ModelCurves(args) => {
            let rows = model_curves(&args)?;
            write_table(&rows, args.out.format, args.out.output.as_ref())
        }
        Command::PeakAge(args) => {
            let row = peak(&args)?;
            write_table(&[row], args.out.format, args.out.output.as_ref())
        }
        Command::Simulate(args) => simulate(&args),
        Command::Analyze(args) => {
            let rows = analyze(&args)?;
            write_table(&rows, args.out.format, args.out.output.as_ref())
        }
        Command::Fit(args) => {
            let (fits, cohorts) = fit(&args)?;
            if let Some(path) = &args.cohorts_output {
                write_table(&cohort_rows(&cohorts), args.out.format, Some(path))?;
            }
            write_table(&fits, args.out.format, args.out.output.as_ref())
        }
    }
}

fn check_grid(t_max: f64, step: f64) -> Result<()> {
    if !(t_max.is_finite() && t_max > 0.0) {
        bail!("--t-max must be finite and > 0, got {t_max}");
    }
    if !(step.is_finite() && step > 0.0) {
        bail!("--step must be finite and > 0, got {step}");
    }
    Ok(())
}

/// Rows at ages `step, 2 step, ...` up to `t_max`, or at integer ages
/// `1, 1 + step, ...` in discrete mode.
pub fn model_curves(args: &ModelCurvesArgs) -> Result<Vec<CurveRow>> {
    let params = args.model.params()?;
    check_grid(args.t_max, args.step)?;
    let mut rows = Vec::new();
    if args.discrete {
        if args.step.fract() != 0.0 {
            bail!("--step must be a whole number with --discrete, got {}", args.step);
        }
        let step = args.step as usize;
        let t_max = args.t_max.floor() as usize;
        for (i, total) in DiscreteSums::new(params).take(t_max).enumerate().step_by(step) {
            let t = (i + 1) as f64;
            rows.push(CurveRow {
                t,
                f: follower_rate(&params, t)?,
                cumulative: total,
                per_follower: total / (params.s() + t),
            });
        }
    } else {
        // Tolerate rounding in t_max / step so that the end point is kept.
        let n = (args.t_max / args.step * (1.0 + 1e-12)).floor() as u64;
        for k in 1..=n {
            let t = k as f64 * args.step;
            rows.push(CurveRow {
                t,
                f: follower_rate(&params, t)?,
                cumulative: cumulative_rate(&params, t)?,
                per_follower: per_follower_rate(&params, t)?,
            });
        }
    }
    Ok(rows)
}

pub fn peak(args: &PeakAgeArgs) -> Result<PeakRow> {
    let params = args.model.params()?;
    let p = peak_age(&params, args.rel_tol)?;
    if !p.converged {
        eprintln!("warning: peak search did not converge; reporting t_star = {}", p.t_star);
    }
    Ok(PeakRow {
        t_star: p.t_star,
        g_at_peak: p.g_at_peak,
        converged: p.converged,
    })
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let config = args.config()?;
    let log = simulate_population(&config)?;
    let out = table::open_output(args.output.as_deref())?;
    write_log(&log, out).with_context(|| match &args.output {
        Some(p) => format!("cannot write {}", p.display()),
        None => "cannot write to standard output".to_string(),
    })
}

/// Reads the input log within its malformed-line budget, reporting skipped
/// lines and dropped retweets on standard error.
pub fn load_log(input: &InputArgs) -> Result<EventLog> {
    let path = &input.input;
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let report = read_log(BufReader::new(file), input.max_errors)
        .with_context(|| format!("cannot read {}", path.display()))?;
    for (line, message) in &report.skipped {
        eprintln!("{}:{line}: skipped malformed line: {message}", path.display());
    }
    for issue in &report.dropped {
        eprintln!("{}: dropped {issue}", path.display());
    }
    Ok(report.log)
}

pub fn analyze(args: &AnalyzeArgs) -> Result<Vec<CareerRow>> {
    let width = args.smooth_width;
    if width == 0 || width.is_multiple_of(2) {
        bail!("--smooth-width must be odd and >= 1, got {width}");
    }
    let strata = if args.strata.is_empty() {
        Stratum::defaults()
    } else {
        args.strata.clone()
    };
    let log = load_log(&args.input)?;
    let index = LogIndex::new(&log);
    let histories = follower_histories(&log);

    let mut rows = Vec::new();
    for stratum in &strata {
        let (curve, warnings) = index.career_curve(stratum, args.normalize.then_some(&histories));
        for w in warnings {
            eprintln!("stratum {stratum}: {w}");
        }
        if curve.is_empty() {
            eprintln!("stratum {stratum}: no users");
            continue;
        }
        let curve = curve.smoothed(width)?;
        let label = stratum.to_string();
        for ((&week, &value), &n_users) in curve.weeks.iter().zip(&curve.values).zip(&curve.n_users) {
            rows.push(CareerRow {
                stratum: label.clone(),
                week,
                value,
                n_users,
            });
        }
    }
    Ok(rows)
}

/// Aggregated cohorts of the selected users and a power-law fit of each.
/// Cohorts that cannot be fitted are reported on standard error.
pub fn fit(args: &FitArgs) -> Result<(Vec<FitRow>, Vec<CohortSeries>)> {
    let log = load_log(&args.input)?;
    let index = LogIndex::new(&log);
    let selected: BTreeSet<u64> = if args.users.is_empty() {
        index.users().collect()
    } else {
        args.users.iter().copied().collect()
    };
    let mut per_user = Vec::with_capacity(selected.len());
    for &user in &selected {
        if let Some(min) = args.min_career_weeks {
            if index.career_length(user)? < min {
                continue;
            }
        }
        per_user.push(index.extract_cohorts(user)?);
    }
    let cohorts = aggregate_all_cohorts(&per_user);
    let (rows, skipped) = fit_rows(&cohorts);
    for (week, err) in skipped {
        eprintln!("cohort {week} skipped: {err}");
    }
    Ok((rows, cohorts))
}

pub fn fit_rows(cohorts: &[CohortSeries]) -> (Vec<FitRow>, Vec<(u32, FitError)>) {
    let fits = fit_all_cohorts(cohorts);
    let rows = fits
        .fits
        .iter()
        .map(|(week, f)| FitRow {
            start_week: *week,
            c_hat: f.c_hat,
            alpha_hat: f.alpha_hat,
            r_squared: f.r_squared,
            n_points: f.n_points,
        })
        .collect();
    (rows, fits.skipped)
}

pub fn cohort_rows(cohorts: &[CohortSeries]) -> Vec<CohortRow> {
    cohorts
        .iter()
        .flat_map(|c| {
            c.ages
                .iter()
                .zip(&c.values)
                .zip(&c.support)
                .map(move |((&age, &value), &support)| CohortRow {
                    start_week: c.start_week,
                    age,
                    value,
                    support,
                })
        })
        .collect()
}
