use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use trialalloc::oracle::{self, GridArgmin, GridSpec, Objective, Truth};
use trialalloc::report::{self, CurvePoint};
use trialalloc::survival::{self, SurvivalMethod};
use trialalloc::{
    allocation, model, sample_size, DesignSpec, Direction, Error, ErrorRates, EvalPoint, Margin,
    MarginKind, OutcomeFamily, TrialKind,
};

const EXIT_VALIDATION: u8 = 2;
const EXIT_COMPUTATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "trialalloc",
    version,
    about = "Optimal randomization allocation for superiority and non-inferiority trials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal allocation fractions and ARE against balanced allocation.
    Allocate(AllocateArgs),
    /// Per-arm sample sizes for a two-arm non-inferiority design.
    SampleSize(SampleSizeArgs),
    /// Required events for a log-rank non-inferiority design.
    Events(EventsArgs),
    /// Relative efficiency against randomization ratio, or ARE against margin.
    Curve(CurveArgs),
    /// Monte-Carlo rejection rate of the non-inferiority test.
    Simulate(SimulateArgs),
    /// Check closed-form optima against the grid oracle (and simulation).
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Dist {
    Normal,
    Binomial,
    Poisson,
}

#[derive(Clone, Copy, ValueEnum)]
enum MarginType {
    Additive,
    Multiplicative,
}

impl From<MarginType> for MarginKind {
    fn from(m: MarginType) -> Self {
        match m {
            MarginType::Additive => MarginKind::Additive,
            MarginType::Multiplicative => MarginKind::Multiplicative,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Higher,
    Lower,
}

#[derive(Clone, Copy, ValueEnum)]
enum PointArg {
    NullBoundary,
    Alternative,
}

impl From<PointArg> for EvalPoint {
    fn from(p: PointArg) -> Self {
        match p {
            PointArg::NullBoundary => EvalPoint::NullBoundary,
            PointArg::Alternative => EvalPoint::Alternative,
        }
    }
}

impl From<PointArg> for Truth {
    fn from(p: PointArg) -> Self {
        match p {
            PointArg::NullBoundary => Truth::NullBoundary,
            PointArg::Alternative => Truth::Alternative,
        }
    }
}

#[derive(Clone, Copy, Default, PartialEq, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Jung,
    Chow,
}

impl From<MethodArg> for SurvivalMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Jung => SurvivalMethod::Jung,
            MethodArg::Chow => SurvivalMethod::Chow,
        }
    }
}

#[derive(Args, Clone)]
struct RateArgs {
    /// One-sided type-I error rate.
    #[arg(long)]
    alpha: Option<f64>,
    /// Target power.
    #[arg(long)]
    power: Option<f64>,
}

/// Two-arm design given inline or as a JSON spec file.
#[derive(Args, Clone)]
struct DesignArgs {
    /// Design spec in the canonical JSON encoding; inline flags override it.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    dist: Option<Dist>,
    /// Control location: mean (normal), probability (binomial) or rate (poisson).
    #[arg(long, allow_negative_numbers = true)]
    control: Option<f64>,
    /// Assumed true treatment location.
    #[arg(long, allow_negative_numbers = true)]
    treatment: Option<f64>,
    /// Control standard deviation (normal).
    #[arg(long)]
    sd_control: Option<f64>,
    /// Treatment standard deviation (normal; defaults to the control's).
    #[arg(long)]
    sd_treatment: Option<f64>,
    #[arg(long, value_enum)]
    margin_type: Option<MarginType>,
    /// Non-inferiority margin Δ.
    #[arg(long)]
    margin: Option<f64>,
    /// Which outcome direction is favorable.
    #[arg(long, value_enum)]
    direction: Option<DirectionArg>,
    /// Parameter point for variance evaluation.
    #[arg(long, value_enum)]
    eval_point: Option<PointArg>,
    #[command(flatten)]
    rates: RateArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct AllocateArgs {
    #[command(flatten)]
    design: DesignArgs,
    /// Equal-variance superiority design with this many arms (including control).
    #[arg(long, conflicts_with = "sigmas")]
    k: Option<usize>,
    /// Superiority design with these per-arm standard deviations, control first.
    #[arg(long, value_delimiter = ',')]
    sigmas: Option<Vec<f64>>,
}

#[derive(Args)]
struct SampleSizeArgs {
    #[command(flatten)]
    design: DesignArgs,
    /// Control fraction h (default: optimal).
    #[arg(long, conflicts_with = "ratio")]
    h: Option<f64>,
    /// Treatment:control ratio, as a number or `a:b`.
    #[arg(long, value_parser = parse_ratio)]
    ratio: Option<f64>,
    /// Multiply per-arm sizes by this factor (e.g. for dropout), rounding up.
    #[arg(long)]
    inflation: Option<f64>,
}

#[derive(Args)]
struct EventsArgs {
    /// Hazard-ratio margin Δ₀.
    #[arg(long)]
    delta0: f64,
    #[command(flatten)]
    rates: RateArgs,
    #[arg(long, value_enum, default_value = "jung")]
    method: MethodArg,
    /// Control fraction p (default: optimal for the method).
    #[arg(long)]
    p: Option<f64>,
    /// Overall probability that an enrolled patient has an event; converts
    /// events to patients.
    #[arg(long)]
    event_prob: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    design: DesignArgs,
    #[arg(long, default_value_t = 0.2)]
    r_min: f64,
    #[arg(long, default_value_t = 4.0)]
    r_max: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Evaluate at these ratios instead of a grid (numbers or `a:b`).
    #[arg(long, value_delimiter = ',', value_parser = parse_ratio)]
    at: Option<Vec<f64>>,
    /// ARE against the margin instead of efficiency against the ratio.
    #[arg(long)]
    vs_delta: bool,
    #[arg(long)]
    sigma_c: Option<f64>,
    #[arg(long)]
    sigma_t: Option<f64>,
    #[arg(long)]
    delta_min: Option<f64>,
    #[arg(long)]
    delta_max: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    design: DesignArgs,
    /// Control arm size (default: from sample-size).
    #[arg(long)]
    n_control: Option<u64>,
    #[arg(long)]
    n_treatment: Option<u64>,
    #[arg(long, value_enum, default_value = "alternative")]
    truth: PointArg,
    #[arg(long, default_value_t = 100_000)]
    reps: u64,
    #[arg(long)]
    seed: u64,
    /// Worker threads (default: all cores); results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    design: DesignArgs,
    /// Survival design: verify the event-fraction optimum at this Δ₀ instead.
    #[arg(long)]
    delta0: Option<f64>,
    #[arg(long, conflicts_with = "sigmas")]
    k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    sigmas: Option<Vec<f64>>,
    /// Grid spacing (default 1e-4; 1e-5 for survival).
    #[arg(long)]
    step: Option<f64>,
    /// Also simulate power and type-I error at the design's sample size.
    #[arg(long)]
    simulate: bool,
    #[arg(long, default_value_t = 100_000)]
    reps: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

enum CliError {
    Usage(String),
    Lib(Error),
    Mismatch(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn parse_ratio(s: &str) -> Result<f64, String> {
    let value = match s.split_once(':') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("bad ratio {s}"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("bad ratio {s}"))?;
            a / b
        }
        None => s.trim().parse().map_err(|_| format!("bad ratio {s}"))?,
    };
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(format!("ratio must be positive: {s}"))
    }
}

fn rates_from(args: &RateArgs, base: ErrorRates) -> ErrorRates {
    ErrorRates {
        alpha: args.alpha.unwrap_or(base.alpha),
        power: args.power.unwrap_or(base.power),
    }
}

fn family(dist: Dist, location: f64, sd: Option<f64>) -> CliResult<OutcomeFamily> {
    Ok(match dist {
        Dist::Normal => OutcomeFamily::Normal {
            mean: location,
            sd: sd.ok_or_else(|| {
                CliError::Usage("--sd-control is required for --dist normal".into())
            })?,
        },
        Dist::Binomial => OutcomeFamily::Binomial { prob: location },
        Dist::Poisson => OutcomeFamily::Poisson { rate: location },
    })
}

impl DesignArgs {
    fn load(&self) -> CliResult<DesignSpec> {
        let mut spec = match &self.spec {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                let mut de = serde_json::Deserializer::from_str(&text);
                serde_path_to_error::deserialize(&mut de).map_err(|e| {
                    CliError::Lib(Error::validation(
                        e.path().to_string(),
                        e.into_inner().to_string(),
                    ))
                })?
            }
            None => {
                let dist = self
                    .dist
                    .ok_or_else(|| CliError::Usage("give --spec or --dist".into()))?;
                let control = self.control.unwrap_or(0.0);
                if self.control.is_none() && !matches!(dist, Dist::Normal) {
                    return Err(CliError::Usage("--control is required".into()));
                }
                let control = family(dist, control, self.sd_control)?;
                let treatment = match (self.treatment, dist) {
                    (Some(t), _) => Some(family(dist, t, self.sd_treatment.or(self.sd_control))?),
                    (None, Dist::Normal) if self.sd_treatment.is_some() => {
                        Some(family(dist, control.mean(), self.sd_treatment)?)
                    }
                    (None, _) => None,
                };
                let kind = self.margin_type.unwrap_or(MarginType::Additive).into();
                let value = self
                    .margin
                    .ok_or_else(|| CliError::Usage("--margin is required".into()))?;
                DesignSpec::noninferiority(control, treatment, Margin { kind, value })
            }
        };
        if self.spec.is_some() {
            if let Some(kind) = self.margin_type {
                if let Some(m) = spec.margin.as_mut() {
                    m.kind = kind.into();
                }
            }
            if let Some(value) = self.margin {
                if let Some(m) = spec.margin.as_mut() {
                    m.value = value;
                }
            }
        }
        spec.rates = rates_from(&self.rates, spec.rates);
        if let Some(d) = self.direction {
            spec.direction = match d {
                DirectionArg::Higher => Direction::HigherFavorable,
                DirectionArg::Lower => Direction::LowerFavorable,
            };
        }
        if let Some(p) = self.eval_point {
            spec.variance_eval_point = Some(p.into());
        }
        Ok(model::validate(&spec)?)
    }
}

// ---------------------------------------------------------------------------
// Output

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, Value)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        Value::Array(items) if items.iter().all(|v| !v.is_object()) => {
            out.push((prefix.to_string(), value.clone()));
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), v, out);
            }
        }
        other => out.push((prefix.to_string(), other.clone())),
    }
}

fn scalar(value: &Value, round: bool) -> String {
    match value {
        Value::Number(n) if n.is_f64() && round => format!("{:.2}", n.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) => s.clone(),
        Value::Array(items) => items
            .iter()
            .map(|v| scalar(v, round))
            .collect::<Vec<_>>()
            .join(";"),
        other => other.to_string(),
    }
}

fn render<T: Serialize>(value: &T, format: Format) -> String {
    let json = serde_json::to_value(value).expect("results serialize");
    match format {
        Format::Json => serde_json::to_string_pretty(&json).expect("json") + "\n",
        Format::Csv | Format::Table => {
            let mut rows = Vec::new();
            flatten("", &json, &mut rows);
            if format == Format::Csv {
                let header: Vec<_> = rows.iter().map(|(k, _)| k.as_str()).collect();
                let values: Vec<_> = rows.iter().map(|(_, v)| scalar(v, false)).collect();
                format!("{}\n{}\n", header.join(","), values.join(","))
            } else {
                let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                rows.iter()
                    .map(|(k, v)| format!("{k:<width$}  {}\n", scalar(v, true)))
                    .collect()
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Commands

fn superiority_spec(k: Option<usize>, sigmas: Option<&[f64]>) -> Option<DesignSpec> {
    let sigmas: Vec<f64> = match (k, sigmas) {
        (Some(k), _) => vec![1.0; k],
        (None, Some(s)) => s.to_vec(),
        (None, None) => return None,
    };
    let arm = |sd: f64| OutcomeFamily::Normal { mean: 0.0, sd };
    Some(DesignSpec::superiority(
        arm(sigmas.first().copied().unwrap_or(1.0)),
        sigmas.iter().skip(1).map(|&s| arm(s)).collect(),
    ))
}

fn allocate(args: &AllocateArgs) -> CliResult<String> {
    if let Some(k) = args.k {
        if k < 2 {
            return Err(Error::validation("k", "need at least two arms including control").into());
        }
    }
    let spec = match superiority_spec(args.k, args.sigmas.as_deref()) {
        Some(spec) => spec,
        None => args.design.load()?,
    };
    let plan = allocation::allocate(&spec)?;
    Ok(render(&plan, args.design.format))
}

#[derive(Serialize)]
struct InflatedSampleSize {
    #[serde(flatten)]
    design: sample_size::SampleSizeResult,
    inflation: f64,
    n_control_inflated: u64,
    n_treatment_inflated: u64,
    n_total_inflated: u64,
}

fn sample_size_cmd(args: &SampleSizeArgs) -> CliResult<String> {
    let spec = args.design.load()?;
    let h = args.h.or(args.ratio.map(|r| 1.0 / (1.0 + r)));
    let result = sample_size::sample_size_ni(&spec, h)?;
    match args.inflation {
        None => Ok(render(&result, args.design.format)),
        Some(f) if !(f >= 1.0 && f.is_finite()) => {
            Err(Error::validation("inflation", "inflation factor must be at least 1").into())
        }
        Some(f) => {
            let c = (result.n_control as f64 * f).ceil() as u64;
            let t = (result.n_treatment as f64 * f).ceil() as u64;
            let out = InflatedSampleSize {
                design: result,
                inflation: f,
                n_control_inflated: c,
                n_treatment_inflated: t,
                n_total_inflated: c + t,
            };
            Ok(render(&out, args.design.format))
        }
    }
}

#[derive(Serialize)]
struct EventsOutput {
    #[serde(flatten)]
    design: survival::SurvivalDesign,
    #[serde(skip_serializing_if = "Option::is_none")]
    event_prob: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    patients: Option<u64>,
}

fn events(args: &EventsArgs) -> CliResult<String> {
    let rates = rates_from(&args.rates, ErrorRates::default());
    rates.validate("rates")?;
    let design = survival::design_events(args.delta0, &rates, args.method.into(), args.p)?;
    let patients = match args.event_prob {
        None => None,
        Some(q) if !(q > 0.0 && q <= 1.0) => {
            return Err(Error::validation("event_prob", "must lie in (0,1]").into())
        }
        Some(q) => Some((design.d_events as f64 / q).ceil() as u64),
    };
    let out = EventsOutput {
        design,
        event_prob: args.event_prob,
        patients,
    };
    Ok(render(&out, args.format))
}

fn curve(args: &CurveArgs) -> CliResult<String> {
    let format = args.design.format;
    if args.vs_delta {
        let kind: MarginKind = args
            .design
            .margin_type
            .unwrap_or(MarginType::Additive)
            .into();
        let (lo, hi) = match kind {
            MarginKind::Additive => (0.05, 0.5),
            MarginKind::Multiplicative => (1.0, 2.0),
        };
        let sigma_c = args
            .sigma_c
            .ok_or_else(|| CliError::Usage("--sigma-c is required with --vs-delta".into()))?;
        let sigma_t = args.sigma_t.unwrap_or(sigma_c);
        let grid = report::delta_grid(
            args.delta_min.unwrap_or(lo),
            args.delta_max.unwrap_or(hi),
            args.points,
        )?;
        let curve = report::are_vs_delta_curve(kind, sigma_c, sigma_t, &grid)?;
        return Ok(match format {
            Format::Json => render(&curve, format),
            Format::Csv => report::are_csv(&curve),
            Format::Table => report::are_table(&curve),
        });
    }

    let spec = args.design.load()?;
    let points: Vec<CurvePoint> = match &args.at {
        Some(ratios) => ratios
            .iter()
            .map(|&ratio| {
                Ok(CurvePoint {
                    ratio,
                    relative_efficiency: report::efficiency_at_ratio(&spec, ratio)?,
                })
            })
            .collect::<Result<_, Error>>()?,
        None => report::efficiency_curve(&spec, args.r_min, args.r_max, args.points)?.points,
    };
    Ok(match format {
        Format::Json => render(
            &report::EfficiencyCurve {
                points,
                optimal_ratio: report::optimal_ratio(&spec)?,
                spec,
            },
            format,
        ),
        Format::Csv => report::efficiency_csv(&points),
        Format::Table => report::efficiency_table(&points),
    })
}

fn arm_sizes(
    spec: &DesignSpec,
    n_control: Option<u64>,
    n_treatment: Option<u64>,
) -> CliResult<(u64, u64)> {
    match (n_control, n_treatment) {
        (Some(c), Some(t)) => Ok((c, t)),
        (None, None) => {
            let n = sample_size::sample_size_ni(spec, None)?;
            Ok((n.n_control, n.n_treatment))
        }
        _ => Err(CliError::Usage(
            "give both --n-control and --n-treatment or neither".into(),
        )),
    }
}

fn simulate(args: &SimulateArgs) -> CliResult<String> {
    let spec = args.design.load()?;
    let (c, t) = arm_sizes(&spec, args.n_control, args.n_treatment)?;
    let report = oracle::simulate_with_workers(
        &spec,
        c,
        t,
        args.truth.into(),
        args.reps,
        args.seed,
        args.workers,
    )?;
    Ok(render(&report, args.design.format))
}

#[derive(Serialize)]
struct FractionCheck {
    closed_form: Vec<f64>,
    grid_argmin: Vec<f64>,
    max_abs_diff: f64,
    grid_step: f64,
    tolerance: f64,
    agrees: bool,
}

#[derive(Serialize)]
struct SimulationCheck {
    n_control: u64,
    n_treatment: u64,
    analytic_power: f64,
    power: oracle::SimulationReport,
    power_within_3se: bool,
    type_one: oracle::SimulationReport,
    type_one_within_3se: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    fractions: FractionCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    simulation: Option<SimulationCheck>,
}

fn fraction_check(closed: Vec<f64>, objective: &Objective, step: f64) -> CliResult<FractionCheck> {
    let grid = GridSpec::with_step(step);
    let found = oracle::grid_minimize_fraction(objective, &grid)?;
    let grid_argmin = match found.argmin {
        GridArgmin::Fraction(h) => vec![h],
        GridArgmin::Simplex(c) => c,
    };
    let closed: Vec<f64> = closed.into_iter().take(grid_argmin.len()).collect();
    let max_abs_diff = closed
        .iter()
        .zip(&grid_argmin)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let tolerance = 2.0 * step;
    Ok(FractionCheck {
        closed_form: closed,
        grid_argmin,
        max_abs_diff,
        grid_step: step,
        tolerance,
        agrees: max_abs_diff <= tolerance,
    })
}

fn verify(args: &VerifyArgs) -> CliResult<String> {
    let format = args.design.format;
    let fractions = if let Some(delta0) = args.delta0 {
        let rates = rates_from(&args.design.rates, ErrorRates::default());
        let p = survival::optimal_event_fraction(delta0, &rates)?;
        fraction_check(
            vec![p],
            &Objective::jung(delta0, &rates)?,
            args.step.unwrap_or(1e-5),
        )?
    } else {
        let spec = match superiority_spec(args.k, args.sigmas.as_deref()) {
            Some(spec) => spec,
            None => args.design.load()?,
        };
        let plan = allocation::allocate(&spec)?;
        fraction_check(
            plan.fractions,
            &Objective::from_spec(&spec)?,
            args.step.unwrap_or(1e-4),
        )?
    };

    let simulation = if args.simulate {
        let spec = args.design.load()?;
        if spec.trial_kind != TrialKind::NoninferiorityTwoArm {
            return Err(CliError::Usage(
                "--simulate needs a non-inferiority design".into(),
            ));
        }
        let n = sample_size::sample_size_ni(&spec, None)?;
        let (c, t) = (n.n_control, n.n_treatment);
        let power =
            oracle::simulate_rejection_rate(&spec, c, t, Truth::Alternative, args.reps, args.seed)?;
        let type_one = oracle::simulate_rejection_rate(
            &spec,
            c,
            t,
            Truth::NullBoundary,
            args.reps,
            args.seed,
        )?;
        Some(SimulationCheck {
            n_control: c,
            n_treatment: t,
            analytic_power: sample_size::achieved_power(&spec, c, t)?,
            power_within_3se: (power.estimate - spec.rates.power).abs()
                <= 3.0 * power.standard_error,
            type_one_within_3se: (type_one.estimate - spec.rates.alpha).abs()
                <= 3.0 * type_one.standard_error,
            power,
            type_one,
        })
    } else {
        None
    };

    let ok = fractions.agrees;
    let out = render(
        &VerifyReport {
            fractions,
            simulation,
        },
        format,
    );
    if ok {
        Ok(out)
    } else {
        print!("{out}");
        Err(CliError::Mismatch(
            "closed form and grid oracle disagree".into(),
        ))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Allocate(a) => allocate(a),
        Command::SampleSize(a) => sample_size_cmd(a),
        Command::Events(a) => events(a),
        Command::Curve(a) => curve(a),
        Command::Simulate(a) => simulate(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(CliError::Lib(e @ Error::Validation { .. })) => {
            eprintln!("validation error: {e}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(CliError::Lib(e @ Error::Domain(_))) => {
            eprintln!("computation error: {e}");
            ExitCode::from(EXIT_COMPUTATION)
        }
        Err(CliError::Mismatch(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_COMPUTATION)
        }
    }
}
