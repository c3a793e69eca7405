use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use bellcheck_core::catalog::three_axes;
use bellcheck_core::inequalities::{model_bell_original, model_chsh, model_three_axis, InequalityKind};
use bellcheck_core::locality::{
    check_active_locality, check_deterministic_passive_locality, check_no_signalling,
    check_passive_locality, extract_deterministic_event, LocalityCondition, LocalityVerdict,
    EXTRACTION_CHECKS,
};
use bellcheck_core::model::{Axis, HiddenVariableModel, Station};
use bellcheck_core::montecarlo::{chsh_settings, empirical_chsh, sample_runs, RunSchedule, Source};
use bellcheck_core::polytope::{
    max_bell_original_local, max_chsh_vertices, max_three_axis_local, MAX_AXES,
};
use bellcheck_core::quantum::{chsh_optimal_axes, singlet_model};
use bellcheck_core::{Error, Rational, Tolerances};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::model_file::{FromNumber, Mode, ModelFile, AXIS_SLACK};
use crate::report::{
    ExtractionOut, Format, InequalityOut, PolytopeOut, Report, SettingCounts, SimulationOut,
    Value, VerdictOut, WitnessOut,
};

#[derive(Debug, Parser)]
#[command(name = "bellcheck", version, about = "Locality checks and Bell-type inequalities on finite hidden-variable models")]
pub struct Cli {
    /// Report format
    #[arg(long, value_enum, default_value = "human", global = true)]
    pub format: Format,

    /// Arithmetic; defaults to the model file's own mode, or float for the singlet
    #[arg(long, value_enum, global = true)]
    pub mode: Option<Mode>,

    /// Seed for simulations
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,

    /// Slack for float comparisons (ignored in exact mode)
    #[arg(long, default_value_t = 1e-9, global = true)]
    pub tolerance: f64,

    /// Add wall-clock timings to the report
    #[arg(long, global = true)]
    pub timings: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the locality checks on a model file
    Check(CheckArgs),
    /// CHSH at four axes
    Chsh(ChshArgs),
    /// Bell's original inequality at three axes
    Bell(TripleArgs),
    /// Three-axis sum of up-up probabilities
    ThreeAxis(TripleArgs),
    /// Maximize an inequality over deterministic local strategies
    Polytope(PolytopeArgs),
    /// Extract the preparation event fixing station 1's outcome
    Extract(ExtractArgs),
    /// Simulate repeated runs at the four CHSH settings
    Simulate(SimulateArgs),
    /// Print a model file in canonical form
    Canonical(CanonicalArgs),
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Model file
    pub model: Option<PathBuf>,

    /// Use the singlet prediction instead of a model file
    #[arg(long, conflicts_with = "model")]
    pub quantum: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Condition {
    NoSignalling,
    Active,
    Passive,
    Deterministic,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub model: PathBuf,

    /// Conditions to check (all when omitted)
    #[arg(long, value_enum, value_delimiter = ',')]
    pub only: Vec<Condition>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// 90°, 0°, 45°, 135° in the x-z plane
    Optimal,
}

#[derive(Debug, Args)]
pub struct AxisArgs {
    /// Axes as `x,y,z` vectors separated by `;`
    #[arg(long, allow_hyphen_values = true)]
    pub axes: Option<String>,

    /// Axes as angles from z towards x, in degrees, separated by `,`
    #[arg(long, allow_hyphen_values = true, conflicts_with = "axes")]
    pub degrees: Option<String>,
}

#[derive(Debug, Args)]
pub struct ChshArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    /// μ; μ′; ν; ν′ (station 1 first)
    #[command(flatten)]
    pub axes: AxisArgs,

    #[arg(long, value_enum, conflicts_with_all = ["axes", "degrees"])]
    pub preset: Option<Preset>,

    /// Also simulate this many runs per setting
    #[arg(long)]
    pub simulate: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TripleArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    /// Three axes
    #[command(flatten)]
    pub axes: AxisArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InequalityChoice {
    Chsh,
    ThreeAxis,
    Bell,
}

#[derive(Debug, Args)]
pub struct PolytopeArgs {
    /// Axes at station 1
    #[arg(long)]
    pub n1: Option<usize>,

    /// Axes at station 2
    #[arg(long)]
    pub n2: Option<usize>,

    #[arg(long, value_enum, default_value = "chsh")]
    pub inequality: InequalityChoice,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    pub model: PathBuf,

    /// Axis as `x,y,z` (first axis declared at both stations when omitted)
    #[arg(long, allow_hyphen_values = true)]
    pub axis: Option<String>,

    /// Axis as an angle from z towards x, in degrees
    #[arg(long, allow_hyphen_values = true, conflicts_with = "axis")]
    pub degrees: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    #[command(flatten)]
    pub axes: AxisArgs,

    #[arg(long, value_enum, conflicts_with_all = ["axes", "degrees"])]
    pub preset: Option<Preset>,

    /// Runs per setting
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}

#[derive(Debug, Args)]
pub struct CanonicalArgs {
    pub model: PathBuf,
}

/// What a command needs from the global flags.
#[derive(Debug, Clone, Copy)]
pub struct Globals {
    pub mode: Option<Mode>,
    pub seed: u64,
    pub tol: Tolerances,
}

/// Runs a command and renders its output. `Err` means bad input; failed
/// checks come back as `Ok` with `false`.
pub fn execute(cli: &Cli) -> anyhow::Result<(String, bool)> {
    if !(cli.tolerance >= 0.0 && cli.tolerance.is_finite()) {
        bail!("--tolerance must be a non-negative number");
    }
    let g = Globals {
        mode: cli.mode,
        seed: cli.seed,
        tol: Tolerances::with_tol(cli.tolerance),
    };
    if let Command::Canonical(a) = &cli.command {
        let file = ModelFile::load(&a.model)?;
        return Ok((file.canonical()?.to_toml(), true));
    }
    let start = Instant::now();
    let mut report = run(&cli.command, &g)?;
    if cli.timings {
        let mut t = BTreeMap::new();
        t.insert("total".to_string(), start.elapsed().as_secs_f64() * 1e3);
        report.timings_ms = Some(t);
    }
    Ok((report.render(cli.format), report.passed))
}

pub fn run(command: &Command, g: &Globals) -> anyhow::Result<Report> {
    match command {
        Command::Check(a) => cmd_check(a, g),
        Command::Chsh(a) => cmd_chsh(&a.source, &a.axes, a.preset, a.simulate, g, "chsh"),
        Command::Bell(a) => cmd_triple(a, g, InequalityKind::BellOriginal),
        Command::ThreeAxis(a) => cmd_triple(a, g, InequalityKind::ThreeAxis),
        Command::Polytope(a) => cmd_polytope(a),
        Command::Extract(a) => cmd_extract(a, g),
        Command::Simulate(a) => cmd_chsh(&a.source, &a.axes, a.preset, Some(a.trials), g, "simulate"),
        Command::Canonical(_) => bail!("canonical prints a model file, not a report"),
    }
}

pub fn parse_vector(text: &str) -> anyhow::Result<Axis> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        bail!("axis {text:?} needs three comma-separated components");
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse().with_context(|| format!("axis component {p:?} is not a number"))?;
    }
    Axis::new(v)
        .or_else(|_| Axis::normalized(v, AXIS_SLACK))
        .map_err(|e| anyhow!("axis {text:?}: {e}"))
}

fn parse_axes(a: &AxisArgs) -> anyhow::Result<Option<Vec<Axis>>> {
    if let Some(text) = &a.axes {
        return text.split(';').map(parse_vector).collect::<anyhow::Result<Vec<_>>>().map(Some);
    }
    if let Some(text) = &a.degrees {
        return text
            .split(',')
            .map(|d| {
                let d = d.trim();
                d.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .map(Axis::in_plane_deg)
                    .ok_or_else(|| anyhow!("angle {d:?} is not a number"))
            })
            .collect::<anyhow::Result<Vec<_>>>()
            .map(Some);
    }
    Ok(None)
}

fn exactly<const N: usize>(axes: Vec<Axis>) -> anyhow::Result<[Axis; N]> {
    let n = axes.len();
    axes.try_into().map_err(|_| anyhow!("expected {N} axes, got {n}"))
}

enum Loaded {
    File(ModelFile),
    Singlet,
}

fn load_source(s: &SourceArgs) -> anyhow::Result<Loaded> {
    match (&s.model, s.quantum) {
        (Some(path), false) => Ok(Loaded::File(ModelFile::load(path)?)),
        (None, true) => Ok(Loaded::Singlet),
        _ => bail!("give a model file or --quantum"),
    }
}

fn singlet_mode(g: &Globals) -> anyhow::Result<Mode> {
    match g.mode {
        Some(Mode::Exact) => bail!("the singlet prediction is only available in float mode"),
        _ => Ok(Mode::Float),
    }
}

fn label_fn(file: &ModelFile) -> impl Fn(usize) -> String + '_ {
    move |l| file.lambda_label(l)
}

fn verdict_out(v: &LocalityVerdict, file: &ModelFile) -> VerdictOut {
    VerdictOut::new(v, &label_fn(file))
}

fn cmd_check(a: &CheckArgs, g: &Globals) -> anyhow::Result<Report> {
    let file = ModelFile::load(&a.model)?;
    let mode = g.mode.unwrap_or(file.mode);
    match mode {
        Mode::Exact => check_in::<Rational>(&file, &a.only, mode, g),
        Mode::Float => check_in::<f64>(&file, &a.only, mode, g),
    }
}

fn shared_axes<S: FromNumber>(model: &HiddenVariableModel<S>) -> Vec<Axis> {
    model
        .axes(Station::One)
        .iter()
        .copied()
        .filter(|a| model.resolve_axis(Station::Two, a).is_ok())
        .collect()
}

fn check_in<S: FromNumber>(file: &ModelFile, only: &[Condition], mode: Mode, g: &Globals) -> anyhow::Result<Report> {
    let model = file.build::<S>()?;
    let a1 = model.axes(Station::One).to_vec();
    let a2 = model.axes(Station::Two).to_vec();
    let wanted = |c| only.is_empty() || only.contains(&c);
    let mut report = Report::new("check", &file.name, mode);
    if wanted(Condition::NoSignalling) {
        report.verdicts.push(verdict_out(&check_no_signalling(&model, &a1, &a2, &g.tol)?, file));
    }
    if wanted(Condition::Active) {
        report.verdicts.push(verdict_out(&check_active_locality(&model, &a1, &a2, &g.tol)?, file));
    }
    if wanted(Condition::Passive) {
        report.verdicts.push(verdict_out(&check_passive_locality(&model, &a1, &a2, &g.tol)?, file));
    }
    if wanted(Condition::Deterministic) {
        let shared = shared_axes(&model);
        if shared.is_empty() {
            report.notes.push("no axis is declared at both stations; deterministic passive locality not checked".into());
        } else {
            match check_deterministic_passive_locality(&model, &shared, &g.tol) {
                Ok(v) => report.verdicts.push(verdict_out(&v.verdict, file)),
                Err(Error::Precondition { condition, witness }) => {
                    let mut w = WitnessOut::new(&witness, &label_fn(file));
                    w.detail = format!("{condition} fails: {}", w.detail);
                    report.verdicts.push(VerdictOut {
                        condition: LocalityCondition::DeterministicPassiveLocality.name().to_string(),
                        holds: false,
                        witness: Some(w),
                    });
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    report.passed = report.verdicts.iter().all(|v| v.holds);
    Ok(report)
}

fn default_chsh_axes<S: FromNumber>(model: &HiddenVariableModel<S>) -> anyhow::Result<[Axis; 4]> {
    let (a1, a2) = (model.axes(Station::One), model.axes(Station::Two));
    if a1.len() < 2 || a2.len() < 2 {
        bail!("the model declares fewer than two axes at a station; pass --axes or --degrees");
    }
    Ok([a1[0], a1[1], a2[0], a2[1]])
}

fn cmd_chsh(
    source: &SourceArgs,
    axes: &AxisArgs,
    preset: Option<Preset>,
    simulate: Option<u64>,
    g: &Globals,
    command: &str,
) -> anyhow::Result<Report> {
    let given = match preset {
        Some(Preset::Optimal) => Some(chsh_optimal_axes().to_vec()),
        None => parse_axes(axes)?,
    };
    let given = given.map(exactly::<4>).transpose()?;
    if simulate == Some(0) {
        bail!("the number of simulated runs must be at least 1");
    }
    match load_source(source)? {
        Loaded::Singlet => {
            let mode = singlet_mode(g)?;
            let ax = given.unwrap_or_else(chsh_optimal_axes);
            let model = singlet_model(vec![ax[0], ax[1]], vec![ax[2], ax[3]])?;
            chsh_in(&model, "singlet", mode, ax, simulate, g, command, true)
        }
        Loaded::File(file) => {
            let mode = g.mode.unwrap_or(file.mode);
            match mode {
                Mode::Exact => {
                    let m = file.build::<Rational>()?;
                    let ax = match given {
                        Some(a) => a,
                        None => default_chsh_axes(&m)?,
                    };
                    chsh_in(&m, &file.name, mode, ax, simulate, g, command, false)
                }
                Mode::Float => {
                    let m = file.build::<f64>()?;
                    let ax = match given {
                        Some(a) => a,
                        None => default_chsh_axes(&m)?,
                    };
                    chsh_in(&m, &file.name, mode, ax, simulate, g, command, false)
                }
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn chsh_in<S: FromNumber>(
    model: &HiddenVariableModel<S>,
    name: &str,
    mode: Mode,
    ax: [Axis; 4],
    simulate: Option<u64>,
    g: &Globals,
    command: &str,
    singlet: bool,
) -> anyhow::Result<Report> {
    let mut report = Report::new(command, name, mode);
    let analytic = model_chsh(model, &ax, g.tol.tol)?;
    if command == "chsh" {
        report.inequalities.push(InequalityOut::new(&analytic, &ax));
        report.passed = !analytic.violated;
    }
    if let Some(n) = simulate {
        let settings = chsh_settings(&ax);
        let schedule = RunSchedule::uniform(g.seed, &settings, n);
        let source = if singlet { Source::Singlet } else { Source::Model(model) };
        let counts = sample_runs(source, &schedule)?;
        let four = [counts[0], counts[1], counts[2], counts[3]];
        let emp = empirical_chsh(&four, g.tol.tol)?;
        let per_setting = settings
            .iter()
            .zip(&counts)
            .map(|(s, c)| SettingCounts::new([s.mu, s.nu], c))
            .collect::<anyhow::Result<Vec<_>>>()?;
        report.simulation = Some(SimulationOut {
            seed: g.seed,
            settings: per_setting,
            chsh: Some((&emp).into()),
        });
        if command == "simulate" {
            report.passed = !emp.report.violated;
        }
    }
    Ok(report)
}

fn cmd_triple(a: &TripleArgs, g: &Globals, kind: InequalityKind) -> anyhow::Result<Report> {
    let command = match kind {
        InequalityKind::BellOriginal => "bell",
        _ => "three-axis",
    };
    let given = parse_axes(&a.axes)?.map(exactly::<3>).transpose()?;
    let default_deg = match kind {
        InequalityKind::BellOriginal => [0.0, 60.0, 120.0],
        _ => [0.0, 120.0, 240.0],
    };
    match load_source(&a.source)? {
        Loaded::Singlet => {
            let mode = singlet_mode(g)?;
            let ax = given.unwrap_or(default_deg.map(Axis::in_plane_deg));
            let (a1, a2) = triple_station_axes(&ax, kind);
            let model = singlet_model(a1, a2)?;
            triple_in(&model, "singlet", mode, ax, kind, command, g)
        }
        Loaded::File(file) => {
            let mode = g.mode.unwrap_or(file.mode);
            match mode {
                Mode::Exact => {
                    let m = file.build::<Rational>()?;
                    let ax = triple_default(&m, given)?;
                    triple_in(&m, &file.name, mode, ax, kind, command, g)
                }
                Mode::Float => {
                    let m = file.build::<f64>()?;
                    let ax = triple_default(&m, given)?;
                    triple_in(&m, &file.name, mode, ax, kind, command, g)
                }
            }
        }
    }
}

/// Station axes a singlet model needs for the three-axis forms.
fn triple_station_axes(ax: &[Axis; 3], kind: InequalityKind) -> (Vec<Axis>, Vec<Axis>) {
    match kind {
        InequalityKind::BellOriginal => (vec![ax[0], ax[1]], vec![ax[1], ax[2]]),
        _ => (ax.to_vec(), ax.to_vec()),
    }
}

fn triple_default<S: FromNumber>(model: &HiddenVariableModel<S>, given: Option<[Axis; 3]>) -> anyhow::Result<[Axis; 3]> {
    if let Some(a) = given {
        return Ok(a);
    }
    let shared = shared_axes(model);
    if shared.len() < 3 {
        bail!("the model declares fewer than three axes at both stations; pass --axes or --degrees");
    }
    Ok([shared[0], shared[1], shared[2]])
}

fn triple_in<S: FromNumber>(
    model: &HiddenVariableModel<S>,
    name: &str,
    mode: Mode,
    ax: [Axis; 3],
    kind: InequalityKind,
    command: &str,
    g: &Globals,
) -> anyhow::Result<Report> {
    let rep = match kind {
        InequalityKind::BellOriginal => model_bell_original(model, &ax, g.tol.tol)?,
        _ => model_three_axis(model, &ax, g.tol.tol)?,
    };
    let mut report = Report::new(command, name, mode);
    report.passed = !rep.violated;
    report.inequalities.push(InequalityOut::new(&rep, &ax));
    Ok(report)
}

fn cmd_polytope(a: &PolytopeArgs) -> anyhow::Result<Report> {
    let fixed = |n: usize| -> anyhow::Result<(usize, usize)> {
        for (flag, v) in [("--n1", a.n1), ("--n2", a.n2)] {
            if let Some(v) = v {
                if v != n {
                    bail!("{flag} must be {n} for this inequality");
                }
            }
        }
        Ok((n, n))
    };
    let (rep, n1, n2) = match a.inequality {
        InequalityChoice::Chsh => {
            let (n1, n2) = (a.n1.unwrap_or(2), a.n2.unwrap_or(2));
            if n1 + n2 > MAX_AXES {
                bail!("{} axes requested, enumeration is limited to {MAX_AXES}", n1 + n2);
            }
            (max_chsh_vertices(n1, n2)?, n1, n2)
        }
        InequalityChoice::ThreeAxis => {
            let (n1, n2) = fixed(3)?;
            let axes: [Axis; 3] = three_axes().try_into().expect("three axes");
            (max_three_axis_local(&axes)?, n1, n2)
        }
        InequalityChoice::Bell => {
            let (n1, n2) = fixed(2)?;
            let axes = [0.0, 60.0, 120.0].map(Axis::in_plane_deg);
            (max_bell_original_local(&axes)?, n1, n2)
        }
    };
    let mut report = Report::new("polytope", "deterministic strategies", Mode::Exact);
    report.passed = rep.bound_match;
    report.polytope = Some(PolytopeOut::new(&rep, n1, n2));
    Ok(report)
}

fn cmd_extract(a: &ExtractArgs, g: &Globals) -> anyhow::Result<Report> {
    let file = ModelFile::load(&a.model)?;
    let axis = match (&a.axis, a.degrees) {
        (Some(t), _) => Some(parse_vector(t)?),
        (None, Some(d)) => Some(Axis::in_plane_deg(d)),
        (None, None) => None,
    };
    let mode = g.mode.unwrap_or(file.mode);
    match mode {
        Mode::Exact => extract_in::<Rational>(&file, axis, mode, g),
        Mode::Float => extract_in::<f64>(&file, axis, mode, g),
    }
}

fn extract_in<S: FromNumber>(file: &ModelFile, axis: Option<Axis>, mode: Mode, g: &Globals) -> anyhow::Result<Report> {
    let model = file.build::<S>()?;
    let axis = match axis {
        Some(a) => a,
        None => *shared_axes(&model)
            .first()
            .ok_or_else(|| anyhow!("no axis is declared at both stations; pass --axis"))?,
    };
    let mut report = Report::new("extract", &file.name, mode);
    let mut out = ExtractionOut {
        axis: axis.direction(),
        members: None,
        probability: None,
        up_probability: None,
        conditional: Vec::new(),
        verified: Vec::new(),
        refusal: None,
    };
    match extract_deterministic_event(&model, &axis, &g.tol) {
        Ok(ev) => {
            out.members = Some(ev.members.members().map(|l| file.lambda_label(l)).collect());
            out.probability = Some(Value::of(&ev.probability));
            out.up_probability = Some(Value::of(&ev.up_probability));
            out.conditional = ev.conditional.iter().map(Value::of).collect();
            out.verified = EXTRACTION_CHECKS.iter().map(|s| s.to_string()).collect();
        }
        Err(e @ (Error::Precondition { .. } | Error::Inconsistent { .. } | Error::Verification(_))) => {
            out.refusal = Some(e.to_string());
            report.passed = false;
        }
        Err(e) => return Err(e.into()),
    }
    report.extraction = Some(out);
    Ok(report)
}
