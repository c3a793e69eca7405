//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::f64::consts::SQRT_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bellcheck_core::catalog::{cancellation, random_local, three_axes, LocalShape};
use bellcheck_core::inequalities::{
    conditional_chsh, conditional_chsh_grid_max, model_bell_original, model_chsh, model_three_axis,
};
use bellcheck_core::locality::{
    check_active_locality, check_deterministic_passive_locality, check_no_signalling,
    check_passive_locality, satisfies_theorem_premises,
};
use bellcheck_core::model::{Axis, HiddenVariableModel, SettingPair, Station};
use bellcheck_core::montecarlo::{
    chsh_settings, empirical_chsh, sample_runs, substream, uniform01, RunSchedule, Source,
};
use bellcheck_core::polytope::{max_bell_original_local, max_chsh_local, max_three_axis_local};
use bellcheck_core::quantum::{chsh_optimal_axes, density_matrix_oracle, singlet_joint, singlet_model};
use bellcheck_core::{Rational, Scalar, Tolerances};
use rand_core::RngCore;

const TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-12;
const SIGMAS: f64 = 4.0;
const MC_TARGET: f64 = 2.8284271;
const SEED: u64 = 42;

const BUDGET_VERTICES: Duration = Duration::from_secs(1);
const BUDGET_RANDOM_MODELS: Duration = Duration::from_secs(10);
const BUDGET_SIMULATION: Duration = Duration::from_secs(30);
const BUDGET_GRID: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rat(n: i64) -> Rational {
    Rational::from_ratio(n, 1)
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    if elapsed <= budget {
        Ok(())
    } else {
        Err(format!("took {elapsed:?}, budget {budget:?}"))
    }
}

fn random_axis(rng: &mut impl RngCore) -> Axis {
    let polar = 180.0 * uniform01(rng);
    let azimuth = 360.0 * uniform01(rng);
    Axis::from_spherical_deg(polar, azimuth)
}

fn vertex_bound() -> Outcome {
    let start = Instant::now();
    let rep = max_chsh_local(&chsh_optimal_axes()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if rep.n_strategies != 16 {
        return Err(format!("{} strategies", rep.n_strategies));
    }
    if rep.max_lhs != rat(2) {
        return Err(format!("max lhs {}", rep.max_lhs));
    }
    within(elapsed, BUDGET_VERTICES)?;
    Ok(format!("16 strategies, max lhs = {} exactly, {elapsed:.1?}", rep.max_lhs))
}

fn max_declared_chsh(m: &HiddenVariableModel<Rational>) -> Result<Rational, String> {
    let a1 = m.axes(Station::One);
    let a2 = m.axes(Station::Two);
    let mut best = rat(0);
    for mu in a1 {
        for mu2 in a1 {
            for nu in a2 {
                for nu2 in a2 {
                    let rep = model_chsh(m, &[*mu, *mu2, *nu, *nu2], TOL).map_err(|e| e.to_string())?;
                    if rep.lhs > best {
                        best = rep.lhs;
                    }
                }
            }
        }
    }
    Ok(best)
}

fn random_shape(rng: &mut impl RngCore, min_shared: usize) -> LocalShape {
    let mut pick = |n: usize| (uniform01(rng) * n as f64) as usize;
    let shared = min_shared + pick(3 - min_shared);
    let (only1, only2) = if shared == 0 { (1 + pick(2), 1 + pick(2)) } else { (pick(2), pick(2)) };
    LocalShape { lambdas: 1 + pick(5), shared, only1, only2 }
}

fn random_models_bounded() -> Outcome {
    let tol = Tolerances::DEFAULT;
    let start = Instant::now();
    let mut rng = substream(SEED, 2);
    let mut worst = rat(0);
    for k in 0..1000 {
        let shape = random_shape(&mut rng, 0);
        let m = random_local(&mut rng, shape);
        let a1 = m.axes(Station::One).to_vec();
        let a2 = m.axes(Station::Two).to_vec();
        let premises = satisfies_theorem_premises(&m, &tol).map_err(|e| e.to_string())?
            && check_active_locality(&m, &a1, &a2, &tol).map_err(|e| e.to_string())?.holds
            && check_passive_locality(&m, &a1, &a2, &tol).map_err(|e| e.to_string())?.holds;
        if !premises {
            return Err(format!("model {k} does not meet the premises"));
        }
        let lhs = max_declared_chsh(&m)?;
        if lhs.exceeds(&rat(2), TOL) {
            return Err(format!("model {k} reaches {lhs}"));
        }
        if lhs > worst {
            worst = lhs;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, BUDGET_RANDOM_MODELS)?;
    Ok(format!("1000 models, largest lhs {worst}, {elapsed:.1?}"))
}

fn quantum_violation() -> Outcome {
    let start = Instant::now();
    let axes = chsh_optimal_axes();
    let m = singlet_model(vec![axes[0], axes[1]], vec![axes[2], axes[3]]).map_err(|e| e.to_string())?;
    let analytic = model_chsh(&m, &axes, TOL).map_err(|e| e.to_string())?.lhs;
    if (analytic - 2.0 * SQRT_2).abs() > TOL {
        return Err(format!("analytic lhs {analytic}"));
    }
    let schedule = RunSchedule::uniform(SEED, &chsh_settings(&axes), 1_000_000);
    let counts = sample_runs::<f64>(Source::Singlet, &schedule).map_err(|e| e.to_string())?;
    let rep = empirical_chsh(&[counts[0], counts[1], counts[2], counts[3]], TOL).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let dev = (rep.report.lhs - MC_TARGET).abs();
    if dev > SIGMAS * rep.std_err {
        return Err(format!("empirical {} is {dev:.2e} from {MC_TARGET}, std_err {:.2e}", rep.report.lhs, rep.std_err));
    }
    within(elapsed, BUDGET_SIMULATION)?;
    Ok(format!(
        "analytic {analytic:.12}, empirical {:.6} (std_err {:.2e}), {elapsed:.1?}",
        rep.report.lhs, rep.std_err
    ))
}

fn perfect_anticorrelation() -> Outcome {
    let mut rng = substream(SEED, 4);
    let mut first = None;
    for k in 0..50 {
        let a = random_axis(&mut rng);
        first.get_or_insert(a);
        let j = singlet_joint(&SettingPair::new(a, a)).joint;
        let opposite = j.probs()[1] + j.probs()[2];
        if (opposite - 1.0).abs() > ORACLE_TOL {
            return Err(format!("axis {k}: opposite mass {opposite}"));
        }
    }
    let a = first.expect("fifty axes");
    let schedule = RunSchedule::new(SEED).with(SettingPair::new(a, a), 100_000);
    let counts = sample_runs::<f64>(Source::Singlet, &schedule).map_err(|e| e.to_string())?;
    if counts[0].same() != 0 || counts[0].total() != 100_000 {
        return Err(format!("{} same-outcome counts", counts[0].same()));
    }
    Ok("50 axes with opposite mass 1, 0 of 100000 simulated trials agree".into())
}

fn deterministic_extraction() -> Outcome {
    let tol = Tolerances::DEFAULT;
    let mut rng = substream(SEED, 5);
    let mut events = 0;
    for k in 0..200 {
        let shape = random_shape(&mut rng, 1);
        let m = random_local(&mut rng, shape);
        let a1 = m.axes(Station::One).to_vec();
        let a2 = m.axes(Station::Two).to_vec();
        if !check_passive_locality(&m, &a1, &a2, &tol).map_err(|e| e.to_string())?.holds {
            return Err(format!("model {k} is not passively local"));
        }
        let shared = a1[..shape.shared].to_vec();
        let v = check_deterministic_passive_locality(&m, &shared, &tol).map_err(|e| e.to_string())?;
        if !v.verdict.holds {
            return Err(format!("model {k}: {:?}", v.verdict.witness));
        }
        for ev in &v.events {
            if ev.conditional.iter().any(|c| *c != rat(0) && *c != rat(1)) {
                return Err(format!("model {k}: conditional outside {{0, 1}}"));
            }
            if ev.probability != ev.up_probability {
                return Err(format!("model {k}: P(A1S) = {} but P(up) = {}", ev.probability, ev.up_probability));
            }
            events += 1;
        }
    }
    Ok(format!("200 models, {events} events, all conditionals 0 or 1, P(A1S) = P(up) exactly"))
}

fn three_axis() -> Outcome {
    let axes: [Axis; 3] = three_axes().try_into().expect("three axes");
    let local = max_three_axis_local(&axes).map_err(|e| e.to_string())?;
    if local.max_lhs != rat(1) {
        return Err(format!("local max {}", local.max_lhs));
    }
    let m = singlet_model(axes.to_vec(), axes.to_vec()).map_err(|e| e.to_string())?;
    let q = model_three_axis(&m, &axes, TOL).map_err(|e| e.to_string())?.lhs;
    if (q - 1.125).abs() > TOL {
        return Err(format!("singlet sum {q}"));
    }
    Ok(format!(
        "local max {} over {} anticorrelated strategies, singlet {q:.12}",
        local.max_lhs, local.n_admissible
    ))
}

fn conditional_grid() -> Outcome {
    let start = Instant::now();
    let coarse = conditional_chsh_grid_max(20);
    let coarse_elapsed = start.elapsed();
    if coarse.max_scaled != 2 * 20 * 20 || coarse.exceeding != 0 {
        return Err(format!("step 0.05: max {} with {} points above 2", coarse.max_lhs(), coarse.exceeding));
    }
    let corners = (0..16u32).try_fold(rat(0), |best, bits| {
        let p = [0, 1, 2, 3].map(|i| rat(i64::from(bits >> i & 1)));
        let lhs = conditional_chsh(&p, TOL).map_err(|e| e.to_string())?.lhs;
        Ok::<_, String>(if lhs > best { lhs } else { best })
    })?;
    if corners != rat(2) {
        return Err(format!("corner max {corners}"));
    }
    within(coarse_elapsed, BUDGET_GRID)?;
    let fine = conditional_chsh_grid_max(100);
    let elapsed = start.elapsed();
    if fine.max_scaled != 2 * 100 * 100 || fine.exceeding != 0 {
        return Err(format!("step 0.01: max {} with {} points above 2", fine.max_lhs(), fine.exceeding));
    }
    Ok(format!(
        "max 2 at step 0.05 ({} points, {coarse_elapsed:.1?}), corners, and step 0.01 ({} points); never exceeded, {elapsed:.1?}",
        coarse.points, fine.points
    ))
}

fn cancellation_separation() -> Outcome {
    let tol = Tolerances::DEFAULT;
    let m = cancellation();
    let a1 = m.axes(Station::One).to_vec();
    let a2 = m.axes(Station::Two).to_vec();
    if !check_no_signalling(&m, &a1, &a2, &tol).map_err(|e| e.to_string())?.holds {
        return Err("no-signalling fails".into());
    }
    let active = check_active_locality(&m, &a1, &a2, &tol).map_err(|e| e.to_string())?;
    match (active.holds, active.witness) {
        (false, Some(w)) => Ok(format!("no-signalling holds, active locality fails at {w}")),
        _ => Err("active locality holds".into()),
    }
}

fn oracle_agreement() -> Outcome {
    let mut rng = substream(SEED, 9);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let s = SettingPair::new(random_axis(&mut rng), random_axis(&mut rng));
        let x = singlet_joint(&s).joint;
        let y = density_matrix_oracle(&s).joint;
        for k in 0..4 {
            worst = worst.max((x.probs()[k] - y.probs()[k]).abs());
        }
    }
    if worst > ORACLE_TOL {
        return Err(format!("largest difference {worst:.2e}"));
    }
    Ok(format!("1000 pairs, largest difference {worst:.2e}"))
}

fn bell_original() -> Outcome {
    let axes = [0.0, 60.0, 120.0].map(Axis::in_plane_deg);
    let m = singlet_model(axes.to_vec(), axes.to_vec()).map_err(|e| e.to_string())?;
    let rep = model_bell_original(&m, &axes, TOL).map_err(|e| e.to_string())?;
    if (rep.lhs - 1.5).abs() > TOL || !rep.violated {
        return Err(format!("singlet lhs {}", rep.lhs));
    }
    let local = max_bell_original_local(&axes).map_err(|e| e.to_string())?;
    if local.max_lhs > rat(1) {
        return Err(format!("restricted vertex reaches {}", local.max_lhs));
    }
    Ok(format!(
        "singlet {:.12}, {} of {} vertices admissible with max {}",
        rep.lhs, local.n_admissible, local.n_strategies, local.max_lhs
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("CHSH local bound by vertex enumeration", vertex_bound),
        ("CHSH bound on random locally causal models", random_models_bounded),
        ("singlet CHSH violation, analytic and simulated", quantum_violation),
        ("perfect anticorrelation at equal axes", perfect_anticorrelation),
        ("deterministic passive locality", deterministic_extraction),
        ("three-axis bound and violation", three_axis),
        ("conditional CHSH grid", conditional_grid),
        ("no-signalling without active locality", cancellation_separation),
        ("closed form against density matrix", oracle_agreement),
        ("three-setting original inequality", bell_original),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
