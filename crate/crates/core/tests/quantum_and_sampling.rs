use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use bellcheck_core::catalog::{deterministic_anticorrelated, three_axes};
use bellcheck_core::inequalities::{
    chsh, correlation_coefficient, model_bell_original, model_chsh, model_three_axis,
};
use bellcheck_core::model::{Axis, SettingPair, Station};
use bellcheck_core::montecarlo::{
    chsh_settings, empirical_chsh, sample_runs, sample_setting, substream, RunSchedule, Source,
};
use bellcheck_core::polytope::{max_chsh_local, max_chsh_quantum, QuantumSearch};
use bellcheck_core::quantum::{
    chsh_optimal_axes, density_matrix_oracle, singlet_correlation, singlet_joint, singlet_model,
};
use proptest::prelude::*;

fn axis() -> impl Strategy<Value = Axis> {
    (0.0f64..180.0, 0.0f64..360.0).prop_map(|(p, a)| Axis::from_spherical_deg(p, a))
}

fn angles_chsh(deg: [f64; 4]) -> f64 {
    let [mu, mu2, nu, nu2] = deg.map(Axis::in_plane_deg);
    let e = [(mu, nu), (mu, nu2), (mu2, nu), (mu2, nu2)]
        .map(|(a, b)| singlet_correlation(&SettingPair::new(a, b)));
    chsh(&e, 0.0).lhs
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn closed_form_matches_density_matrix(a in axis(), b in axis()) {
        let s = SettingPair::new(a, b);
        let x = singlet_joint(&s).joint;
        let y = density_matrix_oracle(&s).joint;
        for k in 0..4 {
            prop_assert!((x.probs()[k] - y.probs()[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_axes_always_disagree(a in axis()) {
        let j = singlet_joint(&SettingPair::new(a, a)).joint;
        prop_assert!((j.probs()[1] + j.probs()[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singlet_has_uniform_marginals(a in axis(), b in axis()) {
        let j = singlet_joint(&SettingPair::new(a, b)).joint;
        for st in [Station::One, Station::Two] {
            prop_assert!((j.marginal(st)[0] - 0.5).abs() < 1e-12);
        }
    }
}

#[test]
fn bell_original_and_three_axis_singlet_values() {
    let deg = [0.0, 60.0, 120.0];
    let ax = deg.map(Axis::in_plane_deg);
    let m = singlet_model(ax.to_vec(), ax.to_vec()).unwrap();
    let rep = model_bell_original(&m, &ax, 1e-9).unwrap();
    assert!((rep.lhs - 1.5).abs() < 1e-9);
    assert!(rep.violated);

    let three: [Axis; 3] = three_axes().try_into().unwrap();
    let m = singlet_model(three.to_vec(), three.to_vec()).unwrap();
    let rep = model_three_axis(&m, &three, 1e-9).unwrap();
    assert!((rep.lhs - 1.125).abs() < 1e-9);
}

#[test]
fn optimum_is_a_strict_local_maximum() {
    let best = angles_chsh([90.0, 0.0, 45.0, 135.0]);
    assert!((best - 2.0 * SQRT_2).abs() < 1e-12);
    for k in 0..4 {
        for delta in [-1.0, 1.0] {
            let mut deg = [90.0, 0.0, 45.0, 135.0];
            deg[k] += delta;
            assert!(angles_chsh(deg) < best);
        }
    }
}

#[test]
fn quantum_gap_exceeds_point_eight_two() {
    let q = max_chsh_quantum(&QuantumSearch::DEFAULT).unwrap();
    let local = max_chsh_local(&q.axes).unwrap();
    let local: f64 = bellcheck_core::Scalar::to_f64(&local.max_lhs);
    assert!(q.lhs - local >= 0.82);
}

#[test]
fn singlet_model_matches_direct_chsh() {
    let ax = chsh_optimal_axes();
    let m = singlet_model(vec![ax[0], ax[1]], vec![ax[2], ax[3]]).unwrap();
    let rep = model_chsh(&m, &ax, 1e-9).unwrap();
    assert!((rep.lhs - 2.0 * SQRT_2).abs() < 1e-9);
}

#[test]
fn sampling_is_reproducible_and_conserves_trials() {
    let schedule = RunSchedule::uniform(99, &chsh_settings(&chsh_optimal_axes()), 5_000);
    let a = sample_runs::<f64>(Source::Singlet, &schedule).unwrap();
    let b = sample_runs::<f64>(Source::Singlet, &schedule).unwrap();
    assert_eq!(a, b);
    assert!(a.iter().all(|c| c.total() == 5_000));
    let other = sample_runs::<f64>(Source::Singlet, &RunSchedule { seed: 100, ..schedule.clone() }).unwrap();
    assert_ne!(a, other);
}

#[test]
fn settings_sampled_out_of_order_match() {
    let schedule = RunSchedule::uniform(5, &chsh_settings(&chsh_optimal_axes()), 2_000);
    let serial = sample_runs::<f64>(Source::Singlet, &schedule).unwrap();
    let handles: Vec<_> = (0..4)
        .rev()
        .map(|k| {
            let (setting, n) = schedule.settings[k];
            std::thread::spawn(move || {
                let mut rng = substream(5, k as u64);
                (k, sample_setting::<f64>(Source::Singlet, &setting, n, &mut rng).unwrap())
            })
        })
        .collect();
    for h in handles {
        let (k, counts) = h.join().unwrap();
        assert_eq!(counts, serial[k]);
    }
}

#[test]
fn estimates_converge_at_forty_five_degrees() {
    let s = SettingPair::new(Axis::in_plane_deg(0.0), Axis::in_plane_deg(45.0));
    let mut last_err = f64::INFINITY;
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        let counts = sample_runs::<f64>(Source::Singlet, &RunSchedule::new(42).with(s, n)).unwrap();
        let e = counts[0].correlation().unwrap();
        assert!((e.e_hat + FRAC_1_SQRT_2).abs() <= 4.0 * e.std_err, "n = {n}");
        assert!(e.std_err < last_err);
        last_err = e.std_err;
    }
}

#[test]
fn deterministic_model_never_exceeds_two_empirically() {
    let m = deterministic_anticorrelated();
    let a = m.axes(Station::One).to_vec();
    let axes = [a[0], a[1], a[1], a[2]];
    let schedule = RunSchedule::uniform(7, &chsh_settings(&axes), 2_000);
    let counts = sample_runs(Source::Model(&m), &schedule).unwrap();
    let rep = empirical_chsh(&[counts[0], counts[1], counts[2], counts[3]], 1e-9).unwrap();
    assert!(rep.report.lhs <= 2.0);
    assert!(!rep.report.violated);
    for (c, setting) in counts.iter().zip(chsh_settings(&axes)) {
        let exact = correlation_coefficient(&bellcheck_core::model::joint_distribution(&m, &setting).unwrap());
        let e = c.correlation().unwrap();
        assert!((e.e_hat - bellcheck_core::Scalar::to_f64(&exact)).abs() <= 4.0 * e.std_err + 1e-12);
    }
}
