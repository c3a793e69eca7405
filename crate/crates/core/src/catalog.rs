//! Small named models: the shipped model files, doc examples and tests all
//! draw on these.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::{Axis, HiddenVariableModel, JointDistribution, Spin};
use crate::prob::{Measure, SampleSpace};
use num_traits::One;
use rand_core::RngCore;

use crate::scalar::{Rational, Scalar};

fn r(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// Coplanar axes at 0°, 120° and 240°.
pub fn three_axes() -> Vec<Axis> {
    vec![
        Axis::in_plane_deg(0.0),
        Axis::in_plane_deg(120.0),
        Axis::in_plane_deg(240.0),
    ]
}

/// λ₀ gives (↑, ↓), λ₁ gives (↓, ↑), each with probability ½, on the ẑ axis.
pub fn two_lambda() -> HiddenVariableModel<Rational> {
    HiddenVariableModel::from_fn(
        Measure::uniform(2).expect("two outcomes"),
        vec![Axis::Z],
        vec![Axis::Z],
        |_, lambda| {
            Ok(if lambda == 0 {
                JointDistribution::point_mass(Spin::Up, Spin::Down)
            } else {
                JointDistribution::point_mass(Spin::Down, Spin::Up)
            })
        },
    )
    .expect("valid model")
}

/// Every λ gives (↑, ↓) on the ẑ axis.
pub fn all_up(lambdas: usize) -> HiddenVariableModel<Rational> {
    HiddenVariableModel::from_fn(
        Measure::uniform(lambdas).expect("at least one lambda"),
        vec![Axis::Z],
        vec![Axis::Z],
        |_, _| Ok(JointDistribution::point_mass(Spin::Up, Spin::Down)),
    )
    .expect("valid model")
}

/// A single λ on axes ẑ and x̂ at both stations: at equal axes a fair coin
/// decides between (↑, ↓) and (↓, ↑), otherwise outcomes are independent
/// fair coins.
///
/// Anticorrelated and actively local, but not passively local.
pub fn correlated_coin() -> HiddenVariableModel<Rational> {
    let coin = JointDistribution::new([r(0, 1), r(1, 2), r(1, 2), r(0, 1)]).expect("valid joint");
    HiddenVariableModel::from_fn(
        Measure::dirac(1, 0).expect("one lambda"),
        vec![Axis::Z, Axis::X],
        vec![Axis::Z, Axis::X],
        |s, _| {
            Ok(if s.station1 == s.station2 {
                coin.clone()
            } else {
                JointDistribution::uniform()
            })
        },
    )
    .expect("valid model")
}

/// Two equally likely λ whose station-1 responses flip with the remote axis
/// in opposite directions, so the aggregate station-1 marginal stays at ½.
///
/// No-signalling holds; active locality fails at λ₀.
pub fn cancellation() -> HiddenVariableModel<Rational> {
    HiddenVariableModel::from_fn(
        Measure::uniform(2).expect("two outcomes"),
        vec![Axis::Z],
        vec![Axis::Z, Axis::X],
        |s, lambda| {
            let up_at_one = (lambda == 0) == (s.station2 == 0);
            Ok(if up_at_one {
                JointDistribution::point_mass(Spin::Up, Spin::Down)
            } else {
                JointDistribution::point_mass(Spin::Down, Spin::Up)
            })
        },
    )
    .expect("valid model")
}

/// Coplanar axes at 0°, 60°, 120° and 240°; every pairwise cosine is rational.
pub fn singlet_axes_deg() -> [f64; 4] {
    [0.0, 60.0, 120.0, 240.0]
}

/// The singlet prediction at [`singlet_axes_deg`] on both stations, as a
/// model with a single λ and exact kernel entries.
pub fn singlet_sampled() -> HiddenVariableModel<Rational> {
    let degrees = singlet_axes_deg();
    let axes: Vec<Axis> = degrees.iter().map(|&d| Axis::in_plane_deg(d)).collect();
    HiddenVariableModel::from_fn(
        Measure::dirac(1, 0).expect("one lambda"),
        axes.clone(),
        axes,
        |s, _| {
            let diff = (degrees[s.station1] as i64 - degrees[s.station2] as i64).rem_euclid(360);
            let cos = match diff {
                0 => r(1, 1),
                60 | 300 => r(1, 2),
                120 | 240 => r(-1, 2),
                180 => r(-1, 1),
                _ => unreachable!("angles are multiples of 60 degrees"),
            };
            let quarter = r(1, 4);
            let same = quarter.clone() * (Rational::from_ratio(1, 1) - cos.clone());
            let opposite = quarter * (Rational::from_ratio(1, 1) + cos);
            JointDistribution::new([same.clone(), opposite.clone(), opposite, same])
        },
    )
    .expect("valid model")
}

/// Eight λ, one per assignment of spins to [`three_axes`]; station 1 reports
/// the assignment and station 2 its flip. The prior is `(k + 1) / 36`.
pub fn deterministic_anticorrelated() -> HiddenVariableModel<Rational> {
    let weights = (0..8).map(|k| r(k + 1, 36)).collect();
    let prior = Measure::new(SampleSpace::new(8).expect("eight outcomes"), weights)
        .expect("weights sum to one");
    let spin = |lambda: usize, axis: usize| {
        if lambda >> (2 - axis) & 1 == 0 {
            Spin::Up
        } else {
            Spin::Down
        }
    };
    HiddenVariableModel::from_fn(prior, three_axes(), three_axes(), |s, lambda| {
        Ok(JointDistribution::point_mass(
            spin(lambda, s.station1),
            spin(lambda, s.station2).flip(),
        ))
    })
    .expect("valid model")
}

/// Sizes for [`random_local`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalShape {
    pub lambdas: usize,
    /// Axes declared at both stations.
    pub shared: usize,
    /// Axes declared at station 1 only.
    pub only1: usize,
    /// Axes declared at station 2 only.
    pub only2: usize,
}

fn below(rng: &mut impl RngCore, n: u64) -> u64 {
    rng.next_u64() % n
}

/// A random model that is actively and passively local and perfectly
/// anticorrelated on its shared axes.
///
/// Kernels are products of per-λ station responses. On shared axes each λ
/// fixes a spin and station 2 answers its flip; on the other axes the
/// probability of ↑ is a random multiple of 1/12. Axes are distinct whole
/// degrees in the x–z plane, shared ones first.
pub fn random_local(rng: &mut impl RngCore, shape: LocalShape) -> HiddenVariableModel<Rational> {
    let n_axes = shape.shared + shape.only1 + shape.only2;
    let mut degrees: Vec<u64> = Vec::with_capacity(n_axes);
    while degrees.len() < n_axes {
        let d = below(rng, 180);
        if !degrees.contains(&d) {
            degrees.push(d);
        }
    }
    let axis = |k: usize| Axis::in_plane_deg(degrees[k] as f64);
    let shared: Vec<Axis> = (0..shape.shared).map(axis).collect();
    let mut axes1 = shared.clone();
    axes1.extend((shape.shared..shape.shared + shape.only1).map(axis));
    let mut axes2 = shared;
    axes2.extend((shape.shared + shape.only1..n_axes).map(axis));

    let raw: Vec<i64> = (0..shape.lambdas).map(|_| 1 + below(rng, 20) as i64).collect();
    let total: i64 = raw.iter().sum();
    let prior = Measure::new(
        SampleSpace::new(shape.lambdas).expect("at least one lambda"),
        raw.iter().map(|&w| r(w, total)).collect(),
    )
    .expect("weights sum to one");

    let mut up_prob = |n: usize| -> Vec<Vec<Rational>> {
        (0..shape.lambdas)
            .map(|_| {
                (0..n)
                    .map(|k| {
                        if k < shape.shared {
                            r(below(rng, 2) as i64, 1)
                        } else {
                            r(below(rng, 13) as i64, 12)
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let up1 = up_prob(axes1.len());
    let mut up2 = up_prob(axes2.len());
    for lambda in 0..shape.lambdas {
        for k in 0..shape.shared {
            up2[lambda][k] = Rational::one() - up1[lambda][k].clone();
        }
    }
    HiddenVariableModel::from_fn(prior, axes1, axes2, |s, lambda| {
        JointDistribution::product(up1[lambda][s.station1].clone(), up2[lambda][s.station2].clone())
    })
    .expect("valid model")
}
