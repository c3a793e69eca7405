//! Two-station EPR experiments as finite hidden-variable models.
//!
//! A model is a prior over source outcomes λ together with one 2×2 response
//! kernel per (station-1 axis, station-2 axis, λ). Kernels may depend on both
//! axes; whether they actually do is what the locality checks decide.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::prob::{Event, Measure, Partition, SampleSpace};
use crate::scalar::{self, Scalar, Tolerances};

/// A measurement direction: a unit 3-vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis([f64; 3]);

impl Axis {
    /// Accepts vectors whose norm is within `Tolerances::DEFAULT.axis` of one.
    pub fn new(direction: [f64; 3]) -> Result<Self> {
        let norm = norm3(&direction);
        if !norm.is_finite() || libm::fabs(norm - 1.0) > Tolerances::DEFAULT.axis {
            return Err(Error::NotUnitAxis { norm });
        }
        Ok(Axis(direction))
    }

    /// Accepts vectors whose norm is within `slack` of one and rescales them
    /// to unit length.
    pub fn normalized(direction: [f64; 3], slack: f64) -> Result<Self> {
        let norm = norm3(&direction);
        if !norm.is_finite() || libm::fabs(norm - 1.0) > slack {
            return Err(Error::NotUnitAxis { norm });
        }
        Ok(Axis(direction.map(|c| c / norm)))
    }

    /// The axis at `degrees` from ẑ towards x̂ in the x–z plane.
    pub fn in_plane_deg(degrees: f64) -> Self {
        let rad = degrees.to_radians();
        Axis([libm::sin(rad), 0.0, libm::cos(rad)])
    }

    pub fn from_spherical_deg(polar: f64, azimuth: f64) -> Self {
        let (t, p) = (polar.to_radians(), azimuth.to_radians());
        Axis([
            libm::sin(t) * libm::cos(p),
            libm::sin(t) * libm::sin(p),
            libm::cos(t),
        ])
    }

    pub const X: Axis = Axis([1.0, 0.0, 0.0]);
    pub const Y: Axis = Axis([0.0, 1.0, 0.0]);
    pub const Z: Axis = Axis([0.0, 0.0, 1.0]);

    pub fn direction(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, other: &Axis) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    /// Same direction: `dot >= 1 - eps`.
    pub fn same_as(&self, other: &Axis, eps: f64) -> bool {
        self.dot(other) >= 1.0 - eps
    }

    pub fn angle_deg_to(&self, other: &Axis) -> f64 {
        libm::acos(self.dot(other).clamp(-1.0, 1.0)).to_degrees()
    }
}

fn norm3(v: &[f64; 3]) -> f64 {
    libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    /// +1 for up, −1 for down.
    pub fn value(self) -> i64 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn flip(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Up => "up",
            Spin::Down => "down",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Station {
    One,
    Two,
}

impl Station {
    pub fn other(self) -> Station {
        match self {
            Station::One => Station::Two,
            Station::Two => Station::One,
        }
    }
}

impl fmt::Display for Station {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Station::One => "1",
            Station::Two => "2",
        })
    }
}

/// The four joint outcomes in cell order ↑↑, ↑↓, ↓↑, ↓↓.
pub const OUTCOMES: [(Spin, Spin); 4] = [
    (Spin::Up, Spin::Up),
    (Spin::Up, Spin::Down),
    (Spin::Down, Spin::Up),
    (Spin::Down, Spin::Down),
];

pub fn cell_index(a: Spin, b: Spin) -> usize {
    a.index() * 2 + b.index()
}

/// Detector axes at station 1 (`mu`) and station 2 (`nu`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettingPair {
    pub mu: Axis,
    pub nu: Axis,
}

impl SettingPair {
    pub fn new(mu: Axis, nu: Axis) -> Self {
        SettingPair { mu, nu }
    }
}

/// Indices into a model's declared axis lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SettingIndex {
    pub station1: usize,
    pub station2: usize,
}

impl SettingIndex {
    pub fn new(station1: usize, station2: usize) -> Self {
        SettingIndex { station1, station2 }
    }
}

impl fmt::Display for SettingIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.station1, self.station2)
    }
}

/// A distribution over the four joint outcomes, stored in [`OUTCOMES`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution<S> {
    p: [S; 4],
}

impl<S: Scalar> JointDistribution<S> {
    pub fn new(p: [S; 4]) -> Result<Self> {
        Self::with_tolerance(p, Tolerances::DEFAULT.norm)
    }

    pub fn with_tolerance(p: [S; 4], norm_tol: f64) -> Result<Self> {
        if let Some(k) = p.iter().position(|v| *v < S::zero()) {
            return Err(Error::InvalidJoint(format!(
                "entry {k} is negative ({})",
                p[k]
            )));
        }
        let total: S = scalar::sum(&p);
        if !total.near(&S::one(), norm_tol) {
            return Err(Error::InvalidJoint(format!("entries sum to {total}, not 1")));
        }
        Ok(JointDistribution { p })
    }

    pub fn from_matrix(m: [[S; 2]; 2]) -> Result<Self> {
        let [[uu, ud], [du, dd]] = m;
        Self::new([uu, ud, du, dd])
    }

    pub fn point_mass(a: Spin, b: Spin) -> Self {
        let mut p = [S::zero(), S::zero(), S::zero(), S::zero()];
        p[cell_index(a, b)] = S::one();
        JointDistribution { p }
    }

    pub fn uniform() -> Self {
        let q = S::from_ratio(1, 4);
        JointDistribution {
            p: [q.clone(), q.clone(), q.clone(), q],
        }
    }

    /// Independent outcomes with `P(up at 1) = up1` and `P(up at 2) = up2`.
    pub fn product(up1: S, up2: S) -> Result<Self> {
        for (name, v) in [("up1", &up1), ("up2", &up2)] {
            if *v < S::zero() || *v > S::one() {
                return Err(Error::OutOfRange {
                    name,
                    value: v.to_f64(),
                });
            }
        }
        let down1 = S::one() - up1.clone();
        let down2 = S::one() - up2.clone();
        Ok(JointDistribution {
            p: [
                up1.clone() * up2.clone(),
                up1 * down2.clone(),
                down1.clone() * up2,
                down1 * down2,
            ],
        })
    }

    pub fn probs(&self) -> &[S; 4] {
        &self.p
    }

    pub fn get(&self, a: Spin, b: Spin) -> &S {
        &self.p[cell_index(a, b)]
    }

    /// `(P(up), P(down))` at `station`.
    pub fn marginal(&self, station: Station) -> [S; 2] {
        let [uu, ud, du, dd] = self.p.clone();
        match station {
            Station::One => [uu + ud, du + dd],
            Station::Two => [uu + du, ud + dd],
        }
    }

    /// `weight · self + (1 − weight) · other`.
    pub fn mix(&self, other: &Self, weight: &S) -> Self {
        let rest = S::one() - weight.clone();
        let mut p = self.p.clone();
        for (k, v) in p.iter_mut().enumerate() {
            *v = weight.clone() * v.clone() + rest.clone() * other.p[k].clone();
        }
        JointDistribution { p }
    }

    pub fn to_f64(&self) -> JointDistribution<f64> {
        JointDistribution {
            p: [
                self.p[0].to_f64(),
                self.p[1].to_f64(),
                self.p[2].to_f64(),
                self.p[3].to_f64(),
            ],
        }
    }
}

pub fn marginal<S: Scalar>(j: &JointDistribution<S>, station: Station) -> [S; 2] {
    j.marginal(station)
}

/// Prior over λ plus response kernels indexed by (station-1 axis,
/// station-2 axis, λ).
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenVariableModel<S> {
    prior: Measure<S>,
    station1_axes: Vec<Axis>,
    station2_axes: Vec<Axis>,
    kernels: Vec<JointDistribution<S>>,
    axis_eps: f64,
}

impl<S: Scalar> HiddenVariableModel<S> {
    /// `kernels` is laid out row-major over (station-1 axis, station-2 axis, λ).
    pub fn new(
        prior: Measure<S>,
        station1_axes: Vec<Axis>,
        station2_axes: Vec<Axis>,
        kernels: Vec<JointDistribution<S>>,
    ) -> Result<Self> {
        check_distinct_axes(Station::One, &station1_axes)?;
        check_distinct_axes(Station::Two, &station2_axes)?;
        let expected = station1_axes.len() * station2_axes.len() * prior.size();
        if kernels.len() != expected {
            return Err(Error::Dimension {
                expected,
                found: kernels.len(),
            });
        }
        if station1_axes.is_empty() || station2_axes.is_empty() {
            return Err(Error::InvalidSpace(
                "each station needs at least one declared axis".into(),
            ));
        }
        Ok(HiddenVariableModel {
            prior,
            station1_axes,
            station2_axes,
            kernels,
            axis_eps: Tolerances::DEFAULT.axis,
        })
    }

    pub fn from_fn(
        prior: Measure<S>,
        station1_axes: Vec<Axis>,
        station2_axes: Vec<Axis>,
        mut kernel: impl FnMut(SettingIndex, usize) -> Result<JointDistribution<S>>,
    ) -> Result<Self> {
        let mut kernels = Vec::with_capacity(station1_axes.len() * station2_axes.len() * prior.size());
        for i in 0..station1_axes.len() {
            for j in 0..station2_axes.len() {
                for lambda in 0..prior.size() {
                    kernels.push(kernel(SettingIndex::new(i, j), lambda)?);
                }
            }
        }
        Self::new(prior, station1_axes, station2_axes, kernels)
    }

    /// Uses `eps` instead of the default when matching axes by direction.
    pub fn with_axis_tolerance(mut self, eps: f64) -> Self {
        self.axis_eps = eps;
        self
    }

    pub fn prior(&self) -> &Measure<S> {
        &self.prior
    }

    pub fn lambda_space(&self) -> &SampleSpace {
        self.prior.space()
    }

    pub fn lambda_count(&self) -> usize {
        self.prior.size()
    }

    pub fn axes(&self, station: Station) -> &[Axis] {
        match station {
            Station::One => &self.station1_axes,
            Station::Two => &self.station2_axes,
        }
    }

    pub fn settings(&self) -> impl Iterator<Item = SettingIndex> + '_ {
        let n2 = self.station2_axes.len();
        (0..self.station1_axes.len() * n2).map(move |k| SettingIndex::new(k / n2, k % n2))
    }

    fn offset(&self, s: SettingIndex) -> usize {
        (s.station1 * self.station2_axes.len() + s.station2) * self.lambda_count()
    }

    pub fn kernel(&self, s: SettingIndex, lambda: usize) -> &JointDistribution<S> {
        &self.kernels[self.offset(s) + lambda]
    }

    /// Kernels for every λ at one setting.
    pub fn kernels_at(&self, s: SettingIndex) -> &[JointDistribution<S>] {
        let start = self.offset(s);
        &self.kernels[start..start + self.lambda_count()]
    }

    pub fn resolve_axis(&self, station: Station, axis: &Axis) -> Result<usize> {
        self.axes(station)
            .iter()
            .position(|a| a.same_as(axis, self.axis_eps))
            .ok_or(Error::MissingKernel {
                station,
                axis: axis.direction(),
            })
    }

    pub fn resolve(&self, s: &SettingPair) -> Result<SettingIndex> {
        Ok(SettingIndex::new(
            self.resolve_axis(Station::One, &s.mu)?,
            self.resolve_axis(Station::Two, &s.nu)?,
        ))
    }

    pub fn setting_pair(&self, s: SettingIndex) -> SettingPair {
        SettingPair::new(self.station1_axes[s.station1], self.station2_axes[s.station2])
    }

    /// Station indices `(i, j)` with the same direction, one per axis in
    /// `axes`.
    pub fn resolve_shared(&self, axes: &[Axis]) -> Result<Vec<SettingIndex>> {
        axes.iter()
            .map(|a| self.resolve(&SettingPair::new(*a, *a)))
            .collect()
    }

    /// Mixture of two models on the disjoint union of their λ spaces, with
    /// prior `weight · prior_self ⊕ (1 − weight) · prior_other`.
    pub fn mix(&self, other: &Self, weight: S) -> Result<Self> {
        if weight < S::zero() || weight > S::one() {
            return Err(Error::OutOfRange {
                name: "weight",
                value: weight.to_f64(),
            });
        }
        let same_axes = |a: &[Axis], b: &[Axis]| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_as(y, self.axis_eps))
        };
        if !same_axes(&self.station1_axes, &other.station1_axes)
            || !same_axes(&self.station2_axes, &other.station2_axes)
        {
            return Err(Error::InvalidSpace(
                "mixed models must declare the same axes".into(),
            ));
        }
        let rest = S::one() - weight.clone();
        let weights: Vec<S> = self
            .prior
            .weights()
            .iter()
            .map(|w| weight.clone() * w.clone())
            .chain(other.prior.weights().iter().map(|w| rest.clone() * w.clone()))
            .collect();
        let n = weights.len();
        let prior = Measure::new(SampleSpace::new(n)?, weights)?;
        let split = self.lambda_count();
        Self::from_fn(
            prior,
            self.station1_axes.clone(),
            self.station2_axes.clone(),
            |s, lambda| {
                Ok(if lambda < split {
                    self.kernel(s, lambda).clone()
                } else {
                    other.kernel(s, lambda - split).clone()
                })
            },
        )
    }

    /// The same model in float arithmetic.
    pub fn to_f64(&self) -> HiddenVariableModel<f64> {
        let weights = self.prior.weights().iter().map(Scalar::to_f64).collect();
        let prior = Measure::with_tolerance(self.prior.space().clone(), weights, 1e-9)
            .expect("float image of a valid measure");
        HiddenVariableModel {
            prior,
            station1_axes: self.station1_axes.clone(),
            station2_axes: self.station2_axes.clone(),
            kernels: self.kernels.iter().map(JointDistribution::to_f64).collect(),
            axis_eps: self.axis_eps,
        }
    }
}

fn check_distinct_axes(station: Station, axes: &[Axis]) -> Result<()> {
    for (i, a) in axes.iter().enumerate() {
        if let Some(j) = axes[..i]
            .iter()
            .position(|b| b.same_as(a, Tolerances::DEFAULT.axis))
        {
            return Err(Error::InvalidSpace(format!(
                "station {station} declares axis {a} twice (indices {j} and {i})"
            )));
        }
    }
    Ok(())
}

/// The enlarged space of one setting pair: outcomes `(λ, a, b)` with weight
/// `prior(λ) · kernel(λ)(a, b)`, and the partitions generating the source,
/// station-1 and station-2 sigma algebras.
#[derive(Debug, Clone, PartialEq)]
pub struct EnlargedSpace<S> {
    pub measure: Measure<S>,
    pub source: Partition,
    pub station1: Partition,
    pub station2: Partition,
    lambda_count: usize,
}

impl<S: Scalar> EnlargedSpace<S> {
    pub fn index(lambda: usize, a: Spin, b: Spin) -> usize {
        lambda * 4 + cell_index(a, b)
    }

    pub fn lambda_count(&self) -> usize {
        self.lambda_count
    }

    pub fn size(&self) -> usize {
        self.measure.size()
    }

    pub fn station_event(&self, station: Station, spin: Spin) -> Event {
        Event::from_predicate(self.size(), |k| {
            let (a, b) = OUTCOMES[k % 4];
            match station {
                Station::One => a == spin,
                Station::Two => b == spin,
            }
        })
    }

    pub fn outcome_event(&self, a: Spin, b: Spin) -> Event {
        Event::from_predicate(self.size(), |k| k % 4 == cell_index(a, b))
    }

    /// Lifts an event over Λ to the enlarged space (all detector outcomes).
    pub fn lift(&self, lambda_event: &Event) -> Result<Event> {
        if lambda_event.size() != self.lambda_count {
            return Err(Error::Dimension {
                expected: self.lambda_count,
                found: lambda_event.size(),
            });
        }
        Ok(Event::from_predicate(self.size(), |k| {
            lambda_event.contains(k / 4)
        }))
    }
}

pub fn enlarged_space<S: Scalar>(
    model: &HiddenVariableModel<S>,
    s: &SettingPair,
) -> Result<EnlargedSpace<S>> {
    let index = model.resolve(s)?;
    enlarged_space_at(model, index)
}

pub fn enlarged_space_at<S: Scalar>(
    model: &HiddenVariableModel<S>,
    s: SettingIndex,
) -> Result<EnlargedSpace<S>> {
    let n = model.lambda_count();
    let mut weights = Vec::with_capacity(4 * n);
    for (lambda, kernel) in model.kernels_at(s).iter().enumerate() {
        let w = model.prior().weight(lambda);
        weights.extend(kernel.probs().iter().map(|p| w.clone() * p.clone()));
    }
    let measure = Measure::with_tolerance(SampleSpace::new(4 * n)?, weights, 1e-9)?;
    let lambdas: Vec<usize> = (0..4 * n).map(|k| k / 4).collect();
    let ones: Vec<usize> = (0..4 * n).map(|k| OUTCOMES[k % 4].0.index()).collect();
    let twos: Vec<usize> = (0..4 * n).map(|k| OUTCOMES[k % 4].1.index()).collect();
    Ok(EnlargedSpace {
        measure,
        source: Partition::from_keys(&lambdas)?,
        station1: Partition::from_keys(&ones)?,
        station2: Partition::from_keys(&twos)?,
        lambda_count: n,
    })
}

pub fn joint_distribution<S: Scalar>(
    model: &HiddenVariableModel<S>,
    s: &SettingPair,
) -> Result<JointDistribution<S>> {
    Ok(joint_at(model, model.resolve(s)?))
}

/// `p(a, b) = Σ_λ prior(λ) · kernel(λ)(a, b)`.
pub fn joint_at<S: Scalar>(model: &HiddenVariableModel<S>, s: SettingIndex) -> JointDistribution<S> {
    let mut p = [S::zero(), S::zero(), S::zero(), S::zero()];
    for (w, kernel) in model.prior().weights().iter().zip(model.kernels_at(s)) {
        for (acc, v) in p.iter_mut().zip(kernel.probs()) {
            *acc = acc.clone() + w.clone() * v.clone();
        }
    }
    JointDistribution { p }
}

/// Perfect anticorrelation at equal axes: for every axis in `axes`,
/// `p(↑,↓) + p(↓,↑) = 1`.
pub fn anticorrelation_check<S: Scalar>(
    model: &HiddenVariableModel<S>,
    axes: &[Axis],
    tol: f64,
) -> Result<bool> {
    for s in model.resolve_shared(axes)? {
        if !opposite_mass(&joint_at(model, s)).near(&S::one(), tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn opposite_mass<S: Scalar>(j: &JointDistribution<S>) -> S {
    j.get(Spin::Up, Spin::Down).clone() + j.get(Spin::Down, Spin::Up).clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use alloc::vec;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn two_lambda() -> HiddenVariableModel<Rational> {
        HiddenVariableModel::from_fn(
            Measure::uniform(2).unwrap(),
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
        .unwrap()
    }

    #[test]
    fn axis_validation() {
        assert!(Axis::new([1.0, 1.0, 0.0]).is_err());
        assert!(Axis::new([0.6, 0.0, 0.8]).is_ok());
        let a = Axis::normalized([0.7, 0.0, 0.7], 0.02).unwrap();
        assert!((a.dot(&a) - 1.0).abs() < 1e-15);
        assert!(Axis::in_plane_deg(90.0).same_as(&Axis::X, 1e-9));
        assert!((Axis::Z.angle_deg_to(&Axis::in_plane_deg(60.0)) - 60.0).abs() < 1e-9);
    }

    #[test]
    fn enlarged_space_single_uniform() {
        let model = HiddenVariableModel::<Rational>::from_fn(
            Measure::dirac(1, 0).unwrap(),
            vec![Axis::Z],
            vec![Axis::Z],
            |_, _| Ok(JointDistribution::uniform()),
        )
        .unwrap();
        let space = enlarged_space(&model, &SettingPair::new(Axis::Z, Axis::Z)).unwrap();
        assert_eq!(space.size(), 4);
        assert!(space.measure.weights().iter().all(|w| *w == r(1, 4)));
        assert_eq!(space.source.cells().len(), 1);
        assert_eq!(space.station1.cells().len(), 2);
        assert_eq!(space.station2.cells().len(), 2);
    }

    #[test]
    fn enlarged_space_deterministic() {
        let model = two_lambda();
        let space = enlarged_space(&model, &SettingPair::new(Axis::Z, Axis::Z)).unwrap();
        let positive: Vec<usize> = (0..8)
            .filter(|&k| *space.measure.weight(k) > Rational::from_ratio(0, 1))
            .collect();
        assert_eq!(positive, vec![1, 6]);
        assert!(space.measure.weights().iter().all(|w| *w == r(0, 1) || *w == r(1, 2)));
        let opposite = space
            .outcome_event(Spin::Up, Spin::Down)
            .union(&space.outcome_event(Spin::Down, Spin::Up))
            .unwrap();
        assert_eq!(space.measure.probability(&opposite).unwrap(), r(1, 1));
    }

    #[test]
    fn undeclared_setting_is_missing_kernel() {
        let model = two_lambda();
        let err = joint_distribution(&model, &SettingPair::new(Axis::X, Axis::Z)).unwrap_err();
        assert!(matches!(err, Error::MissingKernel { station: Station::One, .. }));
    }

    #[test]
    fn joint_of_mixture_is_convex_combination() {
        let prior = Measure::new(SampleSpace::new(2).unwrap(), vec![r(3, 10), r(7, 10)]).unwrap();
        let model = HiddenVariableModel::from_fn(prior, vec![Axis::Z], vec![Axis::X], |_, l| {
            Ok(if l == 0 {
                JointDistribution::point_mass(Spin::Up, Spin::Up)
            } else {
                JointDistribution::point_mass(Spin::Down, Spin::Up)
            })
        })
        .unwrap();
        let j = joint_distribution(&model, &SettingPair::new(Axis::Z, Axis::X)).unwrap();
        assert_eq!(j.probs(), &[r(3, 10), r(0, 1), r(7, 10), r(0, 1)]);
    }

    #[test]
    fn marginal_examples() {
        let u = JointDistribution::<Rational>::uniform();
        assert_eq!(marginal(&u, Station::One), [r(1, 2), r(1, 2)]);
        let pm = JointDistribution::<Rational>::point_mass(Spin::Up, Spin::Down);
        assert_eq!(marginal(&pm, Station::One), [r(1, 1), r(0, 1)]);
        let j = JointDistribution::from_matrix([[r(1, 10), r(4, 10)], [r(3, 10), r(2, 10)]]).unwrap();
        assert_eq!(marginal(&j, Station::Two), [r(4, 10), r(6, 10)]);
    }

    #[test]
    fn anticorrelation_examples() {
        assert!(anticorrelation_check(&two_lambda(), &[Axis::Z], 0.0).unwrap());
        let uniform = HiddenVariableModel::<f64>::from_fn(
            Measure::dirac(1, 0).unwrap(),
            vec![Axis::Z],
            vec![Axis::Z],
            |_, _| Ok(JointDistribution::uniform()),
        )
        .unwrap();
        assert!(!anticorrelation_check(&uniform, &[Axis::Z], 1e-9).unwrap());
        assert!(anticorrelation_check(&uniform, &[Axis::X], 1e-9).is_err());
    }

    #[test]
    fn joint_validation() {
        assert!(JointDistribution::new([0.5, 0.5, 0.5, -0.5]).is_err());
        assert!(JointDistribution::new([0.5, 0.5, 0.5, 0.0]).is_err());
        assert!(JointDistribution::<f64>::product(1.5, 0.0).is_err());
        let p = JointDistribution::product(r(1, 3), r(1, 4)).unwrap();
        assert_eq!(p.marginal(Station::One), [r(1, 3), r(2, 3)]);
        assert_eq!(p.marginal(Station::Two), [r(1, 4), r(3, 4)]);
    }

    #[test]
    fn duplicate_axes_rejected() {
        let res = HiddenVariableModel::<f64>::from_fn(
            Measure::dirac(1, 0).unwrap(),
            vec![Axis::Z, Axis::Z],
            vec![Axis::Z],
            |_, _| Ok(JointDistribution::uniform()),
        );
        assert!(res.is_err());
    }
}
