//! Deterministic local strategies and searches over them and over quantum
//! axes.
//!
//! Strategies are numbered `0..2^(n1+n2)`. Bit `n1+n2-1` (the most
//! significant) is station 1's first axis and a set bit means ↓, so the
//! numbering is the lexicographic order with ↑ before ↓.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::inequalities::{
    chsh, model_bell_original, model_chsh, model_three_axis, InequalityKind,
};
use crate::model::{Axis, HiddenVariableModel, JointDistribution, SettingPair, Spin};
use crate::prob::Measure;
use crate::quantum::singlet_joint;
use crate::scalar::{Rational, Scalar};

/// Largest `n1 + n2` that [`enumerate_strategies`] accepts.
pub const MAX_AXES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeterministicStrategy {
    pub assign1: Vec<Spin>,
    pub assign2: Vec<Spin>,
}

impl DeterministicStrategy {
    /// The strategy with lexicographic rank `rank`.
    pub fn from_rank(n1: usize, n2: usize, rank: u64) -> Self {
        let total = n1 + n2;
        let spin = |pos: usize| {
            if (rank >> (total - 1 - pos)) & 1 == 0 {
                Spin::Up
            } else {
                Spin::Down
            }
        };
        DeterministicStrategy {
            assign1: (0..n1).map(spin).collect(),
            assign2: (n1..total).map(spin).collect(),
        }
    }

    pub fn rank(&self) -> u64 {
        self.assign1
            .iter()
            .chain(&self.assign2)
            .fold(0u64, |acc, s| (acc << 1) | s.index() as u64)
    }

    /// `a(i)·b(j)`.
    pub fn correlation(&self, i: usize, j: usize) -> i64 {
        self.assign1[i].value() * self.assign2[j].value()
    }

    /// Station 2 answers the opposite of station 1 on every shared index.
    pub fn is_anticorrelated(&self) -> bool {
        self.assign1.len() == self.assign2.len()
            && self.assign1.iter().zip(&self.assign2).all(|(a, b)| *b == a.flip())
    }

    /// A model with a single λ whose kernels are the point masses of this
    /// strategy.
    pub fn to_model<S: Scalar>(&self, station1_axes: Vec<Axis>, station2_axes: Vec<Axis>) -> Result<HiddenVariableModel<S>> {
        for (station_len, axes_len) in [(self.assign1.len(), station1_axes.len()), (self.assign2.len(), station2_axes.len())] {
            if station_len != axes_len {
                return Err(Error::Dimension {
                    expected: station_len,
                    found: axes_len,
                });
            }
        }
        HiddenVariableModel::from_fn(Measure::dirac(1, 0)?, station1_axes, station2_axes, |s, _| {
            Ok(JointDistribution::point_mass(self.assign1[s.station1], self.assign2[s.station2]))
        })
    }
}

impl fmt::Display for DeterministicStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let write_side = |f: &mut fmt::Formatter<'_>, side: &[Spin]| -> fmt::Result {
            f.write_str("(")?;
            for (k, s) in side.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{s}")?;
            }
            f.write_str(")")
        };
        write_side(f, &self.assign1)?;
        f.write_str(" ")?;
        write_side(f, &self.assign2)
    }
}

/// Iterator over every strategy for `n1` and `n2` axes, in rank order.
#[derive(Debug, Clone)]
pub struct Strategies {
    n1: usize,
    n2: usize,
    next: u64,
    end: u64,
}

impl Strategies {
    pub fn total(&self) -> u64 {
        self.end
    }
}

impl Iterator for Strategies {
    type Item = DeterministicStrategy;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let s = DeterministicStrategy::from_rank(self.n1, self.n2, self.next);
        self.next += 1;
        Some(s)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Strategies {}

pub fn enumerate_strategies(n1: usize, n2: usize) -> Result<Strategies> {
    let total = n1 + n2;
    if total > MAX_AXES {
        return Err(Error::SizeGuard {
            requested: total,
            limit: MAX_AXES,
        });
    }
    Ok(Strategies {
        n1,
        n2,
        next: 0,
        end: 1u64 << total,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeReport {
    pub kind: InequalityKind,
    /// `2^(n1+n2)`.
    pub n_strategies: u64,
    /// Strategies the maximum ranges over (fewer than `n_strategies` when
    /// restricted to anticorrelated ones).
    pub n_admissible: u64,
    pub max_lhs: Rational,
    /// First maximizer in rank order.
    pub argmax: DeterministicStrategy,
    pub bound: Rational,
    /// `max_lhs == bound`.
    pub bound_match: bool,
}

fn int(n: i64) -> Rational {
    Rational::from_ratio(n, 1)
}

/// Keeps the first strategy attaining the largest value.
struct Best {
    value: Option<Rational>,
    argmax: Option<DeterministicStrategy>,
    admissible: u64,
}

impl Best {
    fn new() -> Self {
        Best {
            value: None,
            argmax: None,
            admissible: 0,
        }
    }

    fn offer(&mut self, value: Rational, s: &DeterministicStrategy) {
        self.admissible += 1;
        if self.value.as_ref().map_or(true, |v| value > *v) {
            self.value = Some(value);
            self.argmax = Some(s.clone());
        }
    }

    fn finish(self, kind: InequalityKind, n_strategies: u64, bound: Rational) -> PolytopeReport {
        let max_lhs = self.value.expect("at least one admissible strategy");
        PolytopeReport {
            kind,
            n_strategies,
            n_admissible: self.admissible,
            bound_match: max_lhs == bound,
            max_lhs,
            argmax: self.argmax.expect("at least one admissible strategy"),
            bound,
        }
    }
}

/// CHSH over the 16 strategies at axes `[μ, μ′, ν, ν′]`, evaluated on each
/// strategy's model in exact arithmetic.
pub fn max_chsh_local(axes: &[Axis; 4]) -> Result<PolytopeReport> {
    let [mu, mu2, nu, nu2] = *axes;
    let strategies = enumerate_strategies(2, 2)?;
    let n = strategies.total();
    let mut best = Best::new();
    for s in strategies {
        let model = s.to_model::<Rational>(vec![mu, mu2], vec![nu, nu2])?;
        best.offer(model_chsh(&model, axes, 0.0)?.lhs, &s);
    }
    Ok(best.finish(InequalityKind::Chsh, n, int(2)))
}

/// CHSH over every choice of two station-1 and two station-2 axis indices
/// for each strategy with `n1` and `n2` axes. Needs at least one axis per
/// station; with one axis the two slots coincide.
pub fn max_chsh_vertices(n1: usize, n2: usize) -> Result<PolytopeReport> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidSpace("each station needs at least one axis".into()));
    }
    let strategies = enumerate_strategies(n1, n2)?;
    let n = strategies.total();
    let mut best = Best::new();
    for s in strategies {
        let mut value = i64::MIN;
        for i in 0..n1 {
            for i2 in 0..n1 {
                for j in 0..n2 {
                    for j2 in 0..n2 {
                        let e = [s.correlation(i, j), s.correlation(i, j2), s.correlation(i2, j), s.correlation(i2, j2)];
                        value = value.max((e[0] + e[1] + e[2] - e[3]).abs());
                    }
                }
            }
        }
        best.offer(int(value), &s);
    }
    Ok(best.finish(InequalityKind::Chsh, n, int(2)))
}

/// The three-axis sum over the 8 anticorrelated strategies on shared axes
/// `[A, B, C]`.
pub fn max_three_axis_local(axes: &[Axis; 3]) -> Result<PolytopeReport> {
    let strategies = enumerate_strategies(3, 3)?;
    let n = strategies.total();
    let mut best = Best::new();
    for s in strategies.filter(DeterministicStrategy::is_anticorrelated) {
        let model = s.to_model::<Rational>(axes.to_vec(), axes.to_vec())?;
        best.offer(model_three_axis(&model, axes, 0.0)?.lhs, &s);
    }
    Ok(best.finish(InequalityKind::ThreeAxis, n, int(1)))
}

/// Bell's original form at `[μ, ν, ν′]` over the strategies with station-1
/// axes `[μ, ν]` and station-2 axes `[ν, ν′]` that answer oppositely at `ν`.
pub fn max_bell_original_local(axes: &[Axis; 3]) -> Result<PolytopeReport> {
    let [mu, nu, nu2] = *axes;
    let strategies = enumerate_strategies(2, 2)?;
    let n = strategies.total();
    let mut best = Best::new();
    for s in strategies.filter(|s| s.assign1[1] == s.assign2[0].flip()) {
        let model = s.to_model::<Rational>(vec![mu, nu], vec![nu, nu2])?;
        best.offer(model_bell_original(&model, axes, 0.0)?.lhs, &s);
    }
    Ok(best.finish(InequalityKind::BellOriginal, n, int(1)))
}

/// Which angles the quantum search may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngleRestriction {
    #[default]
    None,
    /// Station 2 mirrors station 1: `ν = μ`, `ν′ = μ′`.
    MirroredStations,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumSearch {
    pub grid_step_deg: f64,
    pub sweeps: u32,
    pub shrink: f64,
    pub target: f64,
    pub restriction: AngleRestriction,
}

impl QuantumSearch {
    pub const DEFAULT: QuantumSearch = QuantumSearch {
        grid_step_deg: 5.0,
        sweeps: 30,
        shrink: 0.5,
        target: 2.0 * core::f64::consts::SQRT_2 - 1e-6,
        restriction: AngleRestriction::None,
    };
}

impl Default for QuantumSearch {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumOptimum {
    /// In-plane angles of `[μ, μ′, ν, ν′]`.
    pub angles_deg: [f64; 4],
    pub axes: [Axis; 4],
    pub lhs: f64,
    /// Best left-hand side on the grid, before refinement.
    pub grid_lhs: f64,
}

fn correlation_deg(a: f64, b: f64) -> f64 {
    let j = singlet_joint(&SettingPair::new(Axis::in_plane_deg(a), Axis::in_plane_deg(b))).joint;
    let p = j.probs();
    p[0] + p[3] - p[1] - p[2]
}

fn chsh_deg(angles: &[f64; 4]) -> f64 {
    let [mu, mu2, nu, nu2] = *angles;
    let e = [
        correlation_deg(mu, nu),
        correlation_deg(mu, nu2),
        correlation_deg(mu2, nu),
        correlation_deg(mu2, nu2),
    ];
    chsh(&e, 0.0).lhs
}

/// Free angles to the full quadruple.
fn expand(free: &[f64], restriction: AngleRestriction) -> [f64; 4] {
    match restriction {
        AngleRestriction::None => [free[0], free[1], free[2], free[3]],
        AngleRestriction::MirroredStations => [free[0], free[1], free[0], free[1]],
    }
}

/// Grid over coplanar angles, then coordinate refinement with a shrinking
/// step. Fails rather than returning a value below `search.target`.
pub fn max_chsh_quantum(search: &QuantumSearch) -> Result<QuantumOptimum> {
    if !(search.grid_step_deg > 0.0 && search.grid_step_deg <= 360.0) {
        return Err(Error::OutOfRange {
            name: "grid_step_deg",
            value: search.grid_step_deg,
        });
    }
    let free = match search.restriction {
        AngleRestriction::None => 4,
        AngleRestriction::MirroredStations => 2,
    };
    let steps = libm::ceil(360.0 / search.grid_step_deg - 1e-9) as usize;
    let grid: Vec<f64> = (0..steps).map(|k| k as f64 * search.grid_step_deg).collect();
    // Correlations at grid angle pairs, looked up during the scan.
    let table: Vec<f64> = grid
        .iter()
        .flat_map(|&a| grid.iter().map(move |&b| correlation_deg(a, b)))
        .collect();
    let e = |i: usize, j: usize| table[i * steps + j];

    let mut best_idx = vec![0usize; free];
    let mut best = f64::NEG_INFINITY;
    let mut idx = vec![0usize; free];
    loop {
        let q = match search.restriction {
            AngleRestriction::None => [idx[0], idx[1], idx[2], idx[3]],
            AngleRestriction::MirroredStations => [idx[0], idx[1], idx[0], idx[1]],
        };
        let lhs = (e(q[0], q[2]) + e(q[0], q[3]) + e(q[1], q[2]) - e(q[1], q[3])).abs();
        if lhs > best {
            best = lhs;
            best_idx.clone_from(&idx);
        }
        let mut k = free;
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < steps {
                break;
            }
            idx[k] = 0;
        }
        if idx.iter().all(|&v| v == 0) {
            break;
        }
    }
    let grid_lhs = best;

    let mut angles: Vec<f64> = best_idx.iter().map(|&k| grid[k]).collect();
    let mut step = search.grid_step_deg;
    for _ in 0..search.sweeps {
        step *= search.shrink;
        for c in 0..free {
            let here = angles[c];
            for candidate in [here - step, here + step] {
                angles[c] = candidate;
                let lhs = chsh_deg(&expand(&angles, search.restriction));
                if lhs > best {
                    best = lhs;
                } else {
                    angles[c] = here;
                }
                if angles[c] != here {
                    break;
                }
            }
        }
    }

    let angles_deg = expand(&angles, search.restriction);
    if best < search.target {
        return Err(Error::SearchFailure {
            best_lhs: best,
            target: search.target,
            angles_deg,
        });
    }
    Ok(QuantumOptimum {
        angles_deg,
        axes: angles_deg.map(Axis::in_plane_deg),
        lhs: best,
        grid_lhs,
    })
}

/// Convex combination of strategy models, all on the same axes, with the
/// mixture weights as the prior.
pub fn mixture_model<S: Scalar>(
    strategies: &[DeterministicStrategy],
    weights: Vec<S>,
    station1_axes: Vec<Axis>,
    station2_axes: Vec<Axis>,
) -> Result<HiddenVariableModel<S>> {
    if strategies.len() != weights.len() {
        return Err(Error::Dimension {
            expected: strategies.len(),
            found: weights.len(),
        });
    }
    let prior = Measure::new(crate::prob::SampleSpace::new(strategies.len())?, weights)?;
    HiddenVariableModel::from_fn(prior, station1_axes, station2_axes, |s, lambda| {
        let st = &strategies[lambda];
        let (a, b) = (st.assign1.get(s.station1), st.assign2.get(s.station2));
        match (a, b) {
            (Some(a), Some(b)) => Ok(JointDistribution::point_mass(*a, *b)),
            _ => Err(Error::Dimension {
                expected: s.station1.max(s.station2) + 1,
                found: st.assign1.len().min(st.assign2.len()),
            }),
        }
    })
}
