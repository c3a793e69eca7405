//! Correlation coefficients and the Bell-type inequalities.
//!
//! The CHSH expression uses the sign pattern
//! `E(μ,ν) + E(μ,ν′) + E(μ′,ν) − E(μ′,ν′)` with inputs ordered
//! `(μ,ν), (μ,ν′), (μ′,ν), (μ′,ν′)`. Because the minus sign is also found in
//! other positions in the literature, reports carry the maximum over all four
//! placements as well.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::model::{joint_distribution, HiddenVariableModel, JointDistribution, SettingPair, Spin};
use crate::scalar::Scalar;

/// `E(μ, ν)` for one setting pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationValue<S> {
    pub value: S,
    pub settings: SettingPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InequalityKind {
    Chsh,
    BellOriginal,
    ConditionalChsh,
    ThreeAxis,
}

impl InequalityKind {
    pub fn name(self) -> &'static str {
        match self {
            InequalityKind::Chsh => "chsh",
            InequalityKind::BellOriginal => "bell_original",
            InequalityKind::ConditionalChsh => "conditional_chsh",
            InequalityKind::ThreeAxis => "three_axis",
        }
    }
}

impl fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `violated` is `lhs > bound + tol` (exact comparison for rationals).
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport<S> {
    pub kind: InequalityKind,
    pub lhs: S,
    pub bound: S,
    pub violated: bool,
    /// Correlations or probabilities the left-hand side was computed from.
    pub inputs: Vec<S>,
    /// CHSH only: the largest left-hand side over the four placements of the
    /// minus sign.
    pub max_over_placements: Option<S>,
}

impl<S: Scalar> InequalityReport<S> {
    fn new(kind: InequalityKind, lhs: S, bound: S, inputs: Vec<S>, tol: f64) -> Self {
        InequalityReport {
            violated: lhs.exceeds(&bound, tol),
            kind,
            lhs,
            bound,
            inputs,
            max_over_placements: None,
        }
    }

    /// The left-hand side used for the bound: the placement maximum when
    /// present.
    pub fn effective_lhs(&self) -> &S {
        self.max_over_placements.as_ref().unwrap_or(&self.lhs)
    }
}

/// `E = p(↑,↑) + p(↓,↓) − p(↑,↓) − p(↓,↑)`.
pub fn correlation_coefficient<S: Scalar>(j: &JointDistribution<S>) -> S {
    j.get(Spin::Up, Spin::Up).clone() + j.get(Spin::Down, Spin::Down).clone()
        - j.get(Spin::Up, Spin::Down).clone()
        - j.get(Spin::Down, Spin::Up).clone()
}

pub fn correlation<S: Scalar>(j: &JointDistribution<S>, s: SettingPair) -> CorrelationValue<S> {
    CorrelationValue {
        value: correlation_coefficient(j),
        settings: s,
    }
}

/// `|E₁ + E₂ + E₃ − E₄| ≤ 2`.
pub fn chsh<S: Scalar>(e: &[S; 4], tol: f64) -> InequalityReport<S> {
    let [e1, e2, e3, e4] = e.clone();
    let total = e1 + e2 + e3 + e4.clone();
    let two = S::from_ratio(2, 1);
    let lhs = (total.clone() - two.clone() * e4).abs();
    let placement_max = e
        .iter()
        .map(|ek| (total.clone() - two.clone() * ek.clone()).abs())
        .reduce(S::max_of)
        .expect("four placements");
    let mut report = InequalityReport::new(InequalityKind::Chsh, lhs, two, e.to_vec(), tol);
    report.max_over_placements = Some(placement_max);
    report
}

/// `|E(μ,ν) − E(μ,ν′)| − E(ν,ν′) ≤ 1`.
pub fn bell_original<S: Scalar>(e: &[S; 3], tol: f64) -> InequalityReport<S> {
    let [e1, e2, e3] = e.clone();
    let lhs = (e1 - e2).abs() - e3;
    InequalityReport::new(InequalityKind::BellOriginal, lhs, S::one(), e.to_vec(), tol)
}

fn check_unit<S: Scalar>(name: &'static str, p: &S) -> Result<()> {
    if *p < S::zero() || *p > S::one() {
        return Err(Error::OutOfRange {
            name,
            value: p.to_f64(),
        });
    }
    Ok(())
}

/// `P_μ(1 − P_ν) + (1 − P_μ)P_ν − P_μP_ν − (1 − P_μ)(1 − P_ν)`, where `P_μ`
/// is the λ-conditional probability of up at station 1 and `P_ν` that of
/// down at station 2.
pub fn conditional_correlation<S: Scalar>(p_mu: &S, p_nu: &S) -> Result<S> {
    check_unit("p_mu", p_mu)?;
    check_unit("p_nu", p_nu)?;
    let q_mu = S::one() - p_mu.clone();
    let q_nu = S::one() - p_nu.clone();
    Ok(p_mu.clone() * q_nu.clone() + q_mu.clone() * p_nu.clone()
        - p_mu.clone() * p_nu.clone()
        - q_mu * q_nu)
}

/// CHSH over conditional correlations; `p` is `[P_μ, P_μ′, P_ν, P_ν′]`.
pub fn conditional_chsh<S: Scalar>(p: &[S; 4], tol: f64) -> Result<InequalityReport<S>> {
    let [mu, mu2, nu, nu2] = p;
    let e = [
        conditional_correlation(mu, nu)?,
        conditional_correlation(mu, nu2)?,
        conditional_correlation(mu2, nu)?,
        conditional_correlation(mu2, nu2)?,
    ];
    let [e1, e2, e3, e4] = e;
    let lhs = (e1 + e2 + e3 - e4).abs();
    Ok(InequalityReport::new(
        InequalityKind::ConditionalChsh,
        lhs,
        S::from_ratio(2, 1),
        p.to_vec(),
        tol,
    ))
}

/// `p_AB(↑,↑) + p_BC(↑,↑) + p_CA(↑,↑) ≤ 1`.
pub fn three_axis_sum<S: Scalar>(
    j_ab: &JointDistribution<S>,
    j_bc: &JointDistribution<S>,
    j_ca: &JointDistribution<S>,
    tol: f64,
) -> InequalityReport<S> {
    let inputs: Vec<S> = [j_ab, j_bc, j_ca]
        .iter()
        .map(|j| j.get(Spin::Up, Spin::Up).clone())
        .collect();
    let lhs = inputs.iter().fold(S::zero(), |acc, v| acc + v.clone());
    InequalityReport::new(InequalityKind::ThreeAxis, lhs, S::one(), inputs, tol)
}

/// Exhaustive maximum of the conditional CHSH left-hand side over the grid
/// `{0, 1/n, …, 1}⁴`, computed in integer arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridMaximum {
    pub divisions: u32,
    /// `lhs · n²` at the maximum.
    pub max_scaled: i64,
    /// Grid coordinates `[P_μ, P_μ′, P_ν, P_ν′] · n` of the first maximum in
    /// lexicographic order.
    pub argmax: [u32; 4],
    pub points: u64,
    /// Grid points whose left-hand side exceeds 2.
    pub exceeding: u64,
}

impl GridMaximum {
    pub fn max_lhs(&self) -> f64 {
        self.max_scaled as f64 / (self.divisions as f64 * self.divisions as f64)
    }
}

pub fn conditional_chsh_grid_max(divisions: u32) -> GridMaximum {
    let n = i64::from(divisions.max(1));
    // E · n² for grid coordinates (a, b).
    let e = |a: i64, b: i64| a * (n - b) + (n - a) * b - a * b - (n - a) * (n - b);
    let bound = 2 * n * n;
    let mut best = GridMaximum {
        divisions: n as u32,
        max_scaled: i64::MIN,
        argmax: [0; 4],
        points: 0,
        exceeding: 0,
    };
    for mu in 0..=n {
        for mu2 in 0..=n {
            for nu in 0..=n {
                for nu2 in 0..=n {
                    let lhs = (e(mu, nu) + e(mu, nu2) + e(mu2, nu) - e(mu2, nu2)).abs();
                    best.points += 1;
                    if lhs > bound {
                        best.exceeding += 1;
                    }
                    if lhs > best.max_scaled {
                        best.max_scaled = lhs;
                        best.argmax = [mu as u32, mu2 as u32, nu as u32, nu2 as u32];
                    }
                }
            }
        }
    }
    best
}

/// CHSH on a model at axes `[μ, μ′, ν, ν′]` (station 1: μ, μ′; station 2:
/// ν, ν′).
pub fn model_chsh<S: Scalar>(
    model: &HiddenVariableModel<S>,
    axes: &[crate::model::Axis; 4],
    tol: f64,
) -> Result<InequalityReport<S>> {
    let [mu, mu2, nu, nu2] = *axes;
    let mut e = [S::zero(), S::zero(), S::zero(), S::zero()];
    for (slot, (a, b)) in e.iter_mut().zip([(mu, nu), (mu, nu2), (mu2, nu), (mu2, nu2)]) {
        *slot = correlation_coefficient(&joint_distribution(model, &SettingPair::new(a, b))?);
    }
    Ok(chsh(&e, tol))
}

/// Bell's original form on a model; `ν` must be declared at both stations.
pub fn model_bell_original<S: Scalar>(
    model: &HiddenVariableModel<S>,
    axes: &[crate::model::Axis; 3],
    tol: f64,
) -> Result<InequalityReport<S>> {
    let [mu, nu, nu2] = *axes;
    let mut e = [S::zero(), S::zero(), S::zero()];
    for (slot, (a, b)) in e.iter_mut().zip([(mu, nu), (mu, nu2), (nu, nu2)]) {
        *slot = correlation_coefficient(&joint_distribution(model, &SettingPair::new(a, b))?);
    }
    Ok(bell_original(&e, tol))
}

/// The three-axis sum on a model at `[A, B, C]`, each declared at both
/// stations.
pub fn model_three_axis<S: Scalar>(
    model: &HiddenVariableModel<S>,
    axes: &[crate::model::Axis; 3],
    tol: f64,
) -> Result<InequalityReport<S>> {
    let [a, b, c] = *axes;
    let j = |x, y| joint_distribution(model, &SettingPair::new(x, y));
    Ok(three_axis_sum(&j(a, b)?, &j(b, c)?, &j(c, a)?, tol))
}
