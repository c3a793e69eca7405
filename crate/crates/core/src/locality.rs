//! Locality conditions on hidden-variable models.
//!
//! - No-signalling compares a station's aggregate outcome marginals across
//!   remote settings.
//! - Active locality compares them per source outcome λ: the local outcome
//!   event must be equivalent across remote settings. Both settings live on
//!   one space by coupling them at fixed λ (maximal coupling of the two local
//!   marginals), and equivalence is then tested with
//!   [`events_equivalent`]. For two-outcome kernels this holds exactly when
//!   the λ-conditional marginals agree.
//! - Passive locality asks for conditional independence of the two stations
//!   given the source sigma algebra.
//! - Passive locality plus perfect anticorrelation at an axis forces the
//!   λ-conditional probability of "up" to be an indicator; the event it
//!   indicates is extracted by [`extract_deterministic_event`].
//!
//! Checks iterate settings and λ in index order, so verdicts and witnesses
//! are reproducible.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::model::{
    anticorrelation_check, enlarged_space_at, joint_at, opposite_mass, Axis, EnlargedSpace,
    HiddenVariableModel, SettingIndex, Spin, Station,
};
use crate::prob::{
    conditional_probability, events_equivalent, expectation, intersection_localization_check,
    Event, MeasurableFunction, Measure, SampleSpace,
};
use crate::scalar::{Scalar, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalityCondition {
    NoSignalling,
    ActiveLocality,
    PassiveLocality,
    DeterministicPassiveLocality,
    Anticorrelation,
}

impl LocalityCondition {
    pub fn name(self) -> &'static str {
        match self {
            LocalityCondition::NoSignalling => "no_signalling",
            LocalityCondition::ActiveLocality => "active_locality",
            LocalityCondition::PassiveLocality => "passive_locality",
            LocalityCondition::DeterministicPassiveLocality => "deterministic_passive_locality",
            LocalityCondition::Anticorrelation => "anticorrelation",
        }
    }
}

impl fmt::Display for LocalityCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where a condition fails and by how much.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub setting: SettingIndex,
    /// The second setting of a cross-setting comparison.
    pub other_setting: Option<SettingIndex>,
    pub station: Option<Station>,
    pub lambda: Option<usize>,
    pub discrepancy: f64,
    pub detail: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "setting {}", self.setting)?;
        if let Some(other) = self.other_setting {
            write!(f, " vs {other}")?;
        }
        if let Some(station) = self.station {
            write!(f, ", station {station}")?;
        }
        if let Some(lambda) = self.lambda {
            write!(f, ", lambda {lambda}")?;
        }
        write!(f, ": {} (discrepancy {:e})", self.detail, self.discrepancy)
    }
}

/// A witness is present exactly when the condition fails.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalityVerdict {
    pub condition: LocalityCondition,
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl LocalityVerdict {
    pub fn holding(condition: LocalityCondition) -> Self {
        LocalityVerdict {
            condition,
            holds: true,
            witness: None,
        }
    }

    pub fn violated(condition: LocalityCondition, witness: Witness) -> Self {
        LocalityVerdict {
            condition,
            holds: false,
            witness: Some(witness),
        }
    }

    fn from_witness(condition: LocalityCondition, witness: Option<Witness>) -> Self {
        match witness {
            Some(w) => Self::violated(condition, w),
            None => Self::holding(condition),
        }
    }
}

fn resolve_all<S: Scalar>(
    model: &HiddenVariableModel<S>,
    station: Station,
    axes: &[Axis],
) -> Result<Vec<usize>> {
    axes.iter().map(|a| model.resolve_axis(station, a)).collect()
}

fn setting(station: Station, local: usize, remote: usize) -> SettingIndex {
    match station {
        Station::One => SettingIndex::new(local, remote),
        Station::Two => SettingIndex::new(remote, local),
    }
}

/// Calls `visit(station, s, s')` for every pair of settings that share the
/// axis at `station` and differ at the other one.
fn for_each_remote_change(
    locals1: &[usize],
    locals2: &[usize],
    mut visit: impl FnMut(Station, SettingIndex, SettingIndex) -> Result<Option<Witness>>,
) -> Result<Option<Witness>> {
    for (station, locals, remotes) in [
        (Station::One, locals1, locals2),
        (Station::Two, locals2, locals1),
    ] {
        for &local in locals {
            for (k, &r) in remotes.iter().enumerate() {
                for &r2 in &remotes[k + 1..] {
                    if r == r2 {
                        continue;
                    }
                    let w = visit(station, setting(station, local, r), setting(station, local, r2))?;
                    if w.is_some() {
                        return Ok(w);
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Aggregate marginals at each station do not depend on the remote axis.
pub fn check_no_signalling<S: Scalar>(
    model: &HiddenVariableModel<S>,
    station1_axes: &[Axis],
    station2_axes: &[Axis],
    tol: &Tolerances,
) -> Result<LocalityVerdict> {
    let i = resolve_all(model, Station::One, station1_axes)?;
    let j = resolve_all(model, Station::Two, station2_axes)?;
    let witness = for_each_remote_change(&i, &j, |station, s, s2| {
        let up = joint_at(model, s).marginal(station)[0].clone();
        let up2 = joint_at(model, s2).marginal(station)[0].clone();
        Ok((!up.near(&up2, tol.tol)).then(|| Witness {
            setting: s,
            other_setting: Some(s2),
            station: Some(station),
            lambda: None,
            discrepancy: (up.clone() - up2.clone()).abs().to_f64(),
            detail: format!("P(up) is {up} under one remote axis and {up2} under the other"),
        }))
    })?;
    Ok(LocalityVerdict::from_witness(LocalityCondition::NoSignalling, witness))
}

/// The local outcome events under two remote settings are equivalent on the
/// λ-fixing coupling, and the λ-conditional local marginals agree.
pub fn check_active_locality<S: Scalar>(
    model: &HiddenVariableModel<S>,
    station1_axes: &[Axis],
    station2_axes: &[Axis],
    tol: &Tolerances,
) -> Result<LocalityVerdict> {
    let i = resolve_all(model, Station::One, station1_axes)?;
    let j = resolve_all(model, Station::Two, station2_axes)?;
    let witness = for_each_remote_change(&i, &j, |station, s, s2| {
        if let Some(w) = conditional_marginal_witness(model, station, s, s2, tol)? {
            return Ok(Some(w));
        }
        coupled_equivalence_witness(model, station, s, s2, tol)
    })?;
    Ok(LocalityVerdict::from_witness(LocalityCondition::ActiveLocality, witness))
}

/// `P(up at station | F_S)` under `s` and `s2`, compared on cells of positive
/// probability.
fn conditional_marginal_witness<S: Scalar>(
    model: &HiddenVariableModel<S>,
    station: Station,
    s: SettingIndex,
    s2: SettingIndex,
    tol: &Tolerances,
) -> Result<Option<Witness>> {
    let first = conditional_up(model, station, s)?;
    let second = conditional_up(model, station, s2)?;
    for lambda in 0..model.lambda_count() {
        if model.prior().weight(lambda).is_zero() {
            continue;
        }
        let (a, b) = (first.on_cell(lambda), second.on_cell(lambda));
        if !a.near(b, tol.tol) {
            return Ok(Some(Witness {
                setting: s,
                other_setting: Some(s2),
                station: Some(station),
                lambda: Some(lambda),
                discrepancy: (a.clone() - b.clone()).abs().to_f64(),
                detail: format!("P(up | lambda) is {a} under one remote axis and {b} under the other"),
            }));
        }
    }
    Ok(None)
}

fn conditional_up<S: Scalar>(
    model: &HiddenVariableModel<S>,
    station: Station,
    s: SettingIndex,
) -> Result<MeasurableFunction<S>> {
    let space = enlarged_space_at(model, s)?;
    conditional_probability(
        &space.measure,
        &space.station_event(station, Spin::Up),
        &space.source,
    )
}

/// Builds Λ × {↑,↓}² carrying the local outcome under `s` and under `s2`,
/// coupled per λ so that they agree as often as possible, and tests the two
/// "up" events (and the two "down" events) for equivalence.
fn coupled_equivalence_witness<S: Scalar>(
    model: &HiddenVariableModel<S>,
    station: Station,
    s: SettingIndex,
    s2: SettingIndex,
    tol: &Tolerances,
) -> Result<Option<Witness>> {
    let n = model.lambda_count();
    let mut weights = Vec::with_capacity(4 * n);
    for lambda in 0..n {
        let [p_up, _] = model.kernel(s, lambda).marginal(station);
        let [q_up, _] = model.kernel(s2, lambda).marginal(station);
        let both_up = p_up.clone().min_of(q_up.clone());
        let p_down = S::one() - p_up.clone();
        let q_down = S::one() - q_up.clone();
        let both_down = p_down.min_of(q_down);
        let w = model.prior().weight(lambda);
        // Cell order (first, second): ↑↑, ↑↓, ↓↑, ↓↓.
        for c in [
            both_up.clone(),
            p_up - both_up.clone(),
            q_up - both_up,
            both_down,
        ] {
            weights.push(w.clone() * c);
        }
    }
    let coupled = Measure::with_tolerance(SampleSpace::new(4 * n)?, weights, 1e-9)?;
    for spin in Spin::BOTH {
        let a = Event::from_predicate(4 * n, |k| (k % 4 < 2) == (spin == Spin::Up));
        let b = Event::from_predicate(4 * n, |k| (k % 2 == 0) == (spin == Spin::Up));
        if !events_equivalent(&coupled, &a, &b, tol.tol)? {
            let pa = coupled.probability(&a)?;
            let pab = coupled.probability(&a.intersection(&b)?)?;
            return Ok(Some(Witness {
                setting: s,
                other_setting: Some(s2),
                station: Some(station),
                lambda: None,
                discrepancy: (pa - pab).abs().to_f64(),
                detail: format!("local {spin} events are not equivalent across remote axes"),
            }));
        }
    }
    Ok(None)
}

/// `P(a ∩ b | F_S) = P(a | F_S) · P(b | F_S)` for every setting and outcome.
pub fn check_passive_locality<S: Scalar>(
    model: &HiddenVariableModel<S>,
    station1_axes: &[Axis],
    station2_axes: &[Axis],
    tol: &Tolerances,
) -> Result<LocalityVerdict> {
    let i = resolve_all(model, Station::One, station1_axes)?;
    let j = resolve_all(model, Station::Two, station2_axes)?;
    for &si in &i {
        for &sj in &j {
            if let Some(w) = passive_witness(model, SettingIndex::new(si, sj), tol)? {
                return Ok(LocalityVerdict::violated(LocalityCondition::PassiveLocality, w));
            }
        }
    }
    Ok(LocalityVerdict::holding(LocalityCondition::PassiveLocality))
}

fn passive_witness<S: Scalar>(
    model: &HiddenVariableModel<S>,
    s: SettingIndex,
    tol: &Tolerances,
) -> Result<Option<Witness>> {
    let space = enlarged_space_at(model, s)?;
    let cond = |e: &Event| conditional_probability(&space.measure, e, &space.source);
    for a in Spin::BOTH {
        let at1 = cond(&space.station_event(Station::One, a))?;
        for b in Spin::BOTH {
            let at2 = cond(&space.station_event(Station::Two, b))?;
            let both = cond(&space.outcome_event(a, b))?;
            for lambda in 0..space.lambda_count() {
                let joint = both.on_cell(lambda);
                let product = at1.on_cell(lambda).clone() * at2.on_cell(lambda).clone();
                if !joint.near(&product, tol.tol) {
                    return Ok(Some(Witness {
                        setting: s,
                        other_setting: None,
                        station: None,
                        lambda: Some(lambda),
                        discrepancy: (joint.clone() - product.clone()).abs().to_f64(),
                        detail: format!(
                            "P({a} and {b} | lambda) = {joint} but the product of marginals is {product}"
                        ),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// The preparation event `A₁S ⊆ Λ` whose indicator equals the λ-conditional
/// probability of "up" at station 1, for equal axes at both stations.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicEvent<S> {
    pub axis: Axis,
    pub setting: SettingIndex,
    /// `A₁S` as an event over Λ.
    pub members: Event,
    /// `P(up at 1 | λ)` per λ; each entry is 0 or 1.
    pub conditional: Vec<S>,
    /// `P(A₁S)`.
    pub probability: S,
    /// `P(up at 1)` in the enlarged space of `(axis, axis)`.
    pub up_probability: S,
}

/// Extracts `A₁S` at `axis`.
///
/// Refuses with [`Error::Precondition`] when passive locality or perfect
/// anticorrelation fails at `(axis, axis)`, and with [`Error::Inconsistent`]
/// when some λ-conditional probability is neither 0 nor 1.
pub fn extract_deterministic_event<S: Scalar>(
    model: &HiddenVariableModel<S>,
    axis: &Axis,
    tol: &Tolerances,
) -> Result<DeterministicEvent<S>> {
    let s = model.resolve_shared(core::slice::from_ref(axis))?[0];
    if let Some(witness) = passive_witness(model, s, tol)? {
        return Err(Error::Precondition {
            condition: LocalityCondition::PassiveLocality,
            witness,
        });
    }
    let opposite = opposite_mass(&joint_at(model, s));
    if !opposite.near(&S::one(), tol.tol) {
        return Err(Error::Precondition {
            condition: LocalityCondition::Anticorrelation,
            witness: Witness {
                setting: s,
                other_setting: None,
                station: None,
                lambda: None,
                discrepancy: (S::one() - opposite.clone()).abs().to_f64(),
                detail: format!("opposite outcomes carry mass {opposite}, not 1"),
            },
        });
    }

    let space = enlarged_space_at(model, s)?;
    let up1 = space.station_event(Station::One, Spin::Up);
    let cond = conditional_probability(&space.measure, &up1, &space.source)?;
    let mut conditional = Vec::with_capacity(space.lambda_count());
    for lambda in 0..space.lambda_count() {
        let v = cond.on_cell(lambda);
        let snapped = if v.near(&S::zero(), tol.det) {
            S::zero()
        } else if v.near(&S::one(), tol.det) {
            S::one()
        } else {
            return Err(Error::Inconsistent {
                lambda,
                value: v.to_f64(),
            });
        };
        conditional.push(snapped);
    }
    let members = Event::from_predicate(space.lambda_count(), |l| conditional[l].is_one());
    let probability = model.prior().probability(&members)?;
    let up_probability = space.measure.probability(&up1)?;
    verify_extraction(&space, &members, &up1, &probability, &up_probability, tol)?;
    Ok(DeterministicEvent {
        axis: *axis,
        setting: s,
        members,
        conditional,
        probability,
        up_probability,
    })
}

/// The identities every extracted event is checked against, in order.
pub const EXTRACTION_CHECKS: [&str; 6] = [
    "P(A1S) = P(up at 1)",
    "E[1_A1S] = P(up at 1)",
    "P(up at 1 and A1S | F_S) = P(up at 1 | F_S) on A1S, 0 elsewhere",
    "P(up at 1 and A1S | F_S) = 1_A1S",
    "{up at 1} equivalent to A1S",
    "{down at 2} equivalent to A1S",
];

/// `P(A₁S) = P(up at 1)`, `P(up at 1 ∩ A₁S | F_S) = 1_{A₁S}`, and the events
/// {up at 1}, {down at 2} and A₁S are pairwise equivalent.
fn verify_extraction<S: Scalar>(
    space: &EnlargedSpace<S>,
    members: &Event,
    up1: &Event,
    probability: &S,
    up_probability: &S,
    tol: &Tolerances,
) -> Result<()> {
    let lifted = space.lift(members)?;
    let indicator = MeasurableFunction::indicator(&lifted, space.source.clone())?;
    let checks = [
        (EXTRACTION_CHECKS[0], probability.near(up_probability, tol.tol)),
        (
            EXTRACTION_CHECKS[1],
            expectation(&space.measure, &indicator)?.near(up_probability, tol.tol),
        ),
        (
            EXTRACTION_CHECKS[2],
            intersection_localization_check(&space.measure, up1, &lifted, &space.source, tol.tol)?,
        ),
        (
            EXTRACTION_CHECKS[3],
            conditional_probability(&space.measure, &up1.intersection(&lifted)?, &space.source)?
                .agrees_with(&indicator, tol.det),
        ),
        (
            EXTRACTION_CHECKS[4],
            events_equivalent(&space.measure, up1, &lifted, tol.tol)?,
        ),
        (
            EXTRACTION_CHECKS[5],
            events_equivalent(
                &space.measure,
                &space.station_event(Station::Two, Spin::Down),
                &lifted,
                tol.tol,
            )?,
        ),
    ];
    match checks.iter().find(|(_, ok)| !ok) {
        Some((name, _)) => Err(Error::Verification(String::from(*name))),
        None => Ok(()),
    }
}

/// The verdict together with the events extracted for each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicVerdict<S> {
    pub verdict: LocalityVerdict,
    pub events: Vec<DeterministicEvent<S>>,
}

/// Holds when [`extract_deterministic_event`] succeeds at every axis.
///
/// Perfect anticorrelation on `axes` is a precondition and its failure is an
/// error; failures of passive locality or of the {0, 1} dichotomy make the
/// verdict fail.
pub fn check_deterministic_passive_locality<S: Scalar>(
    model: &HiddenVariableModel<S>,
    axes: &[Axis],
    tol: &Tolerances,
) -> Result<DeterministicVerdict<S>> {
    for (k, s) in model.resolve_shared(axes)?.into_iter().enumerate() {
        let opposite = opposite_mass(&joint_at(model, s));
        if !opposite.near(&S::one(), tol.tol) {
            return Err(Error::Precondition {
                condition: LocalityCondition::Anticorrelation,
                witness: Witness {
                    setting: s,
                    other_setting: None,
                    station: None,
                    lambda: None,
                    discrepancy: (S::one() - opposite.clone()).abs().to_f64(),
                    detail: format!("axis {} has opposite-outcome mass {opposite}", axes[k]),
                },
            });
        }
    }
    debug_assert!(anticorrelation_check(model, axes, tol.tol)?);

    let mut events = Vec::with_capacity(axes.len());
    for axis in axes {
        match extract_deterministic_event(model, axis, tol) {
            Ok(e) => events.push(e),
            Err(Error::Precondition { witness, .. }) => {
                let s = witness.setting;
                return Ok(DeterministicVerdict {
                    verdict: LocalityVerdict::violated(
                        LocalityCondition::DeterministicPassiveLocality,
                        undetermined_witness(model, s, Some(witness))?,
                    ),
                    events,
                });
            }
            Err(Error::Inconsistent { .. }) => {
                let s = model.resolve_shared(core::slice::from_ref(axis))?[0];
                return Ok(DeterministicVerdict {
                    verdict: LocalityVerdict::violated(
                        LocalityCondition::DeterministicPassiveLocality,
                        undetermined_witness(model, s, None)?,
                    ),
                    events,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(DeterministicVerdict {
        verdict: LocalityVerdict::holding(LocalityCondition::DeterministicPassiveLocality),
        events,
    })
}

/// Reports the λ whose conditional probability of "up" at station 1 is
/// farthest from {0, 1}.
fn undetermined_witness<S: Scalar>(
    model: &HiddenVariableModel<S>,
    s: SettingIndex,
    cause: Option<Witness>,
) -> Result<Witness> {
    let cond = conditional_up(model, Station::One, s)?;
    let (lambda, value) = (0..model.lambda_count())
        .filter(|&l| !model.prior().weight(l).is_zero())
        .map(|l| (l, cond.on_cell(l).to_f64()))
        .fold((0, 0.0f64), |best, (l, v)| {
            if v.min(1.0 - v) > best.1.min(1.0 - best.1) {
                (l, v)
            } else {
                best
            }
        });
    let mut detail = format!("P(up at 1 | lambda {lambda}) = {value}, not an indicator");
    if let Some(c) = cause {
        detail = format!("{detail}; {c}");
    }
    Ok(Witness {
        setting: s,
        other_setting: None,
        station: Some(Station::One),
        lambda: Some(lambda),
        discrepancy: value.min(1.0 - value),
        detail,
    })
}

/// Active locality, passive locality and perfect anticorrelation on the axes
/// declared at both stations: the premises under which CHSH is bounded by 2.
pub fn satisfies_theorem_premises<S: Scalar>(
    model: &HiddenVariableModel<S>,
    tol: &Tolerances,
) -> Result<bool> {
    let axes1 = model.axes(Station::One).to_vec();
    let axes2 = model.axes(Station::Two).to_vec();
    let shared: Vec<Axis> = axes1
        .iter()
        .copied()
        .filter(|a| model.resolve_axis(Station::Two, a).is_ok())
        .collect();
    Ok(check_active_locality(model, &axes1, &axes2, tol)?.holds
        && check_passive_locality(model, &axes1, &axes2, tol)?.holds
        && anticorrelation_check(model, &shared, tol.tol)?)
}
