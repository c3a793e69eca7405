//! Finite probability spaces.
//!
//! Sub-sigma-algebras are represented by the partitions that generate them.
//! On a finite space every sub-sigma-algebra is of that form, and a function
//! is measurable with respect to it exactly when it is constant on every cell.
//!
//! Conditional probability on a cell of probability zero is defined as 0.
//! Any value is correct almost surely; 0 keeps results deterministic.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar, Tolerances};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSpace {
    size: usize,
    labels: Option<Vec<String>>,
}

impl SampleSpace {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidSpace("a sample space needs at least one outcome".into()));
        }
        Ok(SampleSpace { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidSpace("a sample space needs at least one outcome".into()));
        }
        let distinct: BTreeSet<&str> = labels.iter().map(String::as_str).collect();
        if distinct.len() != labels.len() {
            return Err(Error::InvalidSpace("outcome labels must be distinct".into()));
        }
        Ok(SampleSpace {
            size: labels.len(),
            labels: Some(labels),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.as_ref()?.get(index).map(String::as_str)
    }

    pub fn full(&self) -> Event {
        Event::full(self.size)
    }

    pub fn empty(&self) -> Event {
        Event::empty(self.size)
    }
}

/// A set of outcome indices of a space of known size.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    size: usize,
    members: BTreeSet<usize>,
}

impl Event {
    pub fn new(size: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&index) = members.iter().find(|&&i| i >= size) {
            return Err(Error::IndexOutOfRange { index, size });
        }
        Ok(Event { size, members })
    }

    pub fn empty(size: usize) -> Self {
        Event {
            size,
            members: BTreeSet::new(),
        }
    }

    pub fn full(size: usize) -> Self {
        Event {
            size,
            members: (0..size).collect(),
        }
    }

    pub fn singleton(size: usize, index: usize) -> Result<Self> {
        Event::new(size, [index])
    }

    pub fn from_predicate(size: usize, mut pred: impl FnMut(usize) -> bool) -> Self {
        Event {
            size,
            members: (0..size).filter(|&i| pred(i)).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.contains(&index)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn same_space(&self, other: &Event) -> Result<()> {
        if self.size != other.size {
            return Err(Error::Dimension {
                expected: self.size,
                found: other.size,
            });
        }
        Ok(())
    }

    pub fn intersection(&self, other: &Event) -> Result<Event> {
        self.same_space(other)?;
        Ok(Event {
            size: self.size,
            members: self.members.intersection(&other.members).copied().collect(),
        })
    }

    pub fn union(&self, other: &Event) -> Result<Event> {
        self.same_space(other)?;
        Ok(Event {
            size: self.size,
            members: self.members.union(&other.members).copied().collect(),
        })
    }

    pub fn complement(&self) -> Event {
        Event::from_predicate(self.size, |i| !self.members.contains(&i))
    }

    pub fn is_disjoint(&self, other: &Event) -> Result<bool> {
        self.same_space(other)?;
        Ok(self.members.is_disjoint(&other.members))
    }

    pub fn is_subset(&self, other: &Event) -> Result<bool> {
        self.same_space(other)?;
        Ok(self.members.is_subset(&other.members))
    }
}

/// Nonnegative weights, one per outcome, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure<S> {
    space: SampleSpace,
    weights: Vec<S>,
}

impl<S: Scalar> Measure<S> {
    /// Checks nonnegativity and normalization within `Tolerances::DEFAULT.norm`.
    pub fn new(space: SampleSpace, weights: Vec<S>) -> Result<Self> {
        Self::with_tolerance(space, weights, Tolerances::DEFAULT.norm)
    }

    pub fn with_tolerance(space: SampleSpace, weights: Vec<S>, norm_tol: f64) -> Result<Self> {
        if weights.len() != space.size() {
            return Err(Error::Dimension {
                expected: space.size(),
                found: weights.len(),
            });
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| **w < S::zero()) {
            return Err(Error::InvalidMeasure(format!("weight {i} is negative ({w})")));
        }
        let total: S = scalar::sum(&weights);
        if !total.near(&S::one(), norm_tol) {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, not 1")));
        }
        Ok(Measure { space, weights })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        let space = SampleSpace::new(size)?;
        let w = S::one() / S::from_ratio(size as i64, 1);
        let weights = vec![w; size];
        // Uniform weights in float mode can miss 1 by an ulp or two; the
        // default norm tolerance absorbs that.
        Self::new(space, weights)
    }

    /// Point mass at `index`.
    pub fn dirac(size: usize, index: usize) -> Result<Self> {
        let space = SampleSpace::new(size)?;
        if index >= size {
            return Err(Error::IndexOutOfRange { index, size });
        }
        let mut weights = vec![S::zero(); size];
        weights[index] = S::one();
        Self::new(space, weights)
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn size(&self) -> usize {
        self.space.size()
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> &S {
        &self.weights[index]
    }

    fn check_event(&self, event: &Event) -> Result<()> {
        if event.size() != self.size() {
            return Err(Error::Dimension {
                expected: self.size(),
                found: event.size(),
            });
        }
        Ok(())
    }

    pub fn probability(&self, event: &Event) -> Result<S> {
        self.check_event(event)?;
        Ok(event
            .members()
            .fold(S::zero(), |acc, i| acc + self.weights[i].clone()))
    }

    /// Indices of the cells of `part` that have probability zero.
    pub fn null_cells(&self, part: &Partition) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (c, cell) in part.cells().iter().enumerate() {
            if self.probability(cell)?.is_zero() {
                out.push(c);
            }
        }
        Ok(out)
    }
}

/// Disjoint nonempty cells covering the whole space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    size: usize,
    cells: Vec<Event>,
    cell_of: Vec<usize>,
}

impl Partition {
    pub fn new(size: usize, cells: Vec<Event>) -> Result<Self> {
        let mut cell_of = vec![usize::MAX; size];
        for (c, cell) in cells.iter().enumerate() {
            if cell.size() != size {
                return Err(Error::Dimension {
                    expected: size,
                    found: cell.size(),
                });
            }
            if cell.is_empty() {
                return Err(Error::InvalidPartition(format!("cell {c} is empty")));
            }
            for i in cell.members() {
                if cell_of[i] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "outcome {i} lies in cells {} and {c}",
                        cell_of[i]
                    )));
                }
                cell_of[i] = c;
            }
        }
        if let Some(i) = cell_of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::InvalidPartition(format!("outcome {i} is not covered")));
        }
        Ok(Partition {
            size,
            cells,
            cell_of,
        })
    }

    /// Groups outcomes by key. Cells are ordered by key.
    pub fn from_keys<K: Ord>(keys: &[K]) -> Result<Self> {
        let distinct: BTreeSet<&K> = keys.iter().collect();
        let cells = distinct
            .into_iter()
            .map(|k| Event::from_predicate(keys.len(), |i| &keys[i] == k))
            .collect();
        Partition::new(keys.len(), cells)
    }

    /// The single-cell partition generating {∅, Ω}.
    pub fn trivial(size: usize) -> Self {
        Partition {
            size,
            cells: vec![Event::full(size)],
            cell_of: vec![0; size],
        }
    }

    /// The partition into singletons, generating the full power set.
    pub fn discrete(size: usize) -> Self {
        Partition {
            size,
            cells: (0..size)
                .map(|i| Event::from_predicate(size, |j| j == i))
                .collect(),
            cell_of: (0..size).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn cells(&self) -> &[Event] {
        &self.cells
    }

    pub fn cell_of(&self, index: usize) -> usize {
        self.cell_of[index]
    }

    /// Ok if `event` is a union of cells, i.e. belongs to the generated
    /// sigma algebra.
    pub fn check_measurable(&self, event: &Event) -> Result<()> {
        if event.size() != self.size {
            return Err(Error::Dimension {
                expected: self.size,
                found: event.size(),
            });
        }
        for (c, cell) in self.cells.iter().enumerate() {
            let inside = cell.members().filter(|&i| event.contains(i)).count();
            if inside != 0 && inside != cell.len() {
                return Err(Error::NotPartitionMeasurable { cell: c });
            }
        }
        Ok(())
    }
}

/// A real function on the outcomes that is constant on every cell of
/// `constant_on`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurableFunction<S> {
    values: Vec<S>,
    constant_on: Partition,
}

impl<S: Scalar> MeasurableFunction<S> {
    pub fn new(values: Vec<S>, constant_on: Partition) -> Result<Self> {
        if values.len() != constant_on.size() {
            return Err(Error::Dimension {
                expected: constant_on.size(),
                found: values.len(),
            });
        }
        for (c, cell) in constant_on.cells().iter().enumerate() {
            let mut it = cell.members();
            if let Some(first) = it.next() {
                if it.any(|i| values[i] != values[first]) {
                    return Err(Error::NotMeasurable { cell: c });
                }
            }
        }
        Ok(MeasurableFunction {
            values,
            constant_on,
        })
    }

    pub fn constant(value: S, constant_on: Partition) -> Self {
        MeasurableFunction {
            values: vec![value; constant_on.size()],
            constant_on,
        }
    }

    /// The indicator of an event that is a union of cells of `constant_on`.
    pub fn indicator(event: &Event, constant_on: Partition) -> Result<Self> {
        constant_on.check_measurable(event)?;
        let values = (0..event.size())
            .map(|i| if event.contains(i) { S::one() } else { S::zero() })
            .collect();
        Ok(MeasurableFunction {
            values,
            constant_on,
        })
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn value(&self, index: usize) -> &S {
        &self.values[index]
    }

    /// The common value on cell `cell`.
    pub fn on_cell(&self, cell: usize) -> &S {
        let first = self.constant_on.cells()[cell]
            .members()
            .next()
            .expect("partition cells are nonempty");
        &self.values[first]
    }

    pub fn partition(&self) -> &Partition {
        &self.constant_on
    }

    /// True when `self` and `other` agree at every outcome, in the arithmetic
    /// mode of `S`.
    pub fn agrees_with(&self, other: &MeasurableFunction<S>, tol: f64) -> bool {
        self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.near(b, tol))
    }
}

pub fn probability<S: Scalar>(m: &Measure<S>, a: &Event) -> Result<S> {
    m.probability(a)
}

/// `P(a | σ(part))`: on each cell `C` of positive probability the constant
/// `P(a ∩ C) / P(C)`; zero on null cells.
pub fn conditional_probability<S: Scalar>(
    m: &Measure<S>,
    a: &Event,
    part: &Partition,
) -> Result<MeasurableFunction<S>> {
    if part.size() != m.size() {
        return Err(Error::Dimension {
            expected: m.size(),
            found: part.size(),
        });
    }
    m.check_event(a)?;
    let mut values = vec![S::zero(); m.size()];
    for cell in part.cells() {
        let p_cell = m.probability(cell)?;
        if p_cell.is_zero() {
            continue;
        }
        let p_joint = cell
            .members()
            .filter(|&i| a.contains(i))
            .fold(S::zero(), |acc, i| acc + m.weights[i].clone());
        let ratio = p_joint / p_cell;
        for i in cell.members() {
            values[i] = ratio.clone();
        }
    }
    Ok(MeasurableFunction {
        values,
        constant_on: part.clone(),
    })
}

/// `Σ f(ω) P({ω})`.
pub fn expectation<S: Scalar>(m: &Measure<S>, f: &MeasurableFunction<S>) -> Result<S> {
    if f.values().len() != m.size() {
        return Err(Error::Dimension {
            expected: m.size(),
            found: f.values().len(),
        });
    }
    Ok(f
        .values()
        .iter()
        .zip(m.weights())
        .fold(S::zero(), |acc, (v, w)| acc + v.clone() * w.clone()))
}

/// Additivity of conditional probability over pairwise disjoint events:
/// `P(∪ Aᵢ | F) = Σ P(Aᵢ | F)` at every outcome.
pub fn countable_additivity_check<S: Scalar>(
    m: &Measure<S>,
    parts: &[Event],
    partn: &Partition,
    tol: f64,
) -> Result<bool> {
    for (i, a) in parts.iter().enumerate() {
        m.check_event(a)?;
        for (j, b) in parts.iter().enumerate().skip(i + 1) {
            if !a.is_disjoint(b)? {
                return Err(Error::NotDisjoint {
                    first: i,
                    second: j,
                });
            }
        }
    }
    let mut union = Event::empty(m.size());
    let mut summed = vec![S::zero(); m.size()];
    for a in parts {
        union = union.union(a)?;
        let cond = conditional_probability(m, a, partn)?;
        for (acc, v) in summed.iter_mut().zip(cond.values()) {
            *acc = acc.clone() + v.clone();
        }
    }
    let whole = conditional_probability(m, &union, partn)?;
    Ok(whole
        .values()
        .iter()
        .zip(&summed)
        .all(|(a, b)| a.near(b, tol)))
}

/// For `cell_event` in the generated sigma algebra, `P(a ∩ cell_event | F)`
/// equals `P(a | F)` inside `cell_event` and zero outside.
pub fn intersection_localization_check<S: Scalar>(
    m: &Measure<S>,
    a: &Event,
    cell_event: &Event,
    part: &Partition,
    tol: f64,
) -> Result<bool> {
    part.check_measurable(cell_event)?;
    let restricted = conditional_probability(m, &a.intersection(cell_event)?, part)?;
    let full = conditional_probability(m, a, part)?;
    Ok((0..m.size()).all(|i| {
        let expected = if cell_event.contains(i) {
            full.value(i).clone()
        } else {
            S::zero()
        };
        restricted.value(i).near(&expected, tol)
    }))
}

/// `P(a ∩ b) = P(a) = P(b)`.
pub fn events_equivalent<S: Scalar>(
    m: &Measure<S>,
    a: &Event,
    b: &Event,
    tol: f64,
) -> Result<bool> {
    let pa = m.probability(a)?;
    let pb = m.probability(b)?;
    let pab = m.probability(&a.intersection(b)?)?;
    Ok(pab.near(&pa, tol) && pab.near(&pb, tol) && pa.near(&pb, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn measure(weights: &[f64]) -> Measure<f64> {
        Measure::new(SampleSpace::new(weights.len()).unwrap(), weights.to_vec()).unwrap()
    }

    #[test]
    fn probability_examples() {
        let m = Measure::<f64>::uniform(4).unwrap();
        assert_eq!(m.probability(&Event::new(4, [0, 1]).unwrap()).unwrap(), 0.5);
        assert_eq!(m.probability(&Event::empty(4)).unwrap(), 0.0);

        let m = Measure::new(
            SampleSpace::new(4).unwrap(),
            vec![r(1, 10), r(2, 10), r(3, 10), r(4, 10)],
        )
        .unwrap();
        assert_eq!(
            m.probability(&Event::new(4, [1, 3]).unwrap()).unwrap(),
            r(6, 10)
        );
    }

    #[test]
    fn probability_rejects_foreign_events() {
        let m = Measure::<f64>::uniform(4).unwrap();
        assert!(matches!(
            m.probability(&Event::full(5)),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            Event::new(4, [4]),
            Err(Error::IndexOutOfRange { index: 4, size: 4 })
        ));
    }

    #[test]
    fn measure_validation() {
        let space = SampleSpace::new(2).unwrap();
        assert!(Measure::new(space.clone(), vec![0.5, 0.6]).is_err());
        assert!(Measure::new(space.clone(), vec![1.5, -0.5]).is_err());
        assert!(Measure::new(space.clone(), vec![1.0]).is_err());
        assert!(Measure::new(space, vec![0.25, 0.75]).is_ok());
        assert!(SampleSpace::new(0).is_err());
        assert!(SampleSpace::with_labels(vec!["a".into(), "a".into()]).is_err());
    }

    #[test]
    fn partition_validation() {
        let a = Event::new(4, [0, 1]).unwrap();
        let b = Event::new(4, [1, 2, 3]).unwrap();
        assert!(Partition::new(4, vec![a.clone(), b]).is_err());
        assert!(Partition::new(4, vec![a.clone()]).is_err());
        assert!(Partition::new(4, vec![a, Event::new(4, [2, 3]).unwrap(), Event::empty(4)]).is_err());
        let p = Partition::from_keys(&['x', 'y', 'x', 'z']).unwrap();
        assert_eq!(p.cells().len(), 3);
        assert_eq!(p.cell_of(2), 0);
    }

    #[test]
    fn conditional_probability_examples() {
        let m = Measure::<f64>::uniform(4).unwrap();
        let part = Partition::from_keys(&[0, 0, 1, 1]).unwrap();

        let sure = conditional_probability(&m, &Event::full(4), &part).unwrap();
        assert!(sure.values().iter().all(|&v| v == 1.0));

        let never = conditional_probability(&m, &Event::empty(4), &part).unwrap();
        assert!(never.values().iter().all(|&v| v == 0.0));

        let a = Event::singleton(4, 0).unwrap();
        let f = conditional_probability(&m, &a, &part).unwrap();
        assert_eq!(f.values(), &[0.5, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn null_cells_get_zero() {
        let m = measure(&[0.5, 0.5, 0.0, 0.0]);
        let part = Partition::from_keys(&[0, 0, 1, 1]).unwrap();
        let f = conditional_probability(&m, &Event::full(4), &part).unwrap();
        assert_eq!(f.values(), &[1.0, 1.0, 0.0, 0.0]);
        assert_eq!(m.null_cells(&part).unwrap(), vec![1]);
    }

    #[test]
    fn expectation_examples() {
        let m = measure(&[0.1, 0.2, 0.3, 0.4]);
        let part = Partition::discrete(4);
        let one = MeasurableFunction::constant(1.0, part.clone());
        assert!((expectation(&m, &one).unwrap() - 1.0).abs() < 1e-15);

        let a = Event::new(4, [0, 3]).unwrap();
        let ind = MeasurableFunction::indicator(&a, part).unwrap();
        assert!((expectation(&m, &ind).unwrap() - 0.5).abs() < 1e-15);

        let coarse = Partition::from_keys(&[0, 1, 1, 0]).unwrap();
        let cond = conditional_probability(&m, &Event::new(4, [1, 3]).unwrap(), &coarse).unwrap();
        assert!((expectation(&m, &cond).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn measurable_function_must_respect_partition() {
        let part = Partition::from_keys(&[0, 0, 1]).unwrap();
        assert!(matches!(
            MeasurableFunction::new(vec![1.0, 2.0, 3.0], part.clone()),
            Err(Error::NotMeasurable { cell: 0 })
        ));
        assert!(MeasurableFunction::<Rational>::indicator(&Event::singleton(3, 0).unwrap(), part).is_err());
    }

    #[test]
    fn additivity_examples() {
        let m = Measure::<f64>::uniform(4).unwrap();
        let trivial = Partition::trivial(4);
        let parts = [Event::singleton(4, 0).unwrap(), Event::singleton(4, 2).unwrap()];
        assert!(countable_additivity_check(&m, &parts, &trivial, 1e-9).unwrap());

        let a = Event::new(4, [0, 3]).unwrap();
        let part = Partition::from_keys(&[0, 1, 0, 1]).unwrap();
        let both = [a.clone(), a.complement()];
        assert!(countable_additivity_check(&m, &both, &part, 1e-9).unwrap());

        let overlapping = [a.clone(), a];
        assert!(matches!(
            countable_additivity_check(&m, &overlapping, &part, 1e-9),
            Err(Error::NotDisjoint { first: 0, second: 1 })
        ));
    }

    #[test]
    fn localization_examples() {
        let m = measure(&[0.1, 0.2, 0.3, 0.4]);
        let part = Partition::from_keys(&[0, 0, 1, 1]).unwrap();
        let a = Event::new(4, [0, 2]).unwrap();
        assert!(intersection_localization_check(&m, &a, &Event::full(4), &part, 1e-12).unwrap());
        assert!(intersection_localization_check(&m, &a, &Event::empty(4), &part, 1e-12).unwrap());
        let first = Event::new(4, [0, 1]).unwrap();
        assert!(intersection_localization_check(&m, &a, &first, &part, 1e-12).unwrap());
        let split = Event::new(4, [0]).unwrap();
        assert!(matches!(
            intersection_localization_check(&m, &a, &split, &part, 1e-12),
            Err(Error::NotPartitionMeasurable { cell: 0 })
        ));
    }

    #[test]
    fn equivalence_examples() {
        let m = Measure::new(
            SampleSpace::new(4).unwrap(),
            vec![r(1, 4), r(1, 4), r(0, 1), r(1, 2)],
        )
        .unwrap();
        let a = Event::new(4, [0, 1]).unwrap();
        let b = Event::new(4, [0, 1, 2]).unwrap();
        assert!(events_equivalent(&m, &a, &a, 0.0).unwrap());
        assert!(events_equivalent(&m, &a, &b, 0.0).unwrap());
        assert!(events_equivalent(&m, &a.complement(), &b.complement(), 0.0).unwrap());
        let c = Event::new(4, [3]).unwrap();
        assert!(!events_equivalent(&m, &a, &c, 0.0).unwrap());
    }
}
