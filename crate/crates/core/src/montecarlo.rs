//! Seeded simulation of repeated runs.
//!
//! Each scheduled setting gets its own ChaCha8 stream: the generator is seeded
//! with `seed_from_u64(seed)` and switched to stream number = the setting's
//! position in the schedule. Runs are therefore reproducible whichever order
//! (or thread) the settings are sampled in.

use alloc::string::ToString;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::inequalities::{chsh, InequalityReport};
use crate::model::{cell_index, HiddenVariableModel, SettingPair, Spin};
use crate::quantum::singlet_joint;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct RunSchedule {
    pub settings: Vec<(SettingPair, u64)>,
    pub seed: u64,
}

impl RunSchedule {
    pub fn new(seed: u64) -> Self {
        RunSchedule {
            settings: Vec::new(),
            seed,
        }
    }

    pub fn with(mut self, setting: SettingPair, trials: u64) -> Self {
        self.settings.push((setting, trials));
        self
    }

    /// The same trial count at each setting.
    pub fn uniform(seed: u64, settings: &[SettingPair], trials: u64) -> Self {
        RunSchedule {
            settings: settings.iter().map(|s| (*s, trials)).collect(),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.settings.is_empty() {
            return Err(Error::Schedule("schedule has no settings".to_string()));
        }
        if let Some(k) = self.settings.iter().position(|(_, n)| *n == 0) {
            return Err(Error::Schedule(alloc::format!("setting {k} has zero trials")));
        }
        Ok(())
    }
}

/// What produces the outcomes.
#[derive(Debug)]
pub enum Source<'a, S> {
    Model(&'a HiddenVariableModel<S>),
    Singlet,
}

impl<S> Clone for Source<'_, S> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<S> Copy for Source<'_, S> {}

/// Counts in cell order ↑↑, ↑↓, ↓↑, ↓↓.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct OutcomeCounts {
    pub counts: [u64; 4],
}

impl OutcomeCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn get(&self, a: Spin, b: Spin) -> u64 {
        self.counts[cell_index(a, b)]
    }

    pub fn same(&self) -> u64 {
        self.counts[0] + self.counts[3]
    }

    pub fn opposite(&self) -> u64 {
        self.counts[1] + self.counts[2]
    }

    pub fn correlation(&self) -> Result<EmpiricalCorrelation> {
        EmpiricalCorrelation::from_counts(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalCorrelation {
    pub e_hat: f64,
    pub n: u64,
    /// `sqrt((1 − ê²)/n)`.
    pub std_err: f64,
}

impl EmpiricalCorrelation {
    pub fn from_counts(c: &OutcomeCounts) -> Result<Self> {
        let n = c.total();
        if n == 0 {
            return Err(Error::Schedule("no trials at this setting".to_string()));
        }
        let e_hat = (c.same() as f64 - c.opposite() as f64) / n as f64;
        let var = (1.0 - e_hat * e_hat).max(0.0) / n as f64;
        Ok(EmpiricalCorrelation {
            e_hat,
            n,
            std_err: libm::sqrt(var),
        })
    }
}

/// The generator for the setting at position `index` of a schedule.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform on `[0, 1)` from the top 53 bits of one draw.
pub fn uniform01(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Running sums of `weights`, plus the last index with positive weight.
struct Cdf {
    cumulative: Vec<f64>,
    last_positive: usize,
}

impl Cdf {
    fn new(weights: impl IntoIterator<Item = f64>) -> Self {
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (k, w) in weights.into_iter().enumerate() {
            acc += w;
            cumulative.push(acc);
            if w > 0.0 {
                last_positive = k;
            }
        }
        Cdf {
            cumulative,
            last_positive,
        }
    }

    /// First index whose running sum exceeds `u`; rounding shortfalls land
    /// on the last index with positive weight.
    fn invert(&self, u: f64) -> usize {
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.last_positive)
    }
}

/// Draws `trials` outcomes at one setting.
pub fn sample_setting<S: Scalar>(
    source: Source<'_, S>,
    setting: &SettingPair,
    trials: u64,
    rng: &mut impl RngCore,
) -> Result<OutcomeCounts> {
    let mut out = OutcomeCounts::default();
    match source {
        Source::Singlet => {
            let joint = singlet_joint(setting).joint;
            let cdf = Cdf::new(joint.probs().iter().copied());
            for _ in 0..trials {
                out.counts[cdf.invert(uniform01(rng))] += 1;
            }
        }
        Source::Model(model) => {
            let s = model.resolve(setting)?;
            let prior = Cdf::new(model.prior().weights().iter().map(Scalar::to_f64));
            let kernels: Vec<Cdf> = model
                .kernels_at(s)
                .iter()
                .map(|j| Cdf::new(j.probs().iter().map(Scalar::to_f64)))
                .collect();
            for _ in 0..trials {
                let lambda = prior.invert(uniform01(rng));
                out.counts[kernels[lambda].invert(uniform01(rng))] += 1;
            }
        }
    }
    Ok(out)
}

/// One [`OutcomeCounts`] per scheduled setting, in schedule order.
pub fn sample_runs<S: Scalar>(source: Source<'_, S>, schedule: &RunSchedule) -> Result<Vec<OutcomeCounts>> {
    schedule.validate()?;
    schedule
        .settings
        .iter()
        .enumerate()
        .map(|(k, (setting, trials))| {
            let mut rng = substream(schedule.seed, k as u64);
            sample_setting(source, setting, *trials, &mut rng)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalChsh {
    pub report: InequalityReport<f64>,
    pub correlations: [EmpiricalCorrelation; 4],
    /// Per-setting standard errors combined in quadrature.
    pub std_err: f64,
}

/// CHSH on estimated correlations; counts are for `(μ,ν), (μ,ν′), (μ′,ν),
/// (μ′,ν′)`.
pub fn empirical_chsh(counts: &[OutcomeCounts; 4], tol: f64) -> Result<EmpiricalChsh> {
    let mut correlations = [EmpiricalCorrelation {
        e_hat: 0.0,
        n: 0,
        std_err: 0.0,
    }; 4];
    for (slot, c) in correlations.iter_mut().zip(counts) {
        *slot = c.correlation()?;
    }
    let report = chsh(&correlations.map(|c| c.e_hat), tol);
    let std_err = libm::sqrt(correlations.iter().map(|c| c.std_err * c.std_err).sum());
    Ok(EmpiricalChsh {
        report,
        correlations,
        std_err,
    })
}

/// The four CHSH setting pairs for axes `[μ, μ′, ν, ν′]`, in the order
/// [`empirical_chsh`] expects.
pub fn chsh_settings(axes: &[crate::model::Axis; 4]) -> [SettingPair; 4] {
    let [mu, mu2, nu, nu2] = *axes;
    [(mu, nu), (mu, nu2), (mu2, nu), (mu2, nu2)].map(|(a, b)| SettingPair::new(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::two_lambda;
    use crate::model::Axis;
    use crate::quantum::chsh_optimal_axes;
    use crate::scalar::Rational;

    #[test]
    fn uniform_draws_stay_in_unit_interval() {
        let mut rng = substream(7, 0);
        for _ in 0..10_000 {
            let u = uniform01(&mut rng);
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn substreams_differ() {
        let a = substream(1, 0).next_u64();
        let b = substream(1, 1).next_u64();
        assert_ne!(a, b);
        assert_eq!(a, substream(1, 0).next_u64());
    }

    #[test]
    fn deterministic_model_fills_one_cell() {
        let m = two_lambda();
        let single = crate::model::HiddenVariableModel::<Rational>::from_fn(
            crate::prob::Measure::dirac(2, 1).unwrap(),
            m.axes(crate::model::Station::One).to_vec(),
            m.axes(crate::model::Station::Two).to_vec(),
            |s, l| Ok(m.kernel(s, l).clone()),
        )
        .unwrap();
        for seed in [0, 1, u64::MAX] {
            let schedule = RunSchedule::new(seed).with(SettingPair::new(Axis::Z, Axis::Z), 500);
            let c = sample_runs(Source::Model(&single), &schedule).unwrap();
            assert_eq!(c[0].counts, [0, 0, 500, 0]);
        }
    }

    #[test]
    fn singlet_equal_axes_never_agree() {
        let s = SettingPair::new(Axis::X, Axis::X);
        let c = sample_runs::<f64>(Source::Singlet, &RunSchedule::new(3).with(s, 100_000)).unwrap();
        assert_eq!(c[0].same(), 0);
        assert_eq!(c[0].total(), 100_000);
    }

    #[test]
    fn single_trial_has_zero_error() {
        let one = OutcomeCounts { counts: [0, 1, 0, 0] };
        let r = empirical_chsh(&[one; 4], 1e-9).unwrap();
        assert_eq!(r.std_err, 0.0);
        assert_eq!(r.correlations[0].e_hat, -1.0);
    }

    #[test]
    fn zero_trials_rejected() {
        let zero = OutcomeCounts::default();
        assert!(empirical_chsh(&[zero; 4], 1e-9).is_err());
        let s = SettingPair::new(Axis::Z, Axis::Z);
        assert!(sample_runs::<f64>(Source::Singlet, &RunSchedule::new(0).with(s, 0)).is_err());
    }

    #[test]
    fn optimal_axes_violate_empirically() {
        let schedule = RunSchedule::uniform(42, &chsh_settings(&chsh_optimal_axes()), 200_000);
        let counts = sample_runs::<f64>(Source::Singlet, &schedule).unwrap();
        let r = empirical_chsh(&[counts[0], counts[1], counts[2], counts[3]], 1e-9).unwrap();
        assert!((r.report.lhs - 2.0 * core::f64::consts::SQRT_2).abs() < 4.0 * r.std_err);
    }
}
