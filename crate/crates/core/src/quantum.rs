//! The singlet state's joint outcome distribution.
//!
//! [`singlet_joint`] is the closed form `p(a, b) = (1 − a·b·(μ·ν)) / 4`.
//! [`density_matrix_oracle`] computes the same numbers independently as
//! `⟨ψ⁻| Π_a(μ) ⊗ Π_b(ν) |ψ⁻⟩` with explicit 4×4 complex matrices.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::model::{Axis, HiddenVariableModel, JointDistribution, SettingPair, Spin, OUTCOMES};
use crate::prob::Measure;
use crate::scalar::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumJoint {
    pub joint: JointDistribution<f64>,
    pub settings: SettingPair,
}

pub fn singlet_joint(s: &SettingPair) -> QuantumJoint {
    let c = s.mu.dot(&s.nu).clamp(-1.0, 1.0);
    let same = (1.0 - c) / 4.0;
    let opposite = (1.0 + c) / 4.0;
    QuantumJoint {
        joint: JointDistribution::new([same, opposite, opposite, same])
            .expect("clamped singlet entries are a distribution"),
        settings: *s,
    }
}

/// `E(μ, ν) = −μ·ν`.
pub fn singlet_correlation(s: &SettingPair) -> f64 {
    -s.mu.dot(&s.nu).clamp(-1.0, 1.0)
}

type Mat2 = [[Complex64; 2]; 2];
type Mat4 = [[Complex64; 4]; 4];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `(I + sign · n·σ) / 2`, the projector onto spin `sign` along `n`.
fn spin_projector(n: &Axis, spin: Spin) -> Mat2 {
    let [x, y, z] = n.direction();
    let sign = spin.value() as f64;
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let pauli_x: Mat2 = [[zero, one], [one, zero]];
    let pauli_y: Mat2 = [[zero, c(0.0, -1.0)], [c(0.0, 1.0), zero]];
    let pauli_z: Mat2 = [[one, zero], [zero, -one]];
    let mut out = [[zero; 2]; 2];
    for r in 0..2 {
        for k in 0..2 {
            let identity = if r == k { one } else { zero };
            let n_sigma = pauli_x[r][k] * x + pauli_y[r][k] * y + pauli_z[r][k] * z;
            out[r][k] = (identity + n_sigma * sign) * 0.5;
        }
    }
    out
}

fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = [[c(0.0, 0.0); 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// `(|↑↓⟩ − |↓↑⟩)/√2` in the basis `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩` along ẑ.
fn singlet_vector() -> [Complex64; 4] {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    [c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)]
}

fn expectation_value(psi: &[Complex64; 4], op: &Mat4) -> Complex64 {
    let mut acc = c(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            acc += psi[i].conj() * op[i][j] * psi[j];
        }
    }
    acc
}

pub fn density_matrix_oracle(s: &SettingPair) -> QuantumJoint {
    let psi = singlet_vector();
    let mut p = [0.0; 4];
    for (k, (a, b)) in OUTCOMES.iter().enumerate() {
        let op = kron(&spin_projector(&s.mu, *a), &spin_projector(&s.nu, *b));
        // Rounding can leave entries a few ulps below zero.
        p[k] = expectation_value(&psi, &op).re.max(0.0);
    }
    QuantumJoint {
        joint: JointDistribution::with_tolerance(p, 1e-9).expect("projectors resolve the identity"),
        settings: *s,
    }
}

/// Coplanar axes `[μ, μ′, ν, ν′]` at 90°, 0°, 45° and 135° from ẑ.
///
/// With the minus sign on `E(μ′, ν′)` the CHSH left-hand side is 2√2.
pub fn chsh_optimal_axes() -> [Axis; 4] {
    [
        Axis::in_plane_deg(90.0),
        Axis::in_plane_deg(0.0),
        Axis::in_plane_deg(45.0),
        Axis::in_plane_deg(135.0),
    ]
}

/// The singlet prediction as a model with a single λ, defined at every pair
/// of the given axes.
pub fn singlet_model(station1_axes: Vec<Axis>, station2_axes: Vec<Axis>) -> crate::Result<HiddenVariableModel<f64>> {
    let pairs: Vec<(Axis, Axis)> = station1_axes
        .iter()
        .flat_map(|a| station2_axes.iter().map(move |b| (*a, *b)))
        .collect();
    let n2 = station2_axes.len();
    HiddenVariableModel::from_fn(Measure::dirac(1, 0)?, station1_axes, station2_axes, |s, _| {
        let (mu, nu) = pairs[s.station1 * n2 + s.station2];
        Ok(singlet_joint(&SettingPair::new(mu, nu)).joint)
    })
    .map(|m| m.with_axis_tolerance(Tolerances::DEFAULT.axis))
}
