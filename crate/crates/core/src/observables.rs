//! Total and per-pattern expectation values of an eigenstate.
//!
//! Photon number and spin flip are split over patterns through the exact
//! inverse transforms `a = Σ_n u_{n,3} A_n` and `σ_z = Σ_n u_{n,2} A_n`:
//! the pattern index is carried by the annihilation-side operator, so the
//! components always sum to the total.

use serde::Serialize;

use crate::linalg::dot;
use crate::operators::{BasisIndex, PatternOperators, Primitives, Spin};
use crate::pattern::PatternBasis;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateObservables {
    pub energy: f64,
    /// `E^(n) = λ_n ‖A_n ψ‖²`.
    pub pattern_energies: [f64; 3],
    pub photon_total: f64,
    pub photon_by_pattern: [f64; 3],
    pub sigma_x_total: f64,
    pub sigma_x_by_pattern: [f64; 3],
}

impl StateObservables {
    /// Largest violation among the three sum rules.
    pub fn sum_rule_error(&self) -> f64 {
        let e = (self.pattern_energies.iter().sum::<f64>() - self.energy).abs();
        let p = (self.photon_by_pattern.iter().sum::<f64>() - self.photon_total).abs();
        let s = (self.sigma_x_by_pattern.iter().sum::<f64>() - self.sigma_x_total).abs();
        e.max(p).max(s)
    }
}

pub fn pattern_energies(state: &[f64], basis: &PatternBasis, ops: &PatternOperators) -> [f64; 3] {
    std::array::from_fn(|n| {
        let v = ops.get(n).apply(state);
        basis.lambdas[n] * dot(&v, &v)
    })
}

/// `(⟨a†a⟩, [u_{n,3} ⟨a† A_n⟩])`.
pub fn photon_decomposition(
    state: &[f64],
    basis: &PatternBasis,
    ops: &PatternOperators,
    primitives: &Primitives,
) -> (f64, [f64; 3]) {
    let total = primitives.number.expectation(state);
    let a_psi = primitives.a.apply(state);
    let parts = std::array::from_fn(|n| basis.rows[n][2] * dot(&a_psi, &ops.get(n).apply(state)));
    (total, parts)
}

/// `(⟨σ_x⟩, [u_{n,2} ⟨(−iσ_y) A_n⟩])`, using `(−iσ_y) σ_z = σ_x`.
pub fn sigma_x_decomposition(
    state: &[f64],
    basis: &PatternBasis,
    ops: &PatternOperators,
    primitives: &Primitives,
) -> (f64, [f64; 3]) {
    let total = primitives.sigma_x.expectation(state);
    // ⟨ψ|(iσ_y)ᵀ A_n|ψ⟩ = (iσ_y ψ) · (A_n ψ)
    let isy_psi = primitives.i_sigma_y.apply(state);
    let parts = std::array::from_fn(|n| basis.rows[n][1] * dot(&isy_psi, &ops.get(n).apply(state)));
    (total, parts)
}

pub fn state_observables(
    energy: f64,
    state: &[f64],
    basis: &PatternBasis,
    ops: &PatternOperators,
    primitives: &Primitives,
) -> StateObservables {
    let (photon_total, photon_by_pattern) = photon_decomposition(state, basis, ops, primitives);
    let (sigma_x_total, sigma_x_by_pattern) = sigma_x_decomposition(state, basis, ops, primitives);
    StateObservables {
        energy,
        pattern_energies: pattern_energies(state, basis, ops),
        photon_total,
        photon_by_pattern,
        sigma_x_total,
        sigma_x_by_pattern,
    }
}

/// `⟨ψ|(a + a†) σ_z|ψ⟩ = ∂E/∂g` for an eigenstate.
pub fn coupling_expectation(state: &[f64], primitives: &Primitives) -> f64 {
    let z_psi = primitives.sigma_z.apply(state);
    let a_psi = primitives.a.apply(state);
    let a_z_psi = primitives.a.apply(&z_psi);
    // ⟨ψ|a σ_z|ψ⟩ + ⟨ψ|a† σ_z|ψ⟩ = ψ·(a σ_z ψ) + (a ψ)·(σ_z ψ)
    dot(state, &a_z_psi) + dot(&a_psi, &z_psi)
}

/// Up-spin branch of an eigenstate and its pattern components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WavefunctionSlice {
    pub g: f64,
    pub level: usize,
    /// `ψ(↑, m)` for `m = 0..=N`.
    pub amplitudes: Vec<f64>,
    /// `w_n(↑, m)` with `w_n = λ_n A_nᵀ A_n ψ`, not divided by `E`.
    pub pattern_components: [Vec<f64>; 3],
    pub energy: f64,
}

impl WavefunctionSlice {
    /// Largest `|Σ_n w_n(↑,m) − E ψ(↑,m)|` over the branch.
    pub fn eigen_identity_error(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(m, psi)| {
                let w: f64 = self.pattern_components.iter().map(|c| c[m]).sum();
                (w - self.energy * psi).abs()
            })
            .fold(0.0, f64::max)
    }
}

pub fn wavefunction_slice(
    state: &[f64],
    energy: f64,
    basis: &PatternBasis,
    ops: &PatternOperators,
    level: usize,
    g: f64,
) -> WavefunctionSlice {
    let n_max = ops.get(0).n_max();
    let up = |v: &[f64]| -> Vec<f64> {
        (0..=n_max)
            .map(|m| v[BasisIndex::new(Spin::Up, m).flat(n_max)])
            .collect()
    };
    let pattern_components = std::array::from_fn(|n| {
        let op = ops.get(n);
        let a_psi = op.apply(state);
        let w = op.matrix().transpose().matvec(&a_psi);
        let w: Vec<f64> = w.iter().map(|x| basis.lambdas[n] * x).collect();
        up(&w)
    });
    WavefunctionSlice {
        g,
        level,
        amplitudes: up(state),
        pattern_components,
        energy,
    }
}
