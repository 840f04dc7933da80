//! Low-lying eigenpairs of the Hamiltonian, optionally solved per parity
//! sector.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, symmetric_eigen, symmetric_eigen_blocked, DenseMatrix};
use crate::operators::{build_hamiltonian_direct, BasisIndex, OperatorMatrix, Primitives, Spin};
use crate::params::ModelParams;
use crate::pattern::canonical_sign;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSolution {
    /// Ascending.
    pub energies: Vec<f64>,
    /// Orthonormal eigenvectors over the `|σ_z, m⟩` basis, largest-magnitude
    /// entry positive.
    pub states: Vec<Vec<f64>>,
    /// `max_i ‖H ψ_i − E_i ψ_i‖`.
    pub residual_norm: f64,
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Largest deviation of `⟨ψ_i|ψ_j⟩` from `δ_ij`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.states.iter().enumerate() {
            for (j, b) in self.states.iter().enumerate().skip(i) {
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(a, b) - expected).abs());
            }
        }
        worst
    }
}

fn residual(h: &DenseMatrix, energies: &[f64], states: &[Vec<f64>]) -> f64 {
    energies
        .iter()
        .zip(states)
        .map(|(&e, psi)| {
            let r: Vec<f64> = h.matvec(psi).iter().zip(psi).map(|(hp, p)| hp - e * p).collect();
            norm(&r)
        })
        .fold(0.0, f64::max)
}

fn check_k(k: usize, dim: usize) -> Result<()> {
    if k == 0 || k > dim {
        return Err(Error::InvalidParams(format!(
            "requested {k} levels from a space of dimension {dim}"
        )));
    }
    Ok(())
}

/// Lowest `k` eigenpairs of a symmetric operator by a full dense solve of
/// each decoupled block (at `g = 0` these are the `{↑m, ↓m}` pairs).
pub fn eigensolve(h: &OperatorMatrix, k: usize) -> Result<EigenSolution> {
    check_k(k, h.dim())?;
    let (mut energies, mut states) = symmetric_eigen_blocked(h.matrix())?;
    energies.truncate(k);
    states.truncate(k);
    for s in &mut states {
        canonical_sign(s);
    }
    let residual_norm = residual(h.matrix(), &energies, &states);
    Ok(EigenSolution {
        energies,
        states,
        residual_norm,
    })
}

/// One sector of `Π = σ_x (−1)^{a†a}`.
///
/// The sector basis is `|p, m⟩ = (|↑, m⟩ + p (−1)^m |↓, m⟩) / √2`.
#[derive(Debug, Clone)]
pub struct ParityBlock {
    /// `+1` or `−1`.
    pub parity: i8,
    pub n_max: usize,
    pub matrix: DenseMatrix,
}

impl ParityBlock {
    /// Coefficient of `|↓, m⟩` relative to `|↑, m⟩` in `|p, m⟩`.
    pub fn down_sign(&self, m: usize) -> f64 {
        let alt = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        f64::from(self.parity) * alt
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// Map a sector vector into the full `|σ_z, m⟩` basis.
    pub fn embed(&self, block_state: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; 2 * self.dim()];
        for (m, &c) in block_state.iter().enumerate() {
            full[BasisIndex::new(Spin::Up, m).flat(self.n_max)] = FRAC_1_SQRT_2 * c;
            full[BasisIndex::new(Spin::Down, m).flat(self.n_max)] =
                FRAC_1_SQRT_2 * self.down_sign(m) * c;
        }
        full
    }
}

#[derive(Debug, Clone)]
pub struct ParityBlocks {
    pub even: ParityBlock,
    pub odd: ParityBlock,
    /// Largest matrix element of `H` between the two sectors.
    pub leakage: f64,
}

fn project(h: &DenseMatrix, n_max: usize, left: &ParityBlock, right: &ParityBlock) -> DenseMatrix {
    let n = n_max + 1;
    let spins = [Spin::Up, Spin::Down];
    DenseMatrix::from_fn(n, n, |m, mp| {
        let mut s = 0.0;
        for &si in &spins {
            let ci = if si == Spin::Up { 1.0 } else { left.down_sign(m) };
            for &sj in &spins {
                let cj = if sj == Spin::Up { 1.0 } else { right.down_sign(mp) };
                s += ci * cj * h[(BasisIndex::new(si, m).flat(n_max), BasisIndex::new(sj, mp).flat(n_max))];
            }
        }
        0.5 * s
    })
}

/// Split `H` into its two parity sectors of dimension `N + 1` each.
pub fn parity_blocks(params: &ModelParams, primitives: &Primitives) -> Result<ParityBlocks> {
    let h = build_hamiltonian_direct(params, primitives)?;
    let n_max = params.n_max;
    let shell = |parity| ParityBlock {
        parity,
        n_max,
        matrix: DenseMatrix::zeros(0, 0),
    };
    let (even_shell, odd_shell) = (shell(1), shell(-1));
    let cross = project(h.matrix(), n_max, &even_shell, &odd_shell);
    let leakage = cross.as_slice().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let even = ParityBlock {
        matrix: project(h.matrix(), n_max, &even_shell, &even_shell),
        ..even_shell
    };
    let odd = ParityBlock {
        matrix: project(h.matrix(), n_max, &odd_shell, &odd_shell),
        ..odd_shell
    };
    Ok(ParityBlocks { even, odd, leakage })
}

/// Lowest `k` eigenpairs assembled from the two parity sectors.
///
/// Returned states are parity eigenstates, so exactly degenerate doublets
/// come out resolved by parity.
pub fn eigensolve_parity(params: &ModelParams, primitives: &Primitives, k: usize) -> Result<EigenSolution> {
    check_k(k, params.dim())?;
    let blocks = parity_blocks(params, primitives)?;
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(2 * k);
    for block in [&blocks.odd, &blocks.even] {
        let (values, vectors) = symmetric_eigen(&block.matrix)?;
        for (e, v) in values.into_iter().zip(vectors).take(k) {
            pairs.push((e, block.embed(&v)));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.truncate(k);

    let (energies, mut states): (Vec<f64>, Vec<Vec<f64>>) = pairs.into_iter().unzip();
    for s in &mut states {
        canonical_sign(s);
    }
    let h = build_hamiltonian_direct(params, primitives)?;
    let residual_norm = residual(h.matrix(), &energies, &states);
    Ok(EigenSolution {
        energies,
        states,
        residual_norm,
    })
}

/// Parity expectation `⟨ψ|σ_x (−1)^{a†a}|ψ⟩`.
pub fn parity_expectation(state: &[f64], n_max: usize) -> f64 {
    let mut total = 0.0;
    for m in 0..=n_max {
        let up = state[BasisIndex::new(Spin::Up, m).flat(n_max)];
        let down = state[BasisIndex::new(Spin::Down, m).flat(n_max)];
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        total += 2.0 * sign * up * down;
    }
    total
}
