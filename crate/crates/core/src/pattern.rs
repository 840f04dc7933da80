//! Operator-space patterns.
//!
//! The Hamiltonian is a quadratic form in the operator vector
//! `(iσ_y, σ_z, a)` with a 3×3 real symmetric coupling matrix. Its
//! eigenvectors define the three pattern operators and its eigenvalues
//! their weights. Index `n` of every array here corresponds to pattern
//! `λ_{n+1}`, and component `m` to the operator `(iσ_y, σ_z, a)[m]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Eigenvalues closer than this are flagged as degenerate.
pub const DEGENERACY_FLAG_TOL: f64 = 1e-10;
/// Derivatives are refused when two pattern eigenvalues are this close.
pub const DERIVATIVE_SEPARATION_TOL: f64 = 1e-8;
/// Minimum row overlap accepted when following patterns between grid points.
pub const MIN_PATTERN_OVERLAP: f64 = 0.5;

pub const COMPONENT_NAMES: [&str; 3] = ["i_sigma_y", "sigma_z", "a"];

/// `g_c = sqrt(1 + sqrt(1 + Δ²/16))`, the unit of every sweep axis.
pub fn critical_coupling(delta: f64) -> f64 {
    (1.0 + (1.0 + delta * delta / 16.0).sqrt()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    entries: [[f64; 3]; 3],
    delta: f64,
    g: f64,
}

impl CouplingMatrix {
    pub fn new(delta: f64, g: f64) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::InvalidParams(format!("delta must be >= 0, got {delta}")));
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::InvalidParams(format!("g must be >= 0, got {g}")));
        }
        let q = delta / 4.0;
        Ok(Self {
            entries: [[0.0, q, 0.0], [q, 0.0, g], [0.0, g, 1.0]],
            delta,
            g,
        })
    }

    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.entries
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// `dM/dg`: ones on the `(σ_z, a)` off-diagonal.
    pub fn derivative() -> [[f64; 3]; 3] {
        [[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]]
    }

    /// Characteristic polynomial `det(M - λI)`.
    pub fn characteristic(&self, lambda: f64) -> f64 {
        let m = &self.entries;
        let a = [
            [m[0][0] - lambda, m[0][1], m[0][2]],
            [m[1][0], m[1][1] - lambda, m[1][2]],
            [m[2][0], m[2][1], m[2][2] - lambda],
        ];
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }
}

pub fn coupling_matrix(params: &ModelParams, g: f64) -> Result<CouplingMatrix> {
    CouplingMatrix::new(params.delta, g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternBasis {
    pub lambdas: [f64; 3],
    /// `rows[n]` is the unit vector `u_{n+1}`.
    pub rows: [[f64; 3]; 3],
    pub g: f64,
    /// Two eigenvalues within [`DEGENERACY_FLAG_TOL`] of each other.
    pub degenerate: bool,
}

impl PatternBasis {
    /// `Σ_n λ_n u_n u_nᵀ`.
    pub fn reconstruct(&self) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for (lambda, u) in self.lambdas.iter().zip(&self.rows) {
            for i in 0..3 {
                for j in 0..3 {
                    out[i][j] += lambda * u[i] * u[j];
                }
            }
        }
        out
    }

    pub fn min_separation(&self) -> f64 {
        let l = &self.lambdas;
        (l[0] - l[1])
            .abs()
            .min((l[0] - l[2]).abs())
            .min((l[1] - l[2]).abs())
    }

    /// Largest deviation of `u_n · u_m` from `δ_nm`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for n in 0..3 {
            for m in 0..3 {
                let expected = if n == m { 1.0 } else { 0.0 };
                worst = worst.max((dot3(&self.rows[n], &self.rows[m]) - expected).abs());
            }
        }
        worst
    }
}

fn dot3(x: &[f64; 3], y: &[f64; 3]) -> f64 {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

fn matvec3(m: &[[f64; 3]; 3], x: &[f64; 3]) -> [f64; 3] {
    [dot3(&m[0], x), dot3(&m[1], x), dot3(&m[2], x)]
}

/// Cyclic Jacobi on a 3×3 symmetric matrix. Returns unsorted eigenvalues
/// and eigenvectors as rows.
fn jacobi3(m: &[[f64; 3]; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut a = *m;
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _sweep in 0..64 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        if off == 0.0 {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = a[p][q];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
            let c = 1.0 / t.hypot(1.0);
            let s = t * c;
            let tau = s / (1.0 + c);
            a[p][p] -= t * apq;
            a[q][q] += t * apq;
            a[p][q] = 0.0;
            a[q][p] = 0.0;
            let r = 3 - p - q;
            let (arp, arq) = (a[r][p], a[r][q]);
            a[r][p] = arp - s * (arq + tau * arp);
            a[r][q] = arq + s * (arp - tau * arq);
            a[p][r] = a[r][p];
            a[q][r] = a[r][q];
            // Columns of V are the eigenvectors.
            for row in v.iter_mut() {
                let (vp, vq) = (row[p], row[q]);
                row[p] = vp - s * (vq + tau * vp);
                row[q] = vq + s * (vp - tau * vq);
            }
        }
    }
    let values = [a[0][0], a[1][1], a[2][2]];
    let vectors = [
        [v[0][0], v[1][0], v[2][0]],
        [v[0][1], v[1][1], v[2][1]],
        [v[0][2], v[1][2], v[2][2]],
    ];
    (values, vectors)
}

/// Flip `u` so its largest-magnitude component is positive. Ties within a
/// relative 1e-9 go to the lowest index.
pub(crate) fn canonical_sign(u: &mut [f64]) {
    let max = u.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if max == 0.0 {
        return;
    }
    let lead = u
        .iter()
        .position(|x| x.abs() >= max * (1.0 - 1e-9))
        .expect("maximum exists");
    if u[lead] < 0.0 {
        u.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Spectral decomposition of the coupling matrix with pattern labels.
///
/// Labels are fixed by the `g = 0` roles: `λ_1 = -Δ/4` on `(1,-1,0)/√2`,
/// `λ_2 = 1` on the photon row `(0,0,1)`, `λ_3 = +Δ/4` on `(1,1,0)/√2`.
/// For `Δ, g > 0` the matrix is an unreduced tridiagonal so eigenvalues
/// never cross, and the labels reduce to a fixed rank order: ascending when
/// `Δ ≥ 4`, (lowest, highest, middle) when `Δ < 4`.
pub fn diagonalize_pattern(m: &CouplingMatrix) -> PatternBasis {
    let (values, vectors) = jacobi3(&m.entries);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let ranks = if m.delta >= 4.0 {
        [order[0], order[1], order[2]]
    } else {
        [order[0], order[2], order[1]]
    };

    let mut lambdas = [0.0; 3];
    let mut rows = [[0.0; 3]; 3];
    for (n, &src) in ranks.iter().enumerate() {
        lambdas[n] = values[src];
        rows[n] = vectors[src];
        canonical_sign(&mut rows[n]);
    }
    let mut basis = PatternBasis {
        lambdas,
        rows,
        g: m.g,
        degenerate: false,
    };
    basis.degenerate = basis.min_separation() < DEGENERACY_FLAG_TOL;
    basis
}

/// Carry pattern identity and sign from `prev` to the neighbouring `cur`.
///
/// Rows of `cur` are first matched to rows of `prev` by the permutation
/// maximising the summed `|u_prev · u_cur|`, then negated wherever the
/// overlap is negative.
pub fn align_signs(prev: &PatternBasis, cur: &PatternBasis) -> Result<PatternBasis> {
    let mut overlap = [[0.0; 3]; 3];
    for (i, row) in overlap.iter_mut().enumerate() {
        for (j, o) in row.iter_mut().enumerate() {
            *o = dot3(&prev.rows[i], &cur.rows[j]);
        }
    }

    const PERMUTATIONS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let score = |p: &[usize; 3]| -> f64 { (0..3).map(|i| overlap[i][p[i]].abs()).sum() };
    let best = PERMUTATIONS
        .iter()
        .copied()
        .fold(PERMUTATIONS[0], |best, p| if score(&p) > score(&best) { p } else { best });

    let weakest = (0..3)
        .map(|i| overlap[i][best[i]].abs())
        .fold(f64::INFINITY, f64::min);
    if weakest < MIN_PATTERN_OVERLAP {
        return Err(Error::AmbiguousPatterns {
            prev_g: prev.g,
            g: cur.g,
            overlap: weakest,
        });
    }

    let mut out = *cur;
    for (i, &j) in best.iter().enumerate() {
        out.lambdas[i] = cur.lambdas[j];
        out.rows[i] = cur.rows[j];
        if overlap[i][j] < 0.0 {
            out.rows[i].iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternDerivatives {
    pub dlambda: [f64; 3],
    pub d2lambda: [f64; 3],
    /// `du[n][m] = d u_{n,m} / dg`.
    pub du: [[f64; 3]; 3],
}

/// First/second-order perturbation theory in `g`, using `dM/dg`.
pub fn pattern_derivatives(m: &CouplingMatrix, basis: &PatternBasis) -> Result<PatternDerivatives> {
    let separation = basis.min_separation();
    if separation <= DERIVATIVE_SEPARATION_TOL {
        return Err(Error::DegeneratePatterns { g: m.g, separation });
    }
    let dm = CouplingMatrix::derivative();
    let du_dm: Vec<[f64; 3]> = basis.rows.iter().map(|u| matvec3(&dm, u)).collect();
    // coupling[p][n] = u_p · M' u_n
    let mut coupling = [[0.0; 3]; 3];
    for p in 0..3 {
        for n in 0..3 {
            coupling[p][n] = dot3(&basis.rows[p], &du_dm[n]);
        }
    }

    let mut out = PatternDerivatives {
        dlambda: [0.0; 3],
        d2lambda: [0.0; 3],
        du: [[0.0; 3]; 3],
    };
    for n in 0..3 {
        out.dlambda[n] = coupling[n][n];
        for p in (0..3).filter(|&p| p != n) {
            let gap = basis.lambdas[n] - basis.lambdas[p];
            let c = coupling[p][n];
            out.d2lambda[n] += 2.0 * c * c / gap;
            for k in 0..3 {
                out.du[n][k] += c / gap * basis.rows[p][k];
            }
        }
    }
    Ok(out)
}
