//! Dense eigensolver against an inertia-counting bisection oracle.

use qrm_patterns::linalg::{dot, symmetric_eigen, symmetric_eigen_blocked, DenseMatrix};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Number of eigenvalues of `a` below `sigma`, from the signs of the pivots
/// of an unpivoted LDLᵀ factorization of `a - σI` (Sylvester's law).
fn count_below(a: &DenseMatrix, sigma: f64) -> usize {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| a[(i, j)] - if i == j { sigma } else { 0.0 }).collect())
        .collect();
    let mut negative = 0;
    for k in 0..n {
        let mut pivot = m[k][k];
        if pivot == 0.0 {
            pivot = -f64::EPSILON * (1.0 + sigma.abs());
        }
        if pivot < 0.0 {
            negative += 1;
        }
        for i in k + 1..n {
            let f = m[i][k] / pivot;
            for j in k + 1..n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    negative
}

/// The `index`-th smallest eigenvalue by bisection.
fn bisect(a: &DenseMatrix, index: usize, lo: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if count_below(a, mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn random_symmetric(n: usize, rng: &mut StdRng) -> DenseMatrix {
    let mut a = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let x = rng.random_range(-1.0..1.0);
            a[(i, j)] = x;
            a[(j, i)] = x;
        }
    }
    a
}

#[test]
fn random_matrices_match_bisection() {
    let mut rng = StdRng::seed_from_u64(20);
    for _ in 0..5 {
        let a = random_symmetric(20, &mut rng);
        let bound = (0..20).map(|i| a.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
        let (values, vectors) = symmetric_eigen(&a).unwrap();
        for (k, &v) in values.iter().enumerate() {
            let oracle = bisect(&a, k, -bound - 1.0, bound + 1.0);
            assert!((v - oracle).abs() < 1e-10, "λ_{k}: {v} vs {oracle}");
        }
        for (i, (v, x)) in values.iter().zip(&vectors).enumerate() {
            let ax = a.matvec(x);
            let r: f64 = ax.iter().zip(x).map(|(p, q)| (p - v * q).powi(2)).sum::<f64>().sqrt();
            assert!(r < 1e-12, "residual {r}");
            for (j, y) in vectors.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot(x, y) - expected).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn blocked_and_dense_solvers_agree() {
    let mut rng = StdRng::seed_from_u64(21);
    let (p, q) = (random_symmetric(8, &mut rng), random_symmetric(7, &mut rng));
    let n = 15;
    // Interleave the two blocks: even indices then odd indices.
    let slot = |i: usize| if i < 8 { 2 * i } else { 2 * (i - 8) + 1 };
    let mut a = DenseMatrix::zeros(n, n);
    for i in 0..8 {
        for j in 0..8 {
            a[(slot(i), slot(j))] = p[(i, j)];
        }
    }
    for i in 0..7 {
        for j in 0..7 {
            a[(slot(8 + i), slot(8 + j))] = q[(i, j)];
        }
    }
    let (dense, _) = symmetric_eigen(&a).unwrap();
    let (blocked, vectors) = symmetric_eigen_blocked(&a).unwrap();
    for (x, y) in dense.iter().zip(&blocked) {
        assert!((x - y).abs() < 1e-12);
    }
    for v in &vectors {
        let even = v.iter().step_by(2).any(|&x| x != 0.0);
        let odd = v.iter().skip(1).step_by(2).any(|&x| x != 0.0);
        assert!(even != odd, "eigenvector spans both blocks");
    }
}
