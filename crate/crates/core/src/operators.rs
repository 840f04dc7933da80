//! Operators on the truncated product basis `|σ_z, m⟩`.
//!
//! The flat index of `|s, m⟩` is `offset(s) * (N + 1) + m` with spin up at
//! offset 0 and spin down at offset 1. Every operator is kept real: the
//! spin primitive is `iσ_y` rather than `σ_y`.

use std::fmt;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::params::ModelParams;
use crate::pattern::PatternBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn offset(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    /// Eigenvalue of `σ_z`.
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub spin: Spin,
    pub photon: usize,
}

impl BasisIndex {
    pub fn new(spin: Spin, photon: usize) -> Self {
        Self { spin, photon }
    }

    pub fn flat(&self, n_max: usize) -> usize {
        debug_assert!(self.photon <= n_max);
        self.spin.offset() * (n_max + 1) + self.photon
    }

    pub fn from_flat(index: usize, n_max: usize) -> Option<Self> {
        let block = n_max + 1;
        let spin = match index / block {
            0 => Spin::Up,
            1 => Spin::Down,
            _ => return None,
        };
        Some(Self {
            spin,
            photon: index % block,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorLabel {
    Annihilation,
    Creation,
    ISigmaY,
    SigmaZ,
    SigmaX,
    Number,
    /// Pattern operator `A_n`, `n` in 1..=3.
    Pattern(usize),
    HamiltonianDirect,
    HamiltonianPatterns,
}

impl fmt::Display for OperatorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorLabel::Annihilation => f.write_str("a"),
            OperatorLabel::Creation => f.write_str("a_dag"),
            OperatorLabel::ISigmaY => f.write_str("i_sigma_y"),
            OperatorLabel::SigmaZ => f.write_str("sigma_z"),
            OperatorLabel::SigmaX => f.write_str("sigma_x"),
            OperatorLabel::Number => f.write_str("number"),
            OperatorLabel::Pattern(n) => write!(f, "A{n}"),
            OperatorLabel::HamiltonianDirect => f.write_str("H_direct"),
            OperatorLabel::HamiltonianPatterns => f.write_str("H_patterns"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub label: OperatorLabel,
    n_max: usize,
    matrix: DenseMatrix,
}

impl OperatorMatrix {
    pub fn new(label: OperatorLabel, n_max: usize, matrix: DenseMatrix) -> Result<Self> {
        let dim = 2 * (n_max + 1);
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.rows().max(matrix.cols()),
            });
        }
        Ok(Self {
            label,
            n_max,
            matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    pub fn apply(&self, state: &[f64]) -> Vec<f64> {
        self.matrix.matvec(state)
    }

    /// `⟨ψ|O|ψ⟩` for a real state.
    pub fn expectation(&self, state: &[f64]) -> f64 {
        self.matrix.bilinear(state, state)
    }

    /// Dump as `row,col,value` triplets, one per nonzero entry, in
    /// lexicographic `(row, col)` order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "row,col,value")?;
        for i in 0..self.dim() {
            for (j, &v) in self.matrix.row(i).iter().enumerate() {
                if v != 0.0 {
                    writeln!(out, "{i},{j},{}", crate::output::format_float(v))?;
                }
            }
        }
        Ok(())
    }
}

/// The six primitive operators at a fixed truncation.
#[derive(Debug, Clone)]
pub struct Primitives {
    pub n_max: usize,
    pub a: OperatorMatrix,
    pub a_dag: OperatorMatrix,
    pub i_sigma_y: OperatorMatrix,
    pub sigma_z: OperatorMatrix,
    pub sigma_x: OperatorMatrix,
    pub number: OperatorMatrix,
}

impl Primitives {
    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    /// The operator-vector entry `(iσ_y, σ_z, a)[m]`.
    pub fn component(&self, m: usize) -> &OperatorMatrix {
        match m {
            0 => &self.i_sigma_y,
            1 => &self.sigma_z,
            2 => &self.a,
            _ => panic!("component index {m} out of range"),
        }
    }
}

pub fn build_primitives(n_max: usize) -> Result<Primitives> {
    if n_max < 1 {
        return Err(Error::InvalidParams("n_max must be >= 1".into()));
    }
    let photons = n_max + 1;
    let ladder = DenseMatrix::from_fn(photons, photons, |i, j| {
        if j == i + 1 {
            (j as f64).sqrt()
        } else {
            0.0
        }
    });
    let photon_id = DenseMatrix::identity(photons);
    let spin_id = DenseMatrix::identity(2);
    // (up, down) ordering: iσ_y|↑⟩ = -|↓⟩, iσ_y|↓⟩ = |↑⟩.
    let i_sigma_y = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]);
    let sigma_z = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]);
    let sigma_x = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);

    let a = spin_id.kron(&ladder);
    let a_dag = a.transpose();
    let number = spin_id.kron(&DenseMatrix::from_fn(photons, photons, |i, j| {
        if i == j {
            i as f64
        } else {
            0.0
        }
    }));
    let op = |label, m| OperatorMatrix::new(label, n_max, m);
    Ok(Primitives {
        n_max,
        a: op(OperatorLabel::Annihilation, a)?,
        a_dag: op(OperatorLabel::Creation, a_dag)?,
        i_sigma_y: op(OperatorLabel::ISigmaY, i_sigma_y.kron(&photon_id))?,
        sigma_z: op(OperatorLabel::SigmaZ, sigma_z.kron(&photon_id))?,
        sigma_x: op(OperatorLabel::SigmaX, sigma_x.kron(&photon_id))?,
        number: op(OperatorLabel::Number, number)?,
    })
}

/// `A_n = u_{n,1} iσ_y + u_{n,2} σ_z + u_{n,3} a` for `n` in 1..=3.
pub fn build_pattern_operator(
    basis: &PatternBasis,
    n: usize,
    primitives: &Primitives,
) -> Result<OperatorMatrix> {
    if !(1..=3).contains(&n) {
        return Err(Error::PatternIndex(n));
    }
    let u = &basis.rows[n - 1];
    let dim = primitives.dim();
    let mut m = DenseMatrix::zeros(dim, dim);
    for (k, &coeff) in u.iter().enumerate() {
        m.add_scaled(coeff, primitives.component(k).matrix());
    }
    OperatorMatrix::new(OperatorLabel::Pattern(n), primitives.n_max, m)
}

/// The three pattern operators of one basis.
#[derive(Debug, Clone)]
pub struct PatternOperators {
    pub ops: [OperatorMatrix; 3],
}

impl PatternOperators {
    pub fn build(basis: &PatternBasis, primitives: &Primitives) -> Self {
        let op = |n| build_pattern_operator(basis, n, primitives).expect("n in range");
        Self {
            ops: [op(1), op(2), op(3)],
        }
    }

    pub fn get(&self, index: usize) -> &OperatorMatrix {
        &self.ops[index]
    }
}

/// `H = a†a + (Δ/2) σ_x + g (a + a†) σ_z`.
pub fn build_hamiltonian_direct(params: &ModelParams, primitives: &Primitives) -> Result<OperatorMatrix> {
    if params.n_max != primitives.n_max {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            found: primitives.dim(),
        });
    }
    let mut quadrature = primitives.a.matrix().clone();
    quadrature.add_scaled(1.0, primitives.a_dag.matrix());
    let coupling = quadrature.matmul(primitives.sigma_z.matrix());

    let mut h = primitives.number.matrix().clone();
    h.add_scaled(params.delta / 2.0, primitives.sigma_x.matrix());
    h.add_scaled(params.g, &coupling);
    OperatorMatrix::new(OperatorLabel::HamiltonianDirect, params.n_max, h)
}

/// `H = Σ_n λ_n A_nᵀ A_n`.
pub fn build_hamiltonian_patterns(basis: &PatternBasis, primitives: &Primitives) -> OperatorMatrix {
    let ops = PatternOperators::build(basis, primitives);
    build_hamiltonian_from_operators(basis, &ops, primitives.n_max)
}

pub fn build_hamiltonian_from_operators(
    basis: &PatternBasis,
    ops: &PatternOperators,
    n_max: usize,
) -> OperatorMatrix {
    let dim = 2 * (n_max + 1);
    let mut h = DenseMatrix::zeros(dim, dim);
    for (lambda, op) in basis.lambdas.iter().zip(&ops.ops) {
        h.add_scaled(*lambda, &op.matrix().gram());
    }
    OperatorMatrix::new(OperatorLabel::HamiltonianPatterns, n_max, h).expect("dimension from n_max")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{diagonalize_pattern, CouplingMatrix};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn basis(delta: f64, g: f64) -> PatternBasis {
        diagonalize_pattern(&CouplingMatrix::new(delta, g).unwrap())
    }

    /// Independent assembly of `H` from its action on basis kets.
    fn hamiltonian_from_kets(delta: f64, g: f64, n_max: usize) -> DenseMatrix {
        let dim = 2 * (n_max + 1);
        let mut h = DenseMatrix::zeros(dim, dim);
        for col in 0..dim {
            let ket = BasisIndex::from_flat(col, n_max).unwrap();
            let m = ket.photon;
            h[(col, col)] += m as f64;
            let flipped = match ket.spin {
                Spin::Up => Spin::Down,
                Spin::Down => Spin::Up,
            };
            h[(BasisIndex::new(flipped, m).flat(n_max), col)] += delta / 2.0;
            let s = ket.spin.sign();
            if m > 0 {
                h[(BasisIndex::new(ket.spin, m - 1).flat(n_max), col)] += g * s * (m as f64).sqrt();
            }
            if m < n_max {
                h[(BasisIndex::new(ket.spin, m + 1).flat(n_max), col)] +=
                    g * s * ((m + 1) as f64).sqrt();
            }
        }
        h
    }

    #[test]
    fn basis_index_roundtrip() {
        let n_max = 4;
        for i in 0..2 * (n_max + 1) {
            let b = BasisIndex::from_flat(i, n_max).unwrap();
            assert_eq!(b.flat(n_max), i);
        }
        assert_eq!(BasisIndex::new(Spin::Down, 0).flat(n_max), 5);
        assert!(BasisIndex::from_flat(10, n_max).is_none());
    }

    #[test]
    fn ladder_on_smallest_truncation() {
        let p = build_primitives(1).unwrap();
        let a = p.a.matrix();
        assert_eq!(a.row(0), &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(a.row(1), &[0.0; 4]);
        assert_eq!(a.row(2), &[0.0, 0.0, 0.0, 1.0]);
        assert!(build_primitives(0).is_err());
    }

    #[test]
    fn primitive_algebra() {
        let n_max = 6;
        let p = build_primitives(n_max).unwrap();
        assert_eq!(p.a.matrix().transpose(), *p.a_dag.matrix());
        for i in 0..p.dim() {
            let m = BasisIndex::from_flat(i, n_max).unwrap().photon;
            assert_eq!(p.number.matrix()[(i, i)], m as f64);
        }
        // a†a only differs from the exact diagonal by the rounding of √m·√m.
        assert!(p.number.matrix().max_abs_diff(&p.a_dag.matrix().matmul(p.a.matrix())) < 1e-14);

        // (-iσ_y) σ_z = σ_x
        let minus_isy = p.i_sigma_y.matrix().scaled(-1.0);
        assert_eq!(minus_isy.matmul(p.sigma_z.matrix()), *p.sigma_x.matrix());

        let isy = p.i_sigma_y.matrix();
        assert_eq!(isy.transpose(), isy.scaled(-1.0));
        for sym in [&p.sigma_z, &p.sigma_x, &p.number] {
            assert_eq!(sym.matrix().asymmetry(), 0.0);
        }
        // iσ_y |↑,0⟩ = -|↓,0⟩
        let up0 = BasisIndex::new(Spin::Up, 0).flat(n_max);
        let down0 = BasisIndex::new(Spin::Down, 0).flat(n_max);
        assert_eq!(isy[(down0, up0)], -1.0);
        assert_eq!(isy[(up0, down0)], 1.0);
    }

    #[test]
    fn decoupled_pattern_operators() {
        let p = build_primitives(5).unwrap();
        let b = basis(50.0, 0.0);
        let a2 = build_pattern_operator(&b, 2, &p).unwrap();
        assert_eq!(a2.matrix(), p.a.matrix());

        let a1 = build_pattern_operator(&b, 1, &p).unwrap();
        let mut expected = p.i_sigma_y.matrix().scaled(FRAC_1_SQRT_2);
        expected.add_scaled(-FRAC_1_SQRT_2, p.sigma_z.matrix());
        assert!(a1.matrix().max_abs_diff(&expected) < 1e-15);

        assert!(matches!(
            build_pattern_operator(&b, 0, &p),
            Err(Error::PatternIndex(0))
        ));
        assert!(build_pattern_operator(&b, 4, &p).is_err());
    }

    #[test]
    fn photon_term_alone_at_zero_coupling() {
        let p = build_primitives(5).unwrap();
        let b = basis(50.0, 0.0);
        let a2 = build_pattern_operator(&b, 2, &p).unwrap();
        let term = a2.matrix().gram().scaled(b.lambdas[1]);
        assert!(term.max_abs_diff(p.number.matrix()) < 1e-14);
    }

    #[test]
    fn direct_build_matches_ket_assembly() {
        let (delta, g, n_max) = (2.0, 0.5, 1);
        let p = build_primitives(n_max).unwrap();
        let params = ModelParams::new(delta, g, n_max, 1).unwrap();
        let h = build_hamiltonian_direct(&params, &p).unwrap();
        let reference = hamiltonian_from_kets(delta, g, n_max);
        assert_eq!(*h.matrix(), reference);
        // Written out: rows/cols (↑0, ↑1, ↓0, ↓1).
        let explicit = DenseMatrix::from_rows(&[
            vec![0.0, 0.5, 1.0, 0.0],
            vec![0.5, 1.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0, -0.5],
            vec![0.0, 1.0, -0.5, 1.0],
        ]);
        assert_eq!(*h.matrix(), explicit);
    }

    #[test]
    fn pattern_build_matches_brute_force_products() {
        let (delta, g, n_max) = (2.0, 0.5, 1);
        let p = build_primitives(n_max).unwrap();
        let b = basis(delta, g);
        // Brute force: explicit 4x4 loops over Σ_n λ_n Σ_q A_n[q,i] A_n[q,j].
        let ops = PatternOperators::build(&b, &p);
        let mut brute = DenseMatrix::zeros(4, 4);
        for n in 0..3 {
            let a = ops.get(n).matrix();
            for i in 0..4 {
                for j in 0..4 {
                    let mut s = 0.0;
                    for q in 0..4 {
                        s += a[(q, i)] * a[(q, j)];
                    }
                    brute[(i, j)] += b.lambdas[n] * s;
                }
            }
        }
        let reference = hamiltonian_from_kets(delta, g, n_max);
        assert!(brute.max_abs_diff(&reference) < 1e-14);
        let h = build_hamiltonian_patterns(&b, &p);
        assert!(h.matrix().max_abs_diff(&reference) < 1e-14);
    }

    #[test]
    fn mismatched_truncation_is_rejected() {
        let p = build_primitives(3).unwrap();
        let params = ModelParams::new(1.0, 1.0, 4, 1).unwrap();
        assert!(build_hamiltonian_direct(&params, &p).is_err());
    }

    #[test]
    fn csv_dump_is_sorted_triplets() {
        let p = build_primitives(1).unwrap();
        let mut buf = Vec::new();
        p.a.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "row,col,value");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0,1,"));
        assert!(lines[2].starts_with("2,3,"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn dual_build_identity(delta in 0.0f64..60.0, g in 0.0f64..6.0, n_max in prop::sample::select(vec![1usize, 5, 50])) {
            let p = build_primitives(n_max).unwrap();
            let params = ModelParams::new(delta, g, n_max, 1).unwrap();
            let direct = build_hamiltonian_direct(&params, &p).unwrap();
            let b = basis(delta, g);
            let patterns = build_hamiltonian_patterns(&b, &p);
            prop_assert!(patterns.matrix().max_abs_diff(direct.matrix()) < 1e-12);
            prop_assert_eq!(direct.matrix().asymmetry(), 0.0);
            prop_assert_eq!(patterns.matrix().asymmetry(), 0.0);
        }

        #[test]
        fn inverse_transform_and_adjoint(delta in 0.0f64..60.0, g in 0.0f64..6.0) {
            let p = build_primitives(4).unwrap();
            let b = basis(delta, g);
            let ops = PatternOperators::build(&b, &p);
            for m in 0..3 {
                let mut sum = DenseMatrix::zeros(p.dim(), p.dim());
                for n in 0..3 {
                    sum.add_scaled(b.rows[n][m], ops.get(n).matrix());
                }
                prop_assert!(sum.max_abs_diff(p.component(m).matrix()) < 1e-12);
            }
            for n in 0..3 {
                let u = b.rows[n];
                let mut adjoint = p.i_sigma_y.matrix().scaled(-u[0]);
                adjoint.add_scaled(u[1], p.sigma_z.matrix());
                adjoint.add_scaled(u[2], p.a_dag.matrix());
                prop_assert!(ops.get(n).matrix().transpose().max_abs_diff(&adjoint) < 1e-15);
            }
        }
    }
}
