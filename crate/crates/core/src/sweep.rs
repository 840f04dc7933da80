//! Coupling-strength sweeps.
//!
//! Grid points are solved independently (optionally in parallel); pattern
//! alignment, level tracking and finite-difference derivatives are
//! sequential post-passes, so the output does not depend on scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::observables::{coupling_expectation, state_observables, StateObservables};
use crate::operators::{build_hamiltonian_direct, build_hamiltonian_from_operators, build_primitives, PatternOperators, Primitives};
use crate::params::{ModelParams, DEFAULT_DELTA, DEFAULT_LEVELS, DEFAULT_N_MAX};
use crate::pattern::{
    align_signs, critical_coupling, diagonalize_pattern, pattern_derivatives, CouplingMatrix, PatternBasis,
    PatternDerivatives,
};
use crate::spectral::{eigensolve, eigensolve_parity, EigenSolution};

/// Minimum `|⟨ψ_prev|ψ_cur⟩|` accepted when following a level.
pub const MIN_LEVEL_OVERLAP: f64 = 0.5;
/// Relative energy window inside which levels are treated as one doublet.
pub const DEGENERATE_LEVEL_TOL: f64 = 1e-9;
/// Relative tolerance on grid spacing for the curvature stencil.
pub const GRID_UNIFORMITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub delta: f64,
    pub n_max: usize,
    pub k_levels: usize,
    pub g_over_gc_min: f64,
    pub g_over_gc_max: f64,
    pub n_points: usize,
    pub fd_enabled: bool,
    /// Solve each point in the two parity sectors.
    pub parity: bool,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            delta: DEFAULT_DELTA,
            n_max: DEFAULT_N_MAX,
            k_levels: DEFAULT_LEVELS,
            g_over_gc_min: 0.0,
            g_over_gc_max: 1.5,
            n_points: 61,
            fd_enabled: true,
            parity: false,
            threads: None,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        ModelParams::new(self.delta, 0.0, self.n_max, self.k_levels)?;
        if self.n_points < 3 {
            return Err(Error::TooFewPoints(self.n_points));
        }
        let (lo, hi) = (self.g_over_gc_min, self.g_over_gc_max);
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
            return Err(Error::InvalidParams(format!(
                "sweep bounds must satisfy 0 <= min < max, got [{lo}, {hi}]"
            )));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidParams("threads must be >= 1".into()));
        }
        Ok(())
    }

    pub fn critical_coupling(&self) -> f64 {
        critical_coupling(self.delta)
    }

    /// Uniform grid in `g / g_c`.
    pub fn ratios(&self) -> Vec<f64> {
        let span = self.g_over_gc_max - self.g_over_gc_min;
        let last = (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| self.g_over_gc_min + span * i as f64 / last)
            .collect()
    }

    pub fn params_at(&self, g: f64) -> Result<ModelParams> {
        ModelParams::new(self.delta, g, self.n_max, self.k_levels)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRecord {
    pub level: usize,
    pub energy: f64,
    pub observables: StateObservables,
    /// `d²E/dg²` on interior grid points.
    pub d2e: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub g: f64,
    pub g_over_gc: f64,
    pub basis: PatternBasis,
    /// Absent where the pattern spectrum is degenerate.
    pub derivatives: Option<PatternDerivatives>,
    pub levels: Vec<LevelRecord>,
}

/// Eigenpairs and observables at one coupling.
#[derive(Debug, Clone)]
pub struct PointAnalysis {
    pub params: ModelParams,
    pub basis: PatternBasis,
    pub ops: PatternOperators,
    pub solution: EigenSolution,
    pub observables: Vec<StateObservables>,
}

/// Solve at `params.g` with the Hamiltonian assembled from the patterns of
/// `basis` (or in parity sectors when `parity` is set).
pub fn analyze_point(
    params: &ModelParams,
    primitives: &Primitives,
    basis: &PatternBasis,
    parity: bool,
) -> Result<PointAnalysis> {
    let ops = PatternOperators::build(basis, primitives);
    let solution = if parity {
        eigensolve_parity(params, primitives, params.k_levels)
    } else {
        let h = build_hamiltonian_from_operators(basis, &ops, params.n_max);
        eigensolve(&h, params.k_levels)
    }
    .map_err(|e| Error::SolveFailed {
        g: params.g,
        source: Box::new(e),
    })?;
    let observables = solution
        .energies
        .iter()
        .zip(&solution.states)
        .map(|(&e, psi)| state_observables(e, psi, basis, &ops, primitives))
        .collect();
    Ok(PointAnalysis {
        params: *params,
        basis: *basis,
        ops,
        solution,
        observables,
    })
}

/// Stand-alone analysis at a single coupling, building everything needed.
pub fn analyze(params: &ModelParams, parity: bool) -> Result<(Primitives, PointAnalysis)> {
    params.validate()?;
    let primitives = build_primitives(params.n_max)?;
    let basis = diagonalize_pattern(&CouplingMatrix::new(params.delta, params.g)?);
    let analysis = analyze_point(params, &primitives, &basis, parity)?;
    Ok((primitives, analysis))
}

/// Assign the states of `cur` to the tracked levels `prev`.
///
/// Returns, for each tracked level, the index into `cur`, which may hold
/// more states than are tracked. Pairs are taken greedily by largest
/// `|overlap|`. Inside a quasi-degenerate cluster single overlaps carry no
/// information: a level is judged by its projection onto the whole cluster,
/// and the slots landing in a cluster take its members in energy order.
pub fn match_levels(prev: &[Vec<f64>], cur: &EigenSolution, g: f64) -> Result<Vec<usize>> {
    let (k, m) = (prev.len(), cur.len());
    if m < k {
        return Err(Error::DimensionMismatch { expected: k, found: m });
    }
    let overlap: Vec<Vec<f64>> = prev
        .iter()
        .map(|p| cur.states.iter().map(|c| dot(p, c).abs()).collect())
        .collect();

    let energies = &cur.energies;
    let close = |a: f64, b: f64| (a - b).abs() <= DEGENERATE_LEVEL_TOL * a.abs().max(b.abs()).max(1.0);
    let mut clusters = Vec::new();
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && close(energies[end - 1], energies[end]) {
            end += 1;
        }
        clusters.push(start..end);
        start = end;
    }

    for (level, row) in overlap.iter().enumerate() {
        let best = clusters
            .iter()
            .map(|c| row[c.clone()].iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        if best < MIN_LEVEL_OVERLAP {
            return Err(Error::AmbiguousLevels { g, level, overlap: best });
        }
    }

    let mut pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
    pairs.sort_by(|&(a, b), &(c, d)| overlap[c][d].total_cmp(&overlap[a][b]).then((a, b).cmp(&(c, d))));
    let mut assignment = vec![usize::MAX; k];
    let mut taken = vec![false; m];
    for (i, j) in pairs {
        if assignment[i] == usize::MAX && !taken[j] {
            assignment[i] = j;
            taken[j] = true;
        }
    }

    for cluster in clusters.into_iter().filter(|c| c.len() > 1) {
        let slots: Vec<usize> = (0..k).filter(|&s| cluster.contains(&assignment[s])).collect();
        for (s, member) in slots.into_iter().zip(cluster) {
            assignment[s] = member;
        }
    }
    Ok(assignment)
}

pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?
            .install(|| sweep_inner(config)),
        None => sweep_inner(config),
    }
}

fn sweep_inner(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    let gc = config.critical_coupling();
    let ratios = config.ratios();
    let gs: Vec<f64> = ratios.iter().map(|x| x * gc).collect();
    let primitives = build_primitives(config.n_max)?;

    let mut bases: Vec<PatternBasis> = Vec::with_capacity(gs.len());
    for &g in &gs {
        let raw = diagonalize_pattern(&CouplingMatrix::new(config.delta, g)?);
        let basis = match bases.last() {
            Some(prev) => align_signs(prev, &raw)?,
            None => raw,
        };
        bases.push(basis);
    }

    let solved: Vec<(EigenSolution, Vec<StateObservables>)> = gs
        .par_iter()
        .zip(bases.par_iter())
        .map(|(&g, basis)| {
            // One extra level so that a doublet straddling the cut is seen whole.
            let mut params = config.params_at(g)?;
            params.k_levels = (config.k_levels + 1).min(params.dim());
            let p = analyze_point(&params, &primitives, basis, config.parity)?;
            Ok((p.solution, p.observables))
        })
        .collect::<Result<_>>()?;

    let mut records = Vec::with_capacity(gs.len());
    let mut tracked: Vec<Vec<f64>> = Vec::new();
    for (i, (solution, observables)) in solved.into_iter().enumerate() {
        let order = if tracked.is_empty() {
            (0..config.k_levels).collect()
        } else {
            match_levels(&tracked, &solution, gs[i])?
        };
        tracked = order.iter().map(|&j| solution.states[j].clone()).collect();
        let levels = order
            .iter()
            .enumerate()
            .map(|(level, &j)| LevelRecord {
                level,
                energy: solution.energies[j],
                observables: observables[j],
                d2e: None,
            })
            .collect();
        let m = CouplingMatrix::new(config.delta, gs[i])?;
        records.push(SweepRecord {
            g: gs[i],
            g_over_gc: ratios[i],
            basis: bases[i],
            derivatives: pattern_derivatives(&m, &bases[i]).ok(),
            levels,
        });
    }

    if config.fd_enabled {
        for level in 0..config.k_levels {
            let ys: Vec<f64> = records.iter().map(|r| r.levels[level].energy).collect();
            let d2 = second_derivative_series(&gs, &ys)?;
            for (r, v) in records[1..gs.len() - 1].iter_mut().zip(d2) {
                r.levels[level].d2e = Some(v);
            }
        }
    }
    Ok(records)
}

/// Central second difference on the interior of a uniform grid.
pub fn second_derivative_series(xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::TooFewPoints(n));
    }
    let h = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    for (index, w) in xs.windows(2).enumerate() {
        let step = w[1] - w[0];
        if !(h > 0.0) || (step - h).abs() > GRID_UNIFORMITY_TOL * h {
            return Err(Error::NonUniformGrid {
                index,
                step,
                expected: h,
            });
        }
    }
    Ok(ys.windows(3).map(|w| (w[2] - 2.0 * w[1] + w[0]) / (h * h)).collect())
}

/// Coupling at which the ground-state curvature `d²E_0/dg²` is most
/// negative.
pub fn locate_transition(records: &[SweepRecord]) -> Result<f64> {
    let interior: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| r.levels.first().and_then(|l| l.d2e).map(|d| (r.g, d)))
        .collect();
    if interior.len() < 3 {
        return Err(Error::InvalidParams(
            "locating the transition needs at least 3 curvature values".into(),
        ));
    }
    let (idx, &(g, _)) = interior
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, &(f64, f64))>, (i, cand)| match best {
            Some((_, b)) if b.1 <= cand.1 => best,
            _ => Some((i, cand)),
        })
        .expect("non-empty");
    if idx == 0 || idx == interior.len() - 1 {
        return Err(Error::TransitionAtBoundary { g });
    }
    Ok(g)
}

/// `(g, E_1 − E_0)` from the two lowest energies of each record.
pub fn gap_series(records: &[SweepRecord]) -> Result<Vec<(f64, f64)>> {
    records
        .iter()
        .map(|r| {
            if r.levels.len() < 2 {
                return Err(Error::InvalidParams("gap needs at least two levels".into()));
            }
            let mut e: Vec<f64> = r.levels.iter().map(|l| l.energy).collect();
            e.sort_by(f64::total_cmp);
            Ok((r.g, e[1] - e[0]))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HellmannFeynman {
    pub g: f64,
    /// `(E_0(g+h) − E_0(g−h)) / 2h` from fresh solves.
    pub finite_difference: f64,
    /// `⟨ψ_0|(a + a†) σ_z|ψ_0⟩`.
    pub expectation: f64,
}

/// Ground-state `dE_0/dg` two ways at `params.g` with step `h`.
pub fn hellmann_feynman(params: &ModelParams, primitives: &Primitives, h: f64) -> Result<HellmannFeynman> {
    if !(h > 0.0) || params.g < h {
        return Err(Error::InvalidParams(format!(
            "finite-difference step {h} must be positive and not exceed g = {}",
            params.g
        )));
    }
    let ground = |g: f64| -> Result<EigenSolution> {
        let p = ModelParams::new(params.delta, g, params.n_max, 1)?;
        eigensolve(&build_hamiltonian_direct(&p, primitives)?, 1)
    };
    let plus = ground(params.g + h)?.energies[0];
    let minus = ground(params.g - h)?.energies[0];
    let center = ground(params.g)?;
    Ok(HellmannFeynman {
        g: params.g,
        finite_difference: (plus - minus) / (2.0 * h),
        expectation: coupling_expectation(&center.states[0], primitives),
    })
}
