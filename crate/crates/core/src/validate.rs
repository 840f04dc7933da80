//! Self-check suite behind `qrm validate`.

use std::fmt;

use crate::error::Result;
use crate::operators::{build_hamiltonian_direct, build_hamiltonian_patterns, build_primitives};
use crate::params::ModelParams;
use crate::pattern::{critical_coupling, diagonalize_pattern, pattern_derivatives, CouplingMatrix};
use crate::sweep::{analyze, gap_series, hellmann_feynman, run_sweep, SweepConfig};

pub const DUAL_BUILD_TOL: f64 = 1e-12;
pub const SUM_RULE_TOL: f64 = 1e-9;
pub const PATTERN_FD_TOL: f64 = 1e-6;
pub const PATTERN_FD_STEP: f64 = 1e-4;
pub const HELLMANN_FEYNMAN_TOL: f64 = 1e-5;
pub const HELLMANN_FEYNMAN_STEP: f64 = 1e-3;
pub const CONVERGENCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ValidationOptions {
    pub delta: f64,
    pub n_max: usize,
    /// Second truncation compared against `n_max` at `g / g_c = 1.5`.
    pub n_max_check: Option<usize>,
    pub n_points: usize,
    pub k_levels: usize,
    pub threads: Option<usize>,
    /// Test hook: Δ offset applied only to the pattern-side build.
    pub delta_mismatch: f64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            delta: crate::params::DEFAULT_DELTA,
            n_max: crate::params::DEFAULT_N_MAX,
            n_max_check: None,
            n_points: 61,
            k_levels: crate::params::DEFAULT_LEVELS,
            threads: None,
            delta_mismatch: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

fn check(name: &'static str, worst: f64, tol: f64, what: &str) -> CheckResult {
    CheckResult {
        name,
        passed: worst < tol,
        detail: format!("{what} = {worst:.3e} (tol {tol:.0e})"),
    }
}

pub fn run_validation(opts: &ValidationOptions) -> Result<Vec<CheckResult>> {
    let gc = critical_coupling(opts.delta);
    let primitives = build_primitives(opts.n_max)?;
    let mut results = Vec::new();

    // Dual build: patterns vs direct Hamiltonian.
    let mut worst = 0.0f64;
    for ratio in [0.0, 0.5, 1.0, 1.5] {
        let g = ratio * gc;
        let params = ModelParams::new(opts.delta, g, opts.n_max, 1)?;
        let direct = build_hamiltonian_direct(&params, &primitives)?;
        let basis = diagonalize_pattern(&CouplingMatrix::new(opts.delta + opts.delta_mismatch, g)?);
        let patterns = build_hamiltonian_patterns(&basis, &primitives);
        worst = worst.max(patterns.matrix().max_abs_diff(direct.matrix()));
    }
    results.push(check("dual-build", worst, DUAL_BUILD_TOL, "max |H_patterns - H_direct|"));

    // Pattern derivatives against central differences.
    let mut worst = 0.0f64;
    for ratio in [0.25, 0.5, 0.75, 1.0, 1.25, 1.5] {
        let g = ratio * gc;
        let m = CouplingMatrix::new(opts.delta, g)?;
        let basis = diagonalize_pattern(&m);
        let Ok(d) = pattern_derivatives(&m, &basis) else { continue };
        let lam = |g: f64| -> Result<[f64; 3]> {
            Ok(diagonalize_pattern(&CouplingMatrix::new(opts.delta, g)?).lambdas)
        };
        let (lp, l0, lm) = (lam(g + PATTERN_FD_STEP)?, basis.lambdas, lam(g - PATTERN_FD_STEP)?);
        for n in 0..3 {
            let fd1 = (lp[n] - lm[n]) / (2.0 * PATTERN_FD_STEP);
            let fd2 = (lp[n] - 2.0 * l0[n] + lm[n]) / (PATTERN_FD_STEP * PATTERN_FD_STEP);
            worst = worst.max((fd1 - d.dlambda[n]).abs()).max((fd2 - d.d2lambda[n]).abs());
        }
    }
    results.push(check("pattern-derivatives", worst, PATTERN_FD_TOL, "max |analytic - FD|"));

    // Decoupled limit.
    if opts.delta > 0.0 {
        let params = ModelParams::new(opts.delta, 0.0, opts.n_max, opts.k_levels.max(2))?;
        let (_, point) = analyze(&params, false)?;
        let mut expected: Vec<f64> = (0..=opts.n_max)
            .flat_map(|m| [m as f64 - opts.delta / 2.0, m as f64 + opts.delta / 2.0])
            .collect();
        expected.sort_by(f64::total_cmp);
        let mut worst = 0.0f64;
        for (e, x) in point.solution.energies.iter().zip(&expected) {
            worst = worst.max((e - x).abs());
        }
        let g0 = &point.observables[0];
        worst = worst
            .max((g0.pattern_energies[0] + opts.delta / 2.0).abs())
            .max(g0.pattern_energies[1].abs())
            .max(g0.pattern_energies[2].abs())
            .max(g0.photon_total.abs())
            .max((g0.sigma_x_total + 1.0).abs());
        results.push(check("zero-coupling", worst, 1e-10, "max deviation from analytic values"));
    }

    // Sum rules, residuals and orthonormality over a sweep.
    let config = SweepConfig {
        delta: opts.delta,
        n_max: opts.n_max,
        k_levels: opts.k_levels,
        n_points: opts.n_points,
        threads: opts.threads,
        ..SweepConfig::default()
    };
    let records = run_sweep(&config)?;
    let worst = records
        .iter()
        .flat_map(|r| r.levels.iter().map(|l| l.observables.sum_rule_error()))
        .fold(0.0, f64::max);
    results.push(check("sum-rules", worst, SUM_RULE_TOL, "max sum-rule violation"));
    let gaps = gap_series(&records)?;
    let negative = gaps.iter().filter(|(_, gap)| !(*gap >= 0.0)).count();
    results.push(CheckResult {
        name: "gap-ordering",
        passed: negative == 0,
        detail: format!("{negative} grid points with negative or undefined gap"),
    });

    // Hellmann–Feynman in the normal phase.
    let mut worst = 0.0f64;
    for ratio in [0.3, 0.6, 0.9] {
        let params = ModelParams::new(opts.delta, ratio * gc, opts.n_max, 1)?;
        let hf = hellmann_feynman(&params, &primitives, HELLMANN_FEYNMAN_STEP)?;
        worst = worst.max((hf.finite_difference - hf.expectation).abs());
    }
    results.push(check(
        "hellmann-feynman",
        worst,
        HELLMANN_FEYNMAN_TOL,
        "max |dE0/dg (FD) - <(a+a†)σz>|",
    ));

    if let Some(other) = opts.n_max_check {
        let ground = |n_max: usize| -> Result<f64> {
            let params = ModelParams::new(opts.delta, 1.5 * gc, n_max, 1)?;
            Ok(analyze(&params, false)?.1.solution.energies[0])
        };
        let (e_a, e_b) = (ground(opts.n_max)?, ground(other)?);
        let mut c = check(
            "truncation-convergence",
            (e_a - e_b).abs(),
            CONVERGENCE_TOL,
            "|E0(N1) - E0(N2)| at g/gc = 1.5",
        );
        c.detail = format!("N = {} vs {}: E0 = {e_a:.15} vs {e_b:.15}; {}", opts.n_max, other, c.detail);
        results.push(c);
    }
    Ok(results)
}
