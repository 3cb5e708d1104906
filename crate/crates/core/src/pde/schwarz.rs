//! Restricted additive Schwarz sweeps and the stationary driver.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::DiscreteProblem;
use super::local::StripSolver;
use super::subdomain::Subdomain;
use super::{norm, random_vector, DEFAULT_SEED};
use crate::error::Result;

/// Approximate inverse `M^{-1}` of the global operator.
#[derive(Debug, Clone)]
pub enum Preconditioner {
    Identity,
    /// `Σ R_iᵀ D_i Ã_i^{-1} R_i`.
    Schwarz(Vec<Subdomain>),
    Exact(StripSolver),
}

impl Preconditioner {
    pub fn exact(dp: &DiscreteProblem) -> Result<Self> {
        Ok(Preconditioner::Exact(dp.exact_solver()?))
    }

    pub fn apply(&self, r: &[Complex64]) -> Vec<Complex64> {
        match self {
            Preconditioner::Identity => r.to_vec(),
            Preconditioner::Schwarz(subs) => apply_preconditioner(subs, r),
            Preconditioner::Exact(s) => s.solve(r),
        }
    }
}

/// `Σ R_iᵀ D_i Ã_i^{-1} R_i r`. Local solves run in parallel; the owned
/// blocks are disjoint so the scatter order does not matter.
pub fn apply_preconditioner(subs: &[Subdomain], r: &[Complex64]) -> Vec<Complex64> {
    let parts: Vec<Vec<Complex64>> = subs.par_iter().map(|s| s.local_correction(r)).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); r.len()];
    for (s, part) in subs.iter().zip(parts) {
        let start = s.global_range().start + s.owned_local_range().start;
        out[start..start + part.len()].copy_from_slice(&part);
    }
    out
}

/// One sweep `u + M^{-1}(b − A u)`.
pub fn ras_iterate(dp: &DiscreteProblem, subs: &[Subdomain], u: &[Complex64]) -> Vec<Complex64> {
    let r = dp.residual(u);
    let c = apply_preconditioner(subs, &r);
    u.iter().zip(c).map(|(a, b)| a + b).collect()
}

/// Outcome of an iterative solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// Relative error (stationary) or relative residual (GMRES), starting at 1.
    pub error_history: Vec<f64>,
    pub converged: bool,
    pub diverged: bool,
    /// GMRES stopped on a lucky breakdown.
    pub breakdown: bool,
    /// Geometric mean of the last five error ratios.
    pub contraction_estimate: f64,
    pub wall_time: f64,
    pub seed: u64,
}

impl SolveReport {
    pub fn final_error(&self) -> f64 {
        *self.error_history.last().unwrap_or(&1.0)
    }
}

/// Geometric mean of the last (up to) five ratios of `history`.
pub(crate) fn contraction(history: &[f64]) -> f64 {
    let n = history.len() - 1;
    if n == 0 {
        return 1.0;
    }
    let back = n.min(5);
    let (a, b) = (history[n - back], history[n]);
    if a > 0.0 && b > 0.0 {
        (b / a).powf(1.0 / back as f64)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryOptions {
    pub tol: f64,
    pub itmax: usize,
    pub seed: u64,
    /// Error above which the run is declared divergent.
    pub divergence: f64,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            itmax: 3000,
            seed: DEFAULT_SEED,
            divergence: 1e6,
        }
    }
}

/// Runs Schwarz sweeps from a random initial guess until the relative error
/// drops below `tol`. With zero right-hand side the error is the iterate
/// itself; otherwise the exact discrete solution is computed first.
pub fn stationary_solve(
    dp: &DiscreteProblem,
    subs: &[Subdomain],
    opts: &StationaryOptions,
) -> Result<SolveReport> {
    let start = Instant::now();
    let reference = if dp.rhs.iter().all(|v| v.norm() == 0.0) {
        None
    } else {
        Some(dp.solve_exact(&dp.rhs)?)
    };
    let error = |u: &[Complex64]| match &reference {
        None => norm(u),
        Some(x) => u.iter().zip(x).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt(),
    };
    let mut u = random_vector(dp.n(), opts.seed);
    let e0 = error(&u);
    let mut history = vec![1.0];
    let mut converged = false;
    let mut diverged = false;
    while history.len() <= opts.itmax {
        u = ras_iterate(dp, subs, &u);
        let e = error(&u) / e0;
        history.push(e);
        if e <= opts.tol {
            converged = true;
            break;
        }
        if !e.is_finite() || e > opts.divergence {
            diverged = true;
            break;
        }
    }
    Ok(SolveReport {
        iterations: history.len() - 1,
        contraction_estimate: contraction(&history),
        error_history: history,
        converged,
        diverged,
        breakdown: false,
        wall_time: start.elapsed().as_secs_f64(),
        seed: opts.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::grid::{discretize, Forcing};
    use crate::pde::subdomain::strip_partition;
    use crate::symbol::{ProblemParams, TransmissionParams};

    fn setup(tp: &TransmissionParams) -> (DiscreteProblem, Vec<Subdomain>) {
        let pp = ProblemParams::new(1.0, 1.0, 0.25, 1.0, 4, 0.05).unwrap();
        let dp = discretize(&pp, 0.025, &Forcing::Random { seed: 3 }).unwrap();
        let subs = strip_partition(&dp, tp).unwrap();
        (dp, subs)
    }

    #[test]
    fn exact_solution_is_a_fixed_point() {
        for tp in [
            TransmissionParams::Dirichlet,
            TransmissionParams::Robin1 { p: 6.0 },
            TransmissionParams::Ventcell2 { p1: 4.0, q1: 0.01, p2: 9.0, q2: 0.03 },
        ] {
            let (dp, subs) = setup(&tp);
            let u = dp.solve_exact(&dp.rhs).unwrap();
            let v = ras_iterate(&dp, &subs, &u);
            let d = u.iter().zip(&v).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            assert!(d <= 1e-12 * norm(&u), "{tp:?}: {d}");
        }
    }

    #[test]
    fn local_solves_have_tiny_residuals() {
        let (dp, subs) = setup(&TransmissionParams::Ventcell1 { p: 5.0, q: 0.02 });
        let r = dp.residual(&vec![Complex64::new(0.0, 0.0); dp.n()]);
        for s in &subs {
            let b = s.restrict(&r);
            let x = s.solver.solve(b);
            let res = norm(&s.solver.apply(&x).iter().zip(b).map(|(a, b)| a - b).collect::<Vec<_>>());
            assert!(res <= 1e-12 * norm(b));
        }
    }

    #[test]
    fn zero_iterations_report() {
        let (dp, subs) = setup(&TransmissionParams::Dirichlet);
        let opts = StationaryOptions { itmax: 0, ..Default::default() };
        let rep = stationary_solve(&dp, &subs, &opts).unwrap();
        assert_eq!(rep.iterations, 0);
        assert_eq!(rep.error_history, vec![1.0]);
        assert!(!rep.converged);
        assert!(rep.contraction_estimate > 0.0);
    }

    #[test]
    fn stationary_run_converges_with_forcing() {
        let (dp, subs) = setup(&TransmissionParams::Robin1 { p: 6.0 });
        let rep = stationary_solve(&dp, &subs, &StationaryOptions::default()).unwrap();
        assert!(rep.converged);
        assert!(rep.contraction_estimate < 1.0);
    }

    #[test]
    fn contraction_of_geometric_history() {
        let h: Vec<f64> = (0..9).map(|i| 0.5f64.powi(i)).collect();
        assert!((contraction(&h) - 0.5).abs() < 1e-14);
        assert!((contraction(&h[..3]) - 0.5).abs() < 1e-14);
        assert_eq!(contraction(&[1.0]), 1.0);
    }
}
