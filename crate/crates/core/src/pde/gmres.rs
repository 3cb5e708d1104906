//! Full right-preconditioned GMRES with modified Gram–Schmidt.

use std::time::Instant;

use num_complex::Complex64;

use super::grid::DiscreteProblem;
use super::schwarz::{contraction, Preconditioner, SolveReport};
use super::{norm, DEFAULT_SEED};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct GmresOptions {
    pub tol: f64,
    pub itmax: usize,
    /// Recorded in the report; the caller builds the right-hand side.
    pub seed: u64,
    /// Relative size of a new Krylov vector treated as breakdown.
    pub breakdown: f64,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            itmax: 500,
            seed: DEFAULT_SEED,
            breakdown: 1e-14,
        }
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Rotation `(c, s)` with `[c s; −s̄ c]·[a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    if b == ZERO {
        return (1.0, ZERO);
    }
    if a == ZERO {
        return (0.0, b.conj() / b.norm());
    }
    let r = a.norm().hypot(b.norm());
    (a.norm() / r, a / a.norm() * b.conj() / r)
}

/// Solves `A x = rhs` with `A M^{-1}` GMRES from a zero initial guess.
/// Returns the report (relative residual history) and the solution.
pub fn gmres_solve(
    dp: &DiscreteProblem,
    prec: &Preconditioner,
    rhs: &[Complex64],
    opts: &GmresOptions,
) -> (SolveReport, Vec<Complex64>) {
    let start = Instant::now();
    let n = rhs.len();
    let beta = norm(rhs);
    let mut history = vec![1.0];
    let mut x = vec![ZERO; n];
    if beta == 0.0 {
        let report = SolveReport {
            iterations: 0,
            error_history: vec![1.0, 0.0],
            converged: true,
            diverged: false,
            breakdown: false,
            contraction_estimate: 0.0,
            wall_time: start.elapsed().as_secs_f64(),
            seed: opts.seed,
        };
        return (report, x);
    }
    let mut basis: Vec<Vec<Complex64>> = vec![rhs.iter().map(|v| v / beta).collect()];
    // columns of the Hessenberg matrix, already rotated
    let mut hess: Vec<Vec<Complex64>> = Vec::new();
    let mut rotations: Vec<(f64, Complex64)> = Vec::new();
    let mut g = vec![Complex64::new(beta, 0.0)];
    let mut converged = false;
    let mut breakdown = false;
    while hess.len() < opts.itmax {
        let k = hess.len();
        let mut w = dp.apply(&prec.apply(&basis[k]));
        let w_norm = norm(&w);
        let mut col = vec![ZERO; k + 2];
        for (i, v) in basis.iter().enumerate() {
            let hij = dot(v, &w);
            col[i] = hij;
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= hij * vi;
            }
        }
        let sub = norm(&w);
        col[k + 1] = Complex64::new(sub, 0.0);
        for (i, &(c, s)) in rotations.iter().enumerate() {
            let (a, b) = (col[i], col[i + 1]);
            col[i] = c * a + s * b;
            col[i + 1] = -s.conj() * a + c * b;
        }
        let (c, s) = givens(col[k], col[k + 1]);
        col[k] = c * col[k] + s * col[k + 1];
        col[k + 1] = ZERO;
        rotations.push((c, s));
        let gk = g[k];
        g[k] = c * gk;
        g.push(-s.conj() * gk);
        hess.push(col);
        let rel = g[k + 1].norm() / beta;
        history.push(rel);
        if rel <= opts.tol {
            converged = true;
            break;
        }
        if sub <= opts.breakdown * w_norm.max(f64::MIN_POSITIVE) {
            breakdown = true;
            converged = true;
            break;
        }
        basis.push(w.iter().map(|v| v / sub).collect());
    }
    let m = hess.len();
    let mut y = vec![ZERO; m];
    for i in (0..m).rev() {
        let mut acc = g[i];
        for j in i + 1..m {
            acc -= hess[j][i] * y[j];
        }
        y[i] = acc / hess[i][i];
    }
    let mut z = vec![ZERO; n];
    for (yi, v) in y.iter().zip(&basis) {
        for (zi, vi) in z.iter_mut().zip(v) {
            *zi += yi * vi;
        }
    }
    if m > 0 {
        x = prec.apply(&z);
    }
    let report = SolveReport {
        iterations: m,
        contraction_estimate: contraction(&history),
        error_history: history,
        converged,
        diverged: false,
        breakdown,
        wall_time: start.elapsed().as_secs_f64(),
        seed: opts.seed,
    };
    (report, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::grid::{discretize, Forcing};
    use crate::pde::random_vector;
    use crate::pde::subdomain::strip_partition;
    use crate::symbol::{ProblemParams, TransmissionParams};

    fn true_residual(dp: &DiscreteProblem, b: &[Complex64], x: &[Complex64]) -> f64 {
        let ax = dp.apply(x);
        norm(&ax.iter().zip(b).map(|(a, b)| b - a).collect::<Vec<_>>()) / norm(b)
    }

    #[test]
    fn givens_zeroes_second_entry() {
        let (a, b) = (Complex64::new(1.0, 2.0), Complex64::new(-0.5, 3.0));
        let (c, s) = givens(a, b);
        let r = -s.conj() * a + c * b;
        assert!(r.norm() < 1e-15);
        assert!(((c * a + s * b).norm() - a.norm().hypot(b.norm())).abs() < 1e-14);
    }

    #[test]
    fn exact_preconditioner_needs_one_iteration() {
        let pp = ProblemParams::new(1.0, 1.0, 0.5, 1.0, 2, 0.1).unwrap();
        let dp = discretize(&pp, 0.05, &Forcing::Zero).unwrap();
        let b = random_vector(dp.n(), DEFAULT_SEED);
        let prec = Preconditioner::exact(&dp).unwrap();
        let (rep, x) = gmres_solve(&dp, &prec, &b, &GmresOptions::default());
        assert_eq!(rep.iterations, 1);
        assert!(rep.converged);
        assert!(true_residual(&dp, &b, &x) < 1e-12);
    }

    #[test]
    fn schwarz_beats_identity_and_meets_true_residual() {
        let pp = ProblemParams::new(1.0, 1.0, 0.25, 1.0, 4, 0.05).unwrap();
        let dp = discretize(&pp, 0.025, &Forcing::Zero).unwrap();
        let b = random_vector(dp.n(), DEFAULT_SEED);
        let opts = GmresOptions::default();
        let subs = strip_partition(&dp, &TransmissionParams::Robin1 { p: 6.0 }).unwrap();
        let (oras, x) = gmres_solve(&dp, &Preconditioner::Schwarz(subs), &b, &opts);
        let (plain, y) = gmres_solve(&dp, &Preconditioner::Identity, &b, &opts);
        assert!(oras.converged && plain.converged);
        assert!(plain.iterations > oras.iterations);
        assert!(true_residual(&dp, &b, &x) <= 2.0 * opts.tol);
        assert!(true_residual(&dp, &b, &y) <= 2.0 * opts.tol);
        assert!(oras.error_history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }
}
