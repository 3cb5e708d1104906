use rayon::prelude::*;

use super::asymptotic::asymptotic_params;
use super::{OptimizationScope, OptimizedChoice};
use crate::error::Result;
use crate::spectral::rho_at;
use crate::symbol::{Family, FrequencyGrid, ProblemParams, TransmissionParams};

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Tuning of [`numeric_minmax_with`].
#[derive(Debug, Clone)]
pub struct MinMaxOptions {
    /// Relative spread of simplex values at convergence.
    pub rel_tol: f64,
    /// Objective evaluations per simplex run.
    pub max_evals: usize,
    /// Each start is the seed with every coefficient multiplied by one factor.
    pub start_factors: Vec<f64>,
    /// Extra simplex runs restarted from the incumbent.
    pub polish_restarts: usize,
    /// Grids with at most this many modes are scanned in full.
    pub full_scan_limit: usize,
    /// Number of log-spaced modes scanned on larger grids.
    pub scan_points: usize,
    /// Initial simplex edge in log-coefficient space.
    pub initial_step: f64,
    /// Starting point; the finite-J closed form when `None`.
    pub seed: Option<TransmissionParams>,
}

impl Default for MinMaxOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            max_evals: 2000,
            start_factors: vec![0.5, 1.0, 2.0],
            polish_restarts: 3,
            full_scan_limit: 1024,
            scan_points: 480,
            initial_step: 0.2,
            seed: None,
        }
    }
}

/// Outcome of one Nelder–Mead run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
    pub stalled: bool,
}

/// Nelder–Mead simplex descent. Converged when the spread of vertex values
/// drops below `rel_tol·|f_best|` on a simplex of diameter below `1e−4`;
/// stalled when the simplex collapses below `1e−10` without that.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], step: f64, rel_tol: f64, max_evals: usize) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0, &mut evals)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    let mut converged = false;
    let mut stalled = false;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let flat = worst - best <= rel_tol * best.abs().max(f64::MIN_POSITIVE);
        if flat && diameter < 1e-4 {
            converged = true;
            break;
        }
        if diameter < 1e-10 {
            stalled = !flat;
            converged = flat;
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|i| simplex[..n].iter().map(|(x, _)| x[i]).sum::<f64>() / n as f64)
            .collect();
        let towards = |t: f64, worst_x: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(worst_x)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let worst_x = simplex[n].0.clone();
        let xr = towards(-1.0, &worst_x);
        let fr = eval(&xr, &mut evals);
        if fr < best {
            let xe = towards(-2.0, &worst_x);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst {
            let xc = towards(-0.5, &worst_x);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = towards(0.5, &worst_x);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < worst.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let x_best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = vertex.0.iter().zip(&x_best).map(|(v, b)| b + 0.5 * (v - b)).collect();
            let v = eval(&x, &mut evals);
            *vertex = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex.swap_remove(0);
    SimplexResult {
        x,
        f,
        evals,
        converged,
        stalled,
    }
}

/// Frequencies scanned for maxima: the whole grid when small, otherwise
/// log-spaced modes that always include the first and last.
fn scan_frequencies(grid: &FrequencyGrid, opts: &MinMaxOptions) -> Vec<f64> {
    let m = grid.m;
    if m <= opts.full_scan_limit {
        return grid.samples.clone();
    }
    let n = opts.scan_points.max(3);
    let log_m = (m as f64).ln();
    let mut idx: Vec<usize> = (0..n)
        .map(|i| ((log_m * i as f64 / (n - 1) as f64).exp().round() as usize).clamp(1, m))
        .collect();
    idx.dedup();
    idx.into_iter().map(|i| grid.samples[i - 1]).collect()
}

fn rho_or_inf(k: f64, pp: &ProblemParams, tp: &TransmissionParams) -> f64 {
    rho_at(k, pp, tp).unwrap_or(f64::INFINITY)
}

/// Golden-section search for the largest value of `ρ` on `[a, b]`,
/// started from a known interior point `(c, fc)`.
fn refine_max(pp: &ProblemParams, tp: &TransmissionParams, a: f64, b: f64, c: f64, fc: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (a, b);
    let mut best = (c, fc);
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = rho_or_inf(x1, pp, tp);
    let mut f2 = rho_or_inf(x2, pp, tp);
    for _ in 0..80 {
        if hi - lo <= 1e-10 * hi {
            break;
        }
        if f1 > f2 {
            if f1 > best.1 {
                best = (x1, f1);
            }
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = rho_or_inf(x1, pp, tp);
        } else {
            if f2 > best.1 {
                best = (x2, f2);
            }
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = rho_or_inf(x2, pp, tp);
        }
    }
    for (x, f) in [(x1, f1), (x2, f2)] {
        if f > best.1 {
            best = (x, f);
        }
    }
    best
}

/// Endpoint values and refined interior local maxima of `k ↦ ρ(T(k))`.
struct Peaks {
    first: (f64, f64),
    last: (f64, f64),
    interior: Vec<(f64, f64)>,
}

impl Peaks {
    fn max(&self) -> f64 {
        self.interior
            .iter()
            .map(|p| p.1)
            .fold(self.first.1.max(self.last.1), f64::max)
    }
}

fn peaks(pp: &ProblemParams, tp: &TransmissionParams, ks: &[f64]) -> Peaks {
    let vals: Vec<f64> = ks.par_iter().map(|&k| rho_or_inf(k, pp, tp)).collect();
    let n = ks.len();
    let mut interior = Vec::new();
    for i in 1..n.saturating_sub(1) {
        if vals[i] >= vals[i - 1] && vals[i] > vals[i + 1] {
            interior.push(refine_max(pp, tp, ks[i - 1], ks[i + 1], ks[i], vals[i]));
        }
    }
    Peaks {
        first: (ks[0], vals[0]),
        last: (ks[n - 1], vals[n - 1]),
        interior,
    }
}

/// `max_k ρ(T(k))` over the grid, with every discrete local maximum
/// refined on the continuum between its neighbours.
pub fn max_rho(pp: &ProblemParams, tp: &TransmissionParams, grid: &FrequencyGrid) -> f64 {
    let opts = MinMaxOptions::default();
    peaks(pp, tp, &scan_frequencies(grid, &opts)).max()
}

/// The value at `k_min` followed by every refined interior local maximum,
/// sorted by `k`.
pub fn equioscillation_report(
    tp: &TransmissionParams,
    pp: &ProblemParams,
    grid: &FrequencyGrid,
) -> Vec<(f64, f64)> {
    report_with(tp, pp, grid, &MinMaxOptions::default())
}

fn report_with(
    tp: &TransmissionParams,
    pp: &ProblemParams,
    grid: &FrequencyGrid,
    opts: &MinMaxOptions,
) -> Vec<(f64, f64)> {
    let pk = peaks(pp, tp, &scan_frequencies(grid, opts));
    let mut out = vec![pk.first];
    out.extend(pk.interior);
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

pub fn numeric_minmax(family: Family, pp: &ProblemParams, grid: &FrequencyGrid) -> Result<OptimizedChoice> {
    numeric_minmax_with(family, pp, grid, &MinMaxOptions::default())
}

/// Minimizes `max_k ρ(T(k))` over the free coefficients of `family` by
/// simplex descent on their logarithms, started from the seed scaled by
/// each of `opts.start_factors`, then polished from the best point.
pub fn numeric_minmax_with(
    family: Family,
    pp: &ProblemParams,
    grid: &FrequencyGrid,
    opts: &MinMaxOptions,
) -> Result<OptimizedChoice> {
    pp.validate()?;
    let mut choice = asymptotic_params(family, OptimizationScope::FiniteJ(pp.j), pp, pp.delta)?;
    if let Some(seed) = opts.seed {
        seed.validate()?;
        choice.params = seed;
    }
    let ks = scan_frequencies(grid, opts);
    let objective = |x: &[f64]| -> f64 {
        let c: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        match TransmissionParams::from_coefficients(family, &c) {
            Ok(tp) => peaks(pp, &tp, &ks).max(),
            Err(_) => f64::INFINITY,
        }
    };

    if family.dof() > 0 {
        let seed: Vec<f64> = choice.params.coefficients().iter().map(|c| c.ln()).collect();
        let mut best: Option<SimplexResult> = None;
        for &factor in &opts.start_factors {
            let x0: Vec<f64> = seed.iter().map(|v| v + factor.ln()).collect();
            let run = nelder_mead(objective, &x0, opts.initial_step, opts.rel_tol, opts.max_evals);
            if best.as_ref().is_none_or(|b| run.f < b.f) {
                best = Some(run);
            }
        }
        let mut best = best.expect("at least one start");
        let mut step = opts.initial_step;
        for _ in 0..opts.polish_restarts {
            step *= 0.25;
            let run = nelder_mead(objective, &best.x, step, opts.rel_tol, opts.max_evals);
            let gain = best.f - run.f;
            if run.f < best.f {
                best = run;
            }
            if gain <= opts.rel_tol * best.f.abs() {
                break;
            }
        }
        let c: Vec<f64> = best.x.iter().map(|v| v.exp()).collect();
        choice.params = TransmissionParams::from_coefficients(family, &c)?;
        choice.stalled = best.stalled;
    }
    let pk = peaks(pp, &choice.params, &ks);
    choice.numeric_rho = Some(pk.max());
    choice.maxima = report_with(&choice.params, pp, grid, opts);
    Ok(choice)
}
