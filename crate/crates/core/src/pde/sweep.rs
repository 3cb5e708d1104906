//! Iteration-count tables over meshes and subdomain counts.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::gmres::{gmres_solve, GmresOptions};
use super::grid::{discretize, Forcing};
use super::schwarz::{stationary_solve, Preconditioner, SolveReport, StationaryOptions};
use super::subdomain::strip_partition;
use super::{random_vector, DEFAULT_SEED};
use crate::error::Result;
use crate::optimizer::{asymptotic_params, max_rho, numeric_minmax_with, MinMaxOptions, OptimizationScope};
use crate::symbol::{frequency_grid, Family, ProblemParams, TransmissionParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverMode {
    Stationary,
    Gmres,
}

/// Where the transmission parameters of each run come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ParamSource {
    /// Numeric min-max over the discrete frequencies of the mesh.
    Numeric,
    /// Closed-form parameters; `FiniteJ(0)` takes `J` from the problem.
    Asymptotic(OptimizationScope),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubdomainLayout {
    /// `L` fixed, the global domain grows with `J`.
    FixedWidth,
    /// `J·L` fixed, subdomains get thinner.
    FixedGlobal,
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub mode: SolverMode,
    pub source: ParamSource,
    pub tol: f64,
    /// Defaults to 3000 (stationary) or 500 (GMRES) when `None`.
    pub itmax: Option<usize>,
    pub seed: u64,
    pub minmax: MinMaxOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            mode: SolverMode::Stationary,
            source: ParamSource::Asymptotic(OptimizationScope::FiniteJ(0)),
            tol: 1e-6,
            itmax: None,
            seed: DEFAULT_SEED,
            minmax: MinMaxOptions::default(),
        }
    }
}

/// One table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub h: f64,
    #[serde(rename = "J")]
    pub j: usize,
    pub family: Family,
    pub iterations: usize,
    pub contraction: f64,
    pub predicted_rho: f64,
    pub seconds: f64,
}

/// Transmission parameters for `family` on mesh `h`, with `max_k ρ(T(k))`
/// over the mesh frequencies. Classical Schwarz is analysed with overlap
/// `δ + 2h`, matching where its Dirichlet data sits on the grid.
pub fn choose_params(
    family: Family,
    pp: &ProblemParams,
    h: f64,
    opts: &SweepOptions,
) -> Result<(TransmissionParams, f64)> {
    let grid = frequency_grid(pp, h)?;
    let effective;
    let pp = if family == Family::Dirichlet {
        effective = pp.with_delta(pp.delta + 2.0 * h)?;
        &effective
    } else {
        pp
    };
    match opts.source {
        ParamSource::Numeric => {
            let choice = numeric_minmax_with(family, pp, &grid, &opts.minmax)?;
            let rho = choice.numeric_rho.unwrap_or(choice.predicted_rho);
            Ok((choice.params, rho))
        }
        ParamSource::Asymptotic(scope) => {
            let scope = match scope {
                OptimizationScope::FiniteJ(0) => OptimizationScope::FiniteJ(pp.j),
                s => s,
            };
            let choice = asymptotic_params(family, scope, pp, pp.delta)?;
            Ok((choice.params, max_rho(pp, &choice.params, &grid)))
        }
    }
}

/// Solves one configuration. `pp.delta` is used as given.
pub fn solve_case(
    pp: &ProblemParams,
    family: Family,
    h: f64,
    opts: &SweepOptions,
) -> Result<(SweepRow, SolveReport)> {
    let start = Instant::now();
    let (tp, predicted_rho) = choose_params(family, pp, h, opts)?;
    let dp = discretize(pp, h, &Forcing::Zero)?;
    let subs = strip_partition(&dp, &tp)?;
    let report = match opts.mode {
        SolverMode::Stationary => {
            let so = StationaryOptions {
                tol: opts.tol,
                itmax: opts.itmax.unwrap_or(3000),
                seed: opts.seed,
                ..Default::default()
            };
            stationary_solve(&dp, &subs, &so)?
        }
        SolverMode::Gmres => {
            let go = GmresOptions {
                tol: opts.tol,
                itmax: opts.itmax.unwrap_or(500),
                seed: opts.seed,
                ..Default::default()
            };
            let b = random_vector(dp.n(), opts.seed);
            gmres_solve(&dp, &Preconditioner::Schwarz(subs), &b, &go).0
        }
    };
    let row = SweepRow {
        h,
        j: pp.j,
        family,
        iterations: report.iterations,
        contraction: report.contraction_estimate,
        predicted_rho,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok((row, report))
}

/// One row per mesh size, with overlap `δ = 2h` and parameters chosen
/// afresh for every `h`.
pub fn sweep_mesh(
    pp: &ProblemParams,
    family: Family,
    hs: &[f64],
    opts: &SweepOptions,
) -> Result<Vec<SweepRow>> {
    hs.iter()
        .map(|&h| {
            let p = pp.with_delta(2.0 * h)?;
            solve_case(&p, family, h, opts).map(|r| r.0)
        })
        .collect()
}

/// One row per subdomain count at fixed mesh size `h` and `δ = 2h`.
pub fn sweep_subdomains(
    pp: &ProblemParams,
    family: Family,
    js: &[usize],
    layout: SubdomainLayout,
    h: f64,
    opts: &SweepOptions,
) -> Result<Vec<SweepRow>> {
    let global = pp.l * pp.j as f64;
    js.iter()
        .map(|&j| {
            let mut p = pp.with_subdomains(j)?;
            if layout == SubdomainLayout::FixedGlobal {
                p = p.with_width(global / j as f64)?;
            }
            let p = p.with_delta(2.0 * h)?;
            solve_case(&p, family, h, opts).map(|r| r.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp() -> ProblemParams {
        ProblemParams::new(1.0, 1.0, 0.25, 1.0, 2, 0.05).unwrap()
    }

    #[test]
    fn single_mesh_gives_one_row() {
        let rows = sweep_mesh(&pp(), Family::Robin1, &[1.0 / 40.0], &SweepOptions::default()).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert_eq!(r.j, 2);
        assert!(r.iterations > 0 && r.iterations < 60);
        assert!(r.predicted_rho < 1.0);
    }

    #[test]
    fn layouts_change_width_only_when_asked() {
        let opts = SweepOptions {
            source: ParamSource::Asymptotic(OptimizationScope::FiniteJ(0)),
            ..Default::default()
        };
        let h = 1.0 / 40.0;
        let a = sweep_subdomains(&pp(), Family::Robin1, &[2], SubdomainLayout::FixedWidth, h, &opts).unwrap();
        let b = sweep_subdomains(&pp(), Family::Robin1, &[2], SubdomainLayout::FixedGlobal, h, &opts).unwrap();
        assert_eq!(a[0].iterations, b[0].iterations);
        let c = sweep_subdomains(&pp(), Family::Robin1, &[4], SubdomainLayout::FixedGlobal, h, &opts).unwrap();
        let d = sweep_subdomains(&pp(), Family::Robin1, &[4], SubdomainLayout::FixedWidth, h, &opts).unwrap();
        assert_ne!(c[0].predicted_rho, d[0].predicted_rho);
    }
}
