//! Asymptotically optimized transmission parameters and the numeric
//! min-max refinement.

mod asymptotic;
mod constants;
mod minmax;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{OsmError, Result};
use crate::symbol::{Family, TransmissionParams};

pub use asymptotic::asymptotic_params;
pub use constants::{constant_k, constant_kinf, constant_kj};
pub use minmax::{
    equioscillation_report, max_rho, nelder_mead, numeric_minmax, numeric_minmax_with, MinMaxOptions,
    SimplexResult,
};

/// Number of subdomains the closed-form constant is taken for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OptimizationScope {
    TwoSubdomain,
    FiniteJ(usize),
    InfiniteJ,
}

impl OptimizationScope {
    pub fn label(self) -> String {
        match self {
            OptimizationScope::TwoSubdomain => "2".to_string(),
            OptimizationScope::FiniteJ(j) => format!("J={j}"),
            OptimizationScope::InfiniteJ => "inf".to_string(),
        }
    }
}

impl fmt::Display for OptimizationScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for OptimizationScope {
    type Err = OsmError;

    /// Accepts `2`, `inf`, `J=<n>`; a bare `J` yields `FiniteJ(0)`, to be
    /// filled in from the problem.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "2" | "two" | "twosubdomain" => Ok(OptimizationScope::TwoSubdomain),
            "inf" | "infinite" | "infinitej" => Ok(OptimizationScope::InfiniteJ),
            "j" | "finitej" => Ok(OptimizationScope::FiniteJ(0)),
            _ => t
                .strip_prefix("j=")
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|&n| n >= 2)
                .map(OptimizationScope::FiniteJ)
                .ok_or_else(|| OsmError::InvalidParams(format!("unknown scope '{s}'"))),
        }
    }
}

/// Result of an asymptotic or numeric optimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizedChoice {
    pub family: Family,
    pub scope: OptimizationScope,
    pub params: TransmissionParams,
    pub predicted_rho: f64,
    pub constant_used: f64,
    pub delta: f64,
    /// `(k, ρ(k))` at `k_min` and at every interior local maximum.
    pub maxima: Vec<(f64, f64)>,
    /// Achieved `max_k ρ(T(k))`, when evaluated.
    pub numeric_rho: Option<f64>,
    pub stalled: bool,
    /// Closed form applied outside the range it was derived for.
    pub extrapolated: bool,
}

impl OptimizedChoice {
    /// Largest minus smallest value in `maxima`.
    pub fn spread(&self) -> f64 {
        spread(&self.maxima)
    }
}

pub fn spread(maxima: &[(f64, f64)]) -> f64 {
    let hi = maxima.iter().map(|m| m.1).fold(f64::NEG_INFINITY, f64::max);
    let lo = maxima.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
    if maxima.is_empty() {
        0.0
    } else {
        hi - lo
    }
}
