//! Problem description and the Fourier symbol.
//!
//! The model problem is `Δu − (η − iε)u = f` on a strip of `J` rectangles
//! `(a_j, b_j) × (0, L̂)` with `a_j = (j−1)L − δ/2` and `b_j = jL + δ/2`.
//! A sine expansion in `y` turns every subdomain problem into an ODE in `x`
//! whose characteristic root is `λ(k) = sqrt(k² + η − iε)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OsmError, Result};

/// Boundary condition on the far left and far right of the strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum OuterBc {
    Dirichlet,
    Robin { p_a: f64, p_b: f64 },
}

/// Physical and geometric data shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub eta: f64,
    pub epsilon: f64,
    /// Subdomain width.
    #[serde(rename = "L")]
    pub l: f64,
    /// Transverse height of the strip.
    #[serde(rename = "Lhat")]
    pub l_hat: f64,
    /// Number of subdomains.
    #[serde(rename = "J")]
    pub j: usize,
    /// Overlap width.
    pub delta: f64,
    pub outer_bc: OuterBc,
}

impl ProblemParams {
    /// Builds and validates a parameter set with Dirichlet outer boundaries.
    pub fn new(eta: f64, epsilon: f64, l: f64, l_hat: f64, j: usize, delta: f64) -> Result<Self> {
        let pp = Self {
            eta,
            epsilon,
            l,
            l_hat,
            j,
            delta,
            outer_bc: OuterBc::Dirichlet,
        };
        pp.validate()?;
        Ok(pp)
    }

    pub fn with_outer_bc(mut self, outer_bc: OuterBc) -> Result<Self> {
        self.outer_bc = outer_bc;
        self.validate()?;
        Ok(self)
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        self.delta = delta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_subdomains(mut self, j: usize) -> Result<Self> {
        self.j = j;
        self.validate()?;
        Ok(self)
    }

    pub fn with_width(mut self, l: f64) -> Result<Self> {
        self.l = l;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(OsmError::InvalidParams(msg));
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return bad(format!("eta must be finite and >= 0, got {}", self.eta));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be finite and >= 0, got {}", self.epsilon));
        }
        if !(self.l > 0.0 && self.l.is_finite()) {
            return bad(format!("L must be > 0, got {}", self.l));
        }
        if !(self.l_hat > 0.0 && self.l_hat.is_finite()) {
            return bad(format!("Lhat must be > 0, got {}", self.l_hat));
        }
        if self.j < 2 {
            return bad(format!("J must be >= 2, got {}", self.j));
        }
        if !(self.delta > 0.0 && self.delta < self.l) {
            return bad(format!("need 0 < delta < L, got delta = {}, L = {}", self.delta, self.l));
        }
        if let OuterBc::Robin { p_a, p_b } = self.outer_bc {
            if !(p_a > 0.0 && p_b > 0.0) {
                return bad(format!("outer Robin parameters must be > 0, got {p_a}, {p_b}"));
            }
        }
        Ok(())
    }

    /// `η − iε`.
    pub fn shift(&self) -> Complex64 {
        Complex64::new(self.eta, -self.epsilon)
    }

    /// Lowest Fourier frequency `π/L̂`.
    pub fn k_min(&self) -> f64 {
        std::f64::consts::PI / self.l_hat
    }

    /// `λ(k_min)`, the value every closed-form constant is built from.
    pub fn s(&self) -> Complex64 {
        lambda(self.k_min(), self)
    }
}

/// Transmission condition families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Dirichlet transmission, i.e. classical Schwarz / RAS.
    #[serde(alias = "ras")]
    Dirichlet,
    Robin1,
    Robin2,
    Ventcell1,
    Ventcell2,
}

impl Family {
    pub const OPTIMIZED: [Family; 4] = [
        Family::Robin1,
        Family::Robin2,
        Family::Ventcell1,
        Family::Ventcell2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Dirichlet => "ras",
            Family::Robin1 => "robin1",
            Family::Robin2 => "robin2",
            Family::Ventcell1 => "ventcell1",
            Family::Ventcell2 => "ventcell2",
        }
    }

    /// Number of free real coefficients.
    pub fn dof(self) -> usize {
        match self {
            Family::Dirichlet => 0,
            Family::Robin1 => 1,
            Family::Robin2 | Family::Ventcell1 => 2,
            Family::Ventcell2 => 4,
        }
    }

    pub fn is_two_sided(self) -> bool {
        matches!(self, Family::Robin2 | Family::Ventcell2)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = OsmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ras" | "dirichlet" => Ok(Family::Dirichlet),
            "robin1" => Ok(Family::Robin1),
            "robin2" => Ok(Family::Robin2),
            "ventcell1" => Ok(Family::Ventcell1),
            "ventcell2" => Ok(Family::Ventcell2),
            other => Err(OsmError::InvalidParams(format!("unknown family '{other}'"))),
        }
    }
}

/// Coefficients of the transmission condition `∂_n u + p u − q ∂_yy u`.
///
/// Two-sided families carry two parameter sets that alternate across each
/// interface: on interface `i` (1-based) the plus side, owned by subdomain
/// `i`, uses set 1 when `i` is odd and set 2 when `i` is even; the minus side
/// uses the other set. Equivalently every odd subdomain uses set 1 on both
/// of its edges and every even subdomain uses set 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum TransmissionParams {
    #[serde(alias = "ras")]
    Dirichlet,
    Robin1 { p: f64 },
    Robin2 { p1: f64, p2: f64 },
    Ventcell1 { p: f64, q: f64 },
    Ventcell2 { p1: f64, q1: f64, p2: f64, q2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Plus,
    Minus,
}

impl TransmissionParams {
    pub fn family(&self) -> Family {
        match self {
            TransmissionParams::Dirichlet => Family::Dirichlet,
            TransmissionParams::Robin1 { .. } => Family::Robin1,
            TransmissionParams::Robin2 { .. } => Family::Robin2,
            TransmissionParams::Ventcell1 { .. } => Family::Ventcell1,
            TransmissionParams::Ventcell2 { .. } => Family::Ventcell2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self
            .p_coefficients()
            .iter()
            .all(|p| *p > 0.0 && p.is_finite())
            && self
                .q_coefficients()
                .iter()
                .all(|q| *q >= 0.0 && q.is_finite());
        if ok {
            Ok(())
        } else {
            Err(OsmError::InvalidParams(format!(
                "transmission coefficients out of range: {self:?}"
            )))
        }
    }

    fn p_coefficients(&self) -> Vec<f64> {
        match *self {
            TransmissionParams::Dirichlet => vec![],
            TransmissionParams::Robin1 { p } | TransmissionParams::Ventcell1 { p, .. } => vec![p],
            TransmissionParams::Robin2 { p1, p2 } | TransmissionParams::Ventcell2 { p1, p2, .. } => {
                vec![p1, p2]
            }
        }
    }

    fn q_coefficients(&self) -> Vec<f64> {
        match *self {
            TransmissionParams::Ventcell1 { q, .. } => vec![q],
            TransmissionParams::Ventcell2 { q1, q2, .. } => vec![q1, q2],
            _ => vec![],
        }
    }

    /// Free coefficients in a fixed order: `p`, `(p1, p2)`, `(p, q)` or
    /// `(p1, q1, p2, q2)`.
    pub fn coefficients(&self) -> Vec<f64> {
        match *self {
            TransmissionParams::Dirichlet => vec![],
            TransmissionParams::Robin1 { p } => vec![p],
            TransmissionParams::Robin2 { p1, p2 } => vec![p1, p2],
            TransmissionParams::Ventcell1 { p, q } => vec![p, q],
            TransmissionParams::Ventcell2 { p1, q1, p2, q2 } => vec![p1, q1, p2, q2],
        }
    }

    /// Inverse of [`TransmissionParams::coefficients`].
    pub fn from_coefficients(family: Family, c: &[f64]) -> Result<Self> {
        if c.len() != family.dof() {
            return Err(OsmError::InvalidParams(format!(
                "{family} needs {} coefficients, got {}",
                family.dof(),
                c.len()
            )));
        }
        let tp = match family {
            Family::Dirichlet => TransmissionParams::Dirichlet,
            Family::Robin1 => TransmissionParams::Robin1 { p: c[0] },
            Family::Robin2 => TransmissionParams::Robin2 { p1: c[0], p2: c[1] },
            Family::Ventcell1 => TransmissionParams::Ventcell1 { p: c[0], q: c[1] },
            Family::Ventcell2 => TransmissionParams::Ventcell2 {
                p1: c[0],
                q1: c[1],
                p2: c[2],
                q2: c[3],
            },
        };
        Ok(tp)
    }

    /// Swaps parameter sets 1 and 2 of a two-sided family.
    pub fn swapped(&self) -> Self {
        match *self {
            TransmissionParams::Robin2 { p1, p2 } => TransmissionParams::Robin2 { p1: p2, p2: p1 },
            TransmissionParams::Ventcell2 { p1, q1, p2, q2 } => TransmissionParams::Ventcell2 {
                p1: p2,
                q1: q2,
                p2: p1,
                q2: q1,
            },
            other => other,
        }
    }

    /// `(p, q)` carried by parameter set 1 or 2. One-sided families return the
    /// same pair for both; Dirichlet transmission returns `p = ∞`.
    pub fn set(&self, second: bool) -> (f64, f64) {
        match *self {
            TransmissionParams::Dirichlet => (f64::INFINITY, 0.0),
            TransmissionParams::Robin1 { p } => (p, 0.0),
            TransmissionParams::Ventcell1 { p, q } => (p, q),
            TransmissionParams::Robin2 { p1, p2 } => {
                if second {
                    (p2, 0.0)
                } else {
                    (p1, 0.0)
                }
            }
            TransmissionParams::Ventcell2 { p1, q1, p2, q2 } => {
                if second {
                    (p2, q2)
                } else {
                    (p1, q1)
                }
            }
        }
    }

    /// `(p, q)` on the given side of interface `interface` (1-based).
    pub fn side_coefficients(&self, interface: usize, side: Side) -> (f64, f64) {
        let odd = interface % 2 == 1;
        let second = match side {
            Side::Plus => !odd,
            Side::Minus => odd,
        };
        self.set(second)
    }

    /// `(p, q)` used by subdomain `j` (1-based) on both of its edges.
    pub fn subdomain_coefficients(&self, j: usize) -> (f64, f64) {
        self.set(j % 2 == 0)
    }
}

/// Frequency-dependent Robin coefficient `p + k² q` on the given side of
/// interface 1.
pub fn effective_p(tp: &TransmissionParams, side: Side, k: f64) -> f64 {
    effective_p_at(tp, 1, side, k)
}

/// Frequency-dependent Robin coefficient on the given side of an arbitrary
/// interface (1-based).
pub fn effective_p_at(tp: &TransmissionParams, interface: usize, side: Side, k: f64) -> f64 {
    let (p, q) = tp.side_coefficients(interface, side);
    p + k * k * q
}

/// `λ(k) = sqrt(k² + η − iε)` with positive real part.
///
/// Returns zero for the degenerate Laplace case `k² + η = 0, ε = 0`; use
/// [`try_lambda`] to have that reported as an error.
pub fn lambda(k: f64, params: &ProblemParams) -> Complex64 {
    lambda_of(k, params.eta, params.epsilon)
}

pub(crate) fn lambda_of(k: f64, eta: f64, epsilon: f64) -> Complex64 {
    let arg = Complex64::new(k * k + eta, -epsilon);
    if arg.re == 0.0 && arg.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let root = arg.sqrt();
    if root.re < 0.0 {
        -root
    } else {
        root
    }
}

pub fn try_lambda(k: f64, params: &ProblemParams) -> Result<Complex64> {
    if k * k + params.eta == 0.0 && params.epsilon == 0.0 {
        return Err(OsmError::DegenerateSymbol);
    }
    Ok(lambda(k, params))
}

/// Fourier frequencies `k_m = mπ/L̂`, `m = 1..M`, resolvable on a mesh of
/// size `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    pub k_min: f64,
    pub k_max: f64,
    pub m: usize,
    pub samples: Vec<f64>,
}

impl FrequencyGrid {
    /// Grid with `m` modes for a strip of height `l_hat`.
    pub fn with_modes(l_hat: f64, m: usize) -> Self {
        let step = std::f64::consts::PI / l_hat;
        let samples: Vec<f64> = (1..=m).map(|i| i as f64 * step).collect();
        Self {
            k_min: samples[0],
            k_max: samples[m - 1],
            m,
            samples,
        }
    }

    pub fn spacing(&self) -> f64 {
        if self.m > 1 {
            self.samples[1] - self.samples[0]
        } else {
            self.k_min
        }
    }
}

pub fn frequency_grid(params: &ProblemParams, h: f64) -> Result<FrequencyGrid> {
    if !(h > 0.0) || h >= params.l_hat {
        return Err(OsmError::MeshCoarserThanDomain { h, l_hat: params.l_hat });
    }
    // Snap ratios that are integral up to rounding (e.g. 1/(1/100)).
    let ratio = params.l_hat / h;
    let m = if (ratio - ratio.round()).abs() < 1e-9 * ratio {
        ratio.round() as usize
    } else {
        ratio.ceil() as usize
    };
    Ok(FrequencyGrid::with_modes(params.l_hat, m))
}
