//! Substructured interface iteration matrix and its spectrum.
//!
//! Subdomain `j` receives the Robin traces
//! `R₋(a_j) = −∂ₓv_{j−1} + p_j⁻ v_{j−1}` and `R₊(b_j) = ∂ₓv_{j+1} + p_j⁺ v_{j+1}`
//! from its neighbours. One Schwarz sweep maps the trace vector
//! `[R₊(b_1), R₋(a_2), R₊(b_2), …, R₊(b_{J−1}), R₋(a_J)]` linearly onto
//! itself:
//!
//! ```text
//! R₋ⁿ(a_j) = α_j⁻ R₋ⁿ⁻¹(a_{j−1}) + β_j⁻ R₊ⁿ⁻¹(b_{j−1})
//! R₊ⁿ(b_j) = β_j⁺ R₋ⁿ⁻¹(a_{j+1}) + α_j⁺ R₊ⁿ⁻¹(b_{j+1})
//! ```
//!
//! with `R₋(a_1) = R₊(b_J) = 0`. The matrix of this map has order `2(J−1)`.
//!
//! All coefficients are evaluated after multiplying numerator and
//! denominator by `e^{−λ(L+δ)}`, so only decaying exponentials appear and
//! nothing overflows at high frequency. Infinite Robin parameters (Dirichlet
//! outer boundaries or Dirichlet transmission) are handled in homogeneous
//! coordinates `p = a/b`, which gives the exact `p → ∞` limits.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::eigen::{self, CMatrix};
use crate::error::{OsmError, Result};
use crate::symbol::{lambda, FrequencyGrid, OuterBc, ProblemParams, TransmissionParams};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A possibly infinite, possibly complex Robin coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coef {
    Finite(Complex64),
    Infinite,
}

impl Coef {
    pub fn real(p: f64) -> Self {
        if p.is_infinite() {
            Coef::Infinite
        } else {
            Coef::Finite(Complex64::new(p, 0.0))
        }
    }

    /// `(a, b)` with `p = a/b`.
    fn homogeneous(self) -> (Complex64, f64) {
        match self {
            Coef::Finite(p) => (p, 1.0),
            Coef::Infinite => (Complex64::new(1.0, 0.0), 0.0),
        }
    }

    fn weight(self) -> f64 {
        self.homogeneous().1
    }
}

/// `b_x / b_own` under the convention that all infinite coefficients tend to
/// infinity at the same rate. An infinite own coefficient against a finite
/// one only occurs for couplings to the identically zero outer traces.
fn weight_ratio(x: Coef, own: Coef) -> f64 {
    match (x.weight(), own.weight()) {
        (_, w) if w != 0.0 => x.weight() / w,
        (0.0, _) => 1.0,
        _ => 0.0,
    }
}

/// Coupling coefficients of subdomain `j` at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceCoefficients {
    pub alpha_minus: Complex64,
    pub alpha_plus: Complex64,
    pub beta_minus: Complex64,
    pub beta_plus: Complex64,
}

/// Robin coefficients `p_j⁻`, `p_j⁺` of every subdomain at frequency `k`,
/// outer coefficients included (index 0 is subdomain 1).
pub fn subdomain_coefficients(k: f64, pp: &ProblemParams, tp: &TransmissionParams) -> Vec<(Coef, Coef)> {
    let j = pp.j;
    let mut out = Vec::with_capacity(j);
    for sub in 1..=j {
        let (p, q) = tp.subdomain_coefficients(sub);
        let interior = Coef::real(p + k * k * q);
        let minus = if sub == 1 { outer(pp, true) } else { interior };
        let plus = if sub == j { outer(pp, false) } else { interior };
        out.push((minus, plus));
    }
    out
}

fn outer(pp: &ProblemParams, left: bool) -> Coef {
    match pp.outer_bc {
        OuterBc::Dirichlet => Coef::Infinite,
        OuterBc::Robin { p_a, p_b } => Coef::real(if left { p_a } else { p_b }),
    }
}

/// Scaled exponentials reused by every coefficient at one frequency.
#[derive(Debug, Clone, Copy)]
struct Exps {
    lam: Complex64,
    /// e^{−λL}
    el: Complex64,
    /// e^{−λδ}
    ed: Complex64,
    /// e^{−λ(L+δ)}
    f: Complex64,
}

impl Exps {
    fn new(lam: Complex64, l: f64, delta: f64) -> Self {
        Self {
            lam,
            el: (-lam * l).exp(),
            ed: (-lam * delta).exp(),
            f: (-lam * (l + delta)).exp(),
        }
    }
}

/// `(α, β)` for the trace received through a boundary with coefficient
/// `own`, computed from the neighbour whose edges carry `near` (facing the
/// receiver, across the overlap) and `far` (its opposite edge).
fn coupling(e: &Exps, own: Coef, near: Coef, far: Coef) -> Option<(Complex64, Complex64)> {
    let lam = e.lam;
    let (ao, bo) = own.homogeneous();
    let (an, bn) = near.homogeneous();
    let (af, bf) = far.homogeneous();
    let plus = |a: Complex64, b: f64| lam * b + a;
    let minus = |a: Complex64, b: f64| lam * b - a;

    let den = plus(an, bn) * plus(af, bf) - minus(an, bn) * minus(af, bf) * e.f * e.f;
    if den.norm() < 1e-300 {
        return None;
    }
    let alpha_num = plus(an, bn) * plus(ao, bo) * e.el - minus(an, bn) * minus(ao, bo) * e.el * e.ed * e.ed;
    let beta_num = plus(ao, bo) * minus(af, bf) * e.el * e.el * e.ed - minus(ao, bo) * plus(af, bf) * e.ed;
    let alpha = alpha_num / den * weight_ratio(far, own);
    let beta = beta_num / den * weight_ratio(near, own);
    Some((alpha, beta))
}

fn coeffs_from(
    j: usize,
    k: f64,
    e: &Exps,
    subs: &[(Coef, Coef)],
) -> Result<InterfaceCoefficients> {
    let n = subs.len();
    let mut out = InterfaceCoefficients {
        alpha_minus: ZERO,
        alpha_plus: ZERO,
        beta_minus: ZERO,
        beta_plus: ZERO,
    };
    if j >= 2 {
        let own = subs[j - 1].0;
        let (far, near) = subs[j - 2];
        let (a, b) = coupling(e, own, near, far)
            .ok_or(OsmError::SingularDenominator { subdomain: j - 1, k })?;
        out.alpha_minus = a;
        out.beta_minus = b;
    }
    if j < n {
        let own = subs[j - 1].1;
        let (near, far) = subs[j];
        let (a, b) = coupling(e, own, near, far)
            .ok_or(OsmError::SingularDenominator { subdomain: j + 1, k })?;
        out.alpha_plus = a;
        out.beta_plus = b;
    }
    Ok(out)
}

/// `α_j^±`, `β_j^±` of subdomain `j` (1-based) at frequency `k`, with the
/// transmission coefficients replaced by their effective values `p + k² q`.
/// Coefficients that do not exist for a boundary subdomain are zero.
pub fn interface_coeffs(
    j: usize,
    k: f64,
    pp: &ProblemParams,
    tp: &TransmissionParams,
) -> Result<InterfaceCoefficients> {
    assert!(j >= 1 && j <= pp.j, "subdomain index {j} out of range 1..={}", pp.j);
    let e = Exps::new(lambda(k, pp), pp.l, pp.delta);
    let subs = subdomain_coefficients(k, pp, tp);
    coeffs_from(j, k, &e, &subs)
}

/// Same as [`interface_coeffs`] but with caller-supplied (possibly complex)
/// coefficients per subdomain.
pub fn interface_coeffs_with(
    j: usize,
    k: f64,
    pp: &ProblemParams,
    subs: &[(Coef, Coef)],
) -> Result<InterfaceCoefficients> {
    let e = Exps::new(lambda(k, pp), pp.l, pp.delta);
    coeffs_from(j, k, &e, subs)
}

/// Substructured iteration matrix at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationMatrix {
    pub order: usize,
    pub entries: CMatrix,
    pub k: f64,
}

/// Position of `R₊(b_j)` in the trace vector (1-based `j`).
pub fn plus_index(j: usize) -> usize {
    2 * (j - 1)
}

/// Position of `R₋(a_j)` in the trace vector (1-based `j ≥ 2`).
pub fn minus_index(j: usize) -> usize {
    2 * j - 3
}

/// Places per-subdomain coefficients into the reduced matrix.
pub fn matrix_from_coefficients(coeffs: &[InterfaceCoefficients]) -> CMatrix {
    let j_count = coeffs.len();
    let n = 2 * (j_count - 1);
    let mut t = CMatrix::zeros(n, n);
    for j in 1..=j_count {
        let c = &coeffs[j - 1];
        if j >= 2 {
            let row = minus_index(j);
            t[(row, plus_index(j - 1))] = c.beta_minus;
            if j >= 3 {
                t[(row, minus_index(j - 1))] = c.alpha_minus;
            }
        }
        if j < j_count {
            let row = plus_index(j);
            t[(row, minus_index(j + 1))] = c.beta_plus;
            if j + 1 < j_count {
                t[(row, plus_index(j + 1))] = c.alpha_plus;
            }
        }
    }
    t
}

pub fn assemble_iteration_matrix(
    k: f64,
    pp: &ProblemParams,
    tp: &TransmissionParams,
) -> Result<IterationMatrix> {
    assemble_with(k, pp, &subdomain_coefficients(k, pp, tp))
}

/// Iteration matrix for caller-supplied per-subdomain coefficients.
pub fn assemble_with(k: f64, pp: &ProblemParams, subs: &[(Coef, Coef)]) -> Result<IterationMatrix> {
    assert!(subs.len() >= 2, "need at least two subdomains");
    let e = Exps::new(lambda(k, pp), pp.l, pp.delta);
    let coeffs = (1..=subs.len())
        .map(|j| coeffs_from(j, k, &e, subs))
        .collect::<Result<Vec<_>>>()?;
    let entries = matrix_from_coefficients(&coeffs);
    Ok(IterationMatrix {
        order: entries.rows(),
        entries,
        k,
    })
}

pub fn spectral_radius(m: &IterationMatrix) -> Result<f64> {
    eigen::spectral_radius_of(&m.entries)
}

/// `ρ(T(k))` for one frequency.
pub fn rho_at(k: f64, pp: &ProblemParams, tp: &TransmissionParams) -> Result<f64> {
    spectral_radius(&assemble_iteration_matrix(k, pp, tp)?)
}

/// Sampled map `k ↦ ρ(T(k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCurve {
    pub points: Vec<(f64, f64)>,
}

impl SpectrumCurve {
    pub fn max(&self) -> f64 {
        self.points.iter().map(|p| p.1).fold(0.0, f64::max)
    }
}

/// Evaluates `ρ(T(k))` on every frequency of `ks` in parallel; the result
/// does not depend on the evaluation order.
pub fn curve_at(pp: &ProblemParams, tp: &TransmissionParams, ks: &[f64]) -> Result<SpectrumCurve> {
    let points = ks
        .par_iter()
        .map(|&k| rho_at(k, pp, tp).map(|r| (k, r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumCurve { points })
}

pub fn convergence_curve(
    pp: &ProblemParams,
    tp: &TransmissionParams,
    grid: &FrequencyGrid,
) -> Result<SpectrumCurve> {
    curve_at(pp, tp, &grid.samples)
}

/// High-frequency approximation of `ρ`: `|(λ−p)/(λ+p)| e^{−Re λ δ}` for
/// one-sided families, and the geometric mean of the two factors for
/// two-sided ones.
pub fn rho_highfreq(k: f64, pp: &ProblemParams, tp: &TransmissionParams) -> f64 {
    let lam = lambda(k, pp);
    let damp = (-lam.re * pp.delta).exp();
    let factor = |p: f64| -> f64 {
        if p.is_infinite() {
            1.0
        } else {
            ((lam - p) / (lam + p)).norm()
        }
    };
    let (p1, q1) = tp.set(false);
    let (p2, q2) = tp.set(true);
    let f1 = factor(p1 + k * k * q1);
    if tp.family().is_two_sided() {
        let f2 = factor(p2 + k * k * q2);
        (f1 * f2).sqrt() * damp
    } else {
        f1 * damp
    }
}

/// High-frequency limit of the iteration matrix: `α = 0` and
/// `β_j⁻ = −(λ−p_j⁻)/(λ+p_{j−1}⁺) e^{−λδ}`, `β_j⁺ = −(λ−p_j⁺)/(λ+p_{j+1}⁻) e^{−λδ}`.
/// Returns the matrix and the pairs `(β_j⁺, β_{j+1}⁻)`.
pub fn highfreq_matrix(
    k: f64,
    pp: &ProblemParams,
    tp: &TransmissionParams,
) -> (CMatrix, Vec<(Complex64, Complex64)>) {
    let lam = lambda(k, pp);
    let ed = (-lam * pp.delta).exp();
    let j_count = pp.j;
    let p_of = |sub: usize| {
        let (p, q) = tp.subdomain_coefficients(sub);
        p + k * k * q
    };
    let mut coeffs = Vec::with_capacity(j_count);
    let mut pairs = Vec::with_capacity(j_count - 1);
    for j in 1..=j_count {
        let mut c = InterfaceCoefficients {
            alpha_minus: ZERO,
            alpha_plus: ZERO,
            beta_minus: ZERO,
            beta_plus: ZERO,
        };
        if j >= 2 {
            c.beta_minus = -(lam - p_of(j)) / (lam + p_of(j - 1)) * ed;
        }
        if j < j_count {
            c.beta_plus = -(lam - p_of(j)) / (lam + p_of(j + 1)) * ed;
        }
        coeffs.push(c);
    }
    for j in 1..j_count {
        pairs.push((coeffs[j - 1].beta_plus, coeffs[j].beta_minus));
    }
    (matrix_from_coefficients(&coeffs), pairs)
}

/// Limiting-spectrum bound `max{|α − √(β₋β₊)|, |α + √(β₋β₊)|}` for
/// infinitely many subdomains with `p_j⁻ = p_minus`, `p_j⁺ = p_plus`.
pub fn limiting_bound(k: f64, pp: &ProblemParams, p_minus: f64, p_plus: f64) -> Result<f64> {
    let lam = lambda(k, pp);
    let e = Exps::new(lam, pp.l, pp.delta);
    let den = (lam + p_plus) * (lam + p_minus) - (lam - p_plus) * (lam - p_minus) * e.f * e.f;
    if den.norm() < 1e-300 {
        return Err(OsmError::SingularDenominator { subdomain: 0, k });
    }
    let alpha = ((lam + p_plus) * (lam + p_minus) * e.el
        - (lam - p_plus) * (lam - p_minus) * e.el * e.ed * e.ed)
        / den;
    // (e^{−λL} − e^{λL}) e^{−λ(L+δ)} = e^{−λ(2L+δ)} − e^{−λδ}
    let swing = e.el * e.el * e.ed - e.ed;
    let beta_minus = (lam * lam - p_plus * p_plus) * swing / den;
    let beta_plus = (lam * lam - p_minus * p_minus) * swing / den;
    let root = (beta_minus * beta_plus).sqrt();
    Ok((alpha - root).norm().max((alpha + root).norm()))
}

/// Low-frequency model matrix: the reduced iteration matrix with every
/// `α = a` and alternating `β₊ = b_plus`, `β₋ = b_minus` on each interface.
pub fn low_frequency_matrix(j_count: usize, a: Complex64, b_plus: Complex64, b_minus: Complex64) -> CMatrix {
    low_frequency_matrix_with(a, &vec![(b_plus, b_minus); j_count - 1])
}

/// As [`low_frequency_matrix`], with its own `(β_j⁺, β_{j+1}⁻)` couple on
/// every interface `j = 1..J−1`.
pub fn low_frequency_matrix_with(a: Complex64, couples: &[(Complex64, Complex64)]) -> CMatrix {
    let j_count = couples.len() + 1;
    let coeffs: Vec<InterfaceCoefficients> = (1..=j_count)
        .map(|j| InterfaceCoefficients {
            alpha_minus: a,
            alpha_plus: a,
            beta_minus: if j >= 2 { couples[j - 2].1 } else { ZERO },
            beta_plus: if j < j_count { couples[j - 1].0 } else { ZERO },
        })
        .collect();
    matrix_from_coefficients(&coeffs)
}
