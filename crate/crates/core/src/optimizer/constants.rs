//! Closed-form constants `K`, `K_J` and `K_∞`, all evaluated at
//! `s = λ(π/L̂)` and written with decaying exponentials only.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::symbol::{OuterBc, ProblemParams};

/// Two-subdomain constant `K`. With Robin outer coefficients `p_a`, `p_b`
///
/// ```text
/// K = Re s((p_b+s)(p_a+s) − (s−p_b)(s−p_a)e^{−4sL})
///       / (((s−p_a)e^{−2sL} + s + p_a)((s−p_b)e^{−2sL} + s + p_b))
/// ```
///
/// and with Dirichlet outer boundaries `K = Re s(e^{2sL}+1)/(e^{2sL}−1)`.
pub fn constant_k(pp: &ProblemParams) -> f64 {
    let s = pp.s();
    let e2 = (-2.0 * s * pp.l).exp();
    match pp.outer_bc {
        OuterBc::Dirichlet => (s * (1.0 + e2) / (1.0 - e2)).re,
        OuterBc::Robin { p_a, p_b } => {
            let num = (s + p_b) * (s + p_a) - (s - p_b) * (s - p_a) * e2 * e2;
            let den = ((s - p_a) * e2 + s + p_a) * ((s - p_b) * e2 + s + p_b);
            (s * num / den).re
        }
    }
}

/// `K_J = Re s(e^{2sL} + 1 − 2cos(π/J)e^{sL})/(e^{2sL} − 1)`.
pub fn constant_kj(pp: &ProblemParams, j: usize) -> f64 {
    assert!(j >= 2, "K_J needs J >= 2");
    kj_at(pp.s(), pp.l, j)
}

pub(crate) fn kj_at(s: Complex64, l: f64, j: usize) -> f64 {
    let e1 = (-s * l).exp();
    let c = (PI / j as f64).cos();
    (s * (1.0 + e1 * e1 - 2.0 * c * e1) / (1.0 - e1 * e1)).re
}

/// `K_∞ = Re s(e^{sL} − 1)/(e^{sL} + 1)`.
pub fn constant_kinf(pp: &ProblemParams) -> f64 {
    let s = pp.s();
    let e1 = (-s * pp.l).exp();
    (s * (1.0 - e1) / (1.0 + e1)).re
}
