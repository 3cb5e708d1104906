use super::constants::{constant_k, constant_kinf, constant_kj};
use super::{OptimizationScope, OptimizedChoice};
use crate::error::{OsmError, Result};
use crate::spectral::rho_at;
use crate::symbol::{Family, ProblemParams, TransmissionParams};

fn pw(x: f64, e: f64) -> f64 {
    x.powf(e)
}

/// Closed-form parameters for small overlap `delta`, with the constant of
/// the given scope (`K`, `K_J` or `K_∞`).
///
/// | family    | parameters                                                       | `1 − ρ`              |
/// |-----------|------------------------------------------------------------------|----------------------|
/// | Robin1    | `p = 2^{−1/3}C^{2/3}δ^{−1/3}`                                     | `2^{4/3}C^{1/3}δ^{1/3}` |
/// | Robin2    | `p₁ = 2^{−2/5}C^{2/5}δ^{−3/5}`, `p₂ = 2^{−4/5}C^{4/5}δ^{−1/5}`     | `2^{4/5}C^{1/5}δ^{1/5}` |
/// | Ventcell1 | `p = 2^{−3/5}C^{4/5}δ^{−1/5}`, `q = 2^{−1/5}C^{−2/5}δ^{3/5}`       | `2^{8/5}C^{1/5}δ^{1/5}` |
/// | Ventcell2 | `p₁ = 2^{−8/9}C^{8/9}δ^{−1/9}`, `q₁ = 2^{2/9}C^{−2/9}δ^{7/9}`,<br>`p₂ = 2^{−2/3}C^{2/3}δ^{−1/3}`, `q₂ = 2^{4/9}C^{−4/9}δ^{5/9}` | `2^{8/9}C^{1/9}δ^{1/9}` |
///
/// With infinitely many subdomains Robin2 uses `{C^{2/5}δ^{−3/5}, C^{4/5}δ^{−1/5}}`
/// and `1 − ρ = 2C^{1/5}δ^{1/5}`; the Ventcell formulas are reused with
/// `C = K_∞` and flagged as extrapolated. Dirichlet transmission has no
/// parameters; its `predicted_rho` is `ρ(T(k_min))`.
pub fn asymptotic_params(
    family: Family,
    scope: OptimizationScope,
    pp: &ProblemParams,
    delta: f64,
) -> Result<OptimizedChoice> {
    if !(delta > 0.0 && delta < pp.l) {
        return Err(OsmError::InvalidParams(format!("need 0 < delta < L, got {delta}")));
    }
    let c = match scope {
        OptimizationScope::TwoSubdomain => constant_k(pp),
        OptimizationScope::FiniteJ(j) if j >= 2 => constant_kj(pp, j),
        OptimizationScope::FiniteJ(j) => {
            return Err(OsmError::InvalidParams(format!("FiniteJ needs J >= 2, got {j}")))
        }
        OptimizationScope::InfiniteJ => constant_kinf(pp),
    };
    if !(c > 0.0) {
        return Err(OsmError::InvalidParams(format!("non-positive constant {c}")));
    }
    let infinite = scope == OptimizationScope::InfiniteJ;
    let (params, gap) = closed_form(family, infinite, c, delta);
    let predicted_rho = if family == Family::Dirichlet {
        let j = match scope {
            OptimizationScope::TwoSubdomain => 2,
            OptimizationScope::FiniteJ(j) => j,
            OptimizationScope::InfiniteJ => pp.j,
        };
        let p = pp.with_subdomains(j)?.with_delta(delta)?;
        rho_at(p.k_min(), &p, &params)?
    } else {
        1.0 - gap
    };
    Ok(OptimizedChoice {
        family,
        scope,
        params,
        predicted_rho,
        constant_used: c,
        delta,
        maxima: Vec::new(),
        numeric_rho: None,
        stalled: false,
        extrapolated: infinite && matches!(family, Family::Ventcell1 | Family::Ventcell2),
    })
}

/// Parameters and `1 − ρ` for constant `c`; `infinite` selects the
/// infinite-subdomain two-sided Robin variant.
pub(crate) fn closed_form(family: Family, infinite: bool, c: f64, delta: f64) -> (TransmissionParams, f64) {
    let d = delta;
    match family {
        Family::Dirichlet => (TransmissionParams::Dirichlet, f64::NAN),
        Family::Robin1 => (
            TransmissionParams::Robin1 {
                p: pw(2.0, -1.0 / 3.0) * pw(c, 2.0 / 3.0) * pw(d, -1.0 / 3.0),
            },
            pw(2.0, 4.0 / 3.0) * pw(c, 1.0 / 3.0) * pw(d, 1.0 / 3.0),
        ),
        Family::Robin2 if infinite => (
            TransmissionParams::Robin2 {
                p1: pw(c, 2.0 / 5.0) * pw(d, -3.0 / 5.0),
                p2: pw(c, 4.0 / 5.0) * pw(d, -1.0 / 5.0),
            },
            2.0 * pw(c, 1.0 / 5.0) * pw(d, 1.0 / 5.0),
        ),
        Family::Robin2 => (
            TransmissionParams::Robin2 {
                p1: pw(2.0, -2.0 / 5.0) * pw(c, 2.0 / 5.0) * pw(d, -3.0 / 5.0),
                p2: pw(2.0, -4.0 / 5.0) * pw(c, 4.0 / 5.0) * pw(d, -1.0 / 5.0),
            },
            pw(2.0, 4.0 / 5.0) * pw(c, 1.0 / 5.0) * pw(d, 1.0 / 5.0),
        ),
        Family::Ventcell1 => (
            TransmissionParams::Ventcell1 {
                p: pw(2.0, -3.0 / 5.0) * pw(c, 4.0 / 5.0) * pw(d, -1.0 / 5.0),
                q: pw(2.0, -1.0 / 5.0) * pw(c, -2.0 / 5.0) * pw(d, 3.0 / 5.0),
            },
            pw(2.0, 8.0 / 5.0) * pw(c, 1.0 / 5.0) * pw(d, 1.0 / 5.0),
        ),
        Family::Ventcell2 => (
            TransmissionParams::Ventcell2 {
                p1: pw(2.0, -8.0 / 9.0) * pw(c, 8.0 / 9.0) * pw(d, -1.0 / 9.0),
                q1: pw(2.0, 2.0 / 9.0) * pw(c, -2.0 / 9.0) * pw(d, 7.0 / 9.0),
                p2: pw(2.0, -2.0 / 3.0) * pw(c, 2.0 / 3.0) * pw(d, -1.0 / 3.0),
                q2: pw(2.0, 4.0 / 9.0) * pw(c, -4.0 / 9.0) * pw(d, 5.0 / 9.0),
            },
            pw(2.0, 8.0 / 9.0) * pw(c, 1.0 / 9.0) * pw(d, 1.0 / 9.0),
        ),
    }
}
