//! Direct solver for five-point problems on a block of full-height grid
//! columns, with Dirichlet or Robin/Ventcell rows at the left and right ends.
//!
//! Every row of the block is diagonalized by the sine transform in y
//! (Dirichlet at top and bottom), which leaves one tridiagonal system in x
//! per mode. The tridiagonal factors are computed once.

use num_complex::Complex64;

use super::dst::Dst;
use crate::error::{OsmError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Treatment of one end of a column block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Edge {
    /// The node column beyond the block is held at zero.
    Dirichlet,
    /// The end column carries `∂_n u + p u − q ∂_yy u`, with the exterior
    /// ghost column eliminated by the centered normal difference. The
    /// resulting row is halved, which keeps the restricted iteration
    /// consistent with Boolean partition weights at overlap `2h`.
    Robin { p: f64, q: f64 },
}

#[derive(Debug, Clone)]
struct ModeFactor {
    /// Multiplier of the previous unknown in each row.
    lower: Vec<Complex64>,
    /// Eliminated super-diagonal `c'_i`.
    upper: Vec<Complex64>,
    /// Inverse pivots.
    inv_pivot: Vec<Complex64>,
}

/// Factorized operator on `cols` columns of `ny` interior rows, unknowns
/// stored column by column.
#[derive(Debug, Clone)]
pub struct StripSolver {
    h: f64,
    ny: usize,
    cols: usize,
    shift: Complex64,
    left: Edge,
    right: Edge,
    dst: Dst,
    modes: Vec<ModeFactor>,
}

impl StripSolver {
    /// `subdomain` only labels errors.
    pub fn new(
        h: f64,
        ny: usize,
        cols: usize,
        shift: Complex64,
        left: Edge,
        right: Edge,
        subdomain: usize,
    ) -> Result<Self> {
        if cols < 2 || ny < 1 {
            return Err(OsmError::InvalidParams(format!(
                "strip needs at least 2 columns and 1 row, got {cols}x{ny}"
            )));
        }
        let inv_h2 = 1.0 / (h * h);
        let mut modes = Vec::with_capacity(ny);
        for m in 1..=ny {
            let mu = 2.0 * inv_h2 * (1.0 - (std::f64::consts::PI * m as f64 / (ny + 1) as f64).cos());
            let interior = Complex64::new(2.0 * inv_h2 + mu, 0.0) + shift;
            let mut diag = vec![interior; cols];
            let mut lower = vec![Complex64::new(-inv_h2, 0.0); cols];
            let mut upper = vec![Complex64::new(-inv_h2, 0.0); cols];
            lower[0] = ZERO;
            upper[cols - 1] = ZERO;
            let end = |p: f64, q: f64| 0.5 * interior + (p + q * mu) / h;
            if let Edge::Robin { p, q } = left {
                diag[0] = end(p, q);
            }
            if let Edge::Robin { p, q } = right {
                diag[cols - 1] = end(p, q);
            }
            let mut cp = vec![ZERO; cols];
            let mut inv = vec![ZERO; cols];
            let scale = interior.norm();
            for i in 0..cols {
                let piv = if i == 0 { diag[0] } else { diag[i] - lower[i] * cp[i - 1] };
                if piv.norm() <= 1e-14 * scale || !piv.is_finite() {
                    return Err(OsmError::SingularLocal { subdomain });
                }
                inv[i] = 1.0 / piv;
                cp[i] = upper[i] * inv[i];
            }
            modes.push(ModeFactor {
                lower,
                upper: cp,
                inv_pivot: inv,
            });
        }
        Ok(Self {
            h,
            ny,
            cols,
            shift,
            left,
            right,
            dst: Dst::new(ny),
            modes,
        })
    }

    pub fn len(&self) -> usize {
        self.cols * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Solves the block system for `rhs` (length `cols·ny`).
    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(rhs.len(), self.len());
        let (ny, cols) = (self.ny, self.cols);
        let mut x = rhs.to_vec();
        self.dst.forward(&mut x);
        for (m, f) in self.modes.iter().enumerate() {
            x[m] *= f.inv_pivot[0];
            for i in 1..cols {
                let prev = x[(i - 1) * ny + m];
                x[i * ny + m] = (x[i * ny + m] - f.lower[i] * prev) * f.inv_pivot[i];
            }
            for i in (0..cols - 1).rev() {
                let next = x[(i + 1) * ny + m];
                x[i * ny + m] -= f.upper[i] * next;
            }
        }
        self.dst.inverse(&mut x);
        x
    }

    /// The block operator applied by stencil, for residual checks.
    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(u.len(), self.len());
        let (ny, cols) = (self.ny, self.cols);
        let inv_h2 = 1.0 / (self.h * self.h);
        let at = |c: usize, r: usize| u[c * ny + r];
        let ty = |c: usize, r: usize| {
            let mut v = 2.0 * at(c, r);
            if r > 0 {
                v -= at(c, r - 1);
            }
            if r + 1 < ny {
                v -= at(c, r + 1);
            }
            v * inv_h2
        };
        let mut out = vec![ZERO; u.len()];
        for c in 0..cols {
            for r in 0..ny {
                let mut v = ty(c, r) + self.shift * at(c, r);
                let robin = match (c, self.left, self.right) {
                    (0, Edge::Robin { p, q }, _) => Some((p, q, at(1, r))),
                    (c, _, Edge::Robin { p, q }) if c + 1 == cols => Some((p, q, at(c - 1, r))),
                    _ => None,
                };
                match robin {
                    Some((p, q, inner)) => {
                        v = 0.5 * v + (at(c, r) - inner) * inv_h2;
                        v += (p * at(c, r) + q * ty(c, r)) / self.h;
                    }
                    None => {
                        v += 2.0 * at(c, r) * inv_h2;
                        if c > 0 {
                            v -= at(c - 1, r) * inv_h2;
                        }
                        if c + 1 < cols {
                            v -= at(c + 1, r) * inv_h2;
                        }
                    }
                }
                out[c * ny + r] = v;
            }
        }
        out
    }
}
