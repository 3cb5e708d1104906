//! Dense complex matrices and a nonsymmetric eigenvalue solver.
//!
//! Eigenvalues are computed by Householder reduction to upper Hessenberg form
//! followed by single-shift complex QR iteration with Wilkinson shifts and
//! deflation on negligible subdiagonal entries.

use num_complex::Complex64;

use crate::error::{OsmError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        self.data
            .chunks_exact(self.cols.max(1))
            .take(self.rows)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Reduces a square matrix to upper Hessenberg form by Householder
/// similarity transforms. Entries below the first subdiagonal are zeroed.
pub fn hessenberg(a: &CMatrix) -> CMatrix {
    assert!(a.is_square());
    let n = a.rows;
    let mut h = a.clone();
    let mut v = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        // scale the column so that tiny entries do not underflow when squared
        let smax = (k + 1..n).map(|i| h[(i, k)].norm()).fold(0.0, f64::max);
        if smax == 0.0 {
            continue;
        }
        for i in 0..n {
            v[i] = if i > k { h[(i, k)] / smax } else { ZERO };
        }
        let alpha_norm: f64 = v[k + 1..].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let x0 = v[k + 1];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        // v = x + phase·|x|·e1, H = I − 2 v vᴴ / (vᴴ v)
        v[k + 1] += phase * alpha_norm;
        let vnorm_sq: f64 = v[k + 1..].iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        let scale = 2.0 / vnorm_sq;
        // left: h ← (I − s v vᴴ) h
        for j in k..n {
            let dot: Complex64 = (k + 1..n).map(|i| v[i].conj() * h[(i, j)]).sum();
            let f = dot * scale;
            for i in k + 1..n {
                let vi = v[i];
                h[(i, j)] -= vi * f;
            }
        }
        // right: h ← h (I − s v vᴴ)
        for i in 0..n {
            let dot: Complex64 = (k + 1..n).map(|j| h[(i, j)] * v[j]).sum();
            let f = dot * scale;
            for j in k + 1..n {
                let vj = v[j].conj();
                h[(i, j)] -= f * vj;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    h
}

/// Unitary rotation `[[c, s], [−s̄, c]]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    let phase = a / na;
    (na / r, phase * b.conj() / r)
}

/// Eigenvalue of the trailing 2×2 block closest to its last diagonal entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr_half = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (tr_half * tr_half - det).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// All eigenvalues of a square complex matrix, in no particular order.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    assert!(a.is_square(), "eigenvalues of a non-square matrix");
    let n = a.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    if !a.is_finite() {
        return Err(OsmError::EigenNoConvergence {
            residual_norm: f64::NAN,
        });
    }
    let mut h = hessenberg(a);
    let mut eig = vec![ZERO; n];
    let eps = f64::EPSILON;
    let max_iter = 60 * n.max(4);
    let mut hi = n - 1;
    let mut iter_since_deflation = 0usize;
    let mut total = 0usize;

    loop {
        // find the start of the active unreduced block ending at hi
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let tol = if diag == 0.0 { eps * h.frobenius_norm() } else { eps * diag };
            if sub <= tol {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            if hi == 0 {
                break;
            }
            hi -= 1;
            iter_since_deflation = 0;
            continue;
        }
        if hi - lo == 1 {
            let (a11, a12, a21, a22) = (h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            let tr_half = (a11 + a22) * 0.5;
            let disc = (tr_half * tr_half - (a11 * a22 - a12 * a21)).sqrt();
            eig[hi] = tr_half + disc;
            eig[lo] = tr_half - disc;
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            iter_since_deflation = 0;
            continue;
        }

        total += 1;
        iter_since_deflation += 1;
        if total > max_iter {
            let residual_norm = (lo + 1..=hi)
                .map(|i| h[(i, i - 1)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            return Err(OsmError::EigenNoConvergence { residual_norm });
        }

        let mut mu = wilkinson_shift(
            h[(hi - 1, hi - 1)],
            h[(hi - 1, hi)],
            h[(hi, hi - 1)],
            h[(hi, hi)],
        );
        if iter_since_deflation % 11 == 10 {
            // exceptional shift
            mu = h[(hi, hi)] + Complex64::new(0.75, 0.35) * h[(hi, hi - 1)].norm();
        }

        // explicit shifted QR step on the active block via Givens rotations
        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = lo + idx;
            let top = (k + 2).min(hi);
            for i in lo..=top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -s * x + y * c;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
    Ok(eig)
}

/// Largest eigenvalue modulus.
pub fn spectral_radius_of(a: &CMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}
