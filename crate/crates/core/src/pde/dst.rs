//! Type-I discrete sine transform through a complex FFT of length `2(n+1)`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `X_k = Σ_{j=1}^{n} x_j sin(πjk/(n+1))`, `k = 1..n`, applied to many
/// contiguous vectors of length `n` at once.
#[derive(Clone)]
pub struct Dst {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Dst {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dst").field("n", &self.n).finish()
    }
}

impl Dst {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let fft = FftPlanner::new().plan_fft_forward(2 * (n + 1));
        Self { n, fft }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalized forward transform of every length-`n` chunk of `data`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, 1.0);
    }

    /// Inverse transform, `x_j = 2/(n+1) Σ_k X_k sin(πjk/(n+1))`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, 2.0 / (self.n + 1) as f64);
    }

    fn transform(&self, data: &mut [Complex64], scale: f64) {
        let n = self.n;
        assert_eq!(data.len() % n, 0);
        let m = 2 * (n + 1);
        let chunks = data.len() / n;
        // odd extension [0, x, 0, −x reversed]
        let mut buf = vec![ZERO; chunks * m];
        for (c, x) in data.chunks_exact(n).enumerate() {
            let b = &mut buf[c * m..(c + 1) * m];
            for j in 0..n {
                b[j + 1] = x[j];
                b[m - 1 - j] = -x[j];
            }
        }
        self.fft.process(&mut buf);
        // FFT of the odd extension is −2i·X
        let factor = Complex64::new(0.0, 0.5 * scale);
        for (c, x) in data.chunks_exact_mut(n).enumerate() {
            let b = &buf[c * m..(c + 1) * m];
            for k in 0..n {
                x[k] = b[k + 1] * factor;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (1..=n)
            .map(|k| {
                (1..=n)
                    .map(|j| x[j - 1] * (PI * (j * k) as f64 / (n + 1) as f64).sin())
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_direct_sum_and_inverts() {
        for n in [1, 2, 7, 16] {
            let x: Vec<Complex64> = (0..2 * n)
                .map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
                .collect();
            let dst = Dst::new(n);
            let mut y = x.clone();
            dst.forward(&mut y);
            for c in 0..2 {
                let want = naive(&x[c * n..(c + 1) * n]);
                for k in 0..n {
                    assert!((y[c * n + k] - want[k]).norm() < 1e-12);
                }
            }
            dst.inverse(&mut y);
            for (a, b) in x.iter().zip(&y) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }
}
