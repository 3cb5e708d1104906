//! Five-point discretization of `−Δu + (η − iε)u = −f` on
//! `[0, J·L] × [0, L̂]` with homogeneous Dirichlet data on the outer boundary.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::local::{Edge, StripSolver};
use super::random_vector;
use crate::error::{OsmError, Result};
use crate::symbol::ProblemParams;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl CsrMatrix {
    /// Builds from `(row, col, value)` triplets sorted by row.
    pub fn from_sorted_triplets(n: usize, triplets: &[(usize, usize, Complex64)]) -> Self {
        let mut row_ptr = vec![0usize; n + 1];
        for &(r, _, _) in triplets {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            col_idx: triplets.iter().map(|t| t.1).collect(),
            values: triplets.iter().map(|t| t.2).collect(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .map(|p| self.values[p] * x[self.col_idx[p]])
                    .sum()
            })
            .collect()
    }

    pub fn triplets(&self) -> Vec<(usize, usize, Complex64)> {
        (0..self.n)
            .flat_map(|i| (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (i, p)))
            .map(|(i, p)| (i, self.col_idx[p], self.values[p]))
            .collect()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        (self.row_ptr[i]..self.row_ptr[i + 1])
            .find(|&p| self.col_idx[p] == j)
            .map_or(ZERO, |p| self.values[p])
    }
}

/// Right-hand side `f` of `Δu − (η − iε)u = f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Forcing {
    Zero,
    /// Unit spike at grid node `(col, row)`, both 1-based.
    Point { col: usize, row: usize },
    /// `sin(mx·πx/(J·L))·sin(my·πy/L̂)`.
    Mode { mx: usize, my: usize },
    /// Uniform complex entries in the unit square.
    Random { seed: u64 },
}

/// Discretized global problem `A u = b` with `A = −Δ_h + (η − iε)I` and
/// `b = −f`. Unknowns are the interior nodes, numbered column by column:
/// node `(col, row)` has index `(col − 1)·ny + row − 1`.
#[derive(Debug, Clone)]
pub struct DiscreteProblem {
    pub params: ProblemParams,
    pub h: f64,
    /// Interior node columns, `N − 1` with `N = J·L/h`.
    pub nx: usize,
    /// Interior node rows, `L̂/h − 1`.
    pub ny: usize,
    pub operator: CsrMatrix,
    pub rhs: Vec<Complex64>,
}

/// `x/h` when it is an integer up to rounding.
pub(crate) fn grid_count(x: f64, h: f64, what: &str) -> Result<usize> {
    let r = x / h;
    let n = r.round();
    if (r - n).abs() > 1e-8 * r.abs().max(1.0) || n < 0.0 {
        return Err(OsmError::GridMisalignment(format!("{what} = {x} is not a multiple of h = {h}")));
    }
    Ok(n as usize)
}

impl DiscreteProblem {
    pub fn n(&self) -> usize {
        self.nx * self.ny
    }

    /// Number of mesh intervals along x.
    pub fn intervals_x(&self) -> usize {
        self.nx + 1
    }

    pub fn shift(&self) -> Complex64 {
        self.params.shift()
    }

    pub fn index(&self, col: usize, row: usize) -> usize {
        (col - 1) * self.ny + row - 1
    }

    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        self.operator.mul_vec(u)
    }

    pub fn residual(&self, u: &[Complex64]) -> Vec<Complex64> {
        self.apply(u)
            .iter()
            .zip(&self.rhs)
            .map(|(au, b)| b - au)
            .collect()
    }

    /// Exact solver for `A` (fast sine transform in y, tridiagonal in x).
    pub fn exact_solver(&self) -> Result<StripSolver> {
        StripSolver::new(self.h, self.ny, self.nx, self.shift(), Edge::Dirichlet, Edge::Dirichlet, 0)
    }

    pub fn solve_exact(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok(self.exact_solver()?.solve(b))
    }
}

/// Builds the five-point system for `pp` on a mesh of size `h`.
pub fn discretize(pp: &ProblemParams, h: f64, forcing: &Forcing) -> Result<DiscreteProblem> {
    pp.validate()?;
    if !(h > 0.0) || h > pp.l / 4.0 {
        return Err(OsmError::GridMisalignment(format!("need 0 < h <= L/4, got h = {h}")));
    }
    let width = pp.j as f64 * pp.l;
    let big_n = grid_count(width, h, "J·L")?;
    let rows = grid_count(pp.l_hat, h, "Lhat")?;
    if rows < 2 {
        return Err(OsmError::MeshCoarserThanDomain { h, l_hat: pp.l_hat });
    }
    let nx = big_n - 1;
    let ny = rows - 1;
    let n = nx * ny;
    let inv_h2 = 1.0 / (h * h);
    let diag = Complex64::new(4.0 * inv_h2, 0.0) + pp.shift();
    let off = Complex64::new(-inv_h2, 0.0);
    let mut triplets = Vec::with_capacity(5 * n);
    for col in 1..=nx {
        for row in 1..=ny {
            let i = (col - 1) * ny + row - 1;
            if col > 1 {
                triplets.push((i, i - ny, off));
            }
            if row > 1 {
                triplets.push((i, i - 1, off));
            }
            triplets.push((i, i, diag));
            if row < ny {
                triplets.push((i, i + 1, off));
            }
            if col < nx {
                triplets.push((i, i + ny, off));
            }
        }
    }
    let operator = CsrMatrix::from_sorted_triplets(n, &triplets);

    let f: Vec<Complex64> = match forcing {
        Forcing::Zero => vec![ZERO; n],
        Forcing::Point { col, row } => {
            if !(1..=nx).contains(col) || !(1..=ny).contains(row) {
                return Err(OsmError::InvalidParams(format!("spike ({col}, {row}) outside the grid")));
            }
            let mut f = vec![ZERO; n];
            f[(col - 1) * ny + row - 1] = Complex64::new(1.0, 0.0);
            f
        }
        Forcing::Mode { mx, my } => {
            let mut f = Vec::with_capacity(n);
            for col in 1..=nx {
                let sx = (*mx as f64 * std::f64::consts::PI * col as f64 * h / width).sin();
                for row in 1..=ny {
                    let sy = (*my as f64 * std::f64::consts::PI * row as f64 * h / pp.l_hat).sin();
                    f.push(Complex64::new(sx * sy, 0.0));
                }
            }
            f
        }
        Forcing::Random { seed } => random_vector(n, *seed),
    };
    Ok(DiscreteProblem {
        params: *pp,
        h,
        nx,
        ny,
        operator,
        rhs: f.iter().map(|v| -v).collect(),
    })
}
