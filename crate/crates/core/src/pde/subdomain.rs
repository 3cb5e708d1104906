//! Overlapping strip decomposition of a [`DiscreteProblem`].

use std::ops::RangeInclusive;

use num_complex::Complex64;

use super::grid::{grid_count, DiscreteProblem};
use super::local::{Edge, StripSolver};
use crate::error::Result;
use crate::symbol::TransmissionParams;

/// One strip `(a_j, b_j) × (0, L̂)` with its factorized local operator.
///
/// Restriction and extension act on whole node columns, so a subdomain is
/// described by its first and last global column (1-based, inclusive).
#[derive(Debug, Clone)]
pub struct Subdomain {
    /// 1-based subdomain number.
    pub index: usize,
    /// Global node columns carrying local unknowns.
    pub x_index_range: RangeInclusive<usize>,
    /// Columns with partition weight 1.
    pub owned: RangeInclusive<usize>,
    pub left: Edge,
    pub right: Edge,
    pub solver: StripSolver,
    ny: usize,
}

impl Subdomain {
    pub fn first_col(&self) -> usize {
        *self.x_index_range.start()
    }

    pub fn last_col(&self) -> usize {
        *self.x_index_range.end()
    }

    pub fn cols(&self) -> usize {
        self.last_col() - self.first_col() + 1
    }

    /// Global index range of the local unknowns.
    pub fn global_range(&self) -> std::ops::Range<usize> {
        (self.first_col() - 1) * self.ny..self.last_col() * self.ny
    }

    /// Local index range of the owned unknowns.
    pub fn owned_local_range(&self) -> std::ops::Range<usize> {
        let first = self.first_col();
        (self.owned.start() - first) * self.ny..(self.owned.end() - first + 1) * self.ny
    }

    pub fn restrict<'a>(&self, u: &'a [Complex64]) -> &'a [Complex64] {
        &u[self.global_range()]
    }

    /// Partition weight of a global column.
    pub fn weight(&self, col: usize) -> u8 {
        u8::from(self.owned.contains(&col))
    }

    /// `D_i Ã_i^{-1} R_i r`, returned on the owned unknowns only.
    pub fn local_correction(&self, r: &[Complex64]) -> Vec<Complex64> {
        let v = self.solver.solve(self.restrict(r));
        v[self.owned_local_range()].to_vec()
    }
}

/// Splits `dp` into `J` overlapping strips on the node columns of
/// `[a_j, b_j]`. With `TransmissionParams::Dirichlet` the local matrices are
/// plain restrictions of `A` (classical restricted additive Schwarz, so the
/// zero data sits one column outside); every other family puts Robin or
/// Ventcell rows on the end columns.
pub fn strip_partition(dp: &DiscreteProblem, tp: &TransmissionParams) -> Result<Vec<Subdomain>> {
    tp.validate()?;
    let pp = &dp.params;
    let h = dp.h;
    let big_n = dp.intervals_x();
    let width = grid_count(pp.l, h, "L")?;
    let half = grid_count(pp.delta / 2.0, h, "delta/2")?;
    let dirichlet = matches!(tp, TransmissionParams::Dirichlet);
    let mut subs = Vec::with_capacity(pp.j);
    for j in 1..=pp.j {
        let lo = ((j - 1) * width) as isize - half as isize;
        let hi = (j * width + half) as isize;
        let first = lo.max(1) as usize;
        let last = (hi.min(big_n as isize - 1)) as usize;
        let (p, q) = tp.subdomain_coefficients(j);
        let transmission = if dirichlet { Edge::Dirichlet } else { Edge::Robin { p, q } };
        let left = if lo < 1 { Edge::Dirichlet } else { transmission };
        let right = if hi > big_n as isize - 1 { Edge::Dirichlet } else { transmission };
        let own_first = ((j - 1) * width).max(1);
        let own_last = if j == pp.j { big_n - 1 } else { j * width - 1 };
        let solver = StripSolver::new(h, dp.ny, last - first + 1, dp.shift(), left, right, j)?;
        subs.push(Subdomain {
            index: j,
            x_index_range: first..=last,
            owned: own_first..=own_last,
            left,
            right,
            solver,
            ny: dp.ny,
        });
    }
    Ok(subs)
}
