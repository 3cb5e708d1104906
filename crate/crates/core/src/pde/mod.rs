//! Finite difference model problem with Schwarz solvers on strips.

mod dst;
mod gmres;
mod grid;
mod local;
mod schwarz;
mod subdomain;
mod sweep;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use dst::Dst;
pub use gmres::{gmres_solve, GmresOptions};
pub use grid::{discretize, CsrMatrix, DiscreteProblem, Forcing};
pub use local::{Edge, StripSolver};
pub use schwarz::{
    apply_preconditioner, ras_iterate, stationary_solve, Preconditioner, SolveReport,
    StationaryOptions,
};
pub use subdomain::{strip_partition, Subdomain};
pub use sweep::{
    choose_params, solve_case, sweep_mesh, sweep_subdomains, ParamSource, SolverMode, SubdomainLayout, SweepOptions, SweepRow,
};

/// Seed used for random initial guesses and right-hand sides.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Complex entries uniform in `[0, 1) × [0, 1)`.
pub fn random_vector(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Complex64::new(rng.gen::<f64>(), rng.gen::<f64>()))
        .collect()
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
