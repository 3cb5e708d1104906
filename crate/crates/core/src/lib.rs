//! Analysis and strip-domain solvers for optimized Schwarz methods on the
//! complex shifted Laplacian `Δu − (η − iε)u = f`.

pub mod eigen;
pub mod optimizer;
pub mod pde;
pub mod report;
pub mod error;
pub mod spectral;
pub mod symbol;

pub use error::{OsmError, Result};
pub use symbol::{Family, OuterBc, ProblemParams, Side, TransmissionParams};
