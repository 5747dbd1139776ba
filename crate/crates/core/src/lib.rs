//! Simulation of a central spin-1/2 coupled to a bath of N spins through a
//! nonuniform Heisenberg (hyperfine) interaction in a magnetic field.
//!
//! The crate provides three routes to the reduced dynamics of the central
//! spin, all sharing the same model description:
//!
//! * [`exact`] — numerically exact propagation of the full von Neumann
//!   equation, block-diagonalized over total-Sz sectors and evaluated at
//!   arbitrary times from a one-time eigendecomposition.
//! * [`tcl2`] — the second-order time-convolutionless master equation over a
//!   correlated (sector-resolved) projection, with analytic solutions for
//!   coherences and populations and a direct ODE route for general initial
//!   block states.
//! * [`modified`] — the same TCL scheme in a modified interaction picture in
//!   which every rate has a closed form, plus a large-bath approximation of
//!   the population.
//!
//! Energies are measured in units of the Zeeman splitting `omega0` and times
//! in `1/omega0` unless a profile says otherwise.

pub mod error;
pub mod exact;
pub mod model;
pub mod modified;
pub mod ode;
pub mod spectra;
pub mod tcl2;
pub mod trajectory;

pub use error::Error;
pub use exact::ExactPropagator;
pub use model::{
    density_matrix_dim, BathSpec, BlockDensity, CouplingProfile, Sector, SectorEntry, SectorTable,
};
pub use modified::ModifiedPictureParams;
pub use spectra::FrequencyComb;
pub use tcl2::Tcl2Model;
pub use trajectory::{model_fingerprint, BlockTrajectory, Method, TrajectoryRecord};

/// 2x2 complex matrix of the central spin, basis index 0 = |+>, 1 = |->.
pub type Mat2 = nalgebra::Matrix2<num_complex::Complex64>;

/// Convenience alias used throughout.
pub type C64 = num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;
