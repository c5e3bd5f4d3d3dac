//! Stochastic Galerkin simulation of uncertain vehicular traffic flow.
//!
//! The crate expands random traffic fields in an orthonormal Haar basis of
//! a scalar random parameter and propagates the expansion coefficients
//! through two levels of description: a discrete-velocity kinetic
//! relaxation model in the Lagrangian velocity variable, and the
//! second-order fluid system it limits to. A Chapman-Enskog diffusion
//! coefficient evaluated on the reconstructed random density flags
//! traffic regimes at risk of instability, and a non-intrusive
//! collocation oracle validates the intrusive solution statistics.

pub mod basis;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod gpc;
pub mod initial;
pub mod kinetic;
pub mod mesh;
pub mod monte_carlo;
pub mod output;
pub mod physics;
pub mod rng;

mod arz;

pub use arz::{ArzOptions, ArzRun, ArzSolver, EquilibriumVelocity, FluidState};
pub use basis::HaarBasis;
pub use error::{Error, Result};
pub use gpc::{nodal_product, project_nonlinear, GalerkinTensor, GpcVector};
pub use initial::{InitialData, RandomScalar};
pub use kinetic::{KineticOptions, KineticRun, KineticSolver, KineticState, MaxwellianPlacement, WGrid};
pub use mesh::{Boundary, Mesh};
pub use physics::{PhysicsParams, RadicandRule};
