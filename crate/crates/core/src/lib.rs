//! Fourier–Galerkin simulation and certificate engine for two-phase
//! thin-film Muskat and Stokes systems on the periodic interval `[−π, π)`.

pub mod certificates;
pub mod config;
pub mod diagnostics;
pub mod harness;
pub mod mat2;
pub mod model;
pub mod muskat;
pub mod spectral;
pub mod state;
pub mod stokes;
pub mod timestepper;
pub mod verify;

pub use mat2::Mat2;
pub use model::{Model, ModelKind, ParamError};
pub use spectral::{NormOrder, SpectralError, TrigPoly};
pub use state::{SimState, StateError};
