pub mod angular;
pub mod config;
pub mod error;
pub mod evolution;
pub mod field;
pub mod geometry;
pub mod horizons;
pub mod operators;
pub mod quadrature;
pub mod scattering;
pub mod scenario;
pub mod states;
pub mod stencil;
pub mod transport;
pub mod verify;

pub use error::{Error, Result};
