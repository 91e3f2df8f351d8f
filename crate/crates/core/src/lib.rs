//! De Broglie trajectories far from the Born bulk of the 2-D isotropic
//! harmonic oscillator: wave-function evaluation in the angular and Cartesian
//! eigenbases, adaptive trajectory integration, node finding and tracking,
//! total vorticity from the highest energy shell, and one-period drift fields
//! with their type-0/1/2 classification.
//!
//! The numerical kernels are generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix them to `f64`, which is what the
//! experiment layer uses.

pub mod basis;
pub mod contour;
pub mod drift;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod io;
pub mod nodes;
pub mod scalar;
pub mod vorticity;

pub use error::{Error, Result};
pub use scalar::Real;

pub type AngularState = basis::AngularState<f64>;
pub type CartesianState = basis::CartesianState<f64>;
pub type PolarPoint = basis::PolarPoint<f64>;
pub type CartesianPoint = basis::CartesianPoint<f64>;
pub type ComplexAmplitude = basis::ComplexAmplitude<f64>;
