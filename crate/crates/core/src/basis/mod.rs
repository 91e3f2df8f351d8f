//! Oscillator eigenbases, wave-function evaluation and basis conversion.
//!
//! States are stored densely over the triangular index set `n_d + n_g <= m`
//! (or `n_x + n_y <= m`). The dense position of `(a, b)` is
//! `n (n + 1) / 2 + a` with `n = a + b`, so shells are contiguous.

mod convert;
mod eval;
mod radial;
mod random;
mod state;

pub use convert::{angular_to_cartesian, cartesian_to_angular, shell_transform};
pub use eval::{
    eval_psi_angular, eval_psi_cartesian, ground_state, grad_psi, ReducedSample, ReducedWave,
};
pub use radial::{complex_hermite_table, eval_f, eval_f_derivative, hermite};
pub use random::{derive_seed, random_state};
pub use state::{
    basis_len, dense_index, shell_from_basis_size, shell_indices, AngularState, CartesianPoint, CartesianState,
    ComplexAmplitude, PolarPoint,
};
