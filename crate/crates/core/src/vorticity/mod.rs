//! Total vorticity: the vorticity theorem on the highest energy shell, the
//! equivalent Laurent-polynomial form, and brute-force phase winding of `psi`
//! on a large circle.

mod polynomial;
mod sampling;
mod theorem;

pub use polynomial::{min_modulus_on_circle, shell_polynomial, zeros_in_unit_disk, ShellPolynomial};
pub use sampling::{
    generate_state_with_vorticity, sample_vorticity_distribution, VorticityHistogram,
};
pub use theorem::{
    allowed_vorticities, node_free_radius, total_vorticity_bruteforce, total_vorticity_laurent,
    total_vorticity_theorem, VorticityMethod, VorticityReport,
};
