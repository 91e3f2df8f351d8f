use num_complex::Complex;

use crate::basis::{AngularState, CartesianPoint, ReducedWave};
use crate::contour::{winding_number, UnwrapOptions};
use crate::error::{Error, Result};

use super::finder::poly_scale;

/// Phase winding of `psi` around the circle of the given radius centred on
/// `node`, snapped to an integer (deviation below `1e-3` turns required).
pub fn node_winding(
    state: &AngularState<f64>,
    node: &CartesianPoint<f64>,
    t: f64,
    radius: f64,
) -> Result<i32> {
    if !(radius > 0.0) {
        return Err(Error::InvalidInput("winding radius must be positive".into()));
    }
    let wave = ReducedWave::new(state);
    let opts = UnwrapOptions {
        initial_samples: 32,
        max_depth: 30,
        max_increment: std::f64::consts::FRAC_PI_2,
    };
    winding_number(
        |s: f64| wave.value(node.x + radius * s.cos(), node.y + radius * s.sin(), t),
        &opts,
        1e-3,
    )
}

/// Winding sign from the first derivatives `a_x`, `a_y` at the node. Near a
/// simple zero `psi ~ a_x dx + a_y dy`, whose phase turns counter-clockwise
/// exactly when `Im(conj(a_x) a_y) > 0`.
///
/// Derivatives are those of `psi / chi_00` relative to the polynomial scale,
/// so nodes far out are not mistaken for degenerate ones.
pub fn node_winding_sign_linearized(
    state: &AngularState<f64>,
    node: &CartesianPoint<f64>,
    t: f64,
) -> Result<i32> {
    let wave = ReducedWave::new(state);
    let s = wave.sample(node.x, node.y, t);
    let scale = poly_scale(state.m(), node.x, node.y);
    let (ax, ay): (Complex<f64>, Complex<f64>) = (s.dx / scale, s.dy / scale);
    if ax.norm() <= 1e-10 || ay.norm() <= 1e-10 {
        return Err(Error::FineTuned("vanishing first derivative at node".into()));
    }
    let cross = (ax.conj() * ay).im;
    if cross.abs() <= 1e-10 * ax.norm() * ay.norm() {
        return Err(Error::FineTuned("parallel first derivatives at node".into()));
    }
    Ok(if cross > 0.0 { 1 } else { -1 })
}
