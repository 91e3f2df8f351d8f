use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::basis::{angular_to_cartesian, AngularState, CartesianPoint};
use crate::error::{Error, Result};

fn require_m1(state: &AngularState<f64>) -> Result<()> {
    if state.m() != 1 {
        return Err(Error::InvalidInput(format!(
            "three-state analytic node needs m = 1, got m = {}",
            state.m()
        )));
    }
    Ok(())
}

/// Position of the single node of an `m = 1` state at time `t`, from the
/// Cartesian amplitudes `D = d exp(i theta)`:
///
/// `Q_x = d00 sin(th01 - th00 - t) / (sqrt 2 d10 sin(th10 - th01))`,
/// `Q_y = d00 sin(th10 - th00 - t) / (sqrt 2 d01 sin(th01 - th10))`.
pub fn node_path_m3(state: &AngularState<f64>, t: f64) -> Result<CartesianPoint<f64>> {
    require_m1(state)?;
    let cart = angular_to_cartesian(state);
    let d00 = cart.coefficient(0, 0);
    let d10 = cart.coefficient(1, 0);
    let d01 = cart.coefficient(0, 1);
    if d10.norm() == 0.0 || d01.norm() == 0.0 {
        return Err(Error::Degenerate("a first-shell Cartesian amplitude vanishes".into()));
    }
    let (th00, th10, th01) = (d00.arg(), d10.arg(), d01.arg());
    let den = (th10 - th01).sin();
    if den.abs() < 1e-9 {
        return Err(Error::FineTuned(
            "first-shell phases differ by a multiple of pi; the nodal path is a line".into(),
        ));
    }
    let qx = FRAC_1_SQRT_2 * d00.norm() / d10.norm() * (th01 - th00 - t).sin() / den;
    let qy = FRAC_1_SQRT_2 * d00.norm() / d01.norm() * (th10 - th00 - t).sin() / -den;
    Ok(CartesianPoint::new(qx, qy))
}

/// Ellipse traced by the node of an `m = 1` state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseM3 {
    pub semi_minor: f64,
    pub semi_major: f64,
    /// Direction of the semi-major axis, in `[0, pi)`.
    pub orientation: f64,
    pub area: f64,
}

/// Closed-form nodal ellipse from the angular magnitudes `c` and phases
/// `phi`: semi-axes `c00 / (c10 + c01)` and `c00 / |c10 - c01|`, area
/// `pi c00^2 / |c10^2 - c01^2|`, major axis along `(phi01 - phi10 + pi) / 2`.
pub fn node_ellipse_m3(state: &AngularState<f64>) -> Result<EllipseM3> {
    require_m1(state)?;
    let c00 = state.coefficient(0, 0).norm();
    let z10 = state.coefficient(1, 0);
    let z01 = state.coefficient(0, 1);
    let (c10, c01) = (z10.norm(), z01.norm());
    if (c10 - c01).abs() <= 1e-12 {
        return Err(Error::Degenerate(
            "equal first-shell magnitudes give an unbounded nodal path".into(),
        ));
    }
    Ok(EllipseM3 {
        semi_minor: c00 / (c10 + c01),
        semi_major: c00 / (c10 - c01).abs(),
        orientation: (0.5 * (z01.arg() - z10.arg() + PI)).rem_euclid(PI),
        area: PI * c00 * c00 / (c10 * c10 - c01 * c01).abs(),
    })
}
