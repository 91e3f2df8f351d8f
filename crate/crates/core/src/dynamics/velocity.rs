use crate::basis::{AngularState, PolarPoint, ReducedWave};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Guidance velocity in polar form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Velocity<T> {
    pub eta_dot: T,
    pub phi_dot: T,
}

impl<T: Real> Velocity<T> {
    /// Polar components from a Cartesian velocity at `(x, y)`.
    pub fn from_cartesian(x: T, y: T, vx: T, vy: T) -> Self {
        let r2 = x * x + y * y;
        let r = r2.sqrt();
        Self {
            eta_dot: (x * vx + y * vy) / r,
            phi_dot: (x * vy - y * vx) / r2,
        }
    }

    /// Cartesian components at the polar point `p`.
    pub fn to_cartesian(self, p: PolarPoint<T>) -> (T, T) {
        let (s, c) = p.phi.sin_cos();
        let tangential = p.eta * self.phi_dot;
        (
            self.eta_dot * c - tangential * s,
            self.eta_dot * s + tangential * c,
        )
    }
}

/// Velocity field `v = Im(grad psi / psi)` of one state, evaluated in
/// Cartesian coordinates through the reduced wave function.
#[derive(Debug, Clone)]
pub struct VelocityField<T> {
    wave: ReducedWave<T>,
    node_floor: T,
}

impl<T: Real> VelocityField<T> {
    /// `node_floor` is the ratio `|psi|^2 / scale^2` below which the velocity
    /// is reported as undefined (see [`crate::basis::ReducedSample::scale`]).
    pub fn new(state: &AngularState<T>, node_floor: T) -> Self {
        Self {
            wave: ReducedWave::new(state),
            node_floor,
        }
    }

    pub fn wave(&self) -> &ReducedWave<T> {
        &self.wave
    }

    pub fn cartesian(&self, x: T, y: T, t: T) -> Result<[T; 2]> {
        let s = self.wave.sample(x, y, t);
        let v2 = s.value.norm_sqr();
        if !(v2 > self.node_floor * s.scale * s.scale) {
            return Err(Error::NodeProximity {
                x: x.to_f64_lossy(),
                y: y.to_f64_lossy(),
                t: t.to_f64_lossy(),
            });
        }
        let (vx, vy) = s.velocity();
        Ok([vx, vy])
    }
}

/// `eta_dot = Im(d_eta psi / psi)`, `phi_dot = eta^-2 Im(d_phi psi / psi)`.
pub fn velocity<T: Real>(state: &AngularState<T>, p: PolarPoint<T>, t: T) -> Result<Velocity<T>> {
    let field = VelocityField::new(state, T::lit(1e-20));
    let c = p.to_cartesian();
    let [vx, vy] = field.cartesian(c.x, c.y, t)?;
    if p.eta == T::zero() {
        return Err(Error::InvalidInput("polar velocity undefined at eta = 0".into()));
    }
    Ok(Velocity::from_cartesian(c.x, c.y, vx, vy))
}
