use super::cash_karp::cash_karp_step;
use super::velocity::VelocityField;
use crate::basis::{AngularState, CartesianPoint, PolarPoint};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_step: T,
    pub min_step: T,
    /// Consecutive rejected attempts allowed for a single step.
    pub max_rejects: usize,
    /// Accepted steps allowed per period of integrated time before a flow
    /// gives up (trajectories orbiting very close to a node).
    pub max_steps_per_period: usize,
    /// `|psi|^2 / scale^2` below which a trajectory is treated as hitting a node.
    pub node_floor: T,
}

impl<T: Real> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-10),
            abs_tol: T::lit(1e-12),
            max_step: T::lit(0.01) * T::TAU(),
            min_step: T::lit(1e-12),
            max_rejects: 64,
            max_steps_per_period: 200_000,
            node_floor: T::lit(1e-20),
        }
    }
}

impl<T: Real> IntegratorConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > T::zero()
            && self.abs_tol > T::zero()
            && self.min_step > T::zero()
            && self.min_step < self.max_step
            && self.max_rejects > 0
            && self.max_steps_per_period > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(
                "integrator tolerances must be positive and min_step < max_step".into(),
            ))
        }
    }

    /// Same configuration with both tolerances scaled by `factor`.
    pub fn scaled_tolerances(&self, factor: T) -> Self {
        Self {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..*self
        }
    }
}

/// One full wave-function period in dimensionless time. Every relative phase
/// `exp(-i (n - n') T)` has an integer frequency, so the density and velocity
/// field repeat after `2 pi`.
pub fn period<T: Real>(_state: &AngularState<T>) -> T {
    T::TAU()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult<T> {
    pub point: CartesianPoint<T>,
    pub t: T,
    pub h_used: T,
    pub h_next: T,
    /// Scaled error estimate of the accepted step (<= 1).
    pub error: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryStatus {
    Completed,
    AbortedNearNode,
    StepUnderflow,
    StepBudget,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub samples: Vec<(T, PolarPoint<T>)>,
    pub status: TrajectoryStatus,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> Option<(T, PolarPoint<T>)> {
        self.samples.last().copied()
    }
}

/// End point of a flow-map evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowEnd<T> {
    pub point: CartesianPoint<T>,
    pub t: T,
    /// Unwrapped change of the polar angle along the path.
    pub delta_phi: T,
    pub steps: usize,
}

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// Adaptive Cash-Karp integration of the guidance equation for one state.
/// Integration happens in Cartesian coordinates; nothing special happens at
/// the origin.
#[derive(Debug, Clone)]
pub struct Flow<T> {
    field: VelocityField<T>,
    cfg: IntegratorConfig<T>,
}

struct Controller<T> {
    h: T,
    err_prev: T,
}

impl<T: Real> Flow<T> {
    pub fn new(state: &AngularState<T>, cfg: IntegratorConfig<T>) -> Self {
        Self {
            field: VelocityField::new(state, cfg.node_floor),
            cfg,
        }
    }

    pub fn config(&self) -> &IntegratorConfig<T> {
        &self.cfg
    }

    pub fn field(&self) -> &VelocityField<T> {
        &self.field
    }

    fn error_norm(&self, y0: &[T; 2], y1: &[T; 2], e: &[T; 2]) -> T {
        let r = y0[0].hypot(y0[1]).max(y1[0].hypot(y1[1]));
        e[0].hypot(e[1]) / (self.cfg.abs_tol + self.cfg.rel_tol * r)
    }

    // One accepted step from (t, y), not passing t_end. `ctl.h` carries the
    // signed trial step in and the proposal for the next step out.
    fn accepted_step(
        &self,
        t: T,
        y: [T; 2],
        t_end: T,
        ctl: &mut Controller<T>,
    ) -> Result<(T, [T; 2], T, T)> {
        let dir = if t_end >= t { T::one() } else { -T::one() };
        let mut f = |tt: T, yy: &[T; 2]| self.field.cartesian(yy[0], yy[1], tt);
        let mut rejects = 0usize;
        loop {
            let mut h = ctl.h.abs().min(self.cfg.max_step) * dir;
            let remaining = t_end - t;
            let truncated = h.abs() >= remaining.abs();
            if truncated {
                h = remaining;
            }
            if h.abs() < self.cfg.min_step && !truncated {
                return Err(Error::StepUnderflow {
                    t: t.to_f64_lossy(),
                    h: h.abs().to_f64_lossy(),
                });
            }
            let step = cash_karp_step(&mut f, t, &y, h)?;
            let err = self.error_norm(&y, &step.y, &step.error);
            if err <= T::one() {
                let e = err.max(T::lit(1e-10));
                let mut factor = T::lit(SAFETY)
                    * e.powf(-T::lit(ALPHA))
                    * ctl.err_prev.powf(T::lit(BETA));
                factor = factor.max(T::lit(MIN_FACTOR)).min(T::lit(MAX_FACTOR));
                if rejects > 0 {
                    factor = factor.min(T::one());
                }
                ctl.err_prev = e;
                // a truncated final step says little about the natural size
                let base = if truncated { ctl.h.abs().max(h.abs()) } else { h.abs() };
                ctl.h = (base * factor).min(self.cfg.max_step) * dir;
                let t_new = if truncated { t_end } else { t + h };
                return Ok((t_new, step.y, h, err));
            }
            rejects += 1;
            if rejects > self.cfg.max_rejects {
                return Err(Error::TooManyRejects { t: t.to_f64_lossy() });
            }
            let factor = (T::lit(SAFETY) * err.powf(-T::lit(ALPHA))).max(T::lit(MIN_FACTOR));
            ctl.h = h.abs() * factor * dir;
            if ctl.h.abs() < self.cfg.min_step {
                return Err(Error::StepUnderflow {
                    t: t.to_f64_lossy(),
                    h: ctl.h.abs().to_f64_lossy(),
                });
            }
        }
    }

    fn step_budget(&self, t0: T, t1: T) -> usize {
        let periods = ((t1 - t0).abs() / T::TAU()).ceil().to_f64_lossy().max(1.0);
        (periods * self.cfg.max_steps_per_period as f64).min(usize::MAX as f64) as usize
    }

    fn initial_controller(&self, t0: T, t1: T) -> Controller<T> {
        let dir = if t1 >= t0 { T::one() } else { -T::one() };
        Controller {
            h: self.cfg.max_step * T::lit(0.1) * dir,
            err_prev: T::one(),
        }
    }

    /// A single adaptive step of trial size `h` (sign gives the direction).
    pub fn step(&self, p: CartesianPoint<T>, t: T, h: T) -> Result<StepResult<T>> {
        let mut ctl = Controller { h, err_prev: T::one() };
        let end = t + h.signum() * T::max_value().sqrt();
        let (t_new, y, h_used, err) = self.accepted_step(t, [p.x, p.y], end, &mut ctl)?;
        Ok(StepResult {
            point: CartesianPoint::new(y[0], y[1]),
            t: t_new,
            h_used,
            h_next: ctl.h,
            error: err,
        })
    }

    /// Flow map from `t0` to `t1`, landing exactly on `t1`.
    pub fn flow(&self, p0: CartesianPoint<T>, t0: T, t1: T) -> Result<FlowEnd<T>> {
        let mut ctl = self.initial_controller(t0, t1);
        let mut t = t0;
        let mut y = [p0.x, p0.y];
        let mut delta_phi = T::zero();
        let mut steps = 0;
        let budget = self.step_budget(t0, t1);
        while t != t1 {
            if steps >= budget {
                return Err(Error::StepBudget { t: t.to_f64_lossy() });
            }
            let (tn, yn, _, _) = self.accepted_step(t, y, t1, &mut ctl)?;
            delta_phi += (y[0] * yn[1] - y[1] * yn[0]).atan2(y[0] * yn[0] + y[1] * yn[1]);
            t = tn;
            y = yn;
            steps += 1;
        }
        Ok(FlowEnd {
            point: CartesianPoint::new(y[0], y[1]),
            t,
            delta_phi,
            steps,
        })
    }

    /// Integrates from `t0` to `t1`, recording every accepted step. Failures
    /// end the trajectory early with the corresponding status.
    pub fn evolve(&self, p0: PolarPoint<T>, t0: T, t1: T) -> Trajectory<T> {
        let c = p0.to_cartesian();
        let mut samples = vec![(t0, p0)];
        let mut ctl = self.initial_controller(t0, t1);
        let mut t = t0;
        let mut y = [c.x, c.y];
        let mut status = TrajectoryStatus::Completed;
        let budget = self.step_budget(t0, t1);
        while t != t1 {
            if samples.len() > budget {
                status = TrajectoryStatus::StepBudget;
                break;
            }
            match self.accepted_step(t, y, t1, &mut ctl) {
                Ok((tn, yn, _, _)) => {
                    t = tn;
                    y = yn;
                    samples.push((t, CartesianPoint::new(y[0], y[1]).to_polar()));
                }
                Err(Error::NodeProximity { .. }) => {
                    status = TrajectoryStatus::AbortedNearNode;
                    break;
                }
                Err(_) => {
                    status = TrajectoryStatus::StepUnderflow;
                    break;
                }
            }
        }
        Trajectory { samples, status }
    }
}

/// One accepted adaptive step; see [`Flow::step`].
pub fn step<T: Real>(
    state: &AngularState<T>,
    p: PolarPoint<T>,
    t: T,
    h: T,
    cfg: &IntegratorConfig<T>,
) -> Result<StepResult<T>> {
    cfg.validate()?;
    if h.abs() < cfg.min_step || h.abs() > cfg.max_step {
        return Err(Error::InvalidInput("trial step outside [min_step, max_step]".into()));
    }
    Flow::new(state, *cfg).step(p.to_cartesian(), t, h)
}

pub fn evolve<T: Real>(
    state: &AngularState<T>,
    p0: PolarPoint<T>,
    t0: T,
    t1: T,
    cfg: &IntegratorConfig<T>,
) -> Trajectory<T> {
    Flow::new(state, *cfg).evolve(p0, t0, t1)
}
