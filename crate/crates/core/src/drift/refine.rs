use std::f64::consts::TAU;

use super::classify::DriftClass;
use crate::basis::{AngularState, PolarPoint};
use crate::dynamics::{Flow, IntegratorConfig};
use crate::error::Result;

/// One-period displacement `(d_eta, d_phi)` of the point `(eta, phi)`.
fn displacement(flow: &Flow<f64>, eta: f64, phi: f64) -> Result<(f64, f64)> {
    let end = flow.flow(PolarPoint::new(eta, phi).to_cartesian(), 0.0, TAU)?;
    Ok((end.point.norm() - eta, end.delta_phi))
}

/// Locates every crossing of a classification by bisecting the angular drift
/// inside its grid bracket with fresh trajectories, then replaces the
/// interpolated crossing angle and radial drift with the values found there.
///
/// Bisection keeps the bracket's orientation, so an attractive bracket always
/// resolves to a descending crossing even when it hides further sign changes
/// below the dead zone. Crossings whose trajectories fail keep their grid
/// estimate.
pub fn refine_crossings(
    state: &AngularState<f64>,
    cfg: &IntegratorConfig<f64>,
    class: &DriftClass,
    angle_tol: f64,
) -> Result<DriftClass> {
    cfg.validate()?;
    let flow = Flow::new(state, *cfg);
    let mut out = class.clone();
    for ring in &mut out.rings {
        let eta = ring.eta;
        for c in &mut ring.crossings {
            let (mut lo, mut hi) = c.bracket;
            // sign of d_phi at `lo`
            let lo_positive = c.attractive;
            let mut last = None;
            let mut failed = false;
            while hi - lo > angle_tol {
                let mid = 0.5 * (lo + hi);
                match displacement(&flow, eta, mid) {
                    Ok((de, dp)) => {
                        if (dp > 0.0) == lo_positive {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                        last = Some(de);
                    }
                    Err(e) => {
                        log::debug!("crossing refinement at eta={eta} phi={mid} failed: {e}");
                        failed = true;
                        break;
                    }
                }
            }
            if failed {
                continue;
            }
            let mid = 0.5 * (lo + hi);
            let d_eta = match displacement(&flow, eta, mid) {
                Ok((de, _)) => de,
                Err(_) => match last {
                    Some(de) => de,
                    None => continue,
                },
            };
            c.angle = mid.rem_euclid(TAU);
            c.d_eta = d_eta;
        }
    }
    out.refresh();
    Ok(out)
}
