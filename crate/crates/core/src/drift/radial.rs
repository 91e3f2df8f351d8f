use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::basis::{derive_seed, AngularState, PolarPoint};
use crate::dynamics::{Flow, IntegratorConfig};
use crate::error::{Error, Result};

/// How initial radii are drawn in the annulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialInit {
    /// Uniform in area: `eta^2` uniform.
    #[default]
    AreaUniform,
    /// `eta` itself uniform.
    RadiusUniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialSample {
    pub eta_initial: f64,
    pub phi_initial: f64,
    /// `None` when the trajectory was aborted.
    pub eta_final: Option<f64>,
}

impl RadialSample {
    pub fn d_eta(&self) -> Option<f64> {
        self.eta_final.map(|e| e - self.eta_initial)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialDriftReport {
    pub samples: Vec<RadialSample>,
    pub aborted: usize,
    pub median: f64,
    pub lower_quartile: f64,
    pub upper_quartile: f64,
}

/// Linearly interpolated quantile of already sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Evolves `n_traj` trajectories started in `eta_min < eta < eta_max` for
/// `n_periods` wave-function periods and summarizes the radial displacement.
#[allow(clippy::too_many_arguments)]
pub fn radial_drift_experiment(
    state: &AngularState<f64>,
    n_traj: usize,
    eta_range: (f64, f64),
    n_periods: usize,
    seed: u64,
    cfg: &IntegratorConfig<f64>,
    init: RadialInit,
) -> Result<RadialDriftReport> {
    let (lo, hi) = eta_range;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidInput("eta range needs 0 < lo < hi".into()));
    }
    if n_traj == 0 || n_periods == 0 {
        return Err(Error::InvalidInput("need at least one trajectory and period".into()));
    }
    cfg.validate()?;
    let flow = Flow::new(state, *cfg);
    let t_end = TAU * n_periods as f64;
    let samples: Vec<RadialSample> = (0..n_traj)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, k as u64));
            let u: f64 = rng.gen();
            let eta = match init {
                RadialInit::AreaUniform => (lo * lo + u * (hi * hi - lo * lo)).sqrt(),
                RadialInit::RadiusUniform => lo + u * (hi - lo),
            };
            let phi = rng.gen::<f64>() * TAU;
            let p0 = PolarPoint::new(eta, phi).to_cartesian();
            let eta_final = flow.flow(p0, 0.0, t_end).ok().map(|end| end.point.norm());
            RadialSample {
                eta_initial: eta,
                phi_initial: phi,
                eta_final,
            }
        })
        .collect();
    let mut d: Vec<f64> = samples.iter().filter_map(RadialSample::d_eta).collect();
    let aborted = samples.len() - d.len();
    if aborted > 0 {
        log::warn!("{aborted} of {n_traj} radial-drift trajectories aborted");
    }
    d.sort_by(f64::total_cmp);
    Ok(RadialDriftReport {
        median: quantile(&d, 0.5),
        lower_quartile: quantile(&d, 0.25),
        upper_quartile: quantile(&d, 0.75),
        samples,
        aborted,
    })
}
