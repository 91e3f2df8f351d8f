use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::theorem::{allowed_vorticities, total_vorticity_theorem};
use crate::basis::{derive_seed, random_state, AngularState};
use crate::error::{Error, Result};

/// Counts of total vorticity `n` over an ensemble of random states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VorticityHistogram {
    pub m: usize,
    pub samples: u64,
    pub counts: BTreeMap<i32, u64>,
    /// Draws discarded because a shell zero sat too close to the unit circle.
    #[serde(skip)]
    pub resampled: u64,
}

impl VorticityHistogram {
    pub fn probability(&self, n: i32) -> f64 {
        self.counts.get(&n).copied().unwrap_or(0) as f64 / self.samples as f64
    }

    /// Binomial standard error of [`Self::probability`].
    pub fn std_error(&self, n: i32) -> f64 {
        let p = self.probability(n);
        (p * (1.0 - p) / self.samples as f64).sqrt()
    }
}

const MAX_REDRAWS: u64 = 1000;

// Vorticity of sample `index`, redrawing on near-degenerate shells.
fn draw(m: usize, seed: u64, index: u64) -> Result<(i32, u64)> {
    let base = derive_seed(seed, index);
    for attempt in 0..MAX_REDRAWS {
        let s = if attempt == 0 {
            random_state(m, base)
        } else {
            random_state(m, derive_seed(base, attempt))
        };
        match total_vorticity_theorem(&s) {
            Ok(r) => return Ok((r.n, attempt)),
            Err(Error::ZeroNearCircle) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ZeroNearCircle)
}

/// Histogram of the theorem vorticity over `n_samples` random states. Sample
/// `i` is drawn from `derive_seed(seed, i)`, so the result does not depend on
/// how the work is scheduled.
pub fn sample_vorticity_distribution(
    m: usize,
    n_samples: u64,
    seed: u64,
) -> Result<VorticityHistogram> {
    if n_samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let empty = || {
        let counts: BTreeMap<i32, u64> = allowed_vorticities(m).into_iter().map(|n| (n, 0)).collect();
        (counts, 0u64)
    };
    let (counts, resampled) = (0..n_samples)
        .into_par_iter()
        .map(|i| draw(m, seed, i))
        .try_fold(empty, |(mut counts, redraws), r| {
            let (n, extra) = r?;
            *counts.entry(n).or_insert(0) += 1;
            Ok::<_, Error>((counts, redraws + extra))
        })
        .try_reduce(empty, |(mut a, ra), (b, rb)| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            Ok((a, ra + rb))
        })?;
    Ok(VorticityHistogram {
        m,
        samples: n_samples,
        counts,
        resampled,
    })
}

/// Rejection sampling for a random state of the requested total vorticity.
/// Attempt `k` uses `random_state(m, derive_seed(seed, k))`.
pub fn generate_state_with_vorticity(
    m: usize,
    target_n: i32,
    seed: u64,
    max_attempts: usize,
) -> Result<AngularState<f64>> {
    if !allowed_vorticities(m).contains(&target_n) {
        return Err(Error::InvalidInput(format!(
            "vorticity {target_n} is not attainable with m = {m}"
        )));
    }
    for k in 0..max_attempts {
        let s = random_state(m, derive_seed(seed, k as u64));
        if let Ok(r) = total_vorticity_theorem(&s) {
            if r.n == target_n {
                return Ok(s);
            }
        }
    }
    Err(Error::AttemptsExhausted {
        target: target_n,
        attempts: max_attempts,
    })
}
