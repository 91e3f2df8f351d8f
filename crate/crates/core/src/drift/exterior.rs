use std::f64::consts::TAU;

use super::field::GridSpec;
use crate::basis::AngularState;
use crate::error::{Error, Result};
use crate::vorticity::{total_vorticity_bruteforce, total_vorticity_theorem};

/// Grid and probe radii pushed far enough out that every node stays inside.
#[derive(Debug, Clone, PartialEq)]
pub struct ExteriorProbe {
    /// Factor applied to the base grid annulus and probe radii.
    pub scale: f64,
    pub grid: GridSpec,
    pub probe_radii: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExteriorOptions {
    /// The innermost probe must sit at least this factor beyond a circle that
    /// already encloses all nodes.
    pub margin: f64,
    /// Times per period at which the enclosing circle is checked.
    pub n_times: usize,
    /// Growth factor between attempts.
    pub growth: f64,
    pub max_scale: f64,
}

impl Default for ExteriorOptions {
    fn default() -> Self {
        Self {
            margin: 2.0,
            n_times: 64,
            growth: 1.5,
            max_scale: 1e4,
        }
    }
}

/// Scales `grid` and `probe_radii` by the smallest power of `growth` for which
/// the phase of `psi` winds exactly the total vorticity around the circle
/// `eta = min(probe_radii) / margin` at every checked time, i.e. no node
/// is found outside that circle during the period.
pub fn exterior_probe(
    state: &AngularState<f64>,
    grid: &GridSpec,
    probe_radii: &[f64],
    opts: &ExteriorOptions,
) -> Result<ExteriorProbe> {
    grid.validate()?;
    let inner = probe_radii.iter().copied().fold(f64::INFINITY, f64::min);
    if !(inner.is_finite() && inner > 0.0) || opts.margin < 1.0 || opts.growth <= 1.0 {
        return Err(Error::InvalidInput("bad exterior probe settings".into()));
    }
    let n = total_vorticity_theorem(state)?.n;
    let samples = 64 * (state.m() + 1);
    let mut scale = 1.0;
    while scale <= opts.max_scale {
        let radius = inner * scale / opts.margin;
        let encloses = (0..opts.n_times).all(|k| {
            let t = TAU * k as f64 / opts.n_times as f64;
            matches!(total_vorticity_bruteforce(state, radius, t, samples), Ok(r) if r.n == n)
        });
        if encloses {
            return Ok(ExteriorProbe {
                scale,
                grid: GridSpec {
                    eta_min: grid.eta_min * scale,
                    eta_max: grid.eta_max * scale,
                    ..*grid
                },
                probe_radii: probe_radii.iter().map(|r| r * scale).collect(),
            });
        }
        scale *= opts.growth;
    }
    Err(Error::Degenerate(format!(
        "nodes reach beyond {:.3e}; no exterior probe ring available",
        inner * opts.max_scale / opts.margin
    )))
}
