use serde::{Deserialize, Serialize};

use crate::basis::AngularState;
use crate::drift::{
    classify, compute_drift_field, exterior_probe, refine_crossings, ClassifyOptions, DriftClass,
    DriftField, ExteriorOptions, GridSpec,
};
use crate::dynamics::IntegratorConfig;
use crate::error::{Error, Result};
use crate::vorticity::total_vorticity_theorem;

/// Everything needed to turn a state into a drift classification.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub grid: GridSpec,
    pub probe_radii: Vec<f64>,
    pub classify: ClassifyOptions,
    pub integrator: IntegratorConfig<f64>,
    /// Push the grid outwards until the probe rings enclose every node.
    /// Without it the grid is used as given.
    pub exterior: Option<ExteriorOptions>,
    /// Bisection tolerance for locating axis crossings; `None` keeps the
    /// grid interpolation.
    pub refine_tol: Option<f64>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::square(64),
            probe_radii: vec![8.0, 10.0, 12.0],
            classify: ClassifyOptions::default(),
            integrator: IntegratorConfig::default(),
            exterior: Some(ExteriorOptions::default()),
            refine_tol: Some(1e-9),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateAnalysis {
    pub n_vorticity: i32,
    /// Factor applied to the grid and probe radii.
    pub probe_scale: f64,
    pub probe_radii: Vec<f64>,
    pub class: DriftClass,
    #[serde(skip)]
    pub field: Option<DriftField>,
}

/// Vorticity, drift field and classification of one state.
pub fn analyze_state(
    state: &AngularState<f64>,
    cfg: &AnalysisConfig,
    keep_field: bool,
) -> Result<StateAnalysis> {
    if state.m() == 0 {
        return Err(Error::InvalidInput("m = 0 states have no drift dynamics".into()));
    }
    let n = total_vorticity_theorem(state)?.n;
    let (grid, radii, scale) = match &cfg.exterior {
        Some(opts) => {
            let p = exterior_probe(state, &cfg.grid, &cfg.probe_radii, opts)?;
            (p.grid, p.probe_radii, p.scale)
        }
        None => (cfg.grid, cfg.probe_radii.clone(), 1.0),
    };
    let field = compute_drift_field(state, &grid, &cfg.integrator)?;
    let mut class = classify(&field, &radii, &cfg.classify)?;
    if let Some(tol) = cfg.refine_tol {
        class = refine_crossings(state, &cfg.integrator, &class, tol)?;
    }
    Ok(StateAnalysis {
        n_vorticity: n,
        probe_scale: scale,
        probe_radii: radii,
        class,
        field: keep_field.then_some(field),
    })
}
