use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{AngularState, PolarPoint};
use crate::dynamics::{Flow, IntegratorConfig};
use crate::error::{Error, Result};

/// Polar grid of initial positions: `n_eta` radii spaced evenly on
/// `[eta_min, eta_max]` (both ends included) times `n_phi` angles
/// `2 pi j / n_phi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub eta_min: f64,
    pub eta_max: f64,
    pub n_eta: usize,
    pub n_phi: usize,
}

impl Default for GridSpec {
    /// 100 x 100 cells over `5 <= eta <= 20`, outside the Born bulk.
    fn default() -> Self {
        Self {
            eta_min: 5.0,
            eta_max: 20.0,
            n_eta: 100,
            n_phi: 100,
        }
    }
}

impl GridSpec {
    /// Square grid over the default annulus.
    pub fn square(n: usize) -> Self {
        Self {
            n_eta: n,
            n_phi: n,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta_min > 0.0) || !(self.eta_max > self.eta_min) {
            return Err(Error::InvalidInput("grid needs 0 < eta_min < eta_max".into()));
        }
        if self.n_eta < 8 || self.n_phi < 8 {
            return Err(Error::InvalidInput("grid needs at least 8 x 8 cells".into()));
        }
        Ok(())
    }

    pub fn eta(&self, i: usize) -> f64 {
        self.eta_min + (self.eta_max - self.eta_min) * i as f64 / (self.n_eta - 1) as f64
    }

    pub fn phi(&self, j: usize) -> f64 {
        std::f64::consts::TAU * j as f64 / self.n_phi as f64
    }

    pub fn len(&self) -> usize {
        self.n_eta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row whose radius is closest to `eta`.
    pub fn nearest_row(&self, eta: f64) -> usize {
        let f = (eta - self.eta_min) / (self.eta_max - self.eta_min) * (self.n_eta - 1) as f64;
        (f.round().max(0.0) as usize).min(self.n_eta - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    /// The trajectory came too close to a node (or the step size underflowed
    /// there); the cell carries no drift value.
    AbortedNearNode,
}

/// Displacement of every grid point after one wave-function period,
/// row-major with index `i * n_phi + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftField {
    pub grid: GridSpec,
    pub d_eta: Vec<f64>,
    /// Unwrapped angular displacement in radians.
    pub d_phi: Vec<f64>,
    pub status: Vec<CellStatus>,
}

impl DriftField {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.grid.n_phi + j
    }

    pub fn is_ok(&self, i: usize, j: usize) -> bool {
        self.status[self.index(i, j)] == CellStatus::Ok
    }

    pub fn aborted(&self) -> usize {
        self.status.iter().filter(|s| **s != CellStatus::Ok).count()
    }
}

/// Integrates every grid point over `T in [0, 2 pi]`.
pub fn compute_drift_field(
    state: &AngularState<f64>,
    grid: &GridSpec,
    cfg: &IntegratorConfig<f64>,
) -> Result<DriftField> {
    grid.validate()?;
    cfg.validate()?;
    let flow = Flow::new(state, *cfg);
    let tau = std::f64::consts::TAU;
    let cells: Vec<(f64, f64, CellStatus)> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / grid.n_phi, k % grid.n_phi);
            let eta0 = grid.eta(i);
            let p0 = PolarPoint::new(eta0, grid.phi(j)).to_cartesian();
            match flow.flow(p0, 0.0, tau) {
                Ok(end) => (end.point.norm() - eta0, end.delta_phi, CellStatus::Ok),
                Err(_) => (f64::NAN, f64::NAN, CellStatus::AbortedNearNode),
            }
        })
        .collect();
    let mut field = DriftField {
        grid: *grid,
        d_eta: Vec::with_capacity(cells.len()),
        d_phi: Vec::with_capacity(cells.len()),
        status: Vec::with_capacity(cells.len()),
    };
    for (de, dp, st) in cells {
        field.d_eta.push(de);
        field.d_phi.push(dp);
        field.status.push(st);
    }
    Ok(field)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSummary {
    pub values: Vec<f64>,
    pub max_abs: f64,
    /// Fraction of valid cells with a strictly positive value.
    pub positive_fraction: f64,
    /// Fraction of valid cells with a strictly negative value.
    pub negative_fraction: f64,
}

impl ComponentSummary {
    fn new(values: &[f64], status: &[CellStatus]) -> Self {
        let ok: Vec<f64> = values
            .iter()
            .zip(status)
            .filter(|(_, s)| **s == CellStatus::Ok)
            .map(|(v, _)| *v)
            .collect();
        let n = ok.len().max(1) as f64;
        Self {
            values: values.to_vec(),
            max_abs: ok.iter().fold(0.0, |a: f64, v| a.max(v.abs())),
            positive_fraction: ok.iter().filter(|v| **v > 0.0).count() as f64 / n,
            negative_fraction: ok.iter().filter(|v| **v < 0.0).count() as f64 / n,
        }
    }

    pub fn sign(&self, k: usize) -> i32 {
        let v = self.values[k];
        if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftComponents {
    pub radial: ComponentSummary,
    pub angular: ComponentSummary,
    /// Largest angular displacement measured as arc length `eta * d_phi`.
    pub max_arc: f64,
}

/// Splits a drift field into its radial and angular parts.
pub fn decompose(field: &DriftField) -> DriftComponents {
    let mut max_arc: f64 = 0.0;
    for i in 0..field.grid.n_eta {
        for j in 0..field.grid.n_phi {
            let k = field.index(i, j);
            if field.status[k] == CellStatus::Ok {
                max_arc = max_arc.max((field.grid.eta(i) * field.d_phi[k]).abs());
            }
        }
    }
    DriftComponents {
        radial: ComponentSummary::new(&field.d_eta, &field.status),
        angular: ComponentSummary::new(&field.d_phi, &field.status),
        max_arc,
    }
}
