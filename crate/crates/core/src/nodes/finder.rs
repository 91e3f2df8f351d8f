use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::winding::node_winding;
use crate::basis::{AngularState, CartesianPoint, ReducedWave};
use crate::error::{Error, Result};
use crate::vorticity::node_free_radius;

/// A zero of `psi` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub position: CartesianPoint<f64>,
    pub t: f64,
    /// Phase winding around the node in units of `2 pi`.
    pub winding: i32,
    /// `|psi / chi_00|` at the located zero relative to the polynomial scale
    /// `(1 + eta^2)^(m/2)` of a normalized state.
    pub residual: f64,
}

impl Node {
    /// Zeros of multiplicity other than one only occur for finely tuned
    /// parameters (angular-momentum eigenstates and the like).
    pub fn is_fine_tuned(&self) -> bool {
        self.winding.abs() != 1
    }
}

/// Where and how hard to look for nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeSearch {
    /// Disk covered by the square seed grid.
    pub core_radius: f64,
    /// Seeds on geometric rings continue out to this radius.
    pub outer_radius: f64,
    pub seeds_per_axis: usize,
    /// Convergence threshold on the relative residual.
    pub tol: f64,
    pub merge_radius: f64,
    pub max_iter: usize,
}

impl NodeSearch {
    /// Square grid over `eta <= m + 6`, plus ring seeds out to just beyond
    /// the certified node-free radius (capped at `1e6`).
    pub fn for_state(state: &AngularState<f64>) -> Self {
        let core = state.m() as f64 + 6.0;
        let outer = node_free_radius(state).map_or(1e6, |r| (1.05 * r).min(1e6)).max(core);
        Self {
            core_radius: core,
            outer_radius: outer,
            seeds_per_axis: 60,
            tol: 1e-13,
            merge_radius: 1e-6,
            max_iter: 100,
        }
    }

    fn seeds(&self, m: usize) -> Vec<(f64, f64)> {
        let n = self.seeds_per_axis.max(2);
        let r = self.core_radius;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                // cell centres, so that the origin is not a seed for even n
                let x = -r + 2.0 * r * (i as f64 + 0.5) / n as f64;
                let y = -r + 2.0 * r * (j as f64 + 0.5) / n as f64;
                if x * x + y * y <= r * r {
                    out.push((x, y));
                }
            }
        }
        out.push((0.0, 0.0));
        let n_ang = 16 * (m + 1);
        let mut rho = r * 1.2;
        while rho <= self.outer_radius {
            for k in 0..n_ang {
                let a = std::f64::consts::TAU * (k as f64 + 0.5) / n_ang as f64;
                out.push((rho * a.cos(), rho * a.sin()));
            }
            rho *= 1.2;
        }
        out
    }
}

/// Polynomial magnitude scale of a normalized state's reduced wave function.
pub(crate) fn poly_scale(m: usize, x: f64, y: f64) -> f64 {
    (1.0 + x * x + y * y).powf(0.5 * m as f64)
}

/// Newton iteration on `(Re P, Im P)` for the reduced wave function `P`.
#[derive(Debug, Clone)]
pub(crate) struct NewtonSolver {
    pub wave: ReducedWave<f64>,
    pub tol: f64,
    pub max_iter: usize,
    /// Iterates farther out than this are abandoned.
    pub escape_radius: f64,
}

impl NewtonSolver {
    pub fn new(state: &AngularState<f64>, search: &NodeSearch) -> Self {
        Self {
            wave: ReducedWave::new(state),
            tol: search.tol,
            max_iter: search.max_iter,
            escape_radius: 1.5 * search.outer_radius.max(search.core_radius),
        }
    }

    fn residual(&self, x: f64, y: f64, t: f64) -> f64 {
        self.wave.value(x, y, t).norm() / poly_scale(self.wave.m(), x, y)
    }

    /// Newton step `-J^{-1} F` with `F = (Re P, Im P)`.
    fn newton_step(&self, x: f64, y: f64, t: f64) -> Result<(f64, f64, f64)> {
        let s = self.wave.sample(x, y, t);
        let res = s.value.norm() / poly_scale(self.wave.m(), x, y);
        let (a, b, c, d) = (s.dx.re, s.dy.re, s.dx.im, s.dy.im);
        let det = a * d - b * c;
        let jnorm = a * a + b * b + c * c + d * d;
        if !(det.abs() > 1e-14 * jnorm) || !det.is_finite() || jnorm == 0.0 {
            return Err(Error::JacobianSingular);
        }
        let (fr, fi) = (s.value.re, s.value.im);
        Ok(((-d * fr + b * fi) / det, (c * fr - a * fi) / det, res))
    }

    /// Node velocity `dQ/dT = -J^{-1} dP/dT` at a zero (implicit function
    /// theorem), with the time derivative by central differences.
    pub fn node_velocity(&self, x: f64, y: f64, t: f64) -> Option<(f64, f64)> {
        let s = self.wave.sample(x, y, t);
        let (a, b, c, d) = (s.dx.re, s.dy.re, s.dx.im, s.dy.im);
        let det = a * d - b * c;
        if !(det.abs() > 1e-14 * (a * a + b * b + c * c + d * d)) {
            return None;
        }
        let h = 1e-6;
        let pt = (self.wave.value(x, y, t + h) - self.wave.value(x, y, t - h)) / (2.0 * h);
        Some(((-d * pt.re + b * pt.im) / det, (c * pt.re - a * pt.im) / det))
    }

    /// Converges to a zero from `(x, y)`; `Ok(None)` when the iterate escapes
    /// or stalls.
    pub fn solve(&self, mut x: f64, mut y: f64, t: f64) -> Result<Option<(f64, f64, f64)>> {
        for _ in 0..self.max_iter {
            let res = self.residual(x, y, t);
            if res <= self.tol {
                return Ok(Some(self.polish(x, y, t, res)));
            }
            let (mut sx, mut sy, _) = self.newton_step(x, y, t)?;
            let len = sx.hypot(sy);
            let cap = 0.5 * (1.0 + x.hypot(y));
            if len > cap {
                sx *= cap / len;
                sy *= cap / len;
            }
            x += sx;
            y += sy;
            if !(x.hypot(y) <= self.escape_radius) {
                return Ok(None);
            }
        }
        Ok(None)
    }

    // A few extra steps while they keep reducing the residual.
    fn polish(&self, mut x: f64, mut y: f64, t: f64, mut res: f64) -> (f64, f64, f64) {
        for _ in 0..4 {
            if res == 0.0 {
                break;
            }
            let Ok((sx, sy, _)) = self.newton_step(x, y, t) else { break };
            let r2 = self.residual(x + sx, y + sy, t);
            if r2 < res {
                x += sx;
                y += sy;
                res = r2;
            } else {
                break;
            }
        }
        (x, y, res)
    }

    /// Newton for a zero of multiplicity `k`: `z <- z - k P / P'` applied
    /// along the direction where `P` is holomorphic-like.
    pub fn polish_multiple(&self, x: f64, y: f64, t: f64, k: i32) -> (f64, f64) {
        let (mut x, mut y) = (x, y);
        let mut res = self.residual(x, y, t);
        for _ in 0..8 {
            if res == 0.0 {
                break;
            }
            let s = self.wave.sample(x, y, t);
            // complex derivative along the winding orientation
            let dp: Complex<f64> = if k > 0 {
                0.5 * (s.dx - Complex::<f64>::i() * s.dy)
            } else {
                0.5 * (s.dx + Complex::<f64>::i() * s.dy)
            };
            if dp.norm() == 0.0 {
                break;
            }
            let mut step = -(k.abs() as f64) * s.value / dp;
            if k < 0 {
                step = step.conj();
            }
            let r2 = self.residual(x + step.re, y + step.im, t);
            if r2 < res {
                x += step.re;
                y += step.im;
                res = r2;
            } else {
                break;
            }
        }
        (x, y)
    }
}

/// Winding-circle radius for a node: `min(1e-3, half the distance to the
/// nearest other node)`.
pub(crate) fn winding_radius(p: CartesianPoint<f64>, others: &[CartesianPoint<f64>]) -> f64 {
    let nearest = others
        .iter()
        .map(|q| p.distance(*q))
        .filter(|d| *d > 0.0)
        .fold(f64::INFINITY, f64::min);
    (0.5 * nearest).min(1e-3)
}

/// Merges converged Newton end points closer than `merge` into one cluster,
/// keeping the point with the smallest residual.
pub(crate) fn merge_points(points: &[(f64, f64, f64)], merge: f64) -> Vec<(f64, f64, f64)> {
    let mut out: Vec<(f64, f64, f64)> = Vec::new();
    for &p in points {
        match out
            .iter_mut()
            .find(|q| (q.0 - p.0).hypot(q.1 - p.1) <= merge)
        {
            Some(q) => {
                if p.2 < q.2 {
                    *q = p;
                }
            }
            None => out.push(p),
        }
    }
    out
}

/// All zeros of `psi` at time `t` reachable from the search's seeds, with
/// their windings. Seeds hitting a singular Jacobian are dropped.
pub fn find_nodes(state: &AngularState<f64>, t: f64, search: &NodeSearch) -> Result<Vec<Node>> {
    if !(search.core_radius > 0.0 && search.tol > 0.0 && search.merge_radius > 0.0) {
        return Err(Error::InvalidInput("node search needs positive radius and tolerances".into()));
    }
    let solver = NewtonSolver::new(state, search);
    let seeds = search.seeds(state.m());
    let results: Vec<Option<(f64, f64, f64)>> = seeds
        .par_iter()
        .map(|&(x, y)| match solver.solve(x, y, t) {
            Ok(r) => r,
            Err(e) => {
                log::debug!("seed ({x:.3}, {y:.3}) discarded: {e}");
                None
            }
        })
        .collect();
    let converged: Vec<(f64, f64, f64)> = results.into_iter().flatten().collect();
    let clusters = merge_points(&converged, search.merge_radius);
    nodes_from_points(state, &solver, &clusters, t)
}

pub(crate) fn nodes_from_points(
    state: &AngularState<f64>,
    solver: &NewtonSolver,
    clusters: &[(f64, f64, f64)],
    t: f64,
) -> Result<Vec<Node>> {
    let positions: Vec<CartesianPoint<f64>> =
        clusters.iter().map(|c| CartesianPoint::new(c.0, c.1)).collect();
    let mut nodes = Vec::with_capacity(clusters.len());
    for (k, c) in clusters.iter().enumerate() {
        let p = positions[k];
        let radius = winding_radius(p, &positions);
        let winding = node_winding(state, &p, t, radius)?;
        let (mut x, mut y, mut residual) = *c;
        if winding.abs() > 1 {
            (x, y) = solver.polish_multiple(x, y, t, winding);
            residual = solver.wave.value(x, y, t).norm() / poly_scale(state.m(), x, y);
        }
        nodes.push(Node {
            position: CartesianPoint::new(x, y),
            t,
            winding,
            residual,
        });
    }
    nodes.sort_by(|a, b| {
        a.position
            .x
            .total_cmp(&b.position.x)
            .then(a.position.y.total_cmp(&b.position.y))
    });
    Ok(nodes)
}
