use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use super::field::{CellStatus, DriftField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DriftKind {
    Type0,
    Type1,
    Type2,
    Unclassified,
}

impl DriftKind {
    pub fn from_sign_changes(k: usize) -> Self {
        match k {
            0 => Self::Type0,
            4 => Self::Type1,
            8 => Self::Type2,
            _ => Self::Unclassified,
        }
    }
}

impl std::fmt::Display for DriftKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Type0 => "Type0",
            Self::Type1 => "Type1",
            Self::Type2 => "Type2",
            Self::Unclassified => "Unclassified",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub dead_zone: f64,
    /// Rings with a larger fraction of aborted cells are skipped.
    pub max_aborted_fraction: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            dead_zone: 1e-3,
            max_aborted_fraction: 0.05,
        }
    }
}

/// One sign change of the angular drift on a probe ring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// Crossing angle in `[0, 2 pi)`.
    pub angle: f64,
    /// Grid angles enclosing the crossing, `hi` possibly beyond `2 pi`.
    pub bracket: (f64, f64),
    /// Descending crossing (drift converges onto the axis).
    pub attractive: bool,
    /// Radial displacement at the crossing.
    pub d_eta: f64,
}

impl Crossing {
    pub fn aligned(&self) -> bool {
        if self.attractive {
            self.d_eta < 0.0
        } else {
            self.d_eta > 0.0
        }
    }
}

/// What one probe ring saw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingReport {
    pub eta: f64,
    pub sign_changes: usize,
    pub crossings: Vec<Crossing>,
    /// Sign of the ring-mean angular drift.
    pub rotation: i32,
    /// Fraction of valid cells on the ring drifting inwards.
    pub inward_fraction: f64,
}

impl RingReport {
    pub fn aligned(&self) -> bool {
        self.sign_changes > 0 && self.crossings.iter().all(Crossing::aligned)
    }

    pub fn attractive_axes(&self) -> Vec<f64> {
        self.crossings.iter().filter(|c| c.attractive).map(|c| c.angle).collect()
    }

    pub fn repulsive_axes(&self) -> Vec<f64> {
        self.crossings.iter().filter(|c| !c.attractive).map(|c| c.angle).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftClass {
    pub kind: DriftKind,
    pub sign_changes: usize,
    pub attractive_axes: Vec<f64>,
    pub repulsive_axes: Vec<f64>,
    /// True when every attractive crossing on every ring sits where the
    /// radial drift is inward and every repulsive one where it is outward.
    /// Always false for fields without crossings.
    pub mechanism_aligned: bool,
    #[serde(skip)]
    pub rings: Vec<RingReport>,
    #[serde(skip)]
    pub diagnostics: Vec<String>,
}

impl DriftClass {
    /// Sign of the angular drift on the reference ring (meaningful for Type0).
    pub fn rotation(&self) -> i32 {
        self.reference_ring().map_or(0, |r| r.rotation)
    }

    /// Mean inward-cell fraction over the rings used.
    pub fn inward_fraction(&self) -> f64 {
        if self.rings.is_empty() {
            return f64::NAN;
        }
        self.rings.iter().map(|r| r.inward_fraction).sum::<f64>() / self.rings.len() as f64
    }

    fn reference_ring(&self) -> Option<&RingReport> {
        self.rings.get(self.rings.len() / 2)
    }

    /// Recomputes axes and alignment after the rings were modified.
    pub(crate) fn refresh(&mut self) {
        if let Some((a, r)) = self
            .reference_ring()
            .map(|r| (r.attractive_axes(), r.repulsive_axes()))
        {
            self.attractive_axes = a;
            self.repulsive_axes = r;
        }
        self.mechanism_aligned = !self.rings.is_empty() && self.rings.iter().all(RingReport::aligned);
    }
}

/// Angular-drift sign-change classifier over the given probe radii.
pub fn classify(field: &DriftField, probe_radii: &[f64], opts: &ClassifyOptions) -> Result<DriftClass> {
    let g = &field.grid;
    if probe_radii.is_empty() {
        return Err(Error::InvalidInput("no probe radii".into()));
    }
    if !(opts.dead_zone >= 0.0 && opts.dead_zone < 1.0) {
        return Err(Error::InvalidInput("dead_zone must lie in [0, 1)".into()));
    }
    let mut rings = Vec::new();
    let mut diagnostics = Vec::new();
    for &r in probe_radii {
        if !(r >= g.eta_min && r <= g.eta_max) {
            return Err(Error::InvalidInput(format!(
                "probe radius {r} outside grid annulus [{}, {}]",
                g.eta_min, g.eta_max
            )));
        }
        let i = g.nearest_row(r);
        let aborted = (0..g.n_phi).filter(|&j| !field.is_ok(i, j)).count();
        if aborted as f64 > opts.max_aborted_fraction * g.n_phi as f64 {
            diagnostics.push(format!("ring eta={:.3} skipped: {aborted} aborted cells", g.eta(i)));
            continue;
        }
        match ring_report(field, i, opts.dead_zone) {
            Some(rep) => rings.push(rep),
            None => diagnostics.push(format!("ring eta={:.3} skipped: no angular drift", g.eta(i))),
        }
    }
    let Some(reference) = rings.get(rings.len() / 2).cloned() else {
        diagnostics.push("no usable probe ring".into());
        return Ok(DriftClass {
            kind: DriftKind::Unclassified,
            sign_changes: 0,
            attractive_axes: Vec::new(),
            repulsive_axes: Vec::new(),
            mechanism_aligned: false,
            rings,
            diagnostics,
        });
    };
    let consistent = rings.iter().all(|r| r.sign_changes == reference.sign_changes);
    let kind = if consistent {
        DriftKind::from_sign_changes(reference.sign_changes)
    } else {
        let counts: Vec<String> = rings
            .iter()
            .map(|r| format!("eta={:.3}: {}", r.eta, r.sign_changes))
            .collect();
        diagnostics.push(format!("inconsistent across radii ({})", counts.join(", ")));
        DriftKind::Unclassified
    };
    if kind == DriftKind::Unclassified && consistent {
        diagnostics.push(format!("{} sign changes per ring", reference.sign_changes));
    }
    let mut class = DriftClass {
        kind,
        sign_changes: reference.sign_changes,
        mechanism_aligned: false,
        attractive_axes: Vec::new(),
        repulsive_axes: Vec::new(),
        rings,
        diagnostics,
    };
    class.refresh();
    Ok(class)
}

fn ring_report(field: &DriftField, i: usize, dead_zone: f64) -> Option<RingReport> {
    let g = &field.grid;
    let n = g.n_phi;
    let at = |j: usize| field.index(i, j);
    let ok: Vec<usize> = (0..n).filter(|&j| field.status[at(j)] == CellStatus::Ok).collect();
    let ring_max = ok.iter().fold(0.0f64, |a, &j| a.max(field.d_phi[at(j)].abs()));
    if !(ring_max > 0.0) {
        return None;
    }
    let kept: Vec<usize> = ok
        .iter()
        .copied()
        .filter(|&j| field.d_phi[at(j)].abs() >= dead_zone * ring_max)
        .collect();
    if kept.is_empty() {
        return None;
    }
    let mut rep = RingReport {
        eta: g.eta(i),
        sign_changes: 0,
        crossings: Vec::new(),
        rotation: 0,
        inward_fraction: ok.iter().filter(|&&j| field.d_eta[at(j)] < 0.0).count() as f64
            / ok.len() as f64,
    };
    let mean: f64 = ok.iter().map(|&j| field.d_phi[at(j)]).sum::<f64>();
    rep.rotation = if mean > 0.0 { 1 } else if mean < 0.0 { -1 } else { 0 };
    for (k, &ja) in kept.iter().enumerate() {
        let jb = kept[(k + 1) % kept.len()];
        let (va, vb) = (field.d_phi[at(ja)], field.d_phi[at(jb)]);
        if (va > 0.0) == (vb > 0.0) {
            continue;
        }
        rep.sign_changes += 1;
        let phi_a = g.phi(ja);
        let mut phi_b = g.phi(jb);
        if phi_b <= phi_a {
            phi_b += TAU;
        }
        let phi_c = phi_a + (phi_b - phi_a) * va / (va - vb);
        rep.crossings.push(Crossing {
            angle: phi_c.rem_euclid(TAU),
            bracket: (phi_a, phi_b),
            attractive: va > 0.0,
            d_eta: interpolate_ring(field, i, phi_c),
        });
    }
    Some(rep)
}

/// Linear interpolation of the radial drift along ring `i`, falling back to
/// the nearest valid neighbour when one side is aborted.
fn interpolate_ring(field: &DriftField, i: usize, phi: f64) -> f64 {
    let n = field.grid.n_phi;
    let s = phi.rem_euclid(TAU) / TAU * n as f64;
    let j0 = (s.floor() as usize) % n;
    let j1 = (j0 + 1) % n;
    let w = s - s.floor();
    match (field.is_ok(i, j0), field.is_ok(i, j1)) {
        (true, true) => {
            field.d_eta[field.index(i, j0)] * (1.0 - w) + field.d_eta[field.index(i, j1)] * w
        }
        (true, false) => field.d_eta[field.index(i, j0)],
        (false, true) => field.d_eta[field.index(i, j1)],
        (false, false) => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drift::GridSpec;

    fn synthetic(d_phi: impl Fn(f64) -> f64, d_eta: impl Fn(f64) -> f64) -> DriftField {
        let grid = GridSpec {
            eta_min: 5.0,
            eta_max: 20.0,
            n_eta: 16,
            n_phi: 64,
        };
        let mut f = DriftField {
            grid,
            d_eta: Vec::new(),
            d_phi: Vec::new(),
            status: Vec::new(),
        };
        for _ in 0..grid.n_eta {
            for j in 0..grid.n_phi {
                let phi = grid.phi(j);
                f.d_eta.push(d_eta(phi));
                f.d_phi.push(d_phi(phi));
                f.status.push(CellStatus::Ok);
            }
        }
        f
    }

    const RADII: [f64; 3] = [8.0, 10.0, 12.0];

    #[test]
    fn constant_rotation_is_type0() {
        let c = classify(&synthetic(|_| 0.3, |_| 0.0), &RADII, &Default::default()).unwrap();
        assert_eq!(c.kind, DriftKind::Type0);
        assert_eq!(c.sign_changes, 0);
        assert_eq!(c.rotation(), 1);
        assert!(!c.mechanism_aligned);
        let c = classify(&synthetic(|_| -0.3, |_| 0.0), &RADII, &Default::default()).unwrap();
        assert_eq!(c.rotation(), -1);
    }

    #[test]
    fn two_fold_pattern_is_type1_with_located_axes() {
        let p0 = 0.3;
        let f = synthetic(|p| (2.0 * (p - p0)).sin(), |p| (2.0 * (p - p0)).cos());
        let c = classify(&f, &RADII, &Default::default()).unwrap();
        assert_eq!(c.kind, DriftKind::Type1);
        assert_eq!(c.sign_changes, 4);
        // sin(2(phi - p0)) falls through zero at p0 + pi/2 and p0 + 3pi/2.
        let pi = std::f64::consts::PI;
        let mut att = c.attractive_axes.clone();
        att.sort_by(f64::total_cmp);
        assert!((att[0] - (p0 + pi / 2.0)).abs() < 2e-3);
        assert!((att[1] - (p0 + 1.5 * pi)).abs() < 2e-3);
        let mut rep = c.repulsive_axes.clone();
        rep.sort_by(f64::total_cmp);
        assert!((rep[0] - p0).abs() < 2e-3);
        assert!((rep[1] - (p0 + pi)).abs() < 2e-3);
        assert!(c.mechanism_aligned);
        assert!((c.inward_fraction() - 0.5).abs() < 0.05);
    }

    #[test]
    fn misaligned_radial_pattern_is_reported() {
        let f = synthetic(|p| (2.0 * p).sin(), |p| -(2.0 * p).cos());
        let c = classify(&f, &RADII, &Default::default()).unwrap();
        assert_eq!(c.kind, DriftKind::Type1);
        assert!(!c.mechanism_aligned);
    }

    #[test]
    fn four_fold_pattern_is_type2() {
        let c = classify(&synthetic(|p| (4.0 * p).sin(), |_| 0.0), &RADII, &Default::default())
            .unwrap();
        assert_eq!(c.kind, DriftKind::Type2);
        assert_eq!(c.sign_changes, 8);
    }

    #[test]
    fn other_counts_are_unclassified() {
        let c = classify(&synthetic(|p| (3.0 * p).sin(), |_| 0.0), &RADII, &Default::default())
            .unwrap();
        assert_eq!(c.kind, DriftKind::Unclassified);
        assert_eq!(c.sign_changes, 6);
    }

    #[test]
    fn dead_zone_suppresses_noise() {
        let f = synthetic(|p| 1.0 + 0.0 * p, |_| 0.0);
        let mut f2 = f.clone();
        // tiny opposite-sign blips that should be ignored
        for i in RADII {
            let k = f2.index(f2.grid.nearest_row(i), 5);
            f2.d_phi[k] = -1e-6;
        }
        let c = classify(&f2, &RADII, &Default::default()).unwrap();
        assert_eq!(c.kind, DriftKind::Type0);
    }

    #[test]
    fn inconsistent_rings_are_unclassified() {
        let mut f = synthetic(|p| (2.0 * p).sin(), |_| 0.0);
        let i = f.grid.nearest_row(12.0);
        for j in 0..f.grid.n_phi {
            let k = f.index(i, j);
            f.d_phi[k] = 1.0;
        }
        let c = classify(&f, &RADII, &Default::default()).unwrap();
        assert_eq!(c.kind, DriftKind::Unclassified);
        assert!(c.diagnostics.iter().any(|d| d.contains("inconsistent")));
    }

    #[test]
    fn aborted_rings_are_skipped() {
        let mut f = synthetic(|p| (2.0 * p).sin(), |_| 0.0);
        let i = f.grid.nearest_row(12.0);
        for j in 0..f.grid.n_phi {
            let k = f.index(i, j);
            f.d_phi[k] = 1.0;
            if j < 10 {
                f.status[k] = CellStatus::AbortedNearNode;
            }
        }
        let c = classify(&f, &RADII, &Default::default()).unwrap();
        assert_eq!(c.kind, DriftKind::Type1);
        assert_eq!(c.rings.len(), 2);
    }

    #[test]
    fn probe_outside_annulus_is_rejected() {
        let f = synthetic(|_| 1.0, |_| 0.0);
        assert!(classify(&f, &[30.0], &Default::default()).is_err());
    }

    #[test]
    fn json_shape() {
        let c = classify(&synthetic(|p| (2.0 * p).sin(), |_| 0.0), &RADII, &Default::default())
            .unwrap();
        let v = serde_json::to_value(&c).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(
            keys,
            ["attractive_axes", "kind", "mechanism_aligned", "repulsive_axes", "sign_changes"]
        );
        assert_eq!(v["kind"], "Type1");
    }
}
