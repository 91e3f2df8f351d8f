//! File formats: state JSON, trajectory / drift-field / node-track CSV and
//! the JSON reports.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::basis::{basis_len, cartesian_to_angular, dense_index, AngularState, CartesianState};
use crate::drift::{CellStatus, DriftField, GridSpec, RadialDriftReport};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::nodes::{NodeEvent, NodeTracking};
use crate::scalar::norm_tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Angular,
    Cartesian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nd: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ng: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nx: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ny: Option<usize>,
    re: f64,
    im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    basis: BasisKind,
    m: usize,
    coefficients: Vec<CoefficientRecord>,
}

/// Parses a state file. Cartesian files are converted to the angular basis.
/// A norm off by more than `1e-9` is an error unless `renormalize` is set.
pub fn state_from_json(text: &str, renormalize: bool) -> Result<AngularState<f64>> {
    let file: StateFile =
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let m = file.m;
    let mut coeffs = vec![Complex::new(0.0, 0.0); basis_len(m)];
    let mut seen = vec![false; basis_len(m)];
    for c in &file.coefficients {
        let (a, b) = match (file.basis, c.nd, c.ng, c.nx, c.ny) {
            (BasisKind::Angular, Some(a), Some(b), None, None) => (a, b),
            (BasisKind::Cartesian, None, None, Some(a), Some(b)) => (a, b),
            (BasisKind::Angular, ..) => {
                return Err(Error::Schema("angular coefficients need keys nd and ng".into()))
            }
            (BasisKind::Cartesian, ..) => {
                return Err(Error::Schema("cartesian coefficients need keys nx and ny".into()))
            }
        };
        if a + b > m {
            return Err(Error::Schema(format!("index ({a}, {b}) exceeds m = {m}")));
        }
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::Schema(format!("non-finite coefficient at ({a}, {b})")));
        }
        let k = dense_index(a, b);
        if seen[k] {
            return Err(Error::Schema(format!("duplicate coefficient ({a}, {b})")));
        }
        seen[k] = true;
        coeffs[k] = Complex::new(c.re, c.im);
    }
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if !renormalize && (norm - 1.0).abs() > norm_tolerance::<f64>() {
        return Err(Error::Normalization { norm });
    }
    match file.basis {
        BasisKind::Angular if renormalize => AngularState::normalized(m, coeffs),
        // kept bit-exact: no rescaling inside the tolerance
        BasisKind::Angular => Ok(AngularState::from_raw(m, coeffs)),
        BasisKind::Cartesian => {
            let cart = if renormalize {
                CartesianState::normalized(m, coeffs)?
            } else {
                CartesianState::from_raw(m, coeffs)
            };
            Ok(cartesian_to_angular(&cart))
        }
    }
}

/// Angular-basis state file; every coefficient is written, zeros included.
pub fn state_to_json(state: &AngularState<f64>) -> String {
    let file = StateFile {
        basis: BasisKind::Angular,
        m: state.m(),
        coefficients: state
            .terms()
            .map(|(a, b, c)| CoefficientRecord {
                nd: Some(a),
                ng: Some(b),
                nx: None,
                ny: None,
                re: c.re,
                im: c.im,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("state serializes")
}

/// Same file for a Cartesian-basis state (keys `nx`, `ny`).
pub fn cartesian_state_to_json(state: &CartesianState<f64>) -> String {
    let file = StateFile {
        basis: BasisKind::Cartesian,
        m: state.m(),
        coefficients: state
            .terms()
            .map(|(a, b, c)| CoefficientRecord {
                nd: None,
                ng: None,
                nx: Some(a),
                ny: Some(b),
                re: c.re,
                im: c.im,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("state serializes")
}

pub fn load_state(path: &Path, renormalize: bool) -> Result<AngularState<f64>> {
    state_from_json(&std::fs::read_to_string(path)?, renormalize)
}

pub fn save_state(path: &Path, state: &AngularState<f64>) -> Result<()> {
    std::fs::write(path, state_to_json(state) + "\n")?;
    Ok(())
}

/// Columns `T, eta, phi, Qx, Qy`.
pub fn write_trajectory_csv<W: Write>(w: W, traj: &Trajectory<f64>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["T", "eta", "phi", "Qx", "Qy"])?;
    for (t, p) in &traj.samples {
        let c = p.to_cartesian();
        out.serialize((t, p.eta, p.phi, c.x, c.y))?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct FieldRow {
    eta: f64,
    phi: f64,
    d_eta: f64,
    d_phi: f64,
    status: CellStatus,
}

/// Columns `eta, phi, d_eta, d_phi, status`, row-major in `eta`.
pub fn write_field_csv<W: Write>(w: W, field: &DriftField) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let g = &field.grid;
    for i in 0..g.n_eta {
        for j in 0..g.n_phi {
            let k = field.index(i, j);
            out.serialize(FieldRow {
                eta: g.eta(i),
                phi: g.phi(j),
                d_eta: field.d_eta[k],
                d_phi: field.d_phi[k],
                status: field.status[k],
            })?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads a field written by [`write_field_csv`], recovering the grid from
/// the coordinates.
pub fn read_field_csv<R: Read>(r: R) -> Result<DriftField> {
    let mut rdr = csv::Reader::from_reader(r);
    let rows: Vec<FieldRow> = rdr
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Schema(e.to_string()))?;
    if rows.is_empty() {
        return Err(Error::Schema("empty drift field".into()));
    }
    let first_eta = rows[0].eta;
    let n_phi = rows.iter().take_while(|r| r.eta == first_eta).count();
    if n_phi == 0 || rows.len() % n_phi != 0 {
        return Err(Error::Schema("rows do not form a rectangular polar grid".into()));
    }
    let n_eta = rows.len() / n_phi;
    let grid = GridSpec {
        eta_min: first_eta,
        eta_max: rows[rows.len() - 1].eta,
        n_eta,
        n_phi,
    };
    grid.validate().map_err(|e| Error::Schema(e.to_string()))?;
    for i in 0..n_eta {
        for j in 0..n_phi {
            let r = &rows[i * n_phi + j];
            let scale = 1.0 + grid.eta_max;
            if (r.eta - grid.eta(i)).abs() > 1e-9 * scale || (r.phi - grid.phi(j)).abs() > 1e-9 {
                return Err(Error::Schema(format!(
                    "row {} at ({}, {}) is off the grid",
                    i * n_phi + j,
                    r.eta,
                    r.phi
                )));
            }
        }
    }
    Ok(DriftField {
        grid,
        d_eta: rows.iter().map(|r| r.d_eta).collect(),
        d_phi: rows.iter().map(|r| r.d_phi).collect(),
        status: rows.iter().map(|r| r.status).collect(),
    })
}

/// Columns `eta_initial, phi_initial, eta_final, d_eta`; the last two are
/// empty for aborted trajectories.
pub fn write_radial_csv<W: Write>(w: W, report: &RadialDriftReport) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["eta_initial", "phi_initial", "eta_final", "d_eta"])?;
    for s in &report.samples {
        out.serialize((s.eta_initial, s.phi_initial, s.eta_final, s.d_eta()))?;
    }
    out.flush()?;
    Ok(())
}

/// Columns `track_id, T, Qx, Qy, winding`.
pub fn write_tracks_csv<W: Write>(w: W, tracking: &NodeTracking) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["track_id", "T", "Qx", "Qy", "winding"])?;
    for tr in &tracking.tracks {
        for s in &tr.samples {
            out.serialize((tr.id, s.t, s.position.x, s.position.y, tr.winding))?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct EventsFile<'a> {
    total_winding: i32,
    tracks: usize,
    events: &'a [NodeEvent],
}

pub fn events_to_json(tracking: &NodeTracking) -> String {
    serde_json::to_string_pretty(&EventsFile {
        total_winding: tracking.total_winding,
        tracks: tracking.tracks.len(),
        events: &tracking.events,
    })
    .expect("events serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{angular_to_cartesian, random_state};

    #[test]
    fn state_round_trip_is_bit_exact() {
        for seed in 0..10 {
            let s = random_state(3, seed);
            let back = state_from_json(&state_to_json(&s), false).unwrap();
            assert_eq!(back.coefficients(), s.coefficients());
        }
    }

    #[test]
    fn non_normalized_file_needs_flag() {
        let text = r#"{"basis":"angular","m":1,"coefficients":[
            {"nd":0,"ng":0,"re":0.9486832980505138,"im":0.0}]}"#;
        match state_from_json(text, false) {
            Err(Error::Normalization { norm }) => assert!((norm - 0.9).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let s = state_from_json(text, true).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
        assert_eq!(s.m(), 1);
    }

    #[test]
    fn cartesian_file_is_converted() {
        let s = random_state(2, 4);
        let cart = angular_to_cartesian(&s);
        let back = state_from_json(&cartesian_state_to_json(&cart), false).unwrap();
        for (a, b) in back.coefficients().iter().zip(s.coefficients()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn schema_errors() {
        let bad = [
            r#"{"basis":"polar","m":0,"coefficients":[]}"#,
            r#"{"basis":"angular","m":0,"coefficients":[{"nx":0,"ny":0,"re":1,"im":0}]}"#,
            r#"{"basis":"angular","m":0,"coefficients":[{"nd":1,"ng":0,"re":1,"im":0}]}"#,
            r#"{"basis":"angular","m":0,"coefficients":[{"nd":0,"ng":0,"re":1,"im":0},{"nd":0,"ng":0,"re":0,"im":0}]}"#,
            r#"{"basis":"angular","m":0}"#,
        ];
        for text in bad {
            assert!(matches!(state_from_json(text, true), Err(Error::Schema(_))), "{text}");
        }
    }

    #[test]
    fn field_csv_round_trip() {
        let grid = GridSpec { eta_min: 5.0, eta_max: 20.0, n_eta: 9, n_phi: 12 };
        let n = grid.len();
        let field = DriftField {
            grid,
            d_eta: (0..n).map(|k| (k as f64 * 0.37).sin()).collect(),
            d_phi: (0..n).map(|k| (k as f64 * 0.11).cos()).collect(),
            status: (0..n)
                .map(|k| if k == 5 { CellStatus::AbortedNearNode } else { CellStatus::Ok })
                .collect(),
        };
        let mut buf = Vec::new();
        write_field_csv(&mut buf, &field).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("eta,phi,d_eta,d_phi,status\n"));
        assert!(text.contains("aborted_near_node"));
        let back = read_field_csv(&buf[..]).unwrap();
        assert_eq!(back.grid, field.grid);
        assert_eq!(back.d_eta, field.d_eta);
        assert_eq!(back.status, field.status);
        // NaN cells survive as well
        let mut f2 = field.clone();
        f2.d_eta[5] = f64::NAN;
        let mut buf = Vec::new();
        write_field_csv(&mut buf, &f2).unwrap();
        assert!(read_field_csv(&buf[..]).unwrap().d_eta[5].is_nan());
    }

    #[test]
    fn field_csv_rejects_off_grid_rows() {
        let text = "eta,phi,d_eta,d_phi,status\n1,0,0,0,ok\n2,0,0,0,ok\n";
        assert!(matches!(read_field_csv(text.as_bytes()), Err(Error::Schema(_))));
    }
}
