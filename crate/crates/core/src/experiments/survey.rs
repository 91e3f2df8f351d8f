use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::analysis::{analyze_state, AnalysisConfig};
use crate::basis::{derive_seed, random_state, shell_from_basis_size};
use crate::drift::DriftKind;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SurveyConfig {
    /// Basis sizes `M = (m + 1)(m + 2) / 2`, e.g. `[3, 6, 10, 15]`.
    pub m_list: Vec<usize>,
    pub states_per_m: usize,
    pub seed: u64,
    pub analysis: AnalysisConfig,
}

impl SurveyConfig {
    /// Seed of state `index` in the `big_m` sub-survey.
    pub fn state_seed(&self, big_m: usize, index: usize) -> u64 {
        derive_seed(derive_seed(self.seed, big_m as u64), index as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRow {
    #[serde(rename = "M")]
    pub big_m: usize,
    pub m: usize,
    pub index: usize,
    pub seed: u64,
    pub n_vorticity: Option<i32>,
    pub kind: Option<DriftKind>,
    pub sign_changes: Option<usize>,
    pub mechanism_aligned: Option<bool>,
    pub probe_scale: Option<f64>,
    pub error: Option<String>,
}

/// Class counts for one `(M, n)` cell of the vorticity-by-class table.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossTabEntry {
    #[serde(rename = "M")]
    pub big_m: usize,
    pub n: i32,
    pub type0: usize,
    pub type1: usize,
    pub type2: usize,
    pub unclassified: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub rows: Vec<SurveyRow>,
    pub crosstab: Vec<CrossTabEntry>,
    pub failed: usize,
}

impl SurveyReport {
    pub fn rows_for(&self, big_m: usize) -> impl Iterator<Item = &SurveyRow> {
        self.rows.iter().filter(move |r| r.big_m == big_m)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.rows {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn crosstab(rows: &[SurveyRow]) -> Vec<CrossTabEntry> {
    let mut map: BTreeMap<(usize, i32), CrossTabEntry> = BTreeMap::new();
    for r in rows {
        let (Some(n), Some(kind)) = (r.n_vorticity, r.kind) else { continue };
        let e = map.entry((r.big_m, n)).or_insert_with(|| CrossTabEntry {
            big_m: r.big_m,
            n,
            ..Default::default()
        });
        match kind {
            DriftKind::Type0 => e.type0 += 1,
            DriftKind::Type1 => e.type1 += 1,
            DriftKind::Type2 => e.type2 += 1,
            DriftKind::Unclassified => e.unclassified += 1,
        }
    }
    map.into_values().collect()
}

/// Generates `states_per_m` random states per basis size, classifies each
/// drift field and tabulates class against total vorticity. Per-state
/// failures become rows with an error message.
pub fn run_survey(cfg: &SurveyConfig) -> Result<SurveyReport> {
    if cfg.states_per_m == 0 {
        return Err(Error::InvalidInput("states_per_m must be at least 1".into()));
    }
    let mut jobs = Vec::new();
    for &big_m in &cfg.m_list {
        let m = shell_from_basis_size(big_m)
            .filter(|&m| m >= 1)
            .ok_or_else(|| Error::InvalidInput(format!("{big_m} is not a basis size (3, 6, 10, 15, ...)")))?;
        for i in 0..cfg.states_per_m {
            jobs.push((big_m, m, i));
        }
    }
    let rows: Vec<SurveyRow> = jobs
        .par_iter()
        .map(|&(big_m, m, index)| {
            let seed = cfg.state_seed(big_m, index);
            let state = random_state(m, seed);
            let mut row = SurveyRow {
                big_m,
                m,
                index,
                seed,
                n_vorticity: None,
                kind: None,
                sign_changes: None,
                mechanism_aligned: None,
                probe_scale: None,
                error: None,
            };
            match analyze_state(&state, &cfg.analysis, false) {
                Ok(a) => {
                    row.n_vorticity = Some(a.n_vorticity);
                    row.kind = Some(a.class.kind);
                    row.sign_changes = Some(a.class.sign_changes);
                    row.mechanism_aligned = Some(a.class.mechanism_aligned);
                    row.probe_scale = Some(a.probe_scale);
                    for d in &a.class.diagnostics {
                        log::info!("M = {big_m} state {index}: {d}");
                    }
                }
                Err(e) => {
                    log::warn!("M = {big_m} state {index} (seed {seed}) failed: {e}");
                    row.error = Some(e.to_string());
                }
            }
            row
        })
        .collect();
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    Ok(SurveyReport {
        crosstab: crosstab(&rows),
        rows,
        failed,
    })
}
