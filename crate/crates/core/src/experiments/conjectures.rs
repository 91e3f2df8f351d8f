use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::analysis::{analyze_state, AnalysisConfig};
use crate::basis::derive_seed;
use crate::drift::DriftKind;
use crate::error::{Error, Result};
use crate::io::state_to_json;
use crate::vorticity::generate_state_with_vorticity;

/// Zero vorticity never gives a type-0 field (`Zero`); maximal vorticity
/// always does (`Maximal`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conjecture {
    Zero,
    Maximal,
}

impl Conjecture {
    /// Whether a classification contradicts the conjecture. Unclassified
    /// fields are inconclusive, not counterexamples.
    pub fn violated_by(self, kind: DriftKind) -> bool {
        match self {
            Conjecture::Zero => kind == DriftKind::Type0,
            Conjecture::Maximal => matches!(kind, DriftKind::Type1 | DriftKind::Type2),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub m_list: Vec<usize>,
    pub states_per_class: usize,
    pub seed: u64,
    /// Random draws allowed per generated state.
    pub max_attempts: usize,
    pub analysis: AnalysisConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignRow {
    pub m: usize,
    pub conjecture: Conjecture,
    pub index: usize,
    pub target_n: i32,
    pub kind: Option<DriftKind>,
    pub mechanism_aligned: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub row: CampaignRow,
    /// State file contents of the offending state.
    pub state: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureSummary {
    pub m: usize,
    pub conjecture: Conjecture,
    pub tested: usize,
    pub counterexamples: usize,
    pub inconclusive: usize,
    pub failed: usize,
    /// Type1/Type2 fields whose axes disagree with the radial wedges.
    pub misaligned: usize,
}

impl ConjectureSummary {
    pub fn passed(&self) -> bool {
        self.counterexamples == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub summary: Vec<ConjectureSummary>,
    pub rows: Vec<CampaignRow>,
    pub counterexamples: Vec<Counterexample>,
}

impl CampaignReport {
    pub fn found_counterexample(&self) -> bool {
        !self.counterexamples.is_empty()
    }
}

/// Classifies `states_per_class` maximal-vorticity states (alternating
/// `n = +m` and `n = -m`) for every `m`, and as many zero-vorticity states for
/// every even `m`.
pub fn run_conjecture_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    if cfg.m_list.iter().any(|&m| m == 0) {
        return Err(Error::InvalidInput("m = 0 has no drift dynamics".into()));
    }
    if cfg.states_per_class == 0 {
        return Err(Error::InvalidInput("states_per_class must be at least 1".into()));
    }
    let mut jobs = Vec::new();
    for &m in &cfg.m_list {
        for i in 0..cfg.states_per_class {
            let n = if i % 2 == 0 { m as i32 } else { -(m as i32) };
            jobs.push((m, Conjecture::Maximal, i, n));
        }
        if m % 2 == 0 {
            for i in 0..cfg.states_per_class {
                jobs.push((m, Conjecture::Zero, i, 0));
            }
        }
    }
    let results: Vec<(CampaignRow, Option<Counterexample>)> = jobs
        .par_iter()
        .map(|&(m, conjecture, index, target_n)| {
            let tag = match conjecture {
                Conjecture::Zero => 0,
                Conjecture::Maximal => 1,
            };
            let seed = derive_seed(derive_seed(derive_seed(cfg.seed, m as u64), tag), index as u64);
            let mut row = CampaignRow {
                m,
                conjecture,
                index,
                target_n,
                kind: None,
                mechanism_aligned: None,
                error: None,
            };
            let analysed = generate_state_with_vorticity(m, target_n, seed, cfg.max_attempts)
                .and_then(|s| analyze_state(&s, &cfg.analysis, false).map(|a| (s, a)));
            match analysed {
                Ok((state, a)) => {
                    row.kind = Some(a.class.kind);
                    row.mechanism_aligned = Some(a.class.mechanism_aligned);
                    let cx = conjecture.violated_by(a.class.kind).then(|| {
                        log::warn!("counterexample: m = {m}, {conjecture:?}, state {index}");
                        Counterexample {
                            row: row.clone(),
                            state: serde_json::from_str(&state_to_json(&state))
                                .expect("state json is valid"),
                        }
                    });
                    (row, cx)
                }
                Err(e) => {
                    log::warn!("m = {m} {conjecture:?} state {index} failed: {e}");
                    row.error = Some(e.to_string());
                    (row, None)
                }
            }
        })
        .collect();
    let (rows, cxs): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let counterexamples: Vec<Counterexample> = cxs.into_iter().flatten().collect();
    let mut summary: Vec<ConjectureSummary> = Vec::new();
    for r in &rows {
        let pos = summary
            .iter()
            .position(|s| s.m == r.m && s.conjecture == r.conjecture)
            .unwrap_or_else(|| {
                summary.push(ConjectureSummary {
                    m: r.m,
                    conjecture: r.conjecture,
                    tested: 0,
                    counterexamples: 0,
                    inconclusive: 0,
                    failed: 0,
                    misaligned: 0,
                });
                summary.len() - 1
            });
        let s = &mut summary[pos];
        match r.kind {
            None => s.failed += 1,
            Some(kind) => {
                s.tested += 1;
                if r.conjecture.violated_by(kind) {
                    s.counterexamples += 1;
                } else if kind == DriftKind::Unclassified {
                    s.inconclusive += 1;
                }
                if matches!(kind, DriftKind::Type1 | DriftKind::Type2)
                    && r.mechanism_aligned == Some(false)
                {
                    s.misaligned += 1;
                }
            }
        }
    }
    Ok(CampaignReport {
        summary,
        rows,
        counterexamples,
    })
}
