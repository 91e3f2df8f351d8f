//! Batch studies over random states: the per-`M` drift-field survey and the
//! two conjecture campaigns.

mod analysis;
mod conjectures;
mod survey;

pub use analysis::{analyze_state, AnalysisConfig, StateAnalysis};
pub use conjectures::{
    run_conjecture_campaign, CampaignConfig, CampaignReport, CampaignRow, Conjecture,
    ConjectureSummary, Counterexample,
};
pub use survey::{run_survey, CrossTabEntry, SurveyConfig, SurveyReport, SurveyRow};

/// Exit statuses of the command-line tool.
pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const NUMERICAL: i32 = 2;
    pub const COUNTEREXAMPLE: i32 = 3;
}
