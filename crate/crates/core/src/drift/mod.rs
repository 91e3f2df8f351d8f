//! One-period drift fields on a polar grid, their radial/angular
//! decomposition and type-0/1/2 classification, and the long-horizon radial
//! drift experiment.

mod classify;
mod exterior;
mod field;
mod radial;
mod refine;

pub use classify::{classify, ClassifyOptions, Crossing, DriftClass, DriftKind, RingReport};
pub use exterior::{exterior_probe, ExteriorOptions, ExteriorProbe};
pub use field::{
    compute_drift_field, decompose, CellStatus, ComponentSummary, DriftComponents, DriftField,
    GridSpec,
};
pub use radial::{quantile, radial_drift_experiment, RadialDriftReport, RadialInit, RadialSample};
pub use refine::refine_crossings;
