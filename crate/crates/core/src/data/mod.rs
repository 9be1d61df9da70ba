//! Canonical survey-derived schema, CSV ingestion, null-row cleaning,
//! z-score scaling, splitting, and seeded synthetic data generation.

pub mod schema;
mod scale;
mod split;
mod synth;
mod table;

pub use scale::{apply_scaler, fit_scaler, inverse_scaler, ScalerParams};
pub use schema::{Target, FEATURE_NAMES, N_FEATURES, TARGET_NAMES};
pub use split::{split, SplitDatasets};
pub use synth::{
    render_truth, synthesize, truth_person_trips, truth_vehicle_trips,
};
pub use table::{assemble, clean, parse_csv, CleanReport, CleanedRows, Dataset, RawTable};
