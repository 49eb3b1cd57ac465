//! Experiment harness for quasi-probability mixture error mitigation:
//! declarative JSON configs, the published experiment recipes, bootstrap
//! histogram resampling, and reproducible CSV/JSON emission.

pub mod config;
pub mod experiments;
pub mod histogram;
pub mod oracle_check;
pub mod output;
pub mod presets;
