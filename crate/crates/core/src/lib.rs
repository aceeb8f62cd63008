//! Historical model selection under concept drift.
//!
//! A labeled stream is cut into time periods. Sliding-window models are
//! retrained after every period and all of them are kept. For each new,
//! unlabeled period, ranking mechanisms order the kept models by their
//! expected performance; the harness scores those rankings against the
//! true per-period AUC ordering.

pub mod data;
pub mod error;
pub mod harness;
pub mod learners;
pub mod metrics;
pub mod par;
pub mod registry;
pub mod seed;
pub mod selection;

pub use error::{Error, Result};
