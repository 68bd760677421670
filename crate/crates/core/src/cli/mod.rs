//! Scenario runner: config grammar, JSON run report and SVG plots.

mod config;
mod plots;
mod run;

pub use config::*;
pub use plots::*;
pub use run::*;
