//! Flat-file formats: tree JSONL, contour CSV, path CSV, report CSV and
//! key=value experiment configs.

mod config;
mod formats;
mod svg;

pub use config::ExperimentConfig;
pub use formats::*;
pub use svg::{contour_svg, ecdf_svg};
