//! Empirical complexity and embedding diagnostics for log-Barron functions.

mod embedding;
mod rademacher;

pub use embedding::{embedding_series, SeriesBehavior, SeriesRow, SeriesTable, ShellConstruction, ShellSpectrum};
pub use rademacher::{rademacher_estimate, RademacherConfig, RademacherEstimate};
