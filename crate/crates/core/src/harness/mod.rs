//! Scenario runner, output files, disturbance detection and the acceptance checks.

pub mod check;
pub mod config;
pub mod oracle;
pub mod peaks;
pub mod run;

pub use config::{parse_param, RunConfig};
pub use peaks::{detect_peaks, PeakReport, Polarity, WindowVerdict};
pub use run::{run, RunOutput, SummaryLine};
