//! Scenario runner behind the `cbi` command.

mod error;
mod report;
mod run;
mod scenario;

pub use error::CliError;
pub use report::{
    format_number, round_significant, Format, NamedValue, Report, Row, Table, SIGNIFICANT_DIGITS,
};
pub use run::{emit_curve, run};
pub use scenario::{require, Axis, Mode, Scenario, Sweep};
