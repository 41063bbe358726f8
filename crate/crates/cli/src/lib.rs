//! Cover documents, reports and subcommands of the `prym` tool.

pub mod commands;
pub mod document;
pub mod report;

pub use commands::{CliError, CliResult, FuzzOptions};
pub use document::CoverDocument;
pub use report::{Format, Report};
