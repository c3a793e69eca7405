//! The `bellcheck` command line: model files, reports and commands.

pub mod commands;
pub mod model_file;
pub mod report;

/// Exit status for a report that passed.
pub const EXIT_PASS: i32 = 0;
/// Exit status for a report with a failed check or exceeded bound.
pub const EXIT_FAIL: i32 = 1;
/// Exit status for unusable input.
pub const EXIT_INPUT: i32 = 2;
