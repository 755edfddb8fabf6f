//! Command-line harness: configuration, suite execution and report emission.

pub mod config;
pub mod emit;
pub mod report;
pub mod suites;

pub use config::{ConfigError, Format, RunConfig, Suite};
pub use report::{Check, Status, SuiteReport};
pub use suites::{run_suite, SuiteError};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const IO: i32 = 4;
}
