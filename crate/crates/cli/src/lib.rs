//! Instance files, commands and reports for the `strata` binary.

pub mod bundled;
pub mod instance;
pub mod report;
pub mod run;
