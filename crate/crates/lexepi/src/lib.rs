//! File formats, run reports and the command-line front end for
//! [`lexepi_core`].

pub mod cli;
pub mod format;
pub mod report;
