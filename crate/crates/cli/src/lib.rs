//! Dataset generation and run reporting behind the `stream-maxcov` binary.

pub mod commands;
pub mod generate;
pub mod report;
