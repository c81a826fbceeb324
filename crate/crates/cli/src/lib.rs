//! Library half of the `qshutter` command-line tool: configuration files,
//! subcommands and CSV output.

pub mod commands;
pub mod config;
pub mod output;
