//! Configuration, tables, plots and subcommands behind the `libration` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod svg;
pub mod table;

pub use error::CliError;
