//! Command-line driver for the conic-shock toolkit: run configuration, file
//! formats, parameter sweeps and command dispatch.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod io;
pub mod sweep;

pub use cli::{run, Cli, Command, Outcome};
pub use config::RunSpec;
