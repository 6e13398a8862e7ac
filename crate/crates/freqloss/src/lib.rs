//! File formats, configuration and the `freqloss` command line on top of
//! [`freqloss_core`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calib;
pub mod colormap;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod scene;

pub use commands::{main_with, Cli, Summary};
pub use error::{CliError, Result};
