//! Library half of the `echo-chamber` binary: run configuration, figure
//! tables, the verification suite, optimizer and sweep commands.

pub mod config;
pub mod error;
pub mod figures;
pub mod optimize;
pub mod output;
pub mod sweep;
pub mod verify;

pub use config::{Format, RunConfig, Settings};
pub use error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
