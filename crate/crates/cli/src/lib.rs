//! Command-line front end and JSON animation service.

pub mod cli;
pub mod server;
pub mod session;

pub use cli::{run, Io, EXIT_ERROR, EXIT_FAIL, EXIT_OK};
