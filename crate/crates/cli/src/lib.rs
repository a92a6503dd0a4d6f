//! Command-line and HTTP front ends for the `cagame` engine.
//!
//! [`api`] holds the operations both front ends call, so a CLI run with
//! `--json` prints exactly the body the service returns for the same input.

pub mod api;
pub mod cli;
pub mod play;
pub mod service;
pub mod spec;

pub use api::{ApiError, ErrorKind, Limits};
pub use spec::SpecDocument;
