//! Command-line front end for the verification toolkit: argument parsing,
//! word-and-element text syntax, dispatch, and report envelopes.
//!
//! Exit status contract: 0 when the run's verdict is a pass, 1 when a check
//! fails with a witness (or a search finds nothing), 2 on usage and input
//! errors.

pub mod config;
pub mod envelope;
pub mod run;
pub mod syntax;

pub use config::{Cli, Command, RunConfig};
pub use envelope::{error_json, ReportEnvelope};
pub use run::{run, CliError, RunOutput};
