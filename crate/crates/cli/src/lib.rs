//! File formats, certificates and the command-line front end for
//! [`biembed_core`].

pub mod app;
pub mod certificate;
pub mod cgfile;
pub mod parallel;
pub mod rotfile;

pub use app::{run, Cli, CliError};
