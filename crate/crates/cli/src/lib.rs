//! Library surface of the CLI crate: the state-file format and the command
//! implementations, shared between the `qdiscord` binary and the
//! integration tests.

pub mod commands;
pub mod format;

pub use commands::{Cli, EXIT_ERROR, EXIT_NEGATIVE, EXIT_POSITIVE};
pub use format::MatrixFile;
