//! Problem-file parsing, result serialization and the command verbs.

pub mod commands;
pub mod schema;

pub use commands::{execute, Options, Output, VERBS};
pub use schema::{ProblemFile, ResultFile};
