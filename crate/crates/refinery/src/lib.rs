//! Spec files, reports and the command-line front end for `refinery-core`.

pub mod cli;
pub mod dsl;
pub mod report;
pub mod workspace;

pub use dsl::{parse_spec, parse_spec_bytes, parse_spec_with_warnings, render_spec, Diagnostic};
pub use workspace::{Unresolved, Workspace};
