//! The `.rfn` spec language.
//!
//! A spec file is a sequence of declarations:
//!
//! ```text
//! type Answer { yes no }
//! subtype Small of Big { d0 d1 }
//! fun answer : Small -> Answer { d0 -> yes ; d1 -> no }
//! op Ask { state b:Big  in q:Query  out a:Answer
//!          trans { b=d0, q=x -> b'=d0, a=yes ; } }
//! transformer T { in a:Answer  out e:Bit  rel { a=yes -> e=b1 } }
//! prob P { state b:Big  out a:Answer
//!          dist { b=d0 -> [0.93: b'=d0, a=yes | 0.07: b'=d0, a=no] } }
//! noise Xor { signal Bit  noisetype Bit  out { b0,b1 -> b1 ; ... } }
//! datatype D { state Small  init { d0 }  op Ask }
//! retrieve R { Big <-> Small  pairs { d0, d0 ; } }
//! ```
//!
//! Several `[...]` groups on one `dist` row, or repeated rows for the same
//! pre-state, form a demonic choice between distributions.

mod lexer;
mod parser;
mod render;
mod resolve;

use std::fmt;

use crate::workspace::Workspace;

pub use render::render_spec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

/// A positioned message. Lines and columns are 1-based; columns count
/// characters, not bytes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: u32,
    pub column: u32,
    pub message: String,
}

impl Diagnostic {
    pub fn error(pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, line: pos.line, column: pos.column, message: message.into() }
    }

    pub fn warning(pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, line: pos.line, column: pos.column, message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.severity.as_str(), self.message)
    }
}

/// A parsed workspace together with any non-fatal diagnostics.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub workspace: Workspace,
    pub warnings: Vec<Diagnostic>,
}

/// Parses and resolves a spec. Syntax errors stop at the first problem;
/// resolution errors are collected.
pub fn parse_spec_with_warnings(src: &str) -> Result<Parsed, Vec<Diagnostic>> {
    let tokens = lexer::lex(src).map_err(|d| vec![d])?;
    let decls = parser::Parser::new(tokens).parse().map_err(|d| vec![d])?;
    let resolved = resolve::resolve(decls);
    match resolved.workspace {
        Some(workspace) => Ok(Parsed { workspace, warnings: resolved.warnings }),
        None => Err(resolved.errors),
    }
}

pub fn parse_spec(src: &str) -> Result<Workspace, Vec<Diagnostic>> {
    parse_spec_with_warnings(src).map(|p| p.workspace)
}

/// Like [`parse_spec`], for raw file contents.
pub fn parse_spec_bytes(bytes: &[u8]) -> Result<Workspace, Vec<Diagnostic>> {
    match std::str::from_utf8(bytes) {
        Ok(src) => parse_spec(src),
        Err(e) => {
            let before = &bytes[..e.valid_up_to()];
            let line = before.iter().filter(|&&b| b == b'\n').count() as u32 + 1;
            let line_start = before.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
            let column = String::from_utf8_lossy(&before[line_start..]).chars().count() as u32 + 1;
            Err(vec![Diagnostic::error(Pos { line, column }, "spec is not valid UTF-8")])
        }
    }
}

#[cfg(test)]
mod tests;
