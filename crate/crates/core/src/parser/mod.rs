//! Front end: lexing, parsing, name resolution, static checks and the
//! canonical pretty-printer.
//!
//! Concrete syntax, by example:
//!
//! ```text
//! eset RCInt = {1, 2, 3, 4, 5, 6}.
//! map pred : RCInt -> RCInt.
//! eqn pred(2) = 1. pred(3) = 2.
//! gprim move.
//! proc Up(r: RCInt) = (r > 1) -> [get(cell(pred(r))) -> move(r), tell(cell(r))]; Up(pred(r)).
//! formula top = Reach(#cell(3) = 1).
//! run tell(cell(1)); Up(3).
//! ```
//!
//! The formula syntax (`Reach(PF)`, `PF Until TF`, `Next TF`) and the
//! `gprim`/`run` declarations are this tool's own.

mod check;
mod grammar;
mod lexer;
mod print;

use std::fmt;

use crate::ast::{Agent, Program};
use crate::logic::TemporalFormula;
use crate::source::SrcPos;
use crate::store::Store;
use crate::term::SiTerm;

pub use check::static_check;
pub use print::print_program;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiagKind {
    SyntaxError,
    UnresolvedIdentifier,
    UnguardedProcedure,
    ArityMismatch,
    OverlappingEquations,
    TypeMismatch,
    DuplicateDefinition,
    InvalidSet,
    InvalidFormula,
}

impl DiagKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagKind::SyntaxError => "SyntaxError",
            DiagKind::UnresolvedIdentifier => "UnresolvedIdentifier",
            DiagKind::UnguardedProcedure => "UnguardedProcedure",
            DiagKind::ArityMismatch => "ArityMismatch",
            DiagKind::OverlappingEquations => "OverlappingEquations",
            DiagKind::TypeMismatch => "TypeMismatch",
            DiagKind::DuplicateDefinition => "DuplicateDefinition",
            DiagKind::InvalidSet => "InvalidSet",
            DiagKind::InvalidFormula => "InvalidFormula",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagKind,
    pub pos: SrcPos,
    pub message: String,
}

impl Diagnostic {
    pub fn new(kind: DiagKind, pos: SrcPos, message: impl Into<String>) -> Self {
        Diagnostic { kind, pos, message: message.into() }
    }

    /// `file:line:col: Kind: message`
    pub fn render(&self, file: &str) -> String {
        format!("{file}:{}:{}: {}: {}", self.pos.line, self.pos.col, self.kind.as_str(), self.message)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.pos.line, self.pos.col, self.kind.as_str(), self.message)
    }
}

impl std::error::Error for Diagnostic {}

/// Parses, resolves and statically checks a program.
pub fn parse_program(text: &str) -> Result<Program, Vec<Diagnostic>> {
    let prog = parse_program_unchecked(text)?;
    let diags = static_check(&prog);
    if diags.is_empty() {
        Ok(prog)
    } else {
        Err(diags)
    }
}

/// Same as [`parse_program`] for raw bytes; invalid UTF-8 is a syntax error.
pub fn parse_program_bytes(bytes: &[u8]) -> Result<Program, Vec<Diagnostic>> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_program(text),
        Err(e) => {
            let prefix = &bytes[..e.valid_up_to()];
            let line = 1 + prefix.iter().filter(|&&b| b == b'\n').count() as u32;
            let col = 1 + prefix.iter().rev().take_while(|&&b| b != b'\n').count() as u32;
            Err(vec![Diagnostic::new(DiagKind::SyntaxError, SrcPos::new(line, col), "input is not valid UTF-8")])
        }
    }
}

/// Parses and resolves without the static checks.
pub fn parse_program_unchecked(text: &str) -> Result<Program, Vec<Diagnostic>> {
    grammar::parse_program(text)
}

/// Parses a temporal formula against the declarations of `prog`; counted
/// terms are rewritten to final form.
pub fn parse_formula(text: &str, prog: &Program) -> Result<TemporalFormula, Diagnostic> {
    grammar::parse_formula(text, prog)
}

/// Parses an agent against the declarations of `prog` (procedures,
/// graphical primitives and maps).
pub fn parse_agent(text: &str, prog: &Program) -> Result<Agent, Diagnostic> {
    grammar::parse_agent(text, prog)
}

/// Parses a final si-term such as `free(1,2)`.
pub fn parse_term(text: &str) -> Result<SiTerm, Diagnostic> {
    grammar::parse_final_term(text)
}

/// Parses a store written as `{t1:c1, t2:c2}`.
pub fn parse_store(text: &str) -> Result<Store, Diagnostic> {
    grammar::parse_store(text)
}

/// Parses a transition label as printed in traces: `GL get(a) ; tell(b)`.
pub fn parse_label(text: &str) -> Result<crate::semantics::TransitionLabel, Diagnostic> {
    grammar::parse_label(text)
}
