//! gbach: an interpreter and breadth-first model checker for a Linda-style
//! coordination language with atomic guarded lists.
//!
//! Programs are parsed with [`parser::parse_program`], executed step by
//! step with [`semantics::successors`] and checked with
//! [`checker::check`]. [`refinement`] compares guarded and sequential
//! agents and introduces guarded lists automatically, and [`bench`] runs
//! the Rush Hour comparison.

pub mod ast;
pub mod bench;
pub mod checker;
pub mod cli;
pub mod corpus;
pub mod logic;
pub mod parser;
pub mod refinement;
pub mod semantics;
pub mod source;
pub mod store;
pub mod term;
pub mod trace;
