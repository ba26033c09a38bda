//! Incremental generation with Dynamic Syntax trees and record-type
//! semantics.
//!
//! A goal record type is realized word by word: a conditional model ranks
//! candidate words, each candidate is test-parsed, and the first one whose
//! resulting semantics still subsume the goal is emitted. Goal revisions
//! mid-utterance trigger backtracking over the context DAG and an
//! interregnum.

pub mod ds;
pub mod eval;
pub mod generate;
pub mod model;
pub mod parser;
pub mod repair;
pub mod toy;
pub mod ttr;
