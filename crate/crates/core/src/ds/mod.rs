//! Dynamic Syntax: semantic trees, computational and lexical actions.

mod lexicon;
mod tree;
mod types;

use thiserror::Error;

use crate::ttr::TtrError;

pub use lexicon::{load_grammar, LexicalAction, Lexicon, Trigger, Update};
pub use tree::{ComputationalAction, Daughter, DsTree, Node, NodeAddress};
pub use types::{apply_formula, fresh_label, placeholder_argument, AtomicType, Formula, SemType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DsError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: trigger {ty} can never hold at a pointed node")]
    DanglingTrigger { line: usize, ty: String },
    #[error("grammar fault in {action}: {msg}")]
    GrammarFault { action: String, msg: String },
    #[error("type fault: {0}")]
    TypeFault(String),
    #[error(transparent)]
    Ttr(#[from] TtrError),
}

/// The axiom tree: a single `?Ty(t)` root.
pub fn axiom_tree() -> DsTree {
    DsTree::axiom()
}
