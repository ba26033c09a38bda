//! Word-by-word parsing over a context DAG.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::ds::{ComputationalAction, DsError, DsTree, Lexicon};
use crate::ttr::RecordType;

pub const DEFAULT_CLOSURE_BOUND: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("dead end at position {position} (`{word}`)")]
    DeadEnd { position: usize, word: String },
    #[error("computational closure exceeded {bound} steps")]
    ClosureOverflow { bound: usize },
    #[error("empty utterance")]
    Empty,
    #[error(transparent)]
    Ds(#[from] DsError),
}

/// A tree reachable by computational actions, with the shortest action
/// sequence that reaches it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureTree {
    pub tree: DsTree,
    pub actions: Vec<ComputationalAction>,
}

/// All trees reachable from `tree` by up to `bound` computational actions,
/// breadth first, deduplicated. Fails if unexplored trees remain at the bound.
pub fn computational_closure(tree: &DsTree, bound: usize) -> Result<Vec<ClosureTree>, ParseError> {
    let mut seen: BTreeSet<DsTree> = BTreeSet::new();
    seen.insert(tree.clone());
    let mut out = vec![ClosureTree {
        tree: tree.clone(),
        actions: Vec::new(),
    }];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let depth = out[i].actions.len();
        for action in ComputationalAction::ALL {
            let Some(next) = out[i].tree.apply_computational(action) else {
                continue;
            };
            if seen.contains(&next) {
                continue;
            }
            if depth == bound {
                return Err(ParseError::ClosureOverflow { bound });
            }
            seen.insert(next.clone());
            let mut actions = out[i].actions.clone();
            actions.push(action);
            out.push(ClosureTree {
                tree: next,
                actions,
            });
            queue.push_back(out.len() - 1);
        }
    }
    Ok(out)
}

/// One successful application of a word: the closure tree it applied to,
/// the actions leading there, which of the word's lexical actions fired, and
/// the resulting tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordStep {
    pub pre_tree: DsTree,
    pub actions: Vec<ComputationalAction>,
    pub lexical: usize,
    pub tree: DsTree,
}

/// Every way `word` extends a tree whose closure is `closure`, with identical
/// results kept once.
pub fn word_steps(closure: &[ClosureTree], word: &str, lexicon: &Lexicon) -> Result<Vec<WordStep>, ParseError> {
    if !lexicon.contains(word) {
        return Err(ParseError::UnknownWord(word.to_owned()));
    }
    let mut out: Vec<WordStep> = Vec::new();
    for c in closure {
        for (i, action) in lexicon.actions(word).iter().enumerate() {
            if let Some(tree) = c.tree.apply_lexical(action)? {
                if out.iter().all(|s| s.tree != tree) {
                    out.push(WordStep {
                        pre_tree: c.tree.clone(),
                        actions: c.actions.clone(),
                        lexical: i,
                        tree,
                    });
                }
            }
        }
    }
    Ok(out)
}

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DagVertex {
    pub id: VertexId,
    pub tree: DsTree,
    pub r_cur: RecordType,
    /// Trees reachable from `tree` by computational actions.
    pub closure: Vec<ClosureTree>,
}

impl DagVertex {
    /// Some tree in the closure is complete.
    pub fn is_complete(&self) -> bool {
        self.closure.iter().any(|c| c.tree.is_complete())
    }

    /// The pointed-node features over the closure, deduplicated in order.
    pub fn pointed_features(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.closure {
            let f = c.tree.pointed_type_feature();
            if !out.contains(&f) {
                out.push(f);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DagEdge {
    pub from: VertexId,
    pub to: VertexId,
    pub word: String,
    pub actions: Vec<ComputationalAction>,
    pub lexical: usize,
    /// The tree the lexical action applied to.
    pub pre_tree: DsTree,
    pub repaired: bool,
}

/// Word-level graph of parse states. Vertex 0 holds the axiom tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextDag {
    vertices: Vec<DagVertex>,
    edges: Vec<DagEdge>,
    frontier: Vec<VertexId>,
    bound: usize,
}

impl Default for ContextDag {
    fn default() -> Self {
        ContextDag::new()
    }
}

impl ContextDag {
    pub fn new() -> Self {
        ContextDag::with_bound(DEFAULT_CLOSURE_BOUND).expect("the axiom closure is small")
    }

    pub fn with_bound(bound: usize) -> Result<Self, ParseError> {
        let mut dag = ContextDag {
            vertices: Vec::new(),
            edges: Vec::new(),
            frontier: Vec::new(),
            bound,
        };
        let root = dag.add_vertex(DsTree::axiom())?;
        dag.frontier.push(root);
        Ok(dag)
    }

    pub fn closure_bound(&self) -> usize {
        self.bound
    }

    pub fn root(&self) -> VertexId {
        0
    }

    pub fn vertex(&self, id: VertexId) -> &DagVertex {
        &self.vertices[id]
    }

    pub fn vertices(&self) -> &[DagVertex] {
        &self.vertices
    }

    pub fn edge(&self, id: EdgeId) -> &DagEdge {
        &self.edges[id]
    }

    pub fn edges(&self) -> &[DagEdge] {
        &self.edges
    }

    pub fn frontier(&self) -> &[VertexId] {
        &self.frontier
    }

    pub fn set_frontier(&mut self, frontier: Vec<VertexId>) {
        self.frontier = frontier;
    }

    pub fn add_vertex(&mut self, tree: DsTree) -> Result<VertexId, ParseError> {
        let closure = computational_closure(&tree, self.bound)?;
        let id = self.vertices.len();
        self.vertices.push(DagVertex {
            id,
            r_cur: tree.root_semantics(),
            tree,
            closure,
        });
        Ok(id)
    }

    pub fn add_edge(&mut self, from: VertexId, to: VertexId, word: &str, step: &WordStep) -> EdgeId {
        self.edges.push(DagEdge {
            from,
            to,
            word: word.to_owned(),
            actions: step.actions.clone(),
            lexical: step.lexical,
            pre_tree: step.pre_tree.clone(),
            repaired: false,
        });
        self.edges.len() - 1
    }

    pub fn mark_repaired(&mut self, edge: EdgeId) {
        self.edges[edge].repaired = true;
    }

    /// Edges entering `v`, in insertion order.
    pub fn incoming(&self, v: VertexId) -> impl Iterator<Item = (EdgeId, &DagEdge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.to == v)
    }

    pub fn word_steps_from(&self, v: VertexId, word: &str, lexicon: &Lexicon) -> Result<Vec<WordStep>, ParseError> {
        word_steps(&self.vertices[v].closure, word, lexicon)
    }

    /// Extends every frontier vertex by `word`. On a dead end the DAG is
    /// left unchanged.
    pub fn parse_word(&mut self, word: &str, lexicon: &Lexicon) -> Result<(), ParseError> {
        let mut planned: Vec<(VertexId, WordStep)> = Vec::new();
        for &v in &self.frontier {
            for step in self.word_steps_from(v, word, lexicon)? {
                planned.push((v, step));
            }
        }
        if planned.is_empty() {
            return Err(ParseError::DeadEnd {
                position: self.depth_of_frontier(),
                word: word.to_owned(),
            });
        }
        let mut next: Vec<VertexId> = Vec::new();
        for (from, step) in planned {
            let existing = next.iter().copied().find(|&v| self.vertices[v].tree == step.tree);
            let to = match existing {
                Some(v) => v,
                None => {
                    let v = self.add_vertex(step.tree.clone())?;
                    next.push(v);
                    v
                }
            };
            self.add_edge(from, to, word, &step);
        }
        self.frontier = next;
        Ok(())
    }

    fn depth_of_frontier(&self) -> usize {
        self.frontier
            .first()
            .map(|&v| self.path_to(v).map_or(0, |p| p.len()))
            .unwrap_or(0)
    }

    /// The first path of non-repaired edges from the root to `v`, taking
    /// incoming edges in insertion order.
    pub fn path_to(&self, v: VertexId) -> Option<Vec<EdgeId>> {
        if v == self.root() {
            return Some(Vec::new());
        }
        for (e, edge) in self.incoming(v) {
            if edge.repaired {
                continue;
            }
            if let Some(mut p) = self.path_to(edge.from) {
                p.push(e);
                return Some(p);
            }
        }
        None
    }

    /// Plain-text dump: one `vertex` line per vertex, one `edge` line per
    /// edge.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let _ = writeln!(
                out,
                "vertex {} ptr={} complete={} rt={}",
                v.id,
                v.tree.pointed_type_feature(),
                v.is_complete(),
                v.r_cur
            );
        }
        for e in &self.edges {
            let actions: Vec<&str> = e.actions.iter().map(|a| a.name()).collect();
            let _ = writeln!(
                out,
                "edge {} -> {} word={} repaired={} actions={}",
                e.from,
                e.to,
                e.word,
                e.repaired,
                if actions.is_empty() { "-".to_owned() } else { actions.join(",") }
            );
        }
        out
    }
}

/// Result of parsing a whole utterance.
#[derive(Debug, Clone)]
pub struct ParseResult {
    pub dag: ContextDag,
    /// `R_cur` before any word and after each prefix, along the first
    /// frontier path.
    pub prefix_semantics: Vec<RecordType>,
    /// The tree after each word along that path.
    pub prefix_trees: Vec<DsTree>,
    /// The vertices of that path, starting at the root.
    pub prefix_vertices: Vec<VertexId>,
    /// Some frontier vertex can reach a complete tree.
    pub grammatical: bool,
}

impl ParseResult {
    /// The last element of `prefix_semantics`.
    pub fn semantics(&self) -> &RecordType {
        self.prefix_semantics.last().expect("at least the axiom")
    }

    /// Frontier vertices with a complete closure, in order.
    pub fn complete_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.dag
            .frontier()
            .iter()
            .copied()
            .filter(|&v| self.dag.vertex(v).is_complete())
    }
}

pub fn parse_utterance<S: AsRef<str>>(tokens: &[S], lexicon: &Lexicon) -> Result<ParseResult, ParseError> {
    parse_utterance_with_bound(tokens, lexicon, DEFAULT_CLOSURE_BOUND)
}

pub fn parse_utterance_with_bound<S: AsRef<str>>(
    tokens: &[S],
    lexicon: &Lexicon,
    bound: usize,
) -> Result<ParseResult, ParseError> {
    if tokens.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut dag = ContextDag::with_bound(bound)?;
    for (i, w) in tokens.iter().enumerate() {
        dag.parse_word(w.as_ref(), lexicon).map_err(|e| match e {
            ParseError::DeadEnd { word, .. } => ParseError::DeadEnd { position: i, word },
            other => other,
        })?;
    }
    let tip = dag.frontier()[0];
    let path = dag.path_to(tip).expect("frontier vertices are reachable");
    let mut prefix_semantics = vec![dag.vertex(dag.root()).r_cur.clone()];
    let mut prefix_trees = vec![dag.vertex(dag.root()).tree.clone()];
    let mut prefix_vertices = vec![dag.root()];
    for e in &path {
        let v = dag.vertex(dag.edge(*e).to);
        prefix_semantics.push(v.r_cur.clone());
        prefix_trees.push(v.tree.clone());
        prefix_vertices.push(v.id);
    }
    let grammatical = dag.frontier().iter().any(|&v| dag.vertex(v).is_complete());
    Ok(ParseResult {
        dag,
        prefix_semantics,
        prefix_trees,
        prefix_vertices,
        grammatical,
    })
}

/// Splits on whitespace.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_owned).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ttr::parse_rt;

    fn lex() -> Lexicon {
        crate::toy::lexicon()
    }

    #[test]
    fn init_has_one_vertex() {
        let dag = ContextDag::new();
        assert_eq!(dag.vertices().len(), 1);
        assert!(dag.edges().is_empty());
        assert_eq!(dag.frontier(), &[0]);
        assert!(dag.vertex(0).r_cur.is_empty());
    }

    #[test]
    fn axiom_closure_contains_intro_pred() {
        let c = computational_closure(&DsTree::axiom(), 8).unwrap();
        assert!(c.iter().any(|t| t.tree.pointed_type_feature() == "?Ty(e)"));
    }

    #[test]
    fn john_arrives() {
        let r = parse_utterance(&["john", "arrives"], &lex()).unwrap();
        assert!(r.grammatical);
        let expected = [
            "[]",
            "[x=john:e, head=x:e]",
            "[x=john:e, e=arrive:es, p=subj(e,x):t, head=p:t]",
        ];
        for (got, want) in r.prefix_semantics.iter().zip(expected) {
            assert!(got.is_equivalent(&parse_rt(want).unwrap()), "{got} vs {want}");
        }
        assert_eq!(r.dag.vertices().len(), 3);
    }

    #[test]
    fn john_alone_is_potentially_grammatical() {
        let r = parse_utterance(&["john"], &lex()).unwrap();
        assert!(!r.grammatical);
        let v = r.dag.vertex(r.dag.frontier()[0]);
        assert!(v.closure.iter().any(|c| c.tree.pointed_type_feature() == "?Ty(e→t)"));
    }

    #[test]
    fn verb_first_is_a_dead_end() {
        let err = parse_utterance(&["arrives", "john"], &lex()).unwrap_err();
        assert_eq!(
            err,
            ParseError::DeadEnd {
                position: 0,
                word: "arrives".into()
            }
        );
    }

    #[test]
    fn unknown_word() {
        let err = parse_utterance(&["zork"], &lex()).unwrap_err();
        assert_eq!(err, ParseError::UnknownWord("zork".into()));
    }

    #[test]
    fn tight_bound_overflows() {
        let err = parse_utterance_with_bound(&["john", "arrives"], &lex(), 1).unwrap_err();
        assert_eq!(err, ParseError::ClosureOverflow { bound: 1 });
    }

    #[test]
    fn complete_tree_closure_is_itself() {
        let r = parse_utterance(&["john", "arrives"], &lex()).unwrap();
        let v = r.dag.vertex(r.dag.frontier()[0]);
        let done = v.closure.iter().find(|c| c.tree.is_complete()).unwrap();
        let c = computational_closure(&done.tree, 8).unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn dump_lists_vertices_and_edges() {
        let r = parse_utterance(&["john", "arrives"], &lex()).unwrap();
        let d = r.dag.dump();
        assert_eq!(d.lines().filter(|l| l.starts_with("vertex")).count(), 3);
        assert!(d.contains("edge 0 -> 1 word=john repaired=false actions=intro-pred"));
        assert!(d.contains("edge 1 -> 2 word=arrives repaired=false actions=completion,anticipation"));
    }
}
