//! Beam-ranked incremental generation toward a goal record type.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ds::{DsTree, Lexicon};
use crate::model::{ConditionalModel, FeatureKey};
use crate::parser::{computational_closure, word_steps, ContextDag, EdgeId, ParseError, VertexId, WordStep, DEFAULT_CLOSURE_BOUND};
use crate::ttr::RecordType;

pub const DEFAULT_BEAM: usize = 3;
pub const DEFAULT_INTERREGNUM: &str = "uh I mean";
pub const ORACLE_ACTION_LIMIT: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("no continuation from the axiom; partial output `{}`", partial.join(" "))]
    Exhausted { partial: Vec<String> },
    #[error("gave up after {limit} steps; partial output `{}`", partial.join(" "))]
    StepLimit { limit: usize, partial: Vec<String> },
    #[error("oracle refuses a lexicon with {actions} actions (limit {ORACLE_ACTION_LIMIT})")]
    OracleRefusal { actions: usize },
    #[error("goal is unreachable")]
    Unreachable,
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub beam: usize,
    pub interregnum: Vec<String>,
    /// Upper bound on accepted words plus backtracking steps.
    pub max_steps: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            beam: DEFAULT_BEAM,
            interregnum: DEFAULT_INTERREGNUM.split(' ').map(str::to_owned).collect(),
            max_steps: 200,
        }
    }
}

impl GenConfig {
    pub fn with_beam(beam: usize) -> Self {
        assert!(beam >= 1, "beam size must be positive");
        GenConfig {
            beam,
            ..GenConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Word,
    /// A word whose edge was later marked repaired.
    Repaired,
    Interregnum,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceToken {
    pub text: String,
    pub kind: TokenKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    /// No lexical action of the word applies.
    Unparsable,
    /// The word parses but the result no longer subsumes the goal.
    NotSubsuming,
    /// The word adds nothing to the current semantics.
    Vacuous,
    /// The result was already abandoned at this vertex.
    Excluded,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accepted => "accepted",
            Verdict::Unparsable => "unparsable",
            Verdict::NotSubsuming => "not-subsuming",
            Verdict::Vacuous => "vacuous",
            Verdict::Excluded => "excluded",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub rank: usize,
    pub word: String,
    pub score: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceEvent {
    /// One beam evaluated after `position` realized words.
    Beam { position: usize, candidates: Vec<Candidate> },
    /// The beam produced nothing and the tip was abandoned.
    DeadEnd { position: usize, word: String },
    /// The goal changed after `position` words.
    Revision { position: usize, forward: bool, backtracked: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Done,
    Emitted,
    Backtracked,
}

/// A generation session over one context DAG. Words are realized along a
/// spine of vertices from the axiom; backtracking marks spine edges repaired
/// but keeps them in the DAG.
#[derive(Debug, Clone)]
pub struct GenSession<'a> {
    model: &'a ConditionalModel,
    lexicon: &'a Lexicon,
    config: GenConfig,
    dag: ContextDag,
    spine: Vec<VertexId>,
    spine_edges: Vec<EdgeId>,
    goal: RecordType,
    excluded: BTreeMap<VertexId, BTreeSet<DsTree>>,
    surface: Vec<SurfaceToken>,
    edge_token: BTreeMap<EdgeId, usize>,
    pending_interregnum: bool,
    trace: Vec<TraceEvent>,
    backtracked: usize,
    steps: usize,
}

impl<'a> GenSession<'a> {
    pub fn new(model: &'a ConditionalModel, lexicon: &'a Lexicon, goal: RecordType, config: GenConfig) -> Self {
        assert!(config.beam >= 1, "beam size must be positive");
        let dag = ContextDag::new();
        GenSession {
            model,
            lexicon,
            config,
            spine: vec![dag.root()],
            dag,
            spine_edges: Vec::new(),
            goal,
            excluded: BTreeMap::new(),
            surface: Vec::new(),
            edge_token: BTreeMap::new(),
            pending_interregnum: false,
            trace: Vec::new(),
            backtracked: 0,
            steps: 0,
        }
    }

    pub fn goal(&self) -> &RecordType {
        &self.goal
    }

    pub fn config(&self) -> &GenConfig {
        &self.config
    }

    pub fn dag(&self) -> &ContextDag {
        &self.dag
    }

    pub fn into_dag(self) -> ContextDag {
        self.dag
    }

    pub fn tip(&self) -> VertexId {
        *self.spine.last().expect("spine holds the axiom")
    }

    pub fn tree(&self) -> &DsTree {
        &self.dag.vertex(self.tip()).tree
    }

    /// Number of realized (non-repaired) words.
    pub fn spine_len(&self) -> usize {
        self.spine_edges.len()
    }

    pub fn spine(&self) -> &[VertexId] {
        &self.spine
    }

    pub fn r_cur(&self) -> &RecordType {
        &self.dag.vertex(self.tip()).r_cur
    }

    pub fn r_inc(&self) -> RecordType {
        self.goal.subtract(self.r_cur())
    }

    pub fn is_done(&self) -> bool {
        self.r_cur().is_equivalent(&self.goal)
    }

    pub fn surface(&self) -> &[SurfaceToken] {
        &self.surface
    }

    /// Realized words in order.
    pub fn words(&self) -> Vec<String> {
        self.spine_edges.iter().map(|&e| self.dag.edge(e).word.clone()).collect()
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    /// Total vertices stepped back over, by dead ends and revisions.
    pub fn backtracked(&self) -> usize {
        self.backtracked
    }

    pub fn repaired_edges(&self) -> usize {
        self.dag.edges().iter().filter(|e| e.repaired).count()
    }

    fn pointed_features(&self) -> Vec<FeatureKey> {
        self.dag
            .vertex(self.tip())
            .pointed_features()
            .into_iter()
            .map(FeatureKey::Pointed)
            .collect()
    }

    /// The ranked words that make up the next beam.
    pub fn beam(&self) -> Vec<(String, f64)> {
        let mut ranked = self.model.rank_words(&self.pointed_features(), &self.r_inc());
        ranked.truncate(self.config.beam);
        ranked
    }

    fn judge(&self, steps: &[WordStep]) -> (Verdict, Option<usize>) {
        if steps.is_empty() {
            return (Verdict::Unparsable, None);
        }
        let r_cur = self.r_cur();
        let excluded = self.excluded.get(&self.tip());
        let mut verdict = Verdict::NotSubsuming;
        for (i, s) in steps.iter().enumerate() {
            let r_new = s.tree.root_semantics();
            if !self.goal.is_subtype_of(&r_new) {
                continue;
            }
            if r_new.is_equivalent(r_cur) {
                verdict = Verdict::Vacuous;
                continue;
            }
            if excluded.is_some_and(|x| x.contains(&s.tree)) {
                verdict = Verdict::Excluded;
                continue;
            }
            return (Verdict::Accepted, Some(i));
        }
        (verdict, None)
    }

    /// One generation move: emit the best acceptable beam word, or abandon
    /// the tip if none is acceptable.
    pub fn step(&mut self) -> Result<StepOutcome, GenError> {
        if self.is_done() {
            return Ok(StepOutcome::Done);
        }
        if self.steps >= self.config.max_steps {
            return Err(GenError::StepLimit {
                limit: self.config.max_steps,
                partial: self.words(),
            });
        }
        self.steps += 1;
        let tip = self.tip();
        let mut candidates = Vec::new();
        let mut chosen: Option<(String, WordStep)> = None;
        for (rank, (word, score)) in self.beam().into_iter().enumerate() {
            if chosen.is_some() {
                break;
            }
            let steps = if self.lexicon.contains(&word) {
                self.dag.word_steps_from(tip, &word, self.lexicon)?
            } else {
                Vec::new()
            };
            let (verdict, pick) = self.judge(&steps);
            candidates.push(Candidate {
                rank,
                word: word.clone(),
                score,
                verdict,
            });
            if let Some(i) = pick {
                chosen = Some((word, steps[i].clone()));
            }
        }
        self.trace.push(TraceEvent::Beam {
            position: self.spine_len(),
            candidates,
        });
        match chosen {
            Some((word, step)) => {
                self.emit(&word, step)?;
                Ok(StepOutcome::Emitted)
            }
            None => {
                let Some(word) = self.spine_edges.last().map(|&e| self.dag.edge(e).word.clone()) else {
                    return Err(GenError::Exhausted { partial: Vec::new() });
                };
                self.trace.push(TraceEvent::DeadEnd {
                    position: self.spine_len(),
                    word,
                });
                self.backtrack_one(true);
                self.pending_interregnum = true;
                Ok(StepOutcome::Backtracked)
            }
        }
    }

    fn emit(&mut self, word: &str, step: WordStep) -> Result<(), GenError> {
        if self.pending_interregnum {
            for t in &self.config.interregnum {
                self.surface.push(SurfaceToken {
                    text: t.clone(),
                    kind: TokenKind::Interregnum,
                });
            }
            self.pending_interregnum = false;
        }
        let from = self.tip();
        let to = self.dag.add_vertex(step.tree.clone())?;
        let e = self.dag.add_edge(from, to, word, &step);
        self.dag.set_frontier(vec![to]);
        self.spine.push(to);
        self.spine_edges.push(e);
        self.edge_token.insert(e, self.surface.len());
        self.surface.push(SurfaceToken {
            text: word.to_owned(),
            kind: TokenKind::Word,
        });
        Ok(())
    }

    /// Steps back one spine vertex, marking the edge repaired. With
    /// `exclude`, the abandoned tree may not be produced again from the new
    /// tip.
    fn backtrack_one(&mut self, exclude: bool) {
        let e = self.spine_edges.pop().expect("caller checks the spine is nonempty");
        let v = self.spine.pop().expect("spine is longer than its edges");
        self.dag.mark_repaired(e);
        if let Some(&i) = self.edge_token.get(&e) {
            self.surface[i].kind = TokenKind::Repaired;
        }
        if exclude {
            let tree = self.dag.vertex(v).tree.clone();
            self.excluded.entry(self.tip()).or_default().insert(tree);
        }
        self.dag.set_frontier(vec![self.tip()]);
        self.backtracked += 1;
    }

    /// Swaps in a new goal. Returns whether the revision is forward-looking;
    /// otherwise the spine has been cut back to the deepest vertex whose
    /// semantics subsume the new goal, and an interregnum will precede the
    /// next word.
    pub fn revise(&mut self, new_goal: RecordType) -> bool {
        let forward = classify_forward(self.r_cur(), &new_goal);
        let position = self.spine_len();
        let mut depth = 0;
        if !forward {
            while !new_goal.is_subtype_of(self.r_cur()) {
                self.backtrack_one(false);
                depth += 1;
            }
            self.pending_interregnum = true;
        }
        self.goal = new_goal;
        self.excluded.clear();
        self.trace.push(TraceEvent::Revision {
            position,
            forward,
            backtracked: depth,
        });
        forward
    }

    /// Steps until the goal is reached.
    pub fn run(&mut self) -> Result<(), GenError> {
        while self.step()? != StepOutcome::Done {}
        Ok(())
    }
}

/// A revision is forward-looking iff the current semantics still subsume
/// the new goal.
pub(crate) fn classify_forward(r_cur: &RecordType, r_new: &RecordType) -> bool {
    r_new.is_subtype_of(r_cur)
}

#[derive(Debug, Clone)]
pub struct Generation {
    /// Realized words with repairs removed.
    pub tokens: Vec<String>,
    pub surface: Vec<SurfaceToken>,
    pub dag: ContextDag,
    pub spine: Vec<VertexId>,
    pub trace: Vec<TraceEvent>,
    pub backtracked: usize,
}

pub fn generate(
    model: &ConditionalModel,
    lexicon: &Lexicon,
    goal: &RecordType,
    config: &GenConfig,
) -> Result<Generation, GenError> {
    let mut s = GenSession::new(model, lexicon, goal.clone(), config.clone());
    s.run()?;
    Ok(Generation {
        tokens: s.words(),
        surface: s.surface.clone(),
        spine: s.spine.clone(),
        trace: s.trace.clone(),
        backtracked: s.backtracked,
        dag: s.dag,
    })
}

/// Exhaustive depth-first search over every lexical action, words in
/// lexicographic order, keeping only steps whose semantics subsume the goal
/// and add something. Test oracle for small lexicons.
pub fn brute_force_generate(lexicon: &Lexicon, goal: &RecordType) -> Result<Vec<String>, GenError> {
    if lexicon.action_count() > ORACLE_ACTION_LIMIT {
        return Err(GenError::OracleRefusal {
            actions: lexicon.action_count(),
        });
    }
    let axiom = DsTree::axiom();
    let max_depth = 2 * goal.len() + 2;
    let mut out = Vec::new();
    if search(lexicon, goal, &axiom, max_depth, &mut out)? {
        Ok(out)
    } else {
        Err(GenError::Unreachable)
    }
}

fn search(
    lexicon: &Lexicon,
    goal: &RecordType,
    tree: &DsTree,
    depth_left: usize,
    out: &mut Vec<String>,
) -> Result<bool, GenError> {
    let r_cur = tree.root_semantics();
    if r_cur.is_equivalent(goal) {
        return Ok(true);
    }
    if depth_left == 0 {
        return Ok(false);
    }
    let closure = computational_closure(tree, DEFAULT_CLOSURE_BOUND)?;
    for word in lexicon.words() {
        for step in word_steps(&closure, word, lexicon)? {
            let r_new = step.tree.root_semantics();
            if !goal.is_subtype_of(&r_new) || r_new.is_equivalent(&r_cur) {
                continue;
            }
            out.push(word.to_owned());
            if search(lexicon, goal, &step.tree, depth_left - 1, out)? {
                return Ok(true);
            }
            out.pop();
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{train, Normalization};
    use crate::ttr::parse_rt;

    const FIG1: &str = "[x=john:e, e=arrive:es, p=subj(e,x):t, head=p:t]";

    fn toy_model() -> ConditionalModel {
        train(&crate::toy::corpus(), &crate::toy::lexicon(), 0.1, Normalization::PerWord)
            .unwrap()
            .model
    }

    #[test]
    fn fig1_goal() {
        let lex = crate::toy::lexicon();
        let m = toy_model();
        let g = generate(&m, &lex, &parse_rt(FIG1).unwrap(), &GenConfig::default()).unwrap();
        assert_eq!(g.tokens, ["john", "arrives"]);
        assert_eq!(brute_force_generate(&lex, &parse_rt(FIG1).unwrap()).unwrap(), ["john", "arrives"]);
    }

    #[test]
    fn empty_goal_is_immediate() {
        let lex = crate::toy::lexicon();
        let m = toy_model();
        let g = generate(&m, &lex, &RecordType::empty(), &GenConfig::default()).unwrap();
        assert!(g.tokens.is_empty());
        assert!(brute_force_generate(&lex, &RecordType::empty()).unwrap().is_empty());
    }

    #[test]
    fn unknown_predicate_fails() {
        let lex = crate::toy::lexicon();
        let m = toy_model();
        let goal = parse_rt("[x=john:e, e=fly:es, p=subj(e,x):t, head=p:t]").unwrap();
        assert!(generate(&m, &lex, &goal, &GenConfig::default()).is_err());
        assert_eq!(brute_force_generate(&lex, &goal), Err(GenError::Unreachable));
    }

    #[test]
    fn oracle_refuses_large_lexicons() {
        let mut text = String::new();
        for i in 0..201 {
            text.push_str(&format!("word w{i} : trigger=?Ty(e) ; put Ty(e) ; put formula [x=w{i}:e, head=x:e] ; bottom\n"));
        }
        let lex = crate::ds::load_grammar(&text).unwrap();
        assert!(matches!(
            brute_force_generate(&lex, &RecordType::empty()),
            Err(GenError::OracleRefusal { actions: 201 })
        ));
    }
}
