use std::collections::BTreeMap;

use serde::Serialize;

use super::corpus::CorpusEntry;
use super::metrics::{exact_match, rouge_l, rouge_n, NormalizationTable};
use super::revisions::{ConditionBucket, RevisionSpec};
use crate::ds::Lexicon;
use crate::generate::{generate, GenConfig, GenError};
use crate::model::ConditionalModel;
use crate::repair::{generate_with_revisions, strip_repair, RevisionEvent};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationCase {
    pub reference: String,
    pub output: String,
    pub reached_goal: bool,
    pub exact_match: bool,
    /// Vertices abandoned at dead ends on the way.
    pub backtracked: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationMetrics {
    pub entries: usize,
    pub generated_to_goal: f64,
    pub exact_match: f64,
    pub rouge_1: f64,
    pub rouge_2: f64,
    pub rouge_l: f64,
    /// Entries that needed at least one dead-end repair.
    pub self_repaired: usize,
    pub cases: Vec<GenerationCase>,
    pub warnings: Vec<String>,
}

fn mean(xs: impl Iterator<Item = f64>, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        xs.sum::<f64>() / n as f64
    }
}

/// Generates every goal and scores the realized words against the
/// reference utterance.
pub fn evaluate_generation(
    model: &ConditionalModel,
    lexicon: &Lexicon,
    corpus: &[CorpusEntry],
    config: &GenConfig,
    table: &NormalizationTable,
) -> GenerationMetrics {
    let mut cases = Vec::with_capacity(corpus.len());
    let mut scores = Vec::with_capacity(corpus.len());
    for e in corpus {
        let (tokens, backtracked, error) = match generate(model, lexicon, &e.goal, config) {
            Ok(g) => (g.tokens, g.backtracked, None),
            Err(err) => {
                let partial = match &err {
                    GenError::Exhausted { partial } | GenError::StepLimit { partial, .. } => partial.clone(),
                    _ => Vec::new(),
                };
                (partial, 0, Some(err.to_string()))
            }
        };
        scores.push((
            rouge_n(&tokens, &e.tokens, 1),
            rouge_n(&tokens, &e.tokens, 2),
            rouge_l(&tokens, &e.tokens),
        ));
        cases.push(GenerationCase {
            reference: e.utterance(),
            output: tokens.join(" "),
            reached_goal: error.is_none(),
            exact_match: error.is_none() && exact_match(&tokens, &e.tokens, table),
            backtracked,
            error,
        });
    }
    let n = cases.len();
    GenerationMetrics {
        entries: n,
        generated_to_goal: mean(cases.iter().map(|c| f64::from(u8::from(c.reached_goal))), n),
        exact_match: mean(cases.iter().map(|c| f64::from(u8::from(c.exact_match))), n),
        rouge_1: mean(scores.iter().map(|s| s.0), n),
        rouge_2: mean(scores.iter().map(|s| s.1), n),
        rouge_l: mean(scores.iter().map(|s| s.2), n),
        self_repaired: cases.iter().filter(|c| c.backtracked > 0).count(),
        warnings: if n == 0 { vec!["empty test set".to_owned()] } else { Vec::new() },
        cases,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepairCase {
    pub bucket: ConditionBucket,
    pub index: usize,
    pub position: usize,
    pub reference: String,
    pub annotated: String,
    pub cleaned: String,
    pub exact_match: bool,
    pub repaired_edges: usize,
    pub interregnum_tokens: usize,
    /// Vertices stepped back over because of the revision itself.
    pub revision_backtrack: usize,
    /// Realized words left when generation resumed after the revision.
    pub resume_depth: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BucketScore {
    pub count: usize,
    pub exact: usize,
    pub exact_match: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepairMetrics {
    pub buckets: BTreeMap<String, BucketScore>,
    pub overall: f64,
    pub cases: Vec<RepairCase>,
}

/// Runs every revision spec, cleans the output of its self-repair and
/// compares the result with the revised utterance; scores by condition.
pub fn evaluate_repairs(
    model: &ConditionalModel,
    lexicon: &Lexicon,
    specs: &[RevisionSpec],
    config: &GenConfig,
    interregna: &[Vec<String>],
    table: &NormalizationTable,
) -> RepairMetrics {
    let mut buckets: BTreeMap<String, BucketScore> = ConditionBucket::ALL
        .iter()
        .map(|b| (b.name().to_owned(), BucketScore::default()))
        .collect();
    let mut cases = Vec::with_capacity(specs.len());
    for s in specs {
        let events = [RevisionEvent {
            index: s.index,
            new_goal: s.r_r.clone(),
        }];
        let case = match generate_with_revisions(model, lexicon, &s.r_g, &events, config) {
            Ok(out) => {
                let annotated = out.annotated();
                let tokens: Vec<&str> = annotated.split_whitespace().collect();
                let cleaned = strip_repair(&tokens, interregna);
                let applied = out.revisions.first();
                RepairCase {
                    bucket: s.bucket(),
                    index: s.index,
                    position: s.position,
                    reference: s.utt_r.join(" "),
                    exact_match: exact_match(&cleaned, &s.utt_r, table),
                    cleaned: cleaned.join(" "),
                    annotated,
                    repaired_edges: out.repaired_edges(),
                    interregnum_tokens: out.interregnum_tokens(),
                    revision_backtrack: applied.map_or(0, |a| a.backtracked),
                    resume_depth: applied.map(|a| a.resume_depth),
                    error: None,
                }
            }
            Err(e) => RepairCase {
                bucket: s.bucket(),
                index: s.index,
                position: s.position,
                reference: s.utt_r.join(" "),
                annotated: String::new(),
                cleaned: String::new(),
                exact_match: false,
                repaired_edges: 0,
                interregnum_tokens: 0,
                revision_backtrack: 0,
                resume_depth: None,
                error: Some(e.to_string()),
            },
        };
        let b = buckets.get_mut(case.bucket.name()).expect("all buckets present");
        b.count += 1;
        b.exact += usize::from(case.exact_match);
        cases.push(case);
    }
    for b in buckets.values_mut() {
        b.exact_match = if b.count == 0 { 0.0 } else { b.exact as f64 / b.count as f64 };
    }
    let exact = cases.iter().filter(|c| c.exact_match).count();
    RepairMetrics {
        buckets,
        overall: if cases.is_empty() { 0.0 } else { exact as f64 / cases.len() as f64 },
        cases,
    }
}

/// Specs whose original and revised goals the model realizes on its own,
/// with no revision and no dead end. Scoring only these isolates the repair
/// behaviour from plain generation failures.
pub fn generable_specs(
    model: &ConditionalModel,
    lexicon: &Lexicon,
    specs: &[RevisionSpec],
    config: &GenConfig,
) -> Vec<RevisionSpec> {
    let mut seen: BTreeMap<String, bool> = BTreeMap::new();
    let mut clean = |goal: &crate::ttr::RecordType| {
        *seen.entry(goal.to_string()).or_insert_with(|| {
            matches!(generate(model, lexicon, goal, config), Ok(g) if g.backtracked == 0)
        })
    };
    specs
        .iter()
        .filter(|s| clean(&s.r_g) && clean(&s.r_r))
        .cloned()
        .collect()
}
