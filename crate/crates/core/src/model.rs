//! The word × feature conditional count table and its estimates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::ds::Lexicon;
use crate::eval::CorpusEntry;
use crate::parser::parse_utterance;
use crate::ttr::{AtomicFeature, RecordType};

pub const MODEL_HEADER: &str = "dsttr-model v1";
pub const DEFAULT_ALPHA: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("no usable training entries")]
    EmptyCorpus,
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("unsupported model version: `{0}`")]
    Version(String),
    #[error("corrupt model at line {line}: {msg}")]
    Corrupt { line: usize, msg: String },
}

/// A table column: an atomic semantic feature or the pointed-node type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureKey {
    Semantic(AtomicFeature),
    Pointed(String),
}

impl fmt::Display for FeatureKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureKey::Semantic(a) => write!(f, "sem:{a}"),
            FeatureKey::Pointed(t) => write!(f, "ptr:{t}"),
        }
    }
}

impl FromStr for FeatureKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(a) = s.strip_prefix("sem:") {
            AtomicFeature::parse(a).map(FeatureKey::Semantic).map_err(|e| e.to_string())
        } else if let Some(t) = s.strip_prefix("ptr:") {
            if t.is_empty() {
                Err("empty pointed type".into())
            } else {
                Ok(FeatureKey::Pointed(t.to_owned()))
            }
        } else {
            Err(format!("bad feature key `{s}`"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// `P(f|w)` = count(w,f) over the occurrences of w.
    #[default]
    PerWord,
    /// count(w,f) over the column total of f.
    Column,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::PerWord => "per-word",
            Normalization::Column => "column",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "per-word" => Some(Normalization::PerWord),
            "column" => Some(Normalization::Column),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalModel {
    alpha: f64,
    normalization: Normalization,
    word_occurrences: BTreeMap<String, u64>,
    pair_counts: BTreeMap<String, BTreeMap<FeatureKey, u64>>,
    column_totals: BTreeMap<FeatureKey, u64>,
    total_tokens: u64,
}

impl ConditionalModel {
    pub fn new(alpha: f64, normalization: Normalization) -> Self {
        assert!(alpha >= 0.0 && alpha.is_finite(), "alpha must be a nonnegative number");
        ConditionalModel {
            alpha,
            normalization,
            word_occurrences: BTreeMap::new(),
            pair_counts: BTreeMap::new(),
            column_totals: BTreeMap::new(),
            total_tokens: 0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        assert!(alpha >= 0.0 && alpha.is_finite(), "alpha must be a nonnegative number");
        self.alpha = alpha;
        self
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn with_normalization(mut self, n: Normalization) -> Self {
        self.normalization = n;
        self
    }

    pub fn vocab(&self) -> impl Iterator<Item = &str> {
        self.word_occurrences.keys().map(String::as_str)
    }

    pub fn vocab_size(&self) -> usize {
        self.word_occurrences.len()
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn occurrences(&self, word: &str) -> u64 {
        self.word_occurrences.get(word).copied().unwrap_or(0)
    }

    pub fn pair_count(&self, word: &str, f: &FeatureKey) -> u64 {
        self.pair_counts
            .get(word)
            .and_then(|m| m.get(f))
            .copied()
            .unwrap_or(0)
    }

    /// Observed columns, in canonical order.
    pub fn features(&self) -> impl Iterator<Item = &FeatureKey> {
        self.column_totals.keys()
    }

    pub fn feature_count(&self) -> usize {
        self.column_totals.len()
    }

    /// Records one occurrence of `word` with the features that held.
    pub fn observe(&mut self, word: &str, features: impl IntoIterator<Item = FeatureKey>) {
        *self.word_occurrences.entry(word.to_owned()).or_default() += 1;
        self.total_tokens += 1;
        let row = self.pair_counts.entry(word.to_owned()).or_default();
        let unique: BTreeSet<FeatureKey> = features.into_iter().collect();
        for f in unique {
            *self.column_totals.entry(f.clone()).or_default() += 1;
            *row.entry(f).or_default() += 1;
        }
    }

    pub fn prior(&self, word: &str) -> Result<f64, ModelError> {
        let occ = self.occurrences(word);
        if occ == 0 {
            return Err(ModelError::UnknownWord(word.to_owned()));
        }
        Ok(occ as f64 / self.total_tokens as f64)
    }

    pub fn feature_probability(&self, f: &FeatureKey, word: &str) -> Result<f64, ModelError> {
        let occ = self.occurrences(word);
        if occ == 0 {
            return Err(ModelError::UnknownWord(word.to_owned()));
        }
        let c = self.pair_count(word, f) as f64;
        let denom = match self.normalization {
            Normalization::PerWord => occ as f64 + self.alpha * self.feature_count() as f64,
            Normalization::Column => {
                let col = self.column_totals.get(f).copied().unwrap_or(0) as f64;
                col + self.alpha * self.vocab_size() as f64
            }
        };
        if denom == 0.0 {
            return Ok(0.0);
        }
        Ok((c + self.alpha) / denom)
    }

    /// Semantic columns whose atom is a supertype of `r_inc` up to
    /// relabelling: some atom of `r_inc`, in canonical form, is a subtype.
    pub fn triggered_atoms(&self, r_inc: &RecordType) -> Vec<FeatureKey> {
        let own: Vec<AtomicFeature> = r_inc.decompose().iter().map(AtomicFeature::canonical).collect();
        self.column_totals
            .keys()
            .filter(|f| {
                matches!(f, FeatureKey::Semantic(a)
                    if own.iter().any(|b| b.record_type().is_subtype_of(a.record_type())))
            })
            .cloned()
            .collect()
    }

    /// `log P(w) + Σ log P(f|w)` over the triggered atoms and `ty_p`, for
    /// every vocabulary word with a finite score; best first, ties by token.
    pub fn score_words(&self, ty_p: &FeatureKey, r_inc: &RecordType) -> Vec<(String, f64)> {
        self.rank_words(std::slice::from_ref(ty_p), r_inc)
    }

    /// As [`score_words`](Self::score_words), taking for each word the best
    /// score over several candidate pointed types.
    pub fn rank_words(&self, ty_ps: &[FeatureKey], r_inc: &RecordType) -> Vec<(String, f64)> {
        let atoms = self.triggered_atoms(r_inc);
        let mut out: Vec<(String, f64)> = Vec::new();
        for w in self.vocab() {
            let base: f64 = self.prior(w).expect("vocab word").ln()
                + atoms
                    .iter()
                    .map(|f| self.feature_probability(f, w).expect("vocab word").ln())
                    .sum::<f64>();
            let best = ty_ps
                .iter()
                .map(|t| base + self.feature_probability(t, w).expect("vocab word").ln())
                .fold(f64::NEG_INFINITY, f64::max);
            let best = if ty_ps.is_empty() { base } else { best };
            if best.is_finite() {
                out.push((w.to_owned(), best));
            }
        }
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        out
    }

    /// Canonical text serialization.
    pub fn save(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MODEL_HEADER}");
        let _ = writeln!(out, "alpha {}", self.alpha);
        let _ = writeln!(out, "normalization {}", self.normalization.as_str());
        let _ = writeln!(out, "vocab {}", self.vocab_size());
        let _ = writeln!(out, "total_tokens {}", self.total_tokens);
        out.push_str("[words]\n");
        for (w, c) in &self.word_occurrences {
            let _ = writeln!(out, "{w}\t{c}");
        }
        out.push_str("[pairs]\n");
        for (w, row) in &self.pair_counts {
            for (f, c) in row {
                let _ = writeln!(out, "{w}\t{f}\t{c}");
            }
        }
        out
    }

    pub fn load(text: &str) -> Result<Self, ModelError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let corrupt = |line: usize, msg: &str| ModelError::Corrupt {
            line,
            msg: msg.to_owned(),
        };
        match lines.next() {
            Some((_, MODEL_HEADER)) => {}
            Some((_, h)) if h.starts_with("dsttr-model ") => return Err(ModelError::Version(h.to_owned())),
            Some((n, _)) => return Err(corrupt(n, "missing model header")),
            None => return Err(corrupt(1, "empty input")),
        }
        let mut header = |key: &str| -> Result<(usize, String), ModelError> {
            let (n, l) = lines.next().ok_or_else(|| corrupt(0, "truncated header"))?;
            l.strip_prefix(key)
                .and_then(|v| v.strip_prefix(' '))
                .map(|v| (n, v.to_owned()))
                .ok_or_else(|| corrupt(n, &format!("expected `{key}`")))
        };
        let (n, alpha) = header("alpha")?;
        let alpha: f64 = alpha.parse().map_err(|_| corrupt(n, "bad alpha"))?;
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(corrupt(n, "alpha must be nonnegative"));
        }
        let (n, norm) = header("normalization")?;
        let normalization = Normalization::parse(&norm).ok_or_else(|| corrupt(n, "bad normalization"))?;
        let (n, vocab) = header("vocab")?;
        let vocab: usize = vocab.parse().map_err(|_| corrupt(n, "bad vocab size"))?;
        let (n, total) = header("total_tokens")?;
        let total: u64 = total.parse().map_err(|_| corrupt(n, "bad token total"))?;

        let mut model = ConditionalModel::new(alpha, normalization);
        let mut section = "";
        for (n, l) in lines {
            if l == "[words]" || l == "[pairs]" {
                section = if l == "[words]" { "words" } else { "pairs" };
                continue;
            }
            let cols: Vec<&str> = l.split('\t').collect();
            match (section, cols.as_slice()) {
                ("words", [w, c]) => {
                    let c: u64 = c.parse().map_err(|_| corrupt(n, "bad count"))?;
                    model.word_occurrences.insert((*w).to_owned(), c);
                }
                ("pairs", [w, f, c]) => {
                    let c: u64 = c.parse().map_err(|_| corrupt(n, "bad count"))?;
                    let f: FeatureKey = f.parse().map_err(|e: String| corrupt(n, &e))?;
                    if !model.word_occurrences.contains_key(*w) {
                        return Err(corrupt(n, "pair for a word with no occurrences"));
                    }
                    *model.column_totals.entry(f.clone()).or_default() += c;
                    model.pair_counts.entry((*w).to_owned()).or_default().insert(f, c);
                }
                _ => return Err(corrupt(n, "unexpected line")),
            }
        }
        model.total_tokens = total;
        if model.vocab_size() != vocab {
            return Err(corrupt(0, "vocab size does not match the word block"));
        }
        if model.word_occurrences.values().sum::<u64>() != total {
            return Err(corrupt(0, "token total does not match the word block"));
        }
        Ok(model)
    }
}

/// Why a corpus entry did not contribute to training.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedEntry {
    pub index: usize,
    pub utterance: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub model: ConditionalModel,
    pub used: usize,
    pub skipped: Vec<SkippedEntry>,
}

/// The features observed when `word` was chosen with `r_cur` already
/// realized toward `goal` and `pointed` as the pointed-node feature.
pub fn step_features(goal: &RecordType, r_cur: &RecordType, pointed: &str) -> Vec<FeatureKey> {
    let mut out: Vec<FeatureKey> = goal
        .subtract(r_cur)
        .decompose()
        .iter()
        .map(|a| FeatureKey::Semantic(a.canonical()))
        .collect();
    out.push(FeatureKey::Pointed(pointed.to_owned()));
    out
}

/// Counts features along the gold-matching parse path of every entry.
/// Entries that fail to parse, or whose semantics differ from the goal, are
/// skipped and reported.
pub fn train(
    corpus: &[CorpusEntry],
    lexicon: &Lexicon,
    alpha: f64,
    normalization: Normalization,
) -> Result<TrainReport, ModelError> {
    let mut model = ConditionalModel::new(alpha, normalization);
    let mut skipped = Vec::new();
    let mut used = 0;
    for (index, entry) in corpus.iter().enumerate() {
        let skip = |reason: String| SkippedEntry {
            index,
            utterance: entry.utterance(),
            reason,
        };
        let parsed = match parse_utterance(&entry.tokens, lexicon) {
            Ok(p) => p,
            Err(e) => {
                skipped.push(skip(e.to_string()));
                continue;
            }
        };
        let dag = &parsed.dag;
        let target = parsed.complete_vertices().find(|&v| dag.vertex(v).r_cur.is_equivalent(&entry.goal));
        let Some(target) = target else {
            let reason = if parsed.grammatical {
                format!("semantics {} do not match the goal", parsed.semantics())
            } else {
                "incomplete parse".to_owned()
            };
            skipped.push(skip(reason));
            continue;
        };
        let path = dag.path_to(target).expect("frontier vertices are reachable");
        for e in path {
            let edge = dag.edge(e);
            let r_cur = &dag.vertex(edge.from).r_cur;
            let pointed = edge.pre_tree.pointed_type_feature();
            model.observe(&edge.word, step_features(&entry.goal, r_cur, &pointed));
        }
        used += 1;
    }
    if used == 0 {
        return Err(ModelError::EmptyCorpus);
    }
    Ok(TrainReport { model, used, skipped })
}
