//! Corpora, metrics, revision datasets and evaluation runs.

mod corpus;
mod harness;
mod metrics;
mod revisions;

pub use corpus::{corpus_stats, load_corpus, CorpusEntry, CorpusError, CorpusStats};
pub use harness::{
    evaluate_generation, evaluate_repairs, generable_specs, BucketScore, GenerationCase, GenerationMetrics, RepairCase,
    RepairMetrics,
};
pub use metrics::{exact_match, rouge_l, rouge_n, NormalizationTable};
pub use revisions::{
    build_revisions, load_revisions, save_revisions, substitution_lexicon, ConditionBucket, Locality,
    RevisionBuild, RevisionSpec, MIN_LENGTH_EXCLUSIVE, REVISION_POS,
};
