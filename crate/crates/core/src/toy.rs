//! The bundled toy grammar and corpus.

use crate::ds::{load_grammar, Lexicon};

pub const LEXICON: &str = include_str!("../data/toy.lex");
pub const CORPUS: &str = include_str!("../data/toy_corpus.tsv");
/// Every single-word revision of the corpus, as built by
/// [`build_revisions`](crate::eval::build_revisions).
pub const REVISIONS: &str = include_str!("../data/toy_revisions.tsv");

pub fn lexicon() -> Lexicon {
    load_grammar(LEXICON).expect("bundled lexicon is valid")
}

pub fn corpus() -> Vec<crate::eval::CorpusEntry> {
    crate::eval::load_corpus(CORPUS).expect("bundled corpus is valid")
}

pub fn revisions() -> Vec<crate::eval::RevisionSpec> {
    crate::eval::load_revisions(REVISIONS).expect("bundled revisions are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_utterance;

    #[test]
    fn every_entry_parses_to_its_goal() {
        let lex = lexicon();
        for e in corpus() {
            let r = parse_utterance(&e.tokens, &lex).unwrap();
            assert!(r.grammatical, "{}", e.utterance());
            assert!(
                r.semantics().is_equivalent(&e.goal),
                "{}: got {} want {}",
                e.utterance(),
                r.semantics(),
                e.goal
            );
        }
    }

    #[test]
    fn bundled_revisions_match_a_fresh_build() {
        let c = corpus();
        let b = crate::eval::build_revisions(&c, &crate::eval::substitution_lexicon(&c), &lexicon());
        assert_eq!(revisions(), b.specs);
    }
}
