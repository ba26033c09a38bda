use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::ttr::{parse_rt, RecordType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct CorpusError {
    pub line: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub tokens: Vec<String>,
    pub goal: RecordType,
    pub pos_tags: Option<Vec<String>>,
}

impl CorpusEntry {
    pub fn utterance(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Reads `tokens<TAB>record type[<TAB>pos tags]` lines. Blank lines and
/// lines starting with `#` are skipped.
pub fn load_corpus(text: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        let err = |msg: String| CorpusError { line, msg };
        let cols: Vec<&str> = raw.split('\t').collect();
        if !(2..=3).contains(&cols.len()) {
            return Err(err(format!("expected 2 or 3 tab-separated columns, found {}", cols.len())));
        }
        let tokens: Vec<String> = cols[0].split_whitespace().map(str::to_owned).collect();
        if tokens.is_empty() {
            return Err(err("empty utterance".into()));
        }
        let goal = parse_rt(cols[1]).map_err(|e| err(e.to_string()))?;
        let pos_tags = match cols.get(2).map(|c| c.trim()) {
            None | Some("") => None,
            Some(c) => {
                let tags: Vec<String> = c.split_whitespace().map(str::to_owned).collect();
                if tags.len() != tokens.len() {
                    return Err(err(format!("{} tokens but {} POS tags", tokens.len(), tags.len())));
                }
                Some(tags)
            }
        };
        out.push(CorpusEntry {
            tokens,
            goal,
            pos_tags,
        });
    }
    Ok(out)
}

/// Dataset statistics: sample and token counts, modal and maximum length,
/// and the type/token ratio scaled by 100.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub samples: usize,
    pub tokens: usize,
    pub mode_length: usize,
    pub max_length: usize,
    pub type_token_ratio: f64,
}

/// Ties for the modal length go to the shorter length.
pub fn corpus_stats(corpus: &[CorpusEntry]) -> CorpusStats {
    let tokens: usize = corpus.iter().map(|e| e.tokens.len()).sum();
    let mut lengths: BTreeMap<usize, usize> = BTreeMap::new();
    for e in corpus {
        *lengths.entry(e.tokens.len()).or_default() += 1;
    }
    let mode_length = lengths
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map_or(0, |(l, _)| *l);
    let types: BTreeSet<&str> = corpus.iter().flat_map(|e| e.tokens.iter().map(String::as_str)).collect();
    CorpusStats {
        samples: corpus.len(),
        tokens,
        mode_length,
        max_length: lengths.keys().next_back().copied().unwrap_or(0),
        type_token_ratio: if tokens == 0 {
            0.0
        } else {
            types.len() as f64 / tokens as f64 * 100.0
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bad_line_reports_its_number() {
        let err = load_corpus("john arrives\t[x=john:e]\n\nmary\t[x=:e]\n").unwrap_err();
        assert_eq!(err.line, 3);
    }

    #[test]
    fn pos_length_must_match() {
        assert!(load_corpus("john arrives\t[]\tPROPN").is_err());
        let c = load_corpus("john arrives\t[]\tPROPN VERB").unwrap();
        assert_eq!(c[0].pos_tags.as_ref().unwrap().len(), 2);
    }

    #[test]
    fn empty_corpus_stats_are_zero() {
        let s = corpus_stats(&[]);
        assert_eq!((s.samples, s.tokens, s.mode_length, s.max_length), (0, 0, 0, 0));
        assert_eq!(s.type_token_ratio, 0.0);
    }

    #[test]
    fn mode_tie_takes_shorter() {
        let c = load_corpus("a b\t[]\nc d e\t[]\n").unwrap();
        assert_eq!(corpus_stats(&c).mode_length, 2);
    }
}
