use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::corpus::{CorpusEntry, CorpusError};
use crate::ds::Lexicon;
use crate::parser::parse_utterance;
use crate::repair::{classify_revision, RevisionKind};
use crate::ttr::{parse_rt, RecordType};

/// Parts of speech eligible for substitution.
pub const REVISION_POS: [&str; 5] = ["NOUN", "ADJ", "PROPN", "ADP", "ADV"];

/// Only utterances longer than this are used.
pub const MIN_LENGTH_EXCLUSIVE: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevisionSpec {
    pub r_g: RecordType,
    /// Words realized when the revision happens.
    pub index: usize,
    pub r_r: RecordType,
    pub utt_r: Vec<String>,
    pub forward: bool,
    /// Position of the substituted word.
    pub position: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Locality {
    Local,
    Distant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ConditionBucket {
    pub locality: Locality,
    pub forward: bool,
}

impl ConditionBucket {
    pub const ALL: [ConditionBucket; 4] = [
        ConditionBucket { locality: Locality::Local, forward: true },
        ConditionBucket { locality: Locality::Local, forward: false },
        ConditionBucket { locality: Locality::Distant, forward: true },
        ConditionBucket { locality: Locality::Distant, forward: false },
    ];

    pub fn name(self) -> &'static str {
        match (self.locality, self.forward) {
            (Locality::Local, true) => "local/forward",
            (Locality::Local, false) => "local/backward",
            (Locality::Distant, true) => "distant/forward",
            (Locality::Distant, false) => "distant/backward",
        }
    }
}

impl fmt::Display for ConditionBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl RevisionSpec {
    /// Words between the revision point and the substituted word: for a
    /// backward revision, how far back the word lies; for a forward one, how
    /// many words remain up to and including it.
    pub fn distance(&self) -> usize {
        if self.forward {
            self.position + 1 - self.index
        } else {
            self.index - self.position
        }
    }

    pub fn bucket(&self) -> ConditionBucket {
        ConditionBucket {
            locality: if self.distance() == 1 { Locality::Local } else { Locality::Distant },
            forward: self.forward,
        }
    }

    /// `R_g<TAB>index<TAB>R_r<TAB>utt_r<TAB>forward|backward<TAB>position`
    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.r_g,
            self.index,
            self.r_r,
            self.utt_r.join(" "),
            if self.forward { "forward" } else { "backward" },
            self.position
        )
    }
}

pub fn save_revisions(specs: &[RevisionSpec]) -> String {
    specs.iter().map(|s| s.to_line() + "\n").collect()
}

pub fn load_revisions(text: &str) -> Result<Vec<RevisionSpec>, CorpusError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        let err = |msg: String| CorpusError { line, msg };
        let cols: Vec<&str> = raw.split('\t').collect();
        let [r_g, index, r_r, utt_r, dir, position] = cols[..] else {
            return Err(err(format!("expected 6 tab-separated columns, found {}", cols.len())));
        };
        let forward = match dir {
            "forward" => true,
            "backward" => false,
            _ => return Err(err(format!("expected forward or backward, found `{dir}`"))),
        };
        let spec = RevisionSpec {
            r_g: parse_rt(r_g).map_err(|e| err(e.to_string()))?,
            index: index.parse().map_err(|_| err(format!("bad index `{index}`")))?,
            r_r: parse_rt(r_r).map_err(|e| err(e.to_string()))?,
            utt_r: utt_r.split_whitespace().map(str::to_owned).collect(),
            forward,
            position: position.parse().map_err(|_| err(format!("bad position `{position}`")))?,
        };
        if spec.utt_r.is_empty() || spec.index > spec.utt_r.len() || spec.position >= spec.utt_r.len() {
            return Err(err("index or position out of range".into()));
        }
        if spec.forward != (spec.position >= spec.index) {
            return Err(err("direction disagrees with index and position".into()));
        }
        out.push(spec);
    }
    Ok(out)
}

/// Tokens seen under each part of speech.
pub fn substitution_lexicon(corpus: &[CorpusEntry]) -> BTreeMap<String, BTreeSet<String>> {
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for e in corpus {
        if let Some(tags) = &e.pos_tags {
            for (w, t) in e.tokens.iter().zip(tags) {
                out.entry(t.clone()).or_default().insert(w.clone());
            }
        }
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct RevisionBuild {
    pub specs: Vec<RevisionSpec>,
    /// Substitutions left out, with the reason.
    pub skipped: Vec<String>,
    pub warnings: Vec<String>,
}

/// Single-word substitutions over long enough, tagged utterances. Each
/// substitution yields up to four specs, at indexes one before, at, one
/// after and two after the substituted word.
pub fn build_revisions(
    corpus: &[CorpusEntry],
    substitutions: &BTreeMap<String, BTreeSet<String>>,
    lexicon: &Lexicon,
) -> RevisionBuild {
    let mut out = RevisionBuild::default();
    for entry in corpus {
        let Some(tags) = &entry.pos_tags else { continue };
        if entry.tokens.len() <= MIN_LENGTH_EXCLUSIVE {
            continue;
        }
        let source = match parse_utterance(&entry.tokens, lexicon) {
            Ok(p) if p.grammatical && p.semantics().is_equivalent(&entry.goal) => p,
            _ => {
                out.skipped.push(format!("{}: source does not parse to its goal", entry.utterance()));
                continue;
            }
        };
        for (pos, tag) in tags.iter().enumerate() {
            if !REVISION_POS.contains(&tag.as_str()) {
                continue;
            }
            let Some(subs) = substitutions.get(tag) else { continue };
            for sub in subs {
                if *sub == entry.tokens[pos] {
                    continue;
                }
                let mut utt_r = entry.tokens.clone();
                utt_r[pos] = sub.clone();
                let r_r = match parse_utterance(&utt_r, lexicon) {
                    Ok(p) if p.grammatical => p.semantics().clone(),
                    _ => {
                        out.skipped.push(format!("{}: does not parse", utt_r.join(" ")));
                        continue;
                    }
                };
                let lowest = pos.saturating_sub(1);
                for index in lowest..=(pos + 2).min(utt_r.len()) {
                    let forward = pos >= index;
                    let prefix = &source.prefix_semantics[index];
                    let classified = classify_revision(prefix, &r_r) == RevisionKind::Forward;
                    if classified != forward {
                        out.skipped.push(format!(
                            "{} at {index}: direction by position disagrees with subsumption",
                            utt_r.join(" ")
                        ));
                        continue;
                    }
                    out.specs.push(RevisionSpec {
                        r_g: entry.goal.clone(),
                        index,
                        r_r: r_r.clone(),
                        utt_r: utt_r.clone(),
                        forward,
                        position: pos,
                    });
                }
            }
        }
    }
    if out.specs.is_empty() {
        out.warnings.push("no eligible entries".into());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_build() -> RevisionBuild {
        let corpus = crate::toy::corpus();
        build_revisions(&corpus, &substitution_lexicon(&corpus), &crate::toy::lexicon())
    }

    #[test]
    fn adjective_substitution() {
        let b = toy_build();
        let find = |index: usize| {
            b.specs
                .iter()
                .find(|s| s.utt_r.join(" ") == "john sees the blue ball" && s.index == index)
                .unwrap()
        };
        let after_red = find(4);
        assert!(!after_red.forward);
        assert_eq!(after_red.bucket().name(), "local/backward");
        let early = find(2);
        assert!(early.forward);
        assert_eq!(early.bucket().name(), "distant/forward");
        assert_eq!(find(3).bucket().name(), "local/forward");
        assert_eq!(find(5).bucket().name(), "distant/backward");
    }

    #[test]
    fn short_utterances_excluded() {
        let corpus = crate::eval::load_corpus(
            "the big cat sleeps\t[x:e, n=cat(x):t, a=big(x):t, d=the(x):t, e=sleep:es, p=subj(e,x):t, head=p:t]\tDET ADJ NOUN VERB",
        )
        .unwrap();
        let b = build_revisions(&corpus, &substitution_lexicon(&crate::toy::corpus()), &crate::toy::lexicon());
        assert!(b.specs.is_empty());
        assert_eq!(b.warnings.len(), 1);
    }

    #[test]
    fn every_bucket_is_covered_and_specs_round_trip() {
        let b = toy_build();
        for bucket in ConditionBucket::ALL {
            assert!(b.specs.iter().any(|s| s.bucket() == bucket), "{bucket}");
        }
        assert_eq!(load_revisions(&save_revisions(&b.specs)).unwrap(), b.specs);
    }

    #[test]
    fn substituted_utterances_parse_to_their_goal() {
        let lex = crate::toy::lexicon();
        for s in toy_build().specs {
            let p = parse_utterance(&s.utt_r, &lex).unwrap();
            assert!(p.semantics().is_equivalent(&s.r_r));
        }
    }
}
