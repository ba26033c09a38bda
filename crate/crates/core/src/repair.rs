//! Goal revisions during generation, and removal of self-repairs from
//! output.

use std::collections::VecDeque;

use crate::ds::Lexicon;
use crate::generate::{classify_forward, GenConfig, GenError, GenSession, SurfaceToken, TokenKind};
use crate::model::ConditionalModel;
use crate::parser::ContextDag;
use crate::ttr::RecordType;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RevisionKind {
    Forward,
    Backward,
}

impl RevisionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RevisionKind::Forward => "forward",
            RevisionKind::Backward => "backward",
        }
    }
}

/// Forward iff `r_cur` still subsumes the new goal.
pub fn classify_revision(r_cur: &RecordType, r_new: &RecordType) -> RevisionKind {
    if classify_forward(r_cur, r_new) {
        RevisionKind::Forward
    } else {
        RevisionKind::Backward
    }
}

/// Replace the goal with `new_goal` once `index` words have been realized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevisionEvent {
    pub index: usize,
    pub new_goal: RecordType,
}

/// How one revision was handled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppliedRevision {
    pub index: usize,
    pub kind: RevisionKind,
    /// Vertices stepped back over for this revision.
    pub backtracked: usize,
    /// Realized words left when generation resumed.
    pub resume_depth: usize,
}

#[derive(Debug, Clone)]
pub struct RepairOutput {
    pub surface: Vec<SurfaceToken>,
    pub clean: Vec<String>,
    pub dag: ContextDag,
    /// `None` when there was no revision and no dead end.
    pub kind: Option<RevisionKind>,
    /// Vertices stepped back over, by revisions and dead ends together.
    pub backtrack_depth: usize,
    pub revisions: Vec<AppliedRevision>,
}

impl RepairOutput {
    pub fn repaired_edges(&self) -> usize {
        self.dag.edges().iter().filter(|e| e.repaired).count()
    }

    pub fn interregnum_tokens(&self) -> usize {
        self.surface.iter().filter(|t| t.kind == TokenKind::Interregnum).count()
    }

    /// Surface text with repaired spans in `⟦ ⟧` and interregna in `⟨ ⟩`.
    pub fn annotated(&self) -> String {
        annotate(&self.surface)
    }

    /// Surface text without markers.
    pub fn plain(&self) -> String {
        plain(&self.surface)
    }
}

/// Generates toward `r_g0`, applying each revision when the realized spine
/// reaches its index (or at the end, if generation finishes first).
pub fn generate_with_revisions(
    model: &ConditionalModel,
    lexicon: &Lexicon,
    r_g0: &RecordType,
    revisions: &[RevisionEvent],
    config: &GenConfig,
) -> Result<RepairOutput, GenError> {
    let mut pending: VecDeque<&RevisionEvent> = revisions.iter().collect();
    pending.make_contiguous().sort_by_key(|r| r.index);
    let mut session = GenSession::new(model, lexicon, r_g0.clone(), config.clone());
    let mut applied = Vec::new();
    loop {
        while let Some(r) = pending.front() {
            if session.spine_len() != r.index && !session.is_done() {
                break;
            }
            let before = session.backtracked();
            let forward = session.revise(r.new_goal.clone());
            applied.push(AppliedRevision {
                index: r.index,
                kind: if forward { RevisionKind::Forward } else { RevisionKind::Backward },
                backtracked: session.backtracked() - before,
                resume_depth: session.spine_len(),
            });
            pending.pop_front();
        }
        if session.is_done() && pending.is_empty() {
            break;
        }
        session.step()?;
    }
    let backtrack_depth = session.backtracked();
    let kind = if applied.iter().any(|a| a.kind == RevisionKind::Backward) || backtrack_depth > 0 {
        Some(RevisionKind::Backward)
    } else if applied.is_empty() {
        None
    } else {
        Some(RevisionKind::Forward)
    };
    Ok(RepairOutput {
        surface: session.surface().to_vec(),
        clean: session.words(),
        kind,
        backtrack_depth,
        revisions: applied,
        dag: session.into_dag(),
    })
}

pub const REPAIRED_OPEN: char = '⟦';
pub const REPAIRED_CLOSE: char = '⟧';
pub const INTERREGNUM_OPEN: char = '⟨';
pub const INTERREGNUM_CLOSE: char = '⟩';

pub fn annotate(surface: &[SurfaceToken]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < surface.len() {
        let kind = surface[i].kind;
        let mut j = i;
        while j < surface.len() && surface[j].kind == kind {
            j += 1;
        }
        let run: Vec<&str> = surface[i..j].iter().map(|t| t.text.as_str()).collect();
        let run = run.join(" ");
        parts.push(match kind {
            TokenKind::Word => run,
            TokenKind::Repaired => format!("{REPAIRED_OPEN}{run}{REPAIRED_CLOSE}"),
            TokenKind::Interregnum => format!("{INTERREGNUM_OPEN}{run}{INTERREGNUM_CLOSE}"),
        });
        i = j;
    }
    parts.join(" ")
}

pub fn plain(surface: &[SurfaceToken]) -> String {
    let words: Vec<&str> = surface.iter().map(|t| t.text.as_str()).collect();
    words.join(" ")
}

/// Default editing phrases recognized in unmarked text, longest first.
pub fn default_interregna() -> Vec<Vec<String>> {
    ["sorry I mean", "uh I mean", "I mean", "uh", "um"]
        .iter()
        .map(|p| p.split(' ').map(str::to_owned).collect())
        .collect()
}

/// Removes self-repairs from surface tokens.
///
/// Marked text (`⟦…⟧`, `⟨…⟩`) is handled exactly by dropping the marked
/// spans. Unmarked text falls back to a heuristic: at each interregnum, the
/// reparandum runs from the last earlier occurrence of the first repair word
/// (or, failing that, the single preceding word) up to the interregnum.
pub fn strip_repair<S: AsRef<str>>(tokens: &[S], interregna: &[Vec<String>]) -> Vec<String> {
    let marked = tokens
        .iter()
        .any(|t| t.as_ref().contains(REPAIRED_OPEN) || t.as_ref().contains(INTERREGNUM_OPEN));
    if marked {
        strip_marked(tokens)
    } else {
        strip_heuristic(tokens.iter().map(|t| t.as_ref().to_owned()).collect(), interregna)
    }
}

fn strip_marked<S: AsRef<str>>(tokens: &[S]) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    for t in tokens {
        let t = t.as_ref();
        let mut kept = String::new();
        for c in t.chars() {
            match c {
                REPAIRED_OPEN | INTERREGNUM_OPEN => depth += 1,
                REPAIRED_CLOSE | INTERREGNUM_CLOSE => depth = depth.saturating_sub(1),
                _ if depth == 0 => kept.push(c),
                _ => {}
            }
        }
        if !kept.is_empty() {
            out.push(kept);
        }
    }
    out
}

fn matches_at(tokens: &[String], i: usize, phrase: &[String]) -> bool {
    i + phrase.len() <= tokens.len()
        && tokens[i..i + phrase.len()]
            .iter()
            .zip(phrase)
            .all(|(a, b)| a.eq_ignore_ascii_case(b))
}

fn strip_heuristic(mut tokens: Vec<String>, interregna: &[Vec<String>]) -> Vec<String> {
    let mut phrases: Vec<&Vec<String>> = interregna.iter().filter(|p| !p.is_empty()).collect();
    phrases.sort_by_key(|p| std::cmp::Reverse(p.len()));
    let mut start = 0;
    loop {
        let hit = (start..tokens.len())
            .find_map(|i| phrases.iter().find(|p| matches_at(&tokens, i, p)).map(|p| (i, p.len())));
        let Some((i, len)) = hit else { break };
        let end = i + len;
        let from = match tokens.get(end) {
            Some(first) => tokens[..i]
                .iter()
                .rposition(|t| t.eq_ignore_ascii_case(first))
                .unwrap_or(i.saturating_sub(1)),
            None => i,
        };
        tokens.drain(from..end);
        start = from;
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ttr::parse_rt;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_owned).collect()
    }

    #[test]
    fn classify_examples() {
        let cur = parse_rt("[x=john:e, head=x:e]").unwrap();
        let fwd = parse_rt("[x=john:e, e=arrive:es, p=subj(e,x):t, head=p:t, m=today(e):t]").unwrap();
        let bwd = parse_rt("[x=mary:e, e=arrive:es, p=subj(e,x):t, head=p:t]").unwrap();
        assert_eq!(classify_revision(&cur, &fwd), RevisionKind::Forward);
        assert_eq!(classify_revision(&cur, &bwd), RevisionKind::Backward);
        assert_eq!(classify_revision(&RecordType::empty(), &bwd), RevisionKind::Forward);
    }

    #[test]
    fn marked_stripping() {
        let t = toks("⟦john⟧ ⟨uh I mean⟩ mary arrives");
        assert_eq!(strip_repair(&t, &default_interregna()), toks("mary arrives"));
        let t = toks("⟦john sees⟧ ⟨uh I mean⟩ john likes mary");
        assert_eq!(strip_repair(&t, &[]), toks("john likes mary"));
    }

    #[test]
    fn heuristic_stripping() {
        let i = default_interregna();
        assert_eq!(strip_repair(&toks("john uh I mean mary arrives"), &i), toks("mary arrives"));
        assert_eq!(
            strip_repair(
                &toks("sure enough ten minutes later the bell uh I mean the doorbell rang"),
                &i
            ),
            toks("sure enough ten minutes later the doorbell rang")
        );
        assert_eq!(strip_repair(&toks("john arrives"), &i), toks("john arrives"));
    }

    #[test]
    fn annotation_groups_runs() {
        let s = vec![
            SurfaceToken { text: "john".into(), kind: TokenKind::Repaired },
            SurfaceToken { text: "uh".into(), kind: TokenKind::Interregnum },
            SurfaceToken { text: "I".into(), kind: TokenKind::Interregnum },
            SurfaceToken { text: "mean".into(), kind: TokenKind::Interregnum },
            SurfaceToken { text: "mary".into(), kind: TokenKind::Word },
            SurfaceToken { text: "arrives".into(), kind: TokenKind::Word },
        ];
        assert_eq!(annotate(&s), "⟦john⟧ ⟨uh I mean⟩ mary arrives");
        assert_eq!(plain(&s), "john uh I mean mary arrives");
    }
}
