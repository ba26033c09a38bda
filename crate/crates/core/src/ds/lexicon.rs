use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ttr::Cursor;

use super::tree::Daughter;
use super::types::{parse_sem_type, Formula, SemType};
use super::DsError;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Trigger {
    /// `?Ty(X)`: the pointed node requires X.
    Requirement(SemType),
    /// `Ty(X)`: the pointed node already has type X.
    Type(SemType),
}

impl fmt::Display for Trigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trigger::Requirement(t) => write!(f, "?Ty({t})"),
            Trigger::Type(t) => write!(f, "Ty({t})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Update {
    PutType(SemType),
    PutRequirement(SemType),
    PutFormula(Formula),
    Bottom,
    Make(Daughter),
    /// `None` moves to the parent.
    Go(Option<Daughter>),
}

impl fmt::Display for Update {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Update::PutType(t) => write!(f, "put Ty({t})"),
            Update::PutRequirement(t) => write!(f, "put ?Ty({t})"),
            Update::PutFormula(fo) => write!(f, "put formula {fo}"),
            Update::Bottom => f.write_str("bottom"),
            Update::Make(d) => write!(f, "make {}", d.as_str()),
            Update::Go(Some(d)) => write!(f, "go {}", d.as_str()),
            Update::Go(None) => f.write_str("go parent"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LexicalAction {
    pub word: String,
    pub trigger: Trigger,
    pub updates: Vec<Update>,
}

impl LexicalAction {
    pub fn name(&self) -> String {
        format!("{} ({})", self.word, self.trigger)
    }
}

impl fmt::Display for LexicalAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "word {} : trigger={}", self.word, self.trigger)?;
        for u in &self.updates {
            write!(f, " ; {u}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    actions: BTreeMap<String, Vec<LexicalAction>>,
    pos: BTreeMap<String, String>,
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon::default()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Number of distinct words.
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn action_count(&self) -> usize {
        self.actions.values().map(Vec::len).sum()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.actions.contains_key(word)
    }

    pub fn actions(&self, word: &str) -> &[LexicalAction] {
        self.actions.get(word).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Words in lexicographic order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.actions.keys().map(String::as_str)
    }

    pub fn pos(&self, word: &str) -> Option<&str> {
        self.pos.get(word).map(String::as_str)
    }

    /// Words tagged with `tag`, in lexicographic order.
    pub fn words_with_pos<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.pos
            .iter()
            .filter(move |(_, t)| t.as_str() == tag)
            .map(|(w, _)| w.as_str())
    }

    /// Adds an action unless an identical one is already present.
    pub fn insert(&mut self, action: LexicalAction) {
        let list = self.actions.entry(action.word.clone()).or_default();
        if !list.contains(&action) {
            list.push(action);
        }
    }

    pub fn set_pos(&mut self, word: &str, tag: &str) {
        self.pos.insert(word.to_owned(), tag.to_owned());
    }
}

impl fmt::Display for Lexicon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for list in self.actions.values() {
            for a in list {
                writeln!(f, "{a}")?;
            }
        }
        for (w, t) in &self.pos {
            writeln!(f, "pos {w} {t}")?;
        }
        Ok(())
    }
}

/// Parses a lexicon file.
///
/// ```text
/// # comment
/// word john : trigger=?Ty(e) ; put Ty(e) ; put formula [x=john:e, head=x:e] ; bottom
/// pos john PROPN
/// ```
pub fn load_grammar(text: &str) -> Result<Lexicon, DsError> {
    let mut lexicon = Lexicon::new();
    let mut trigger_lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let syntax = |msg: String| DsError::Syntax { line, msg };
        if let Some(rest) = body.strip_prefix("pos ") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            let [word, tag] = parts[..] else {
                return Err(syntax("expected `pos <word> <TAG>`".into()));
            };
            lexicon.set_pos(word, tag);
            continue;
        }
        let Some(rest) = body.strip_prefix("word ") else {
            return Err(syntax(format!("expected `word` or `pos`, found `{body}`")));
        };
        let (word, spec) = rest
            .split_once(':')
            .ok_or_else(|| syntax("expected `:` after the word".into()))?;
        let word = word.trim();
        if word.is_empty() || word.contains(char::is_whitespace) {
            return Err(syntax(format!("bad word `{word}`")));
        }
        let mut parts = spec.split(';').map(str::trim);
        let trigger_text = parts
            .next()
            .and_then(|p| p.strip_prefix("trigger="))
            .ok_or_else(|| syntax("expected `trigger=`".into()))?;
        let trigger = parse_trigger(trigger_text).map_err(&syntax)?;
        let mut updates = Vec::new();
        for p in parts {
            if p.is_empty() {
                continue;
            }
            updates.push(parse_update(p).map_err(&syntax)?);
        }
        trigger_lines.push((line, trigger.clone(), updates.clone()));
        lexicon.insert(LexicalAction {
            word: word.to_owned(),
            trigger,
            updates,
        });
    }
    check_triggers(&trigger_lines)?;
    Ok(lexicon)
}

fn parse_trigger(text: &str) -> Result<Trigger, String> {
    if let Some(inner) = text.strip_prefix("?Ty(").and_then(|t| t.strip_suffix(')')) {
        return Ok(Trigger::Requirement(parse_type(inner)?));
    }
    if let Some(inner) = text.strip_prefix("Ty(").and_then(|t| t.strip_suffix(')')) {
        return Ok(Trigger::Type(parse_type(inner)?));
    }
    Err(format!("bad trigger `{text}`"))
}

fn parse_type(text: &str) -> Result<SemType, String> {
    let mut cur = Cursor::new(text);
    let ty = parse_sem_type(&mut cur).map_err(|e| e.to_string())?;
    if !cur.at_end() {
        return Err(format!("trailing input in type `{text}`"));
    }
    Ok(ty)
}

fn parse_update(text: &str) -> Result<Update, String> {
    let words: Vec<&str> = text.split_whitespace().collect();
    match words.as_slice() {
        ["bottom"] => Ok(Update::Bottom),
        ["make", d] => Ok(Update::Make(parse_daughter(d)?)),
        ["go", "parent"] => Ok(Update::Go(None)),
        ["go", d] => Ok(Update::Go(Some(parse_daughter(d)?))),
        ["put", "formula", ..] => {
            let src = text["put".len()..].trim_start()["formula".len()..].trim();
            let f = Formula::parse(src).map_err(|e| format!("in formula: {e}"))?;
            f.validate().map_err(|e| format!("in formula: {e}"))?;
            Ok(Update::PutFormula(f))
        }
        ["put", ty] => {
            if let Some(inner) = ty.strip_prefix("?Ty(").and_then(|t| t.strip_suffix(')')) {
                Ok(Update::PutRequirement(parse_type(inner)?))
            } else if let Some(inner) = ty.strip_prefix("Ty(").and_then(|t| t.strip_suffix(')')) {
                Ok(Update::PutType(parse_type(inner)?))
            } else {
                Err(format!("bad put `{text}`"))
            }
        }
        _ => Err(format!("unknown update `{text}`")),
    }
}

fn parse_daughter(s: &str) -> Result<Daughter, String> {
    match s {
        "argument" => Ok(Daughter::Argument),
        "functor" => Ok(Daughter::Functor),
        _ => Err(format!("unknown daughter `{s}`")),
    }
}

/// Rejects triggers that no computational action or update can ever
/// satisfy.
fn check_triggers(actions: &[(usize, Trigger, Vec<Update>)]) -> Result<(), DsError> {
    let mut requirable: BTreeSet<SemType> = [
        SemType::T,
        SemType::E,
        SemType::func(SemType::E, SemType::T),
    ]
    .into_iter()
    .collect();
    let mut typed: BTreeSet<SemType> = BTreeSet::new();
    for (_, _, updates) in actions {
        for u in updates {
            match u {
                Update::PutRequirement(t) => {
                    requirable.insert(t.clone());
                }
                Update::PutType(t) => {
                    typed.insert(t.clone());
                }
                _ => {}
            }
        }
    }
    // beta-reduction yields the ranges of function types
    let mut frontier: Vec<SemType> = typed.iter().cloned().collect();
    while let Some(t) = frontier.pop() {
        if let SemType::Function(_, r) = t {
            if typed.insert((*r).clone()) {
                frontier.push(*r);
            }
        }
    }
    for (line, trigger, _) in actions {
        let ok = match trigger {
            Trigger::Requirement(t) => requirable.contains(t),
            Trigger::Type(t) => typed.contains(t),
        };
        if !ok {
            return Err(DsError::DanglingTrigger {
                line: *line,
                ty: trigger.to_string(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_empty_lexicon() {
        assert!(load_grammar("").unwrap().is_empty());
        assert!(load_grammar("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn bundled_lexicon_is_large_enough() {
        let lex = crate::toy::lexicon();
        assert!(lex.action_count() >= 12);
        assert_eq!(lex.pos("red"), Some("ADJ"));
    }

    #[test]
    fn unknown_kind_is_a_syntax_fault_with_line() {
        let err = load_grammar("# header\nword x : trigger=?Ty(q) ; bottom").unwrap_err();
        assert!(matches!(err, DsError::Syntax { line: 2, .. }), "{err}");
    }

    #[test]
    fn dangling_trigger_is_rejected() {
        let err = load_grammar("word x : trigger=?Ty(es) ; bottom").unwrap_err();
        assert!(matches!(err, DsError::DanglingTrigger { line: 1, .. }));
    }

    #[test]
    fn duplicates_are_merged() {
        let line = "word john : trigger=?Ty(e) ; put Ty(e) ; put formula [x=john:e, head=x:e] ; bottom\n";
        let lex = load_grammar(&line.repeat(2)).unwrap();
        assert_eq!(lex.actions("john").len(), 1);
    }

    #[test]
    fn display_round_trips() {
        let lex = crate::toy::lexicon();
        assert_eq!(load_grammar(&lex.to_string()).unwrap(), lex);
    }

    #[test]
    fn bad_formula_is_a_syntax_fault() {
        let err = load_grammar("word x : trigger=?Ty(e) ; put formula [p=subj(e):t]").unwrap_err();
        assert!(matches!(err, DsError::Syntax { line: 1, .. }));
    }
}
