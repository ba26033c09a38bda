use std::collections::BTreeMap;

/// Word-level equivalences applied before exact-match comparison: each key
/// token is replaced by its expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationTable {
    map: BTreeMap<String, Vec<String>>,
}

const CONTRACTIONS: &[(&str, &str)] = &[
    ("what's", "what is"),
    ("that's", "that is"),
    ("it's", "it is"),
    ("there's", "there is"),
    ("here's", "here is"),
    ("where's", "where is"),
    ("who's", "who is"),
    ("he's", "he is"),
    ("she's", "she is"),
    ("let's", "let us"),
    ("i'm", "i am"),
    ("you're", "you are"),
    ("we're", "we are"),
    ("they're", "they are"),
    ("i'll", "i will"),
    ("you'll", "you will"),
    ("don't", "do not"),
    ("doesn't", "does not"),
    ("didn't", "did not"),
    ("isn't", "is not"),
    ("aren't", "are not"),
    ("can't", "can not"),
    ("won't", "will not"),
];

impl Default for NormalizationTable {
    fn default() -> Self {
        let mut t = NormalizationTable::identity();
        for (k, v) in CONTRACTIONS {
            t.insert(k, v);
        }
        t
    }
}

impl NormalizationTable {
    /// No equivalences beyond lowercasing.
    pub fn identity() -> Self {
        NormalizationTable { map: BTreeMap::new() }
    }

    pub fn insert(&mut self, token: &str, expansion: &str) {
        self.map.insert(
            token.to_lowercase(),
            expansion.split_whitespace().map(str::to_lowercase).collect(),
        );
    }

    /// One `token<TAB>expansion` pair per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut t = NormalizationTable::identity();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('\t')
                .ok_or_else(|| format!("line {}: expected `token<TAB>expansion`", i + 1))?;
            if k.trim().is_empty() || v.trim().is_empty() {
                return Err(format!("line {}: empty entry", i + 1));
            }
            t.insert(k.trim(), v.trim());
        }
        Ok(t)
    }

    pub fn normalize<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<String> {
        let mut out = Vec::with_capacity(tokens.len());
        for t in tokens {
            let t = t.as_ref().to_lowercase();
            match self.map.get(&t) {
                Some(exp) => out.extend(exp.iter().cloned()),
                None => out.push(t),
            }
        }
        out
    }
}

pub fn exact_match<S: AsRef<str>, T: AsRef<str>>(hyp: &[S], reference: &[T], table: &NormalizationTable) -> bool {
    table.normalize(hyp) == table.normalize(reference)
}

fn ngrams<S: AsRef<str>>(tokens: &[S], n: usize) -> BTreeMap<Vec<&str>, usize> {
    let mut out = BTreeMap::new();
    if n == 0 || tokens.len() < n {
        return out;
    }
    for w in tokens.windows(n) {
        *out.entry(w.iter().map(AsRef::as_ref).collect()).or_default() += 1;
    }
    out
}

fn f1(overlap: usize, hyp_total: usize, ref_total: usize) -> f64 {
    if hyp_total == 0 && ref_total == 0 {
        return 1.0;
    }
    if overlap == 0 {
        return 0.0;
    }
    let p = overlap as f64 / hyp_total as f64;
    let r = overlap as f64 / ref_total as f64;
    2.0 * p * r / (p + r)
}

/// ROUGE-N F1 over clipped n-gram counts.
pub fn rouge_n<S: AsRef<str>, T: AsRef<str>>(hyp: &[S], reference: &[T], n: usize) -> f64 {
    let h = ngrams(hyp, n);
    let r = ngrams(reference, n);
    let overlap: usize = h.iter().map(|(g, c)| (*c).min(r.get(g).copied().unwrap_or(0))).sum();
    f1(overlap, h.values().sum(), r.values().sum())
}

fn lcs_len<S: AsRef<str>, T: AsRef<str>>(a: &[S], b: &[T]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x.as_ref() == y.as_ref() {
                diag + 1
            } else {
                row[j + 1].max(row[j])
            };
            diag = up;
        }
    }
    row[b.len()]
}

/// ROUGE-L F1 from the longest common subsequence.
pub fn rouge_l<S: AsRef<str>, T: AsRef<str>>(hyp: &[S], reference: &[T]) -> f64 {
    f1(lcs_len(hyp, reference), hyp.len(), reference.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn contraction_equivalence() {
        let table = NormalizationTable::default();
        assert!(exact_match(&t("what is that"), &t("what's that"), &table));
        assert!(!exact_match(&t("what is that"), &t("what's that"), &NormalizationTable::identity()));
        assert!(!exact_match(&t("i may see them"), &t("may i see them"), &table));
    }

    #[test]
    fn parsed_table() {
        let table = NormalizationTable::parse("# pairs\ngonna\tgoing to\n").unwrap();
        assert!(exact_match(&t("gonna go"), &t("going to go"), &table));
        assert!(NormalizationTable::parse("nope").is_err());
    }

    #[test]
    fn lcs() {
        assert_eq!(lcs_len(&t("a b c d"), &t("b d a")), 2);
        assert_eq!(lcs_len(&t(""), &t("a")), 0);
    }

    #[test]
    fn empty_cases() {
        let e: Vec<&str> = Vec::new();
        assert_eq!(rouge_n(&e, &e, 1), 1.0);
        assert_eq!(rouge_l(&e, &e), 1.0);
        assert_eq!(rouge_n(&t("a"), &e, 1), 0.0);
        assert_eq!(rouge_n(&t("a"), &t("a"), 2), 1.0, "both sides have no bigrams");
    }
}
