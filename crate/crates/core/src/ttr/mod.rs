//! Record types of Type Theory with Records.
//!
//! A [`RecordType`] is an ordered sequence of labelled fields. Fields may be
//! manifest (`x=john:e`), may point at an earlier label (`head=x:e`) or may be
//! predicate types over earlier labels (`p=subj(e,x):t`). The calculus here
//! provides the subtype order, meet, subtraction and decomposition into atomic
//! supertypes that the generator conditions on.
//!
//! The `head` label is treated as a pointer rather than as content: in the
//! record-level subtype check a `head` field in the supertype is satisfied by
//! any `head` field in the subtype. Field-level comparisons (meet, subtraction)
//! stay literal.

mod notation;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use notation::{parse_field_list, parse_rt, print_rt, Cursor};

/// The distinguished pointer label.
pub const HEAD: &str = "head";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TtrError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("ill-formed record type: {}", join_violations(.0))]
    IllFormed(Vec<Violation>),
    #[error("meet conflict on label `{0}`")]
    MeetConflict(Label),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// A field label. Always a nonempty identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Result<Self, TtrError> {
        let name = name.into();
        if is_identifier(&name) {
            Ok(Label(name))
        } else {
            Err(TtrError::Syntax {
                pos: 0,
                msg: format!("invalid label `{name}`"),
            })
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_head(&self) -> bool {
        self.0 == HEAD
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'' || c == '-')
}

/// Basic kinds a field can range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BaseKind {
    /// Individuals.
    E,
    /// Events / situations.
    Es,
    /// Propositions.
    T,
}

impl BaseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BaseKind::E => "e",
            BaseKind::Es => "es",
            BaseKind::T => "t",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "e" => Some(BaseKind::E),
            "es" => Some(BaseKind::Es),
            "t" => Some(BaseKind::T),
            _ => None,
        }
    }
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The type of a single field.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TtrType {
    Base(BaseKind),
    /// Singleton type. The witness is either an atom (`john`), the label of an
    /// earlier field (`x`), or, inside a lambda body, a path such as `r.head`.
    Manifest { kind: BaseKind, witness: String },
    Predicate {
        name: String,
        args: Vec<Label>,
        kind: BaseKind,
    },
}

impl TtrType {
    pub fn kind(&self) -> BaseKind {
        match self {
            TtrType::Base(k) => *k,
            TtrType::Manifest { kind, .. } | TtrType::Predicate { kind, .. } => *kind,
        }
    }

    /// Field-level subtyping: identical types, or a manifest/predicate type
    /// below the base type of its kind.
    pub fn is_subtype_of(&self, other: &TtrType) -> bool {
        if self == other {
            return true;
        }
        match other {
            TtrType::Base(k) => self.kind() == *k,
            _ => false,
        }
    }

    pub fn stripped(&self) -> TtrType {
        TtrType::Base(self.kind())
    }

    pub fn path_witness(&self) -> Option<(&str, &str)> {
        match self {
            TtrType::Manifest { witness, .. } => witness.split_once('.'),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Field {
    pub label: Label,
    pub ty: TtrType,
}

impl Field {
    pub fn new(label: Label, ty: TtrType) -> Self {
        Field { label, ty }
    }

    pub fn base(label: &str, kind: BaseKind) -> Self {
        Field::new(Label(label.to_owned()), TtrType::Base(kind))
    }

    pub fn manifest(label: &str, witness: &str, kind: BaseKind) -> Self {
        Field::new(
            Label(label.to_owned()),
            TtrType::Manifest {
                kind,
                witness: witness.to_owned(),
            },
        )
    }

    pub fn predicate(label: &str, name: &str, args: &[&str], kind: BaseKind) -> Self {
        Field::new(
            Label(label.to_owned()),
            TtrType::Predicate {
                name: name.to_owned(),
                args: args.iter().map(|a| Label((*a).to_owned())).collect(),
                kind,
            },
        )
    }
}

/// A well-formedness violation. Violations are data: see
/// [`RecordType::check_wellformed`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Violation {
    DuplicateLabel(Label),
    /// A field refers to a label that only appears at or after it.
    ForwardDependency { field: Label, target: String },
    /// A predicate argument names a label that does not exist at all.
    DanglingArg { field: Label, arg: Label },
    EmptyWitness(Label),
    /// A path witness outside a lambda body, or over an unbound variable.
    UnboundPath { field: Label, path: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateLabel(l) => write!(f, "duplicate label `{l}`"),
            Violation::ForwardDependency { field, target } => {
                write!(f, "field `{field}` depends on later label `{target}`")
            }
            Violation::DanglingArg { field, arg } => {
                write!(f, "field `{field}` has dangling argument `{arg}`")
            }
            Violation::EmptyWitness(l) => write!(f, "field `{l}` has an empty witness"),
            Violation::UnboundPath { field, path } => {
                write!(f, "field `{field}` uses unbound path `{path}`")
            }
        }
    }
}

/// An ordered sequence of fields.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RecordType {
    fields: Vec<Field>,
}

impl RecordType {
    pub fn empty() -> Self {
        RecordType { fields: Vec::new() }
    }

    /// Builds a record type without validating it.
    pub fn from_fields(fields: Vec<Field>) -> Self {
        RecordType { fields }
    }

    /// Builds a record type and rejects it if it is ill-formed.
    pub fn new(fields: Vec<Field>) -> Result<Self, TtrError> {
        let rt = RecordType { fields };
        rt.validated()
    }

    pub fn validated(self) -> Result<Self, TtrError> {
        let v = self.check_wellformed();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(TtrError::IllFormed(v))
        }
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn into_fields(self) -> Vec<Field> {
        self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<&Field> {
        self.fields.iter().find(|f| f.label.as_str() == label)
    }

    pub fn head(&self) -> Option<&Field> {
        self.get(HEAD)
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.fields.iter().map(|f| &f.label)
    }

    /// Labels a field depends on, in reference order: predicate arguments, or
    /// the label a manifest witness names. Only labels present in `self`
    /// count as dependencies, so atom witnesses are never mistaken for them.
    pub fn dependencies_of(&self, field: &Field) -> Vec<Label> {
        let mut out: Vec<Label> = Vec::new();
        match &field.ty {
            TtrType::Predicate { args, .. } => {
                for a in args {
                    if !out.contains(a) {
                        out.push(a.clone());
                    }
                }
            }
            TtrType::Manifest { witness, .. } => {
                if witness != field.label.as_str() && self.get(witness).is_some() {
                    out.push(Label(witness.clone()));
                }
            }
            TtrType::Base(_) => {}
        }
        out
    }

    /// All invariant violations. Path witnesses (`r.head`) are rejected; use
    /// [`RecordType::check_wellformed_with_vars`] for lambda bodies.
    pub fn check_wellformed(&self) -> Vec<Violation> {
        self.check_wellformed_with_vars(&[])
    }

    pub fn check_wellformed_with_vars(&self, bound: &[&str]) -> Vec<Violation> {
        let mut violations = Vec::new();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let all: BTreeSet<&str> = self.fields.iter().map(|f| f.label.as_str()).collect();
        for field in &self.fields {
            let label = field.label.as_str();
            match &field.ty {
                TtrType::Base(_) => {}
                TtrType::Manifest { witness, .. } => {
                    if witness.is_empty() {
                        violations.push(Violation::EmptyWitness(field.label.clone()));
                    } else if let Some((var, _)) = witness.split_once('.') {
                        if !bound.contains(&var) {
                            violations.push(Violation::UnboundPath {
                                field: field.label.clone(),
                                path: witness.clone(),
                            });
                        }
                    } else if all.contains(witness.as_str()) && !seen.contains(witness.as_str()) {
                        violations.push(Violation::ForwardDependency {
                            field: field.label.clone(),
                            target: witness.clone(),
                        });
                    }
                }
                TtrType::Predicate { args, .. } => {
                    for arg in args {
                        if seen.contains(arg.as_str()) {
                            continue;
                        }
                        if all.contains(arg.as_str()) {
                            violations.push(Violation::ForwardDependency {
                                field: field.label.clone(),
                                target: arg.to_string(),
                            });
                        } else {
                            violations.push(Violation::DanglingArg {
                                field: field.label.clone(),
                                arg: arg.clone(),
                            });
                        }
                    }
                }
            }
            if !seen.insert(label) {
                violations.push(Violation::DuplicateLabel(field.label.clone()));
            }
        }
        violations
    }

    pub fn is_wellformed(&self) -> bool {
        self.check_wellformed().is_empty()
    }

    /// `self ⊑ other`, without validating either side.
    pub fn is_subtype_of(&self, other: &RecordType) -> bool {
        other.fields.iter().all(|f2| match self.get(f2.label.as_str()) {
            Some(_) if f2.label.is_head() => true,
            Some(f1) => f1.ty.is_subtype_of(&f2.ty),
            None => false,
        })
    }

    /// `self` subsumes `other` iff `other ⊑ self`.
    pub fn subsumes(&self, other: &RecordType) -> bool {
        other.is_subtype_of(self)
    }

    pub fn is_equivalent(&self, other: &RecordType) -> bool {
        self.is_subtype_of(other) && other.is_subtype_of(self)
    }

    /// Meet (field union). Shared labels keep the more specific type; labels
    /// with incomparable types are a conflict. Fields of `self` come first,
    /// then new fields of `other`, then the result is reordered (stably) so
    /// that every field follows its dependencies.
    pub fn meet(&self, other: &RecordType) -> Result<RecordType, TtrError> {
        let mut fields = self.fields.clone();
        for f2 in &other.fields {
            match fields.iter_mut().find(|f| f.label == f2.label) {
                Some(f1) => {
                    if f1.ty.is_subtype_of(&f2.ty) {
                        // keep the more specific one already present
                    } else if f2.ty.is_subtype_of(&f1.ty) {
                        f1.ty = f2.ty.clone();
                    } else {
                        return Err(TtrError::MeetConflict(f2.label.clone()));
                    }
                }
                None => fields.push(f2.clone()),
            }
        }
        Ok(RecordType { fields }.dependency_sorted())
    }

    /// Stable topological reordering so that dependencies precede their
    /// dependents. Cycles are left in place.
    pub(crate) fn dependency_sorted(self) -> RecordType {
        let deps: Vec<Vec<Label>> = self
            .fields
            .iter()
            .map(|f| self.dependencies_of(f))
            .collect();
        let mut placed: BTreeSet<Label> = BTreeSet::new();
        let mut remaining: Vec<usize> = (0..self.fields.len()).collect();
        let mut order = Vec::with_capacity(self.fields.len());
        while !remaining.is_empty() {
            let pick = remaining.iter().position(|&i| {
                deps[i]
                    .iter()
                    .all(|d| placed.contains(d) || self.get(d.as_str()).is_none())
            });
            let idx = match pick {
                Some(p) => remaining.remove(p),
                None => remaining.remove(0),
            };
            placed.insert(self.fields[idx].label.clone());
            order.push(idx);
        }
        if order.iter().enumerate().all(|(i, &j)| i == j) {
            return self;
        }
        let mut slots: Vec<Option<Field>> = self.fields.into_iter().map(Some).collect();
        RecordType {
            fields: order.into_iter().filter_map(|i| slots[i].take()).collect(),
        }
    }

    /// Record-type subtraction `self \ cur`: the fields of `self` that have no
    /// counterpart in `cur` (same label with a type in `cur` at least as
    /// specific), plus witness-stripped copies of any dependencies those fields
    /// need. Field order follows `self`.
    pub fn subtract(&self, cur: &RecordType) -> RecordType {
        let keep: Vec<bool> = self
            .fields
            .iter()
            .map(|f| match cur.get(f.label.as_str()) {
                Some(c) => !c.ty.is_subtype_of(&f.ty),
                None => true,
            })
            .collect();
        let mut needed: BTreeSet<Label> = BTreeSet::new();
        for (f, &k) in self.fields.iter().zip(&keep) {
            if k {
                needed.extend(self.dependencies_of(f));
            }
        }
        let fields = self
            .fields
            .iter()
            .zip(&keep)
            .filter_map(|(f, &k)| {
                if k {
                    Some(f.clone())
                } else if needed.contains(&f.label) {
                    Some(Field::new(f.label.clone(), f.ty.stripped()))
                } else {
                    None
                }
            })
            .collect();
        RecordType { fields }
    }

    /// One atomic feature per field.
    pub fn decompose(&self) -> Vec<AtomicFeature> {
        self.fields
            .iter()
            .map(|payload| {
                let mut fields: Vec<Field> = self
                    .dependencies_of(payload)
                    .into_iter()
                    .filter_map(|d| self.get(d.as_str()))
                    .map(|d| Field::new(d.label.clone(), d.ty.stripped()))
                    .collect();
                fields.push(payload.clone());
                AtomicFeature::from_rt(RecordType { fields })
            })
            .collect()
    }

    /// Renames labels everywhere (field labels, predicate arguments, manifest
    /// witnesses naming labels).
    pub fn relabel(&self, map: &BTreeMap<Label, Label>) -> RecordType {
        let rename = |l: &Label| map.get(l).cloned().unwrap_or_else(|| l.clone());
        let labels: BTreeSet<&str> = self.labels().map(Label::as_str).collect();
        let fields = self
            .fields
            .iter()
            .map(|f| {
                let ty = match &f.ty {
                    TtrType::Base(k) => TtrType::Base(*k),
                    TtrType::Manifest { kind, witness } => {
                        let witness = if labels.contains(witness.as_str()) {
                            rename(&Label(witness.clone())).0
                        } else {
                            witness.clone()
                        };
                        TtrType::Manifest {
                            kind: *kind,
                            witness,
                        }
                    }
                    TtrType::Predicate { name, args, kind } => TtrType::Predicate {
                        name: name.clone(),
                        args: args.iter().map(rename).collect(),
                        kind: *kind,
                    },
                };
                Field::new(rename(&f.label), ty)
            })
            .collect();
        RecordType { fields }
    }

    pub fn without(&self, label: &str) -> RecordType {
        RecordType {
            fields: self
                .fields
                .iter()
                .filter(|f| f.label.as_str() != label)
                .cloned()
                .collect(),
        }
    }
}

impl fmt::Display for RecordType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_rt(self))
    }
}

impl std::str::FromStr for RecordType {
    type Err = TtrError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rt(s)
    }
}

fn ensure_wellformed(r: &RecordType) -> Result<(), TtrError> {
    let v = r.check_wellformed();
    if v.is_empty() {
        Ok(())
    } else {
        Err(TtrError::IllFormed(v))
    }
}

/// Checked `r1 ⊑ r2`.
pub fn subtype(r1: &RecordType, r2: &RecordType) -> Result<bool, TtrError> {
    ensure_wellformed(r1)?;
    ensure_wellformed(r2)?;
    Ok(r1.is_subtype_of(r2))
}

/// Checked: `r1` subsumes `r2` iff `r2 ⊑ r1`.
pub fn subsumes(r1: &RecordType, r2: &RecordType) -> Result<bool, TtrError> {
    subtype(r2, r1)
}

pub fn equivalent(r1: &RecordType, r2: &RecordType) -> Result<bool, TtrError> {
    Ok(subtype(r1, r2)? && subtype(r2, r1)?)
}

pub fn meet(r1: &RecordType, r2: &RecordType) -> Result<RecordType, TtrError> {
    ensure_wellformed(r1)?;
    ensure_wellformed(r2)?;
    r1.meet(r2)
}

/// A record type with exactly one payload field (the last one) preceded by the
/// witness-stripped fields it depends on. Its printed form is the canonical
/// key used for conditional-table columns.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomicFeature {
    key: String,
    rt: RecordType,
}

impl AtomicFeature {
    fn from_rt(rt: RecordType) -> Self {
        AtomicFeature {
            key: print_rt(&rt),
            rt,
        }
    }

    /// Parses a canonical atom string and checks its shape.
    pub fn parse(s: &str) -> Result<Self, TtrError> {
        let rt = parse_rt(s)?;
        let payload = rt.fields.last().ok_or_else(|| TtrError::Syntax {
            pos: 0,
            msg: "an atomic feature needs a payload field".into(),
        })?;
        let deps = rt.dependencies_of(payload);
        let shape_ok = rt.len() == deps.len() + 1
            && rt.fields[..deps.len()]
                .iter()
                .zip(&deps)
                .all(|(f, d)| &f.label == d && matches!(f.ty, TtrType::Base(_)));
        if !shape_ok {
            return Err(TtrError::Syntax {
                pos: 0,
                msg: format!("`{s}` is not a canonical atomic feature"),
            });
        }
        Ok(AtomicFeature::from_rt(rt))
    }

    pub fn record_type(&self) -> &RecordType {
        &self.rt
    }

    pub fn payload(&self) -> &Field {
        self.rt.fields.last().expect("atom has a payload")
    }

    pub fn as_str(&self) -> &str {
        &self.key
    }

    /// The same atom with labels renamed to their stem (trailing digits
    /// dropped), numbering stems only to keep them distinct. Atoms that
    /// differ only in which fresh labels they use share a canonical form.
    pub fn canonical(&self) -> AtomicFeature {
        let mut map = BTreeMap::new();
        let mut taken: BTreeSet<String> = BTreeSet::new();
        for f in &self.rt.fields {
            if f.label.is_head() {
                taken.insert(f.label.0.clone());
                continue;
            }
            let stem = f.label.0.trim_end_matches(|c: char| c.is_ascii_digit());
            let stem = if stem.is_empty() { f.label.0.as_str() } else { stem };
            let name = std::iter::once(stem.to_owned())
                .chain((1..).map(|k| format!("{stem}{k}")))
                .find(|n| !taken.contains(n) && n != HEAD)
                .expect("unbounded");
            taken.insert(name.clone());
            map.insert(f.label.clone(), Label(name));
        }
        AtomicFeature::from_rt(self.rt.relabel(&map))
    }
}

impl fmt::Display for AtomicFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key)
    }
}

/// Meet over a sequence of record types, starting from the empty one.
pub fn meet_all<'a>(rts: impl IntoIterator<Item = &'a RecordType>) -> Result<RecordType, TtrError> {
    rts.into_iter()
        .try_fold(RecordType::empty(), |acc, r| acc.meet(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rt(s: &str) -> RecordType {
        parse_rt(s).unwrap()
    }

    const FIG1: &str = "[x=john:e, e=arrive:es, p=subj(e,x):t, head=p:t]";

    #[test]
    fn wellformedness_examples() {
        assert!(rt("[x=john:e, head=x:e]").check_wellformed().is_empty());
        assert!(RecordType::empty().check_wellformed().is_empty());
        let bad = RecordType::from_fields(vec![Field::predicate("p", "subj", &["e", "x"], BaseKind::T)]);
        let v = bad.check_wellformed();
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|v| matches!(v, Violation::DanglingArg { .. })));
    }

    #[test]
    fn duplicate_and_forward_dependency() {
        let dup = RecordType::from_fields(vec![Field::base("x", BaseKind::E), Field::base("x", BaseKind::E)]);
        assert_eq!(dup.check_wellformed(), vec![Violation::DuplicateLabel(Label::new("x").unwrap())]);
        let fwd = RecordType::from_fields(vec![
            Field::manifest("head", "x", BaseKind::E),
            Field::manifest("x", "john", BaseKind::E),
        ]);
        assert!(matches!(fwd.check_wellformed()[0], Violation::ForwardDependency { .. }));
    }

    #[test]
    fn subtype_examples() {
        let john = rt("[x=john:e, head=x:e]");
        assert!(subtype(&john, &RecordType::empty()).unwrap());
        assert!(subtype(&john, &john).unwrap());
        assert!(subtype(&rt("[x=john:e]"), &rt("[x:e]")).unwrap());
        assert!(!subtype(&rt("[x:e]"), &rt("[x=john:e]")).unwrap());
        let bad = RecordType::from_fields(vec![Field::predicate("p", "subj", &["e"], BaseKind::T)]);
        assert!(subtype(&bad, &john).is_err());
    }

    #[test]
    fn subsumes_examples() {
        assert!(subsumes(&RecordType::empty(), &rt("[x=john:e]")).unwrap());
        assert!(!subsumes(&rt("[x=john:e]"), &RecordType::empty()).unwrap());
        assert!(subsumes(&rt("[x:e]"), &rt("[x=john:e, head=x:e]")).unwrap());
    }

    #[test]
    fn head_is_a_pointer_in_record_subtyping() {
        // the completed sentence is more specific than the subject-only prefix
        assert!(rt(FIG1).is_subtype_of(&rt("[x=john:e, head=x:e]")));
        // but a head field must still be present
        assert!(!rt("[x=john:e]").is_subtype_of(&rt("[x=john:e, head=x:e]")));
    }

    #[test]
    fn equivalent_examples() {
        assert!(equivalent(&rt("[x:e, e:es]"), &rt("[e:es, x:e]")).unwrap());
        assert!(equivalent(&RecordType::empty(), &RecordType::empty()).unwrap());
        assert!(!equivalent(&rt("[x=john:e]"), &rt("[x:e]")).unwrap());
    }

    #[test]
    fn meet_examples() {
        let a = rt("[l1:e, l2:t]");
        let b = rt("[l2:t, l3:es]");
        assert_eq!(meet(&a, &b).unwrap(), rt("[l1:e, l2:t, l3:es]"));
        assert_eq!(meet(&a, &RecordType::empty()).unwrap(), a);
        assert_eq!(meet(&rt("[x:e]"), &rt("[x=john:e]")).unwrap(), rt("[x=john:e]"));
    }

    #[test]
    fn meet_conflict_names_label() {
        let err = meet(&rt("[x=john:e]"), &rt("[x=mary:e]")).unwrap_err();
        assert_eq!(err, TtrError::MeetConflict(Label::new("x").unwrap()));
    }

    #[test]
    fn meet_reorders_dependencies() {
        let m = rt("[a:e, b:e]").meet(&rt("[b:e, a=b:e]")).unwrap();
        assert!(m.is_wellformed(), "{m}");
        assert_eq!(m, rt("[b:e, a=b:e]"));
    }

    #[test]
    fn subtract_examples() {
        let goal = rt(FIG1);
        let cur = rt("[x=john:e, head=x:e]");
        assert_eq!(
            goal.subtract(&cur),
            rt("[x:e, e=arrive:es, p=subj(e,x):t, head=p:t]")
        );
        assert_eq!(goal.subtract(&goal), RecordType::empty());
        assert_eq!(goal.subtract(&RecordType::empty()), goal);
    }

    #[test]
    fn decompose_examples() {
        let atoms: Vec<String> = rt("[x=john:e, head=x:e]")
            .decompose()
            .iter()
            .map(|a| a.to_string())
            .collect();
        assert_eq!(atoms, vec!["[x=john:e]", "[x:e, head=x:e]"]);
        assert!(RecordType::empty().decompose().is_empty());
        let atoms = rt(FIG1).decompose();
        assert_eq!(atoms.len(), 4);
        assert!(atoms.iter().any(|a| a.as_str() == "[e:es, x:e, p=subj(e,x):t]"));
        assert_eq!(atoms[3].as_str(), "[p:t, head=p:t]");
    }

    #[test]
    fn atomic_feature_parse_round_trip() {
        for a in rt(FIG1).decompose() {
            assert_eq!(AtomicFeature::parse(a.as_str()).unwrap(), a);
        }
        assert!(AtomicFeature::parse("[x:e, e:es]").is_err());
        assert!(AtomicFeature::parse("[]").is_err());
    }

    #[test]
    fn relabel_rewrites_references() {
        let r = rt("[x=john:e, e:es, p=subj(e,x):t, head=x:e]");
        let map = [(Label::new("x").unwrap(), Label::new("x1").unwrap())].into_iter().collect();
        assert_eq!(r.relabel(&map), rt("[x1=john:e, e:es, p=subj(e,x1):t, head=x1:e]"));
    }
}
