use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ttr::{parse_field_list, Cursor, Field, Label, RecordType, TtrError, TtrType, HEAD};

use super::DsError;

/// Atomic semantic types. `cn` (common noun) is the restrictor type built by
/// determiners; it never appears as a record-type field kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomicType {
    E,
    T,
    Es,
    Cn,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SemType {
    Atomic(AtomicType),
    Function(Box<SemType>, Box<SemType>),
}

impl SemType {
    pub const E: SemType = SemType::Atomic(AtomicType::E);
    pub const T: SemType = SemType::Atomic(AtomicType::T);
    pub const ES: SemType = SemType::Atomic(AtomicType::Es);
    pub const CN: SemType = SemType::Atomic(AtomicType::Cn);

    pub fn func(domain: SemType, range: SemType) -> SemType {
        SemType::Function(Box::new(domain), Box::new(range))
    }

    pub fn parse(text: &str) -> Result<SemType, TtrError> {
        let mut cur = Cursor::new(text);
        let ty = parse_sem_type(&mut cur)?;
        if !cur.at_end() {
            return Err(cur.error("trailing input after type"));
        }
        Ok(ty)
    }

    /// Every type occurring in this one: itself, and recursively its domain
    /// and range.
    pub fn subterms(&self, out: &mut BTreeSet<SemType>) {
        out.insert(self.clone());
        if let SemType::Function(d, r) = self {
            d.subterms(out);
            r.subterms(out);
        }
    }
}

impl fmt::Display for SemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemType::Atomic(a) => f.write_str(match a {
                AtomicType::E => "e",
                AtomicType::T => "t",
                AtomicType::Es => "es",
                AtomicType::Cn => "cn",
            }),
            SemType::Function(d, r) => {
                if matches!(**d, SemType::Function(..)) {
                    write!(f, "({d})→{r}")
                } else {
                    write!(f, "{d}→{r}")
                }
            }
        }
    }
}

pub(crate) fn parse_sem_type(cur: &mut Cursor<'_>) -> Result<SemType, TtrError> {
    let domain = if cur.eat('(') {
        let inner = parse_sem_type(cur)?;
        cur.expect(')')?;
        inner
    } else {
        cur.skip_ws();
        let start = cur.pos();
        let name: String = cur.rest().chars().take_while(|c| c.is_ascii_alphabetic()).collect();
        let atom = match name.as_str() {
            "e" => AtomicType::E,
            "t" => AtomicType::T,
            "es" => AtomicType::Es,
            "cn" => AtomicType::Cn,
            _ => {
                return Err(TtrError::Syntax {
                    pos: start,
                    msg: format!("unknown semantic type `{name}`"),
                })
            }
        };
        cur.advance(name.len());
        SemType::Atomic(atom)
    };
    if cur.eat_str("->") || cur.eat('→') {
        let range = parse_sem_type(cur)?;
        Ok(SemType::func(domain, range))
    } else {
        Ok(domain)
    }
}

/// A node decoration: a record type, or a lambda abstract over record types
/// whose body refers to the argument's head via `var.head`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Rt(RecordType),
    Abstract {
        var: String,
        param: RecordType,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn as_rt(&self) -> Option<&RecordType> {
        match self {
            Formula::Rt(r) => Some(r),
            Formula::Abstract { .. } => None,
        }
    }

    /// The record type at the bottom of any stack of abstracts.
    pub fn innermost(&self) -> &RecordType {
        match self {
            Formula::Rt(r) => r,
            Formula::Abstract { body, .. } => body.innermost(),
        }
    }

    fn map_innermost(
        &self,
        f: &mut impl FnMut(&RecordType) -> Result<RecordType, DsError>,
    ) -> Result<Formula, DsError> {
        Ok(match self {
            Formula::Rt(r) => Formula::Rt(f(r)?),
            Formula::Abstract { var, param, body } => Formula::Abstract {
                var: var.clone(),
                param: param.clone(),
                body: Box::new(body.map_innermost(f)?),
            },
        })
    }

    fn bound_vars(&self) -> Vec<&str> {
        match self {
            Formula::Rt(_) => Vec::new(),
            Formula::Abstract { var, body, .. } => {
                let mut v = vec![var.as_str()];
                v.extend(body.bound_vars());
                v
            }
        }
    }

    /// Labels of path-bound fields (`x=r.head:e`) in the innermost body.
    fn path_bound_labels(&self) -> BTreeSet<Label> {
        self.innermost()
            .fields()
            .iter()
            .filter(|f| f.ty.path_witness().is_some())
            .map(|f| f.label.clone())
            .collect()
    }

    /// Labels this formula contributes to a tree.
    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.innermost().labels()
    }

    /// Checks the formula: record types well-formed, every abstract parameter
    /// carries a `head` field, and path witnesses only use bound variables.
    pub fn validate(&self) -> Result<(), DsError> {
        let mut f = self;
        while let Formula::Abstract { param, body, .. } = f {
            param.clone().validated()?;
            if param.head().is_none() {
                return Err(DsError::TypeFault(format!(
                    "abstract parameter {param} has no head field"
                )));
            }
            f = body;
        }
        let vars = self.bound_vars();
        let violations = self.innermost().check_wellformed_with_vars(&vars);
        if !violations.is_empty() {
            return Err(DsError::Ttr(TtrError::IllFormed(violations)));
        }
        Ok(())
    }

    /// Renames labels that clash with `in_use`, except `head` and path-bound
    /// labels, which get identified with argument content on application.
    pub fn freshened(&self, in_use: &BTreeSet<Label>) -> Formula {
        let exempt = self.path_bound_labels();
        let own: BTreeSet<Label> = self.labels().cloned().collect();
        let mut taken: BTreeSet<Label> = in_use.union(&own).cloned().collect();
        let mut map = BTreeMap::new();
        for l in self.labels() {
            if l.is_head() || exempt.contains(l) || !in_use.contains(l) {
                continue;
            }
            let fresh = fresh_label(l, &taken);
            taken.insert(fresh.clone());
            map.insert(l.clone(), fresh);
        }
        if map.is_empty() {
            return self.clone();
        }
        self.map_innermost(&mut |r| Ok(r.relabel(&map)))
            .expect("relabelling is infallible")
    }

    pub fn parse(text: &str) -> Result<Formula, TtrError> {
        let mut cur = Cursor::new(text);
        let f = parse_formula(&mut cur)?;
        if !cur.at_end() {
            return Err(cur.error("trailing input after formula"));
        }
        Ok(f)
    }
}

pub(crate) fn parse_formula(cur: &mut Cursor<'_>) -> Result<Formula, TtrError> {
    if cur.eat('\\') || cur.eat('λ') {
        let var = cur.ident().to_owned();
        if var.is_empty() {
            return Err(cur.error("expected a lambda variable"));
        }
        cur.expect(':')?;
        let param = parse_field_list(cur)?;
        cur.expect('.')?;
        let body = parse_formula(cur)?;
        Ok(Formula::Abstract {
            var,
            param,
            body: Box::new(body),
        })
    } else {
        Ok(Formula::Rt(parse_field_list(cur)?))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Rt(r) => write!(f, "{r}"),
            Formula::Abstract { var, param, body } => write!(f, "λ{var}:{param}.{body}"),
        }
    }
}

/// `base1`, `base2`, ... : the first variant of `label` not in `taken`.
pub fn fresh_label(label: &Label, taken: &BTreeSet<Label>) -> Label {
    let base = label.as_str().trim_end_matches(|c: char| c.is_ascii_digit());
    let base = if base.is_empty() { label.as_str() } else { base };
    (1..)
        .map(|i| Label::new(format!("{base}{i}")).expect("suffixing keeps identifiers valid"))
        .find(|l| !taken.contains(l))
        .expect("unbounded search")
}

/// The argument used for a daughter that has not been built up yet: an
/// individual whose identity is still open.
pub fn placeholder_argument() -> RecordType {
    RecordType::from_fields(vec![
        Field::base("x", crate::ttr::BaseKind::E),
        Field::manifest(HEAD, "x", crate::ttr::BaseKind::E),
    ])
}

/// Beta-reduction of an abstract over a record type.
///
/// The argument's `head` target is identified with the body field bound to
/// `var.head`: the argument is relabelled so that its head target takes that
/// field's label, any other argument label clashing with the body is renamed
/// apart, the argument's own `head` is dropped, and the result is the meet of
/// the relabelled argument with the remaining body.
pub fn apply_formula(f: &Formula, arg: &RecordType) -> Result<Formula, DsError> {
    let Formula::Abstract { var, param, body } = f else {
        return Err(DsError::TypeFault(format!("cannot apply non-abstract {f}")));
    };
    for p in param.fields() {
        match arg.get(p.label.as_str()) {
            Some(a) if a.ty.is_subtype_of(&p.ty) => {}
            Some(a) => {
                return Err(DsError::TypeFault(format!(
                    "argument field `{}` does not satisfy parameter {param}",
                    a.label
                )))
            }
            None => {
                return Err(DsError::TypeFault(format!(
                    "argument {arg} lacks field `{}` required by {param}",
                    p.label
                )))
            }
        }
    }
    let head_target: Option<Label> = match &arg.head().map(|h| &h.ty) {
        Some(TtrType::Manifest { witness, .. }) if arg.get(witness).is_some() => {
            Some(Label::new(witness.clone())?)
        }
        _ => None,
    };
    let path = format!("{var}.head");
    let inner = body.innermost();
    let bound: Vec<&Field> = inner
        .fields()
        .iter()
        .filter(|fl| matches!(&fl.ty, TtrType::Manifest { witness, .. } if *witness == path))
        .collect();
    let identified = bound.first().map(|fl| fl.label.clone());

    let mut map: BTreeMap<Label, Label> = BTreeMap::new();
    let mut taken: BTreeSet<Label> = inner.labels().cloned().collect();
    taken.extend(arg.labels().cloned());
    if let (Some(h), Some(l)) = (&head_target, &identified) {
        map.insert(h.clone(), l.clone());
    }
    let body_labels: BTreeSet<Label> = inner.labels().cloned().collect();
    for a in arg.labels() {
        if a.is_head() || Some(a) == head_target.as_ref() {
            continue;
        }
        let clashes_body = body_labels.contains(a);
        let clashes_target = identified.as_ref() == Some(a);
        if clashes_body || clashes_target {
            let fresh = fresh_label(a, &taken);
            taken.insert(fresh.clone());
            map.insert(a.clone(), fresh);
        }
    }
    let arg_renamed = arg.without(HEAD).relabel(&map);

    let identified_ref = identified.clone();
    body.map_innermost(&mut |inner| {
        let mut kept = Vec::with_capacity(inner.len());
        let mut first = true;
        for fl in inner.fields() {
            let is_bound = matches!(&fl.ty, TtrType::Manifest { witness, .. } if *witness == path);
            if is_bound {
                match (&head_target, &identified_ref) {
                    (Some(_), Some(_)) if first => first = false,
                    (Some(_), Some(l)) => kept.push(Field::new(
                        fl.label.clone(),
                        TtrType::Manifest {
                            kind: fl.ty.kind(),
                            witness: l.to_string(),
                        },
                    )),
                    // no head to identify with: keep the field, unmanifest
                    _ => kept.push(Field::new(fl.label.clone(), fl.ty.stripped())),
                }
                continue;
            }
            if let Some((v, _)) = fl.ty.path_witness() {
                if v == var {
                    return Err(DsError::TypeFault(format!(
                        "unsupported path in field `{}`",
                        fl.label
                    )));
                }
            }
            kept.push(fl.clone());
        }
        arg_renamed
            .meet(&RecordType::from_fields(kept))
            .map_err(|e| DsError::TypeFault(format!("beta-reduction conflict: {e}")))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ttr::parse_rt;

    const ARRIVES: &str = r"\r:[head:e].[x=r.head:e, e=arrive:es, p=subj(e,x):t, head=p:t]";

    #[test]
    fn sem_type_round_trip() {
        for s in ["e", "t", "e→t", "e→e→t", "(e→t)→e", "cn→cn"] {
            assert_eq!(SemType::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(SemType::parse("e->(e->t)").unwrap().to_string(), "e→e→t");
        assert!(SemType::parse("q").is_err());
    }

    #[test]
    fn applies_intransitive_to_subject() {
        let f = Formula::parse(ARRIVES).unwrap();
        f.validate().unwrap();
        let out = apply_formula(&f, &parse_rt("[x=john:e, head=x:e]").unwrap()).unwrap();
        assert_eq!(
            out,
            Formula::Rt(parse_rt("[x=john:e, e=arrive:es, p=subj(e,x):t, head=p:t]").unwrap())
        );
    }

    #[test]
    fn identity_abstract() {
        let f = Formula::parse(r"\r:[head:e].[x=r.head:e, head=x:e]").unwrap();
        let arg = parse_rt("[x=mary:e, head=x:e]").unwrap();
        assert_eq!(apply_formula(&f, &arg).unwrap(), Formula::Rt(arg));
    }

    #[test]
    fn argument_without_head_is_a_type_fault() {
        let f = Formula::parse(ARRIVES).unwrap();
        let err = apply_formula(&f, &parse_rt("[x=john:e]").unwrap()).unwrap_err();
        assert!(matches!(err, DsError::TypeFault(_)));
    }

    #[test]
    fn transitive_application_relabels_object() {
        let sees = Formula::parse(
            r"\o:[head:e].\s:[head:e].[x=s.head:e, x1=o.head:e, e=see:es, p=subj(e,x):t, p1=obj(e,x1):t, head=p:t]",
        )
        .unwrap();
        sees.validate().unwrap();
        let vp = apply_formula(&sees, &parse_rt("[x=mary:e, head=x:e]").unwrap()).unwrap();
        let s = apply_formula(&vp, &parse_rt("[x=john:e, head=x:e]").unwrap()).unwrap();
        let expected = parse_rt(
            "[x=john:e, x1=mary:e, e=see:es, p=subj(e,x):t, p1=obj(e,x1):t, head=p:t]",
        )
        .unwrap();
        assert!(s.as_rt().unwrap().is_equivalent(&expected), "{s}");
    }

    #[test]
    fn clashing_argument_labels_are_renamed() {
        let the = Formula::parse(r"\r:[head:e].[x=r.head:e, d=the(x):t, head=x:e]").unwrap();
        let arg = parse_rt("[x:e, d=big(x):t, head=x:e]").unwrap();
        let out = apply_formula(&the, &arg).unwrap();
        assert_eq!(
            out.as_rt().unwrap(),
            &parse_rt("[x:e, d1=big(x):t, d=the(x):t, head=x:e]").unwrap()
        );
    }

    #[test]
    fn freshening_skips_head_and_bound_labels() {
        let f = Formula::parse(r"\r:[head:e].[x=r.head:e, d=the(x):t, head=x:e]").unwrap();
        let in_use: BTreeSet<Label> = ["x", "d", "head"].iter().map(|s| Label::new(*s).unwrap()).collect();
        let g = f.freshened(&in_use);
        assert_eq!(g.to_string(), "λr:[head:e].[x=r.head:e, d1=the(x):t, head=x:e]");
    }
}
