//! Bracket notation for record types: `[x=john:e, e=arrive:es, p=subj(e,x):t]`.

use super::{BaseKind, Field, Label, RecordType, TtrError, TtrType};

/// A byte cursor over notation text, shared with the lexicon parser.
#[derive(Debug, Clone)]
pub struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    /// Moves past `n` bytes; callers pass lengths of text taken from `rest`.
    pub fn advance(&mut self, n: usize) {
        self.pos += n;
    }

    pub fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start().len();
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), TtrError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    pub fn error(&self, msg: impl Into<String>) -> TtrError {
        TtrError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.src.len()
    }

    /// Identifier, possibly empty.
    pub fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let rest = self.rest();
        let mut end = 0;
        for (i, c) in rest.char_indices() {
            let ok = if i == 0 {
                c.is_alphabetic() || c == '_'
            } else {
                c.is_alphanumeric() || c == '_' || c == '\'' || c == '-'
            };
            if !ok {
                break;
            }
            end = i + c.len_utf8();
        }
        self.pos += end;
        &rest[..end]
    }

    fn label(&mut self) -> Result<Label, TtrError> {
        let start = self.pos;
        let name = self.ident();
        if name.is_empty() {
            self.pos = start;
            return Err(self.error("expected a label"));
        }
        Ok(Label(name.to_owned()))
    }

    fn kind(&mut self) -> Result<BaseKind, TtrError> {
        let start = self.pos;
        let name = self.ident();
        BaseKind::parse(name).ok_or_else(|| TtrError::Syntax {
            pos: start,
            msg: format!("unknown kind `{name}`"),
        })
    }
}

/// Parses the field list of a record type without checking well-formedness.
pub fn parse_field_list(cur: &mut Cursor<'_>) -> Result<RecordType, TtrError> {
    cur.expect('[')?;
    let mut fields = Vec::new();
    if cur.eat(']') {
        return Ok(RecordType::from_fields(fields));
    }
    loop {
        fields.push(parse_field(cur)?);
        if cur.eat(',') {
            continue;
        }
        cur.expect(']')?;
        break;
    }
    Ok(RecordType::from_fields(fields))
}

fn parse_field(cur: &mut Cursor<'_>) -> Result<Field, TtrError> {
    let label = cur.label()?;
    if cur.eat(':') {
        let kind = cur.kind()?;
        return Ok(Field::new(label, TtrType::Base(kind)));
    }
    cur.expect('=')?;
    let start = cur.pos();
    let first = cur.ident();
    if first.is_empty() {
        cur.pos = start;
        return Err(cur.error("empty witness"));
    }
    let ty_builder: Box<dyn FnOnce(BaseKind) -> TtrType> = if cur.eat('(') {
        let mut args = vec![cur.label()?];
        while cur.eat(',') {
            args.push(cur.label()?);
        }
        cur.expect(')')?;
        let name = first.to_owned();
        Box::new(move |kind| TtrType::Predicate { name, args, kind })
    } else {
        let mut witness = first.to_owned();
        // path witnesses only appear inside lambda bodies: `r.head`
        if cur.rest().starts_with('.') {
            cur.pos += 1;
            let field = cur.ident();
            if field.is_empty() {
                return Err(cur.error("expected a path component after `.`"));
            }
            witness = format!("{witness}.{field}");
        }
        Box::new(move |kind| TtrType::Manifest { kind, witness })
    };
    cur.expect(':')?;
    let kind = cur.kind()?;
    Ok(Field::new(label, ty_builder(kind)))
}

/// Parses and validates a record type.
pub fn parse_rt(text: &str) -> Result<RecordType, TtrError> {
    let mut cur = Cursor::new(text);
    let rt = parse_field_list(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.error("trailing input after record type"));
    }
    rt.validated()
}

pub fn print_rt(r: &RecordType) -> String {
    let mut out = String::from("[");
    for (i, f) in r.fields().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(f.label.as_str());
        match &f.ty {
            TtrType::Base(k) => {
                out.push(':');
                out.push_str(k.as_str());
            }
            TtrType::Manifest { kind, witness } => {
                out.push('=');
                out.push_str(witness);
                out.push(':');
                out.push_str(kind.as_str());
            }
            TtrType::Predicate { name, args, kind } => {
                out.push('=');
                out.push_str(name);
                out.push('(');
                let args: Vec<&str> = args.iter().map(Label::as_str).collect();
                out.push_str(&args.join(","));
                out.push_str("):");
                out.push_str(kind.as_str());
            }
        }
    }
    out.push(']');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_two_field_rt() {
        let r = parse_rt("[x=john:e, head=x:e]").unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(print_rt(&r), "[x=john:e, head=x:e]");
    }

    #[test]
    fn parses_empty_and_whitespace() {
        assert!(parse_rt("[]").unwrap().is_empty());
        assert!(parse_rt("  [ ]  ").unwrap().is_empty());
        let r = parse_rt("[ p = subj ( e , x ) : t , e:es, x:e ]");
        // forward references are a well-formedness fault
        assert!(matches!(r, Err(TtrError::IllFormed(_))));
    }

    #[test]
    fn empty_witness_is_a_syntax_error() {
        match parse_rt("[x=:e]") {
            Err(TtrError::Syntax { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert!(matches!(parse_rt("[x:q]"), Err(TtrError::Syntax { pos: 3, .. })));
        assert!(matches!(parse_rt("[x:e"), Err(TtrError::Syntax { .. })));
        assert!(matches!(parse_rt("[x:e] junk"), Err(TtrError::Syntax { .. })));
    }

    #[test]
    fn path_witness_needs_binding() {
        let mut cur = Cursor::new("[x=r.head:e, head=x:e]");
        let body = parse_field_list(&mut cur).unwrap();
        assert!(body.check_wellformed_with_vars(&["r"]).is_empty());
        assert!(!body.check_wellformed().is_empty());
    }
}
