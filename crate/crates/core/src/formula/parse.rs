//! S-expression reader for formulas and domains.
//!
//! ```text
//! term    := RATIONAL | VAR | (+ term term+) | (- term term) | (* term term+) | (neg term)
//! atom    := (<= term term) | (< term term) | (= term term) | (>= term term) | (> term term)
//! formula := atom | (not formula) | (and formula formula+) | (or formula formula+)
//!          | (exists [:tag INT] :q [RATIONAL RATIONAL] VAR formula)
//!          | (forall [:tag INT] :q [RATIONAL RATIONAL] VAR formula)
//! domain  := (domain (VAR RATIONAL RATIONAL)+)
//! ```
//!
//! `;` starts a comment running to the end of the line.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{
    Annotation, Domain, DomainVar, Formula, FormulaError, Location, QuantKind, Quantifier,
    Rational, Relation, Tag, Term,
};

const RESERVED: &[&str] = &[
    "not", "and", "or", "exists", "forall", "domain", "neg", "+", "-", "*",
];

#[derive(Clone, Debug)]
enum Sexp {
    Atom(String, Location),
    List(Vec<Sexp>, Location),
    Bracket(Vec<Sexp>, Location),
}

impl Sexp {
    fn location(&self) -> Location {
        match self {
            Sexp::Atom(_, l) | Sexp::List(_, l) | Sexp::Bracket(_, l) => *l,
        }
    }

    fn head(&self) -> Option<&str> {
        match self {
            Sexp::List(items, _) => match items.first() {
                Some(Sexp::Atom(s, _)) => Some(s),
                _ => None,
            },
            _ => None,
        }
    }
}

fn syntax(location: Location, message: impl Into<String>) -> FormulaError {
    FormulaError::Syntax {
        location: Some(location),
        message: message.into(),
    }
}

fn read_all(src: &str) -> Result<Vec<Sexp>, FormulaError> {
    let mut reader = Reader {
        chars: src.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut forms = Vec::new();
    loop {
        reader.skip_trivia();
        if reader.peek().is_none() {
            return Ok(forms);
        }
        forms.push(reader.read()?);
    }
}

struct Reader {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Reader {
    fn location(&self) -> Location {
        Location {
            line: self.line,
            column: self.column,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while !matches!(self.peek(), None | Some('\n')) {
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp, FormulaError> {
        self.skip_trivia();
        let start = self.location();
        match self.peek() {
            None => Err(syntax(start, "unexpected end of input")),
            Some(open @ ('(' | '[')) => {
                self.bump();
                let close = if open == '(' { ')' } else { ']' };
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        None => {
                            return Err(syntax(start, format!("unclosed `{open}`")));
                        }
                        Some(c) if c == close => {
                            self.bump();
                            break;
                        }
                        Some(c @ (')' | ']')) => {
                            return Err(syntax(
                                self.location(),
                                format!("`{c}` does not match `{open}`"),
                            ));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
                Ok(if open == '(' {
                    Sexp::List(items, start)
                } else {
                    Sexp::Bracket(items, start)
                })
            }
            Some(c @ (')' | ']')) => Err(syntax(start, format!("unexpected `{c}`"))),
            Some(_) => {
                let mut text = String::new();
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | '[' | ']' | ';') {
                        break;
                    }
                    text.push(c);
                    self.bump();
                }
                Ok(Sexp::Atom(text, start))
            }
        }
    }
}

/// Parses a rational literal: `3`, `-2`, `1/3`, `0.25`, `1e-3`, `-2.5E2`.
pub(crate) fn parse_rational(text: &str) -> Option<Rational> {
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    if body.is_empty() {
        return None;
    }
    let value = if let Some((num, den)) = body.split_once('/') {
        if !is_digits(num) || !is_digits(den) {
            return None;
        }
        let den: BigInt = den.parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Rational::new(num.parse().ok()?, den)
    } else {
        let (mantissa, exponent) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], Some(&body[i + 1..])),
            None => (body, None),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if (int_part.is_empty() && frac_part.is_empty())
            || !(int_part.is_empty() || is_digits(int_part))
            || !(frac_part.is_empty() || is_digits(frac_part))
        {
            return None;
        }
        let digits: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
        let mut exp: i64 = -(frac_part.len() as i64) - 1;
        if let Some(e) = exponent {
            let e = e.strip_prefix('+').unwrap_or(e);
            let (sign, mag) = match e.strip_prefix('-') {
                Some(m) => (-1, m),
                None => (1, e),
            };
            if !is_digits(mag) || mag.len() > 6 {
                return None;
            }
            exp += sign * mag.parse::<i64>().ok()?;
        }
        let ten = BigInt::from(10);
        let scale = num_traits::pow(ten, exp.unsigned_abs() as usize);
        if exp >= 0 {
            Rational::from_integer(digits * scale)
        } else {
            Rational::new(digits, scale)
        }
    };
    Some(if negative { -value } else { value })
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
        && !RESERVED.contains(&s)
}

struct Builder<'d> {
    domain: Option<&'d Domain>,
    /// Explicit tags seen so far with the annotation they first carried.
    annotations: BTreeMap<u32, Annotation>,
}

impl Builder<'_> {
    fn variable(&self, name: &str, location: Location) -> Result<String, FormulaError> {
        if !is_identifier(name) {
            return Err(syntax(location, format!("`{name}` is not a variable name")));
        }
        if let Some(d) = self.domain {
            if d.index_of(name).is_none() {
                return Err(FormulaError::UndeclaredVariable {
                    location: Some(location),
                    name: name.to_owned(),
                });
            }
        }
        Ok(name.to_owned())
    }

    fn term(&self, s: &Sexp) -> Result<Term, FormulaError> {
        match s {
            Sexp::Atom(text, loc) => match parse_rational(text) {
                Some(r) => Ok(Term::Const(r)),
                None => Ok(Term::Var(self.variable(text, *loc)?)),
            },
            Sexp::Bracket(_, loc) => Err(syntax(*loc, "unexpected `[` in term")),
            Sexp::List(items, loc) => {
                let op = s
                    .head()
                    .ok_or_else(|| syntax(*loc, "expected a term operator"))?;
                let args = items[1..]
                    .iter()
                    .map(|a| self.term(a))
                    .collect::<Result<Vec<_>, _>>()?;
                let arity = |ok: bool, what: &str| {
                    if ok {
                        Ok(())
                    } else {
                        Err(syntax(*loc, format!("`{op}` takes {what}")))
                    }
                };
                match op {
                    "+" => {
                        arity(args.len() >= 2, "at least two arguments")?;
                        Ok(Term::Add(args))
                    }
                    "*" => {
                        arity(args.len() >= 2, "at least two arguments")?;
                        Ok(Term::Mul(args))
                    }
                    "-" => {
                        arity(args.len() == 2, "exactly two arguments")?;
                        let mut it = args.into_iter();
                        let (a, b) = (it.next().unwrap(), it.next().unwrap());
                        Ok(Term::Sub(Box::new(a), Box::new(b)))
                    }
                    "neg" => {
                        arity(args.len() == 1, "exactly one argument")?;
                        Ok(Term::Neg(Box::new(args.into_iter().next().unwrap())))
                    }
                    _ => Err(syntax(*loc, format!("unknown term operator `{op}`"))),
                }
            }
        }
    }

    fn formula(&mut self, s: &Sexp) -> Result<Formula, FormulaError> {
        let (items, loc) = match s {
            Sexp::List(items, loc) => (items, *loc),
            other => return Err(syntax(other.location(), "expected a formula")),
        };
        let head = s.head().ok_or_else(|| syntax(loc, "expected a formula"))?;
        let args = &items[1..];
        let relation = match head {
            "<=" => Some(Relation::Le),
            "<" => Some(Relation::Lt),
            "=" => Some(Relation::Eq),
            ">=" => Some(Relation::Ge),
            ">" => Some(Relation::Gt),
            _ => None,
        };
        if let Some(rel) = relation {
            if args.len() != 2 {
                return Err(syntax(loc, format!("`{head}` takes exactly two terms")));
            }
            return Ok(Formula::atom(
                self.term(&args[0])?,
                rel,
                self.term(&args[1])?,
            ));
        }
        match head {
            "not" => {
                if args.len() != 1 {
                    return Err(syntax(loc, "`not` takes exactly one formula"));
                }
                Ok(Formula::not(self.formula(&args[0])?))
            }
            "and" | "or" => {
                if args.len() < 2 {
                    return Err(syntax(loc, format!("`{head}` takes at least two formulas")));
                }
                let mut parts = args
                    .iter()
                    .map(|a| self.formula(a))
                    .collect::<Result<Vec<_>, _>>()?;
                // right-nested: (and a b c) = (and a (and b c))
                let mut acc = parts.pop().unwrap();
                while let Some(prev) = parts.pop() {
                    acc = if head == "and" {
                        Formula::and(prev, acc)
                    } else {
                        Formula::or(prev, acc)
                    };
                }
                Ok(acc)
            }
            "exists" | "forall" => self.quantifier(head, args, loc),
            "domain" => Err(syntax(loc, "a domain is not a formula")),
            other => Err(syntax(loc, format!("unknown formula head `{other}`"))),
        }
    }

    fn quantifier(
        &mut self,
        head: &str,
        args: &[Sexp],
        loc: Location,
    ) -> Result<Formula, FormulaError> {
        let mut rest = args;
        let mut tag = None;
        let mut annotation = None;
        while let Some(Sexp::Atom(kw, kw_loc)) = rest.first() {
            if !kw.starts_with(':') {
                break;
            }
            let value = rest
                .get(1)
                .ok_or_else(|| syntax(*kw_loc, format!("`{kw}` needs a value")))?;
            match kw.as_str() {
                ":tag" if tag.is_none() => {
                    let t = match value {
                        Sexp::Atom(text, _) => text.parse::<u32>().ok().filter(|t| *t > 0),
                        _ => None,
                    };
                    tag = Some(t.ok_or_else(|| {
                        syntax(value.location(), "tag must be a positive integer")
                    })?);
                }
                ":q" if annotation.is_none() => {
                    annotation = Some(self.annotation(value)?);
                }
                _ => return Err(syntax(*kw_loc, format!("unexpected keyword `{kw}`"))),
            }
            rest = &rest[2..];
        }
        let annotation = annotation.ok_or_else(|| {
            syntax(
                loc,
                format!("`{head}` requires a volume annotation `:q [lo hi]`"),
            )
        })?;
        if rest.len() != 2 {
            return Err(syntax(loc, format!("`{head}` takes a variable and a body")));
        }
        let var = match &rest[0] {
            Sexp::Atom(name, l) => self.variable(name, *l)?,
            other => return Err(syntax(other.location(), "expected a bound variable")),
        };
        if let Some(t) = tag {
            match self.annotations.get(&t) {
                Some(prev) if *prev != annotation => {
                    return Err(FormulaError::TagMismatch {
                        location: Some(loc),
                        tag: Tag(t),
                        expected: prev.to_string(),
                        found: annotation.to_string(),
                    });
                }
                Some(_) => {}
                None => {
                    self.annotations.insert(t, annotation.clone());
                }
            }
        }
        let body = self.formula(&rest[1])?;
        Ok(Formula::Quant(Quantifier {
            kind: if head == "exists" {
                QuantKind::Exists
            } else {
                QuantKind::Forall
            },
            // 0 marks an untagged quantifier; replaced by a fresh tag later
            tag: Tag(tag.unwrap_or(0)),
            annotation,
            var,
            body: Box::new(body),
        }))
    }

    fn annotation(&self, s: &Sexp) -> Result<Annotation, FormulaError> {
        let (items, loc) = match s {
            Sexp::Bracket(items, loc) => (items, *loc),
            other => {
                return Err(syntax(
                    other.location(),
                    "annotation must be written `[lo hi]`",
                ))
            }
        };
        let bounds = items
            .iter()
            .map(|item| match item {
                Sexp::Atom(text, l) => parse_rational(text)
                    .ok_or_else(|| syntax(*l, format!("`{text}` is not a rational number"))),
                other => Err(syntax(other.location(), "expected a rational number")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let [lo, hi]: [Rational; 2] = bounds
            .try_into()
            .map_err(|_| syntax(loc, "annotation needs exactly two bounds"))?;
        Annotation::new(lo, hi).map_err(|e| match e {
            FormulaError::NegativeAnnotation { .. } => FormulaError::NegativeAnnotation {
                location: Some(loc),
            },
            FormulaError::InvertedAnnotation { lo, hi, .. } => FormulaError::InvertedAnnotation {
                location: Some(loc),
                lo,
                hi,
            },
            other => other,
        })
    }
}

/// Gives every untagged quantifier a fresh tag above all explicit ones, in
/// pre-order, so that untagged quantifiers never share a choice.
fn assign_fresh_tags(f: &mut Formula, next: &mut u32) {
    match f {
        Formula::Atom(_) => {}
        Formula::Not(a) => assign_fresh_tags(a, next),
        Formula::And(a, b) | Formula::Or(a, b) => {
            assign_fresh_tags(a, next);
            assign_fresh_tags(b, next);
        }
        Formula::Quant(q) => {
            if q.tag.0 == 0 {
                q.tag = Tag(*next);
                *next += 1;
            }
            assign_fresh_tags(&mut q.body, next);
        }
    }
}

fn build_formula(form: &Sexp, domain: Option<&Domain>) -> Result<Formula, FormulaError> {
    let mut builder = Builder {
        domain,
        annotations: BTreeMap::new(),
    };
    let mut f = builder.formula(form)?;
    let mut next = builder.annotations.keys().max().map_or(1, |t| t + 1);
    assign_fresh_tags(&mut f, &mut next);
    Ok(f)
}

fn build_domain(form: &Sexp) -> Result<Domain, FormulaError> {
    let (items, loc) = match form {
        Sexp::List(items, loc) if form.head() == Some("domain") => (items, *loc),
        other => return Err(syntax(other.location(), "expected `(domain ...)`")),
    };
    if items.len() < 2 {
        return Err(syntax(loc, "domain declares no variables"));
    }
    let mut vars = Vec::new();
    for entry in &items[1..] {
        let triple = match entry {
            Sexp::List(t, _) if t.len() == 3 => t,
            other => return Err(syntax(other.location(), "expected `(VAR LO HI)`")),
        };
        let name = match &triple[0] {
            Sexp::Atom(n, l) if is_identifier(n) => {
                let _ = l;
                n.clone()
            }
            other => return Err(syntax(other.location(), "expected a variable name")),
        };
        let bound = |s: &Sexp| match s {
            Sexp::Atom(text, l) => parse_rational(text)
                .ok_or_else(|| syntax(*l, format!("`{text}` is not a rational number"))),
            other => Err(syntax(other.location(), "expected a rational bound")),
        };
        vars.push(DomainVar {
            name,
            lo: bound(&triple[1])?,
            hi: bound(&triple[2])?,
        });
    }
    Domain::new(vars).map_err(|e| match e {
        FormulaError::InvalidDomain { message, .. } => FormulaError::InvalidDomain {
            location: Some(loc),
            message,
        },
        other => other,
    })
}

fn single(src: &str, what: &str) -> Result<Sexp, FormulaError> {
    let mut forms = read_all(src)?;
    match forms.len() {
        1 => Ok(forms.pop().unwrap()),
        0 => Err(FormulaError::Syntax {
            location: None,
            message: format!("expected a {what}, found nothing"),
        }),
        _ => Err(syntax(
            forms[1].location(),
            format!("unexpected input after the {what}"),
        )),
    }
}

/// Parses a formula without checking variables against a domain.
pub fn parse_formula(src: &str) -> Result<Formula, FormulaError> {
    build_formula(&single(src, "formula")?, None)
}

pub fn parse_domain(src: &str) -> Result<Domain, FormulaError> {
    build_domain(&single(src, "domain")?)
}

/// Parses a formula and its domain; every variable of the formula must be
/// declared in the domain.
pub fn parse(formula_src: &str, domain_src: &str) -> Result<(Formula, Domain), FormulaError> {
    let domain = parse_domain(domain_src)?;
    let formula = build_formula(&single(formula_src, "formula")?, Some(&domain))?;
    Ok((formula, domain))
}

/// Parses a problem file: one formula and at most one `(domain ...)` form, in
/// any order.
pub fn parse_problem(src: &str) -> Result<(Formula, Option<Domain>), FormulaError> {
    parse_problem_with(src, None)
}

/// Like [`parse_problem`], but checks the formula against `external` when
/// given. A file that also declares a domain is rejected as ambiguous.
pub fn parse_problem_with(
    src: &str,
    external: Option<&Domain>,
) -> Result<(Formula, Option<Domain>), FormulaError> {
    let forms = read_all(src)?;
    let (domains, formulas): (Vec<_>, Vec<_>) =
        forms.iter().partition(|f| f.head() == Some("domain"));
    if domains.len() > 1 {
        return Err(syntax(domains[1].location(), "more than one domain"));
    }
    if let (Some(d), Some(_)) = (domains.first(), external) {
        return Err(syntax(
            d.location(),
            "domain declared in the file and given separately",
        ));
    }
    let domain = match external {
        Some(d) => Some(d.clone()),
        None => domains.first().map(|d| build_domain(d)).transpose()?,
    };
    let form = match formulas.as_slice() {
        [f] => *f,
        [] => {
            return Err(FormulaError::Syntax {
                location: None,
                message: "no formula found".into(),
            })
        }
        [_, extra, ..] => return Err(syntax(extra.location(), "more than one formula")),
    };
    let formula = build_formula(form, domain.as_ref())?;
    Ok((formula, domain))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("3"), Some(r(3, 1)));
        assert_eq!(parse_rational("-1/3"), Some(r(-1, 3)));
        assert_eq!(parse_rational("0.1"), Some(r(1, 10)));
        assert_eq!(parse_rational(".5"), Some(r(1, 2)));
        assert_eq!(parse_rational("2."), Some(r(2, 1)));
        assert_eq!(parse_rational("1e-3"), Some(r(1, 1000)));
        assert_eq!(parse_rational("-2.5E2"), Some(r(-250, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(parse_rational("-"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn single_existential() {
        let (f, d) = parse("(exists :tag 1 :q [0.1 0.2] x (> x 0))", "(domain (x 0 1))").unwrap();
        let Formula::Quant(q) = &f else {
            panic!("expected quantifier")
        };
        assert_eq!(q.kind, QuantKind::Exists);
        assert_eq!(q.tag, Tag(1));
        assert_eq!(q.annotation, Annotation::ratio(1, 2, 10));
        assert_eq!(q.var, "x");
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn tag_annotation_mismatch() {
        let src = "(and (exists :tag 1 :q [0 1] x (> x 0)) (exists :tag 1 :q [0 2] x (> x 0)))";
        let err = parse(src, "(domain (x 0 3))").unwrap_err();
        assert!(
            matches!(err, FormulaError::TagMismatch { tag: Tag(1), .. }),
            "{err}"
        );
        assert!(err.to_string().starts_with("1:41:"), "{err}");
    }

    #[test]
    fn inverted_annotation() {
        let err = parse_formula("(exists :tag 1 :q [0.2 0.1] x (> x 0))").unwrap_err();
        assert!(
            matches!(err, FormulaError::InvertedAnnotation { .. }),
            "{err}"
        );
    }

    #[test]
    fn negative_annotation() {
        let err = parse_formula("(exists :q [-1 1] x (> x 0))").unwrap_err();
        assert!(matches!(err, FormulaError::NegativeAnnotation { .. }));
    }

    #[test]
    fn undeclared_variable_has_location() {
        let err = parse("(<= x\n  y)", "(domain (x 0 1))").unwrap_err();
        assert_eq!(err.to_string(), "2:3: undeclared variable `y`");
    }

    #[test]
    fn classical_quantifier_is_rejected() {
        let err = parse_formula("(exists x (> x 0))").unwrap_err();
        assert!(err.to_string().contains(":q"), "{err}");
    }

    #[test]
    fn untagged_quantifiers_get_fresh_tags() {
        let f = parse_formula(
            "(and (exists :q [0 1] x (> x 0)) (and (exists :tag 4 :q [0 1] y (> y 0)) (forall :q [0 1] z (> z 0))))",
        )
        .unwrap();
        let tags: Vec<u32> = f.quantifiers().iter().map(|q| q.tag.0).collect();
        assert_eq!(tags, vec![5, 4, 6]);
        assert!(crate::formula::is_free(&f));
    }

    #[test]
    fn nary_connectives_nest_right() {
        let f = parse_formula("(and (> x 0) (> x 1) (> x 2))").unwrap();
        assert_eq!(f.to_string(), "(and (> x 0) (and (> x 1) (> x 2)))");
    }

    #[test]
    fn syntax_errors_report_position() {
        let err = parse_formula("(and (> x 0)\n  (> x 1)").unwrap_err();
        assert_eq!(err.to_string(), "1:1: syntax error: unclosed `(`");
        let err = parse_formula("(<= x 1) (<= x 2)").unwrap_err();
        assert!(err.to_string().starts_with("1:10"), "{err}");
        let err = parse_formula("(frob x)").unwrap_err();
        assert!(err.to_string().contains("unknown formula head"));
    }

    #[test]
    fn problem_file_with_domain_and_comments() {
        let src = "; unit disk\n(domain (x -2 2) (y -2 2))\n(<= (+ (* x x) (* y y)) 1)\n";
        let (f, d) = parse_problem(src).unwrap();
        assert_eq!(d.unwrap().len(), 2);
        assert_eq!(f.to_string(), "(<= (+ (* x x) (* y y)) 1)");
        let line = parse_domain("(domain (x 0 1))").unwrap();
        let err = parse_problem_with(src, Some(&line)).unwrap_err();
        assert_eq!(err.location(), Some(Location { line: 2, column: 1 }));
        let err = parse_problem_with("\n  (<= y 1)", Some(&line)).unwrap_err();
        assert_eq!(err.to_string(), "2:7: undeclared variable `y`");
    }

    #[test]
    fn invalid_domains() {
        assert!(parse_domain("(domain)").is_err());
        assert!(parse_domain("(domain (x 1 0))").is_err());
        assert!(parse_domain("(domain (x 0 1) (x 0 2))").is_err());
        assert!(parse_domain("(domain (and 0 1))").is_err());
    }
}
