//! First-order constraints over polynomial atoms with tagged, interval-annotated
//! volume quantifiers.
//!
//! `(exists :tag t :q [lo hi] v body)` holds at an assignment when, for the
//! threshold chosen for tag `t` inside `[lo, hi]`, the set of values of `v`
//! satisfying `body` has measure strictly greater than the threshold. Equal
//! tags share one chosen threshold; `forall` is read as `not exists not` with
//! the same tag and annotation.

mod nnf;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::Signed;
use thiserror::Error;

use crate::interval::Interval;

pub use nnf::to_nnf;
pub use parse::{parse, parse_domain, parse_formula, parse_problem, parse_problem_with};

pub type Rational = BigRational;

/// Source position (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

fn at(loc: &Option<Location>) -> String {
    match loc {
        Some(l) => format!("{l}: "),
        None => String::new(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("{}syntax error: {message}", at(.location))]
    Syntax {
        location: Option<Location>,
        message: String,
    },
    #[error("{}tag {tag} annotated {found} but previously annotated {expected}", at(.location))]
    TagMismatch {
        location: Option<Location>,
        tag: Tag,
        expected: String,
        found: String,
    },
    #[error("{}undeclared variable `{name}`", at(.location))]
    UndeclaredVariable {
        location: Option<Location>,
        name: String,
    },
    #[error("{}annotation bounds must be non-negative", at(.location))]
    NegativeAnnotation { location: Option<Location> },
    #[error("{}annotation lower bound {lo} exceeds upper bound {hi}", at(.location))]
    InvertedAnnotation {
        location: Option<Location>,
        lo: String,
        hi: String,
    },
    #[error("{}invalid domain: {message}", at(.location))]
    InvalidDomain {
        location: Option<Location>,
        message: String,
    },
}

impl FormulaError {
    /// Source position of the offending token, when known.
    pub fn location(&self) -> Option<Location> {
        match self {
            FormulaError::Syntax { location, .. }
            | FormulaError::TagMismatch { location, .. }
            | FormulaError::UndeclaredVariable { location, .. }
            | FormulaError::NegativeAnnotation { location }
            | FormulaError::InvertedAnnotation { location, .. }
            | FormulaError::InvalidDomain { location, .. } => *location,
        }
    }
}

/// Polynomial term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Const(Rational),
    Var(String),
    /// At least two summands.
    Add(Vec<Term>),
    Sub(Box<Term>, Box<Term>),
    /// At least two factors.
    Mul(Vec<Term>),
    Neg(Box<Term>),
}

impl Term {
    pub fn constant(n: i64) -> Term {
        Term::Const(Rational::from_integer(n.into()))
    }

    pub fn var(name: &str) -> Term {
        Term::Var(name.to_owned())
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Term::Const(_) => {}
            Term::Var(v) => {
                out.insert(v);
            }
            Term::Add(ts) | Term::Mul(ts) => ts.iter().for_each(|t| t.collect_vars(out)),
            Term::Sub(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Neg(a) => a.collect_vars(out),
        }
    }

    /// Polynomial degree upper bound (syntactic).
    pub fn degree(&self) -> usize {
        match self {
            Term::Const(_) => 0,
            Term::Var(_) => 1,
            Term::Add(ts) => ts.iter().map(Term::degree).max().unwrap_or(0),
            Term::Sub(a, b) => a.degree().max(b.degree()),
            Term::Mul(ts) => ts.iter().map(Term::degree).sum(),
            Term::Neg(a) => a.degree(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Le,
    Lt,
    Eq,
    Ge,
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }

    /// Relation of the negated atom, where one exists (`=` has none).
    pub fn negated(self) -> Option<Relation> {
        match self {
            Relation::Le => Some(Relation::Gt),
            Relation::Lt => Some(Relation::Ge),
            Relation::Ge => Some(Relation::Lt),
            Relation::Gt => Some(Relation::Le),
            Relation::Eq => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub lhs: Term,
    pub rel: Relation,
    pub rhs: Term,
}

impl Atom {
    pub fn new(lhs: Term, rel: Relation, rhs: Term) -> Atom {
        Atom { lhs, rel, rhs }
    }

    /// `lhs - rhs`, the quantity compared against zero.
    pub fn difference(&self) -> Term {
        Term::Sub(Box::new(self.lhs.clone()), Box::new(self.rhs.clone()))
    }
}

/// Quantifier tag; equal tags force equal threshold choices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tag(pub u32);

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Admissible threshold range `[lo, hi]`, `0 <= lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Annotation {
    lo: Rational,
    hi: Rational,
}

impl Annotation {
    pub fn new(lo: Rational, hi: Rational) -> Result<Annotation, FormulaError> {
        if lo.is_negative() || hi.is_negative() {
            return Err(FormulaError::NegativeAnnotation { location: None });
        }
        if lo > hi {
            return Err(FormulaError::InvertedAnnotation {
                location: None,
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(Annotation { lo, hi })
    }

    /// Convenience constructor from integer ratios `lo_num/den`, `hi_num/den`.
    pub fn ratio(lo_num: i64, hi_num: i64, den: i64) -> Annotation {
        Annotation::new(
            Rational::new(lo_num.into(), den.into()),
            Rational::new(hi_num.into(), den.into()),
        )
        .expect("valid annotation")
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_deterministic(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn lo_enclosure(&self) -> Interval {
        Interval::from_rational(&self.lo)
    }

    pub fn hi_enclosure(&self) -> Interval {
        Interval::from_rational(&self.hi)
    }
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {}]", fmt_rational(&self.lo), fmt_rational(&self.hi))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuantKind {
    Exists,
    Forall,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quantifier {
    pub kind: QuantKind,
    pub tag: Tag,
    pub annotation: Annotation,
    pub var: String,
    pub body: Box<Formula>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Quant(Quantifier),
}

impl Formula {
    pub fn atom(lhs: Term, rel: Relation, rhs: Term) -> Formula {
        Formula::Atom(Atom::new(lhs, rel, rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(tag: u32, annotation: Annotation, var: &str, body: Formula) -> Formula {
        Formula::Quant(Quantifier {
            kind: QuantKind::Exists,
            tag: Tag(tag),
            annotation,
            var: var.to_owned(),
            body: Box::new(body),
        })
    }

    pub fn forall(tag: u32, annotation: Annotation, var: &str, body: Formula) -> Formula {
        Formula::Quant(Quantifier {
            kind: QuantKind::Forall,
            tag: Tag(tag),
            annotation,
            var: var.to_owned(),
            body: Box::new(body),
        })
    }

    /// Atoms in pre-order (left to right).
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Atom(a) = f {
                out.push(a);
            }
        });
        out
    }

    /// Quantifier nodes in pre-order.
    pub fn quantifiers(&self) -> Vec<&Quantifier> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Quant(q) = f {
                out.push(q);
            }
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Atom(_) => {}
            Formula::Not(a) => a.visit(f),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::Quant(q) => q.body.visit(f),
        }
    }

    /// Annotation of each tag. The first occurrence wins; `validate` rejects
    /// formulas where occurrences disagree.
    pub fn tag_annotations(&self) -> BTreeMap<Tag, Annotation> {
        let mut map = BTreeMap::new();
        for q in self.quantifiers() {
            map.entry(q.tag).or_insert_with(|| q.annotation.clone());
        }
        map
    }

    /// Variables occurring free, sorted by name.
    pub fn free_vars(&self) -> BTreeSet<String> {
        fn walk(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                Formula::Atom(a) => {
                    let mut vs = BTreeSet::new();
                    a.lhs.collect_vars(&mut vs);
                    a.rhs.collect_vars(&mut vs);
                    for v in vs {
                        if !bound.iter().any(|b| b == v) {
                            out.insert(v.to_owned());
                        }
                    }
                }
                Formula::Not(a) => walk(a, bound, out),
                Formula::And(a, b) | Formula::Or(a, b) => {
                    walk(a, bound, out);
                    walk(b, bound, out);
                }
                Formula::Quant(q) => {
                    bound.push(q.var.clone());
                    walk(&q.body, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Every variable, free or bound.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut names = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom(a) => {
                let mut vs = BTreeSet::new();
                a.lhs.collect_vars(&mut vs);
                a.rhs.collect_vars(&mut vs);
                names.extend(vs.into_iter().map(str::to_owned));
            }
            Formula::Quant(q) => {
                names.insert(q.var.clone());
            }
            _ => {}
        });
        names
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Nesting depth of connectives and quantifiers (an atom has depth 0).
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(a) => 1 + a.depth(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Quant(q) => 1 + q.body.depth(),
        }
    }

    /// Checks variable declarations and tag/annotation coherence.
    pub fn validate(&self, domain: &Domain) -> Result<(), FormulaError> {
        if let Some(name) = self
            .all_vars()
            .into_iter()
            .find(|v| domain.index_of(v).is_none())
        {
            return Err(FormulaError::UndeclaredVariable {
                location: None,
                name,
            });
        }
        let mut seen: BTreeMap<Tag, &Annotation> = BTreeMap::new();
        for q in self.quantifiers() {
            match seen.get(&q.tag) {
                Some(prev) if **prev != q.annotation => {
                    return Err(FormulaError::TagMismatch {
                        location: None,
                        tag: q.tag,
                        expected: prev.to_string(),
                        found: q.annotation.to_string(),
                    })
                }
                _ => {
                    seen.insert(q.tag, &q.annotation);
                }
            }
        }
        Ok(())
    }
}

/// True iff every tag carried by a non-deterministic quantifier occurs on
/// exactly one quantifier.
pub fn is_free(f: &Formula) -> bool {
    let mut counts: BTreeMap<Tag, usize> = BTreeMap::new();
    for q in f.quantifiers() {
        *counts.entry(q.tag).or_default() += 1;
    }
    f.quantifiers()
        .iter()
        .filter(|q| !q.annotation.is_deterministic())
        .all(|q| counts[&q.tag] == 1)
}

/// One declared variable with its closed bounding interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainVar {
    pub name: String,
    pub lo: Rational,
    pub hi: Rational,
}

/// Ordered variables with bounded ranges; their product is the domain box.
///
/// Box computations use the nearest `f64` of each rational bound.
#[derive(Clone, Debug)]
pub struct Domain {
    vars: Vec<DomainVar>,
    bounds: Vec<Interval>,
}

impl PartialEq for Domain {
    fn eq(&self, other: &Domain) -> bool {
        self.vars == other.vars
    }
}

impl Domain {
    pub fn new(vars: Vec<DomainVar>) -> Result<Domain, FormulaError> {
        let invalid = |message: String| FormulaError::InvalidDomain {
            location: None,
            message,
        };
        if vars.is_empty() {
            return Err(invalid("no variables declared".into()));
        }
        let mut names = BTreeSet::new();
        let mut bounds = Vec::with_capacity(vars.len());
        for v in &vars {
            if !names.insert(v.name.as_str()) {
                return Err(invalid(format!("variable `{}` declared twice", v.name)));
            }
            if v.lo >= v.hi {
                return Err(invalid(format!(
                    "range of `{}` must have positive length",
                    v.name
                )));
            }
            let lo = nearest_f64(&v.lo);
            let hi = nearest_f64(&v.hi);
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(invalid(format!(
                    "range of `{}` is not representable",
                    v.name
                )));
            }
            bounds.push(Interval::new(lo, hi));
        }
        Ok(Domain { vars, bounds })
    }

    /// Builds a domain from `(name, lo, hi)` triples of `f64` values.
    pub fn from_f64(vars: &[(&str, f64, f64)]) -> Result<Domain, FormulaError> {
        Domain::new(
            vars.iter()
                .map(|&(name, lo, hi)| DomainVar {
                    name: name.to_owned(),
                    lo: Rational::from_float(lo).unwrap_or_default(),
                    hi: Rational::from_float(hi).unwrap_or_default(),
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[DomainVar] {
        &self.vars
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.vars.iter().map(|v| v.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// `f64` bounds of each variable, in declaration order.
    pub fn bounds(&self) -> &[Interval] {
        &self.bounds
    }

    /// Length of the range of variable `i`.
    pub fn width(&self, i: usize) -> f64 {
        self.bounds[i].width()
    }

    pub fn volume(&self) -> f64 {
        self.bounds.iter().map(Interval::width).product()
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(domain")?;
        for v in &self.vars {
            write!(
                f,
                " ({} {} {})",
                v.name,
                fmt_rational(&v.lo),
                fmt_rational(&v.hi)
            )?;
        }
        write!(f, ")")
    }
}

fn nearest_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => write!(f, "{}", fmt_rational(c)),
            Term::Var(v) => write!(f, "{v}"),
            Term::Add(ts) | Term::Mul(ts) => {
                let op = if matches!(self, Term::Add(_)) {
                    '+'
                } else {
                    '*'
                };
                write!(f, "({op}")?;
                for t in ts {
                    write!(f, " {t}")?;
                }
                write!(f, ")")
            }
            Term::Sub(a, b) => write!(f, "(- {a} {b})"),
            Term::Neg(a) => write!(f, "(neg {a})"),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} {})", self.rel.symbol(), self.lhs, self.rhs)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(a) => write!(f, "(not {a})"),
            Formula::And(a, b) => write!(f, "(and {a} {b})"),
            Formula::Or(a, b) => write!(f, "(or {a} {b})"),
            Formula::Quant(q) => {
                let kw = match q.kind {
                    QuantKind::Exists => "exists",
                    QuantKind::Forall => "forall",
                };
                write!(
                    f,
                    "({kw} :tag {} :q {} {} {})",
                    q.tag, q.annotation, q.var, q.body
                )
            }
        }
    }
}
