use super::{Atom, Formula, QuantKind, Quantifier, Relation};

/// Negation normal form.
///
/// `forall` becomes `not exists not` with the same tag and annotation, and
/// negations are pushed inward. Negated atoms flip their comparator
/// (`not (= a b)` becomes `(or (< a b) (> a b))`). Because volume quantifiers
/// have no dual left once `forall` is gone, the only `Not` nodes that remain
/// sit directly on top of `exists` nodes.
pub fn to_nnf(f: &Formula) -> Formula {
    nnf(f, false)
}

fn nnf(f: &Formula, negate: bool) -> Formula {
    match f {
        Formula::Atom(a) if negate => negate_atom(a),
        Formula::Atom(a) => Formula::Atom(a.clone()),
        Formula::Not(inner) => nnf(inner, !negate),
        Formula::And(a, b) if negate => Formula::or(nnf(a, true), nnf(b, true)),
        Formula::And(a, b) => Formula::and(nnf(a, false), nnf(b, false)),
        Formula::Or(a, b) if negate => Formula::and(nnf(a, true), nnf(b, true)),
        Formula::Or(a, b) => Formula::or(nnf(a, false), nnf(b, false)),
        Formula::Quant(q) => {
            // forall v. phi  ==  not exists v. not phi
            let (body_negated, outer_negated) = match q.kind {
                QuantKind::Exists => (false, negate),
                QuantKind::Forall => (true, !negate),
            };
            let exists = Formula::Quant(Quantifier {
                kind: QuantKind::Exists,
                tag: q.tag,
                annotation: q.annotation.clone(),
                var: q.var.clone(),
                body: Box::new(nnf(&q.body, body_negated)),
            });
            if outer_negated {
                Formula::not(exists)
            } else {
                exists
            }
        }
    }
}

fn negate_atom(a: &Atom) -> Formula {
    match a.rel.negated() {
        Some(rel) => Formula::Atom(Atom::new(a.lhs.clone(), rel, a.rhs.clone())),
        None => Formula::or(
            Formula::atom(a.lhs.clone(), Relation::Lt, a.rhs.clone()),
            Formula::atom(a.lhs.clone(), Relation::Gt, a.rhs.clone()),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{Annotation, Term};

    fn le(x: &str, c: i64) -> Formula {
        Formula::atom(Term::var(x), Relation::Le, Term::constant(c))
    }

    #[test]
    fn flips_comparator() {
        let f = Formula::not(le("x", 1));
        assert_eq!(
            to_nnf(&f),
            Formula::atom(Term::var("x"), Relation::Gt, Term::constant(1))
        );
    }

    #[test]
    fn removes_double_negation() {
        let f = Formula::not(Formula::not(le("x", 1)));
        assert_eq!(to_nnf(&f), le("x", 1));
    }

    #[test]
    fn negated_equality_splits() {
        let f = Formula::not(Formula::atom(
            Term::var("x"),
            Relation::Eq,
            Term::constant(0),
        ));
        assert_eq!(to_nnf(&f).to_string(), "(or (< x 0) (> x 0))");
    }

    #[test]
    fn forall_becomes_negated_exists() {
        let ann = Annotation::ratio(1, 2, 10);
        let f = Formula::forall(3, ann.clone(), "x", le("x", 1));
        let expected = Formula::not(Formula::exists(
            3,
            ann,
            "x",
            Formula::atom(Term::var("x"), Relation::Gt, Term::constant(1)),
        ));
        assert_eq!(to_nnf(&f), expected);
    }

    #[test]
    fn negated_forall_is_plain_exists() {
        let ann = Annotation::ratio(0, 1, 2);
        let f = Formula::not(Formula::forall(1, ann.clone(), "x", le("x", 0)));
        assert_eq!(
            to_nnf(&f).to_string(),
            "(exists :tag 1 :q [0 1/2] x (> x 0))"
        );
    }
}
