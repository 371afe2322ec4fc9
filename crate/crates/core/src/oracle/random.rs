//! Random free formulas for property tests and sweeps.

use num_traits::ToPrimitive;
use rand::Rng;

use crate::formula::{Annotation, Domain, Formula, Rational, Relation, Term};

/// Size limits for [`random_free_formula`].
#[derive(Clone, Debug, PartialEq)]
pub struct FormulaShape {
    /// Nesting depth of connectives and quantifiers.
    pub max_depth: usize,
    /// Most variables in a single atom.
    pub atom_vars: usize,
    /// Annotation width as a fraction of the bound variable's range.
    pub min_width: f64,
}

impl Default for FormulaShape {
    fn default() -> FormulaShape {
        FormulaShape {
            max_depth: 3,
            atom_vars: 2,
            min_width: 0.3,
        }
    }
}

fn half(n: i64) -> Rational {
    Rational::new(n.into(), 2.into())
}

/// Polynomial of degree at most 2 in `vars` with small half-integer
/// coefficients.
pub fn random_term<R: Rng>(rng: &mut R, vars: &[&str]) -> Term {
    let mut monomials = vec![Term::Const(half(rng.random_range(-4..=4)))];
    for (i, v) in vars.iter().enumerate() {
        monomials.push(Term::Mul(vec![
            Term::Const(half(rng.random_range(-4..=4))),
            Term::var(v),
        ]));
        if rng.random_bool(0.6) {
            let other = vars[rng.random_range(i..vars.len())];
            monomials.push(Term::Mul(vec![
                Term::Const(half(rng.random_range(-3..=3))),
                Term::var(v),
                Term::var(other),
            ]));
        }
    }
    Term::Add(monomials)
}

/// Annotation inside `[0, range]` with width at least `min_width * range`,
/// on a grid of sixteenths of the range.
pub fn random_annotation<R: Rng>(rng: &mut R, range: &Rational, min_width: f64) -> Annotation {
    let min_steps = (min_width * 16.0).ceil().clamp(0.0, 16.0) as i64;
    let steps = rng.random_range(min_steps..=16);
    let start = rng.random_range(0..=16 - steps);
    let unit = range / Rational::from_integer(16.into());
    Annotation::new(
        &unit * Rational::from_integer(start.into()),
        &unit * Rational::from_integer((start + steps).into()),
    )
    .expect("valid annotation")
}

/// Random formula over `domain` whose quantifiers all carry distinct tags,
/// so the result is free.
pub fn random_free_formula<R: Rng>(rng: &mut R, domain: &Domain, shape: &FormulaShape) -> Formula {
    fn go<R: Rng>(
        rng: &mut R,
        domain: &Domain,
        shape: &FormulaShape,
        depth: usize,
        tag: &mut u32,
    ) -> Formula {
        let names: Vec<&str> = domain.names().collect();
        let pick = if depth == 0 {
            0
        } else {
            rng.random_range(0..6)
        };
        let sub = |rng: &mut R, tag: &mut u32| go(rng, domain, shape, depth - 1, tag);
        match pick {
            1 => Formula::not(sub(rng, tag)),
            2 => Formula::and(sub(rng, tag), sub(rng, tag)),
            3 => Formula::or(sub(rng, tag), sub(rng, tag)),
            4 | 5 => {
                let i = rng.random_range(0..names.len());
                let v = &domain.vars()[i];
                let ann = random_annotation(rng, &(&v.hi - &v.lo), shape.min_width);
                *tag += 1;
                let t = *tag;
                let body = sub(rng, tag);
                if pick == 4 {
                    Formula::exists(t, ann, names[i], body)
                } else {
                    Formula::forall(t, ann, names[i], body)
                }
            }
            _ => {
                let k = rng.random_range(1..=shape.atom_vars.min(names.len()));
                let mut chosen = names.clone();
                while chosen.len() > k {
                    chosen.remove(rng.random_range(0..chosen.len()));
                }
                let rel = [Relation::Le, Relation::Lt, Relation::Ge, Relation::Gt]
                    [rng.random_range(0..4)];
                Formula::atom(random_term(rng, &chosen), rel, Term::constant(0))
            }
        }
    }
    let mut tag = 0;
    go(rng, domain, shape, shape.max_depth, &mut tag)
}

/// Smallest quantifier annotation width relative to its variable's range,
/// useful for filtering generated formulas.
pub fn min_relative_width(f: &Formula, domain: &Domain) -> f64 {
    f.quantifiers()
        .iter()
        .map(|q| {
            let v = &domain.vars()[domain.index_of(&q.var).expect("declared")];
            (q.annotation.width() / (&v.hi - &v.lo)).to_f64().unwrap()
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::is_free;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn generated_formulas_are_free_and_valid() {
        let d = Domain::from_f64(&[("x", -2.0, 2.0), ("y", -1.0, 2.0), ("z", 0.0, 1.0)]).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        let shape = FormulaShape::default();
        for _ in 0..200 {
            let f = random_free_formula(&mut rng, &d, &shape);
            assert!(is_free(&f));
            f.validate(&d).unwrap();
            assert!(f.depth() <= 1 + shape.max_depth);
            assert!(f.quantifiers().is_empty() || min_relative_width(&f, &d) >= 0.3 - 1e-12);
            assert!(f.atoms().iter().all(|a| a.difference().degree() <= 2));
        }
    }
}
