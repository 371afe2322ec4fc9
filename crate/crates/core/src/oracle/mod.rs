//! Brute-force reference semantics used by the test suites.
//!
//! Nothing here touches the interval or paving code: terms are evaluated at
//! points in plain `f64` with a running error bound (falling back to exact
//! rationals when the sign is in doubt), and volumes are midpoint Riemann
//! sums over a grid.

mod discrete;
mod random;

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::formula::{Domain, Formula, QuantKind, Rational, Relation, Term};
use crate::semantics::{BiPaving, QuantifierChoice};

pub use discrete::{discrete_extension_check, DiscreteCoverage, DiscreteReport};
pub use random::{
    min_relative_width, random_annotation, random_free_formula, random_term, FormulaShape,
};

/// Three-valued truth: `None` when discretization cannot decide.
pub type Tri = Option<bool>;

/// Point evaluator for formulas over a domain.
#[derive(Clone, Debug)]
pub struct Oracle<'a> {
    domain: &'a Domain,
    index: HashMap<String, usize>,
    lo: Vec<f64>,
    width: Vec<f64>,
    /// Samples per bound variable in volume quantifiers.
    pub fiber_resolution: usize,
}

/// Relative rounding unit with a safety factor.
const U: f64 = 2.0 * f64::EPSILON;

impl<'a> Oracle<'a> {
    pub fn new(domain: &'a Domain, fiber_resolution: usize) -> Oracle<'a> {
        assert!(fiber_resolution >= 1, "resolution must be positive");
        let vars = domain.vars();
        let lo: Vec<f64> = vars.iter().map(|v| v.lo.to_f64().unwrap()).collect();
        let width = vars
            .iter()
            .map(|v| (&v.hi - &v.lo).to_f64().unwrap())
            .collect();
        Oracle {
            domain,
            index: vars
                .iter()
                .enumerate()
                .map(|(i, v)| (v.name.clone(), i))
                .collect(),
            lo,
            width,
            fiber_resolution,
        }
    }

    fn pos(&self, name: &str) -> usize {
        *self
            .index
            .get(name)
            .unwrap_or_else(|| panic!("undeclared variable `{name}`"))
    }

    /// `i`-th of `r` midpoints along variable `var`.
    pub fn sample(&self, var: usize, i: usize, r: usize) -> f64 {
        self.lo[var] + (i as f64 + 0.5) * self.width[var] / r as f64
    }

    /// Value of `t` and a bound on its absolute rounding error.
    fn approx(&self, t: &Term, env: &[f64]) -> (f64, f64) {
        match t {
            Term::Const(c) => {
                let v = c.to_f64().unwrap_or(f64::NAN);
                (v, v.abs() * U)
            }
            Term::Var(n) => (env[self.pos(n)], 0.0),
            Term::Neg(a) => {
                let (v, e) = self.approx(a, env);
                (-v, e)
            }
            Term::Sub(a, b) => {
                let (x, ex) = self.approx(a, env);
                let (y, ey) = self.approx(b, env);
                let v = x - y;
                (v, ex + ey + v.abs() * U)
            }
            Term::Add(ts) => ts.iter().fold((0.0, 0.0), |(x, ex), t| {
                let (y, ey) = self.approx(t, env);
                let v = x + y;
                (v, ex + ey + v.abs() * U)
            }),
            Term::Mul(ts) => ts.iter().fold((1.0, 0.0), |(x, ex), t| {
                let (y, ey) = self.approx(t, env);
                let v = x * y;
                (v, x.abs() * ey + y.abs() * ex + ex * ey + v.abs() * U)
            }),
        }
    }

    fn exact(&self, t: &Term, env: &[f64]) -> BigRational {
        match t {
            Term::Const(c) => c.clone(),
            Term::Var(n) => BigRational::from_float(env[self.pos(n)]).expect("finite coordinate"),
            Term::Neg(a) => -self.exact(a, env),
            Term::Sub(a, b) => self.exact(a, env) - self.exact(b, env),
            Term::Add(ts) => ts
                .iter()
                .fold(BigRational::zero(), |acc, t| acc + self.exact(t, env)),
            Term::Mul(ts) => ts
                .iter()
                .fold(BigRational::from_integer(1.into()), |acc, t| {
                    acc * self.exact(t, env)
                }),
        }
    }

    /// Sign of `lhs - rhs` at a point: -1, 0 or 1.
    fn sign(&self, lhs: &Term, rhs: &Term, env: &[f64]) -> i32 {
        let (a, ea) = self.approx(lhs, env);
        let (b, eb) = self.approx(rhs, env);
        let d = a - b;
        let err = ea + eb + d.abs() * U;
        if d.is_finite() && d.abs() > err {
            return if d > 0.0 { 1 } else { -1 };
        }
        let diff = self.exact(lhs, env) - self.exact(rhs, env);
        if diff.is_positive() {
            1
        } else if diff.is_negative() {
            -1
        } else {
            0
        }
    }

    fn atom(&self, lhs: &Term, rel: Relation, rhs: &Term, env: &[f64]) -> bool {
        let s = self.sign(lhs, rhs, env);
        match rel {
            Relation::Le => s <= 0,
            Relation::Lt => s < 0,
            Relation::Eq => s == 0,
            Relation::Ge => s >= 0,
            Relation::Gt => s > 0,
        }
    }

    fn threshold(choice: &QuantifierChoice, q: &crate::formula::Quantifier) -> Rational {
        choice
            .get(q.tag)
            .cloned()
            .unwrap_or_else(|| q.annotation.lo().clone())
    }

    /// Two-valued truth at `env` (one coordinate per domain variable; bound
    /// variables are overwritten during evaluation).
    pub fn eval(&self, f: &Formula, choice: &QuantifierChoice, env: &mut [f64]) -> bool {
        match f {
            Formula::Atom(a) => self.atom(&a.lhs, a.rel, &a.rhs, env),
            Formula::Not(a) => !self.eval(a, choice, env),
            Formula::And(a, b) => self.eval(a, choice, env) && self.eval(b, choice, env),
            Formula::Or(a, b) => self.eval(a, choice, env) || self.eval(b, choice, env),
            Formula::Quant(q) => {
                let v = self.pos(&q.var);
                let r = self.fiber_resolution;
                let saved = env[v];
                let wanted = q.kind == QuantKind::Exists;
                let mut count = 0usize;
                for i in 0..r {
                    env[v] = self.sample(v, i, r);
                    if self.eval(&q.body, choice, env) == wanted {
                        count += 1;
                    }
                }
                env[v] = saved;
                let h = self.width[v] / r as f64;
                let t = Self::threshold(choice, q).to_f64().unwrap();
                let exceeds = count as f64 * h > t;
                // forall v. phi is not (exists v. not phi)
                if wanted {
                    exceeds
                } else {
                    !exceeds
                }
            }
        }
    }

    /// Kleene truth at `env`. A volume comparison is decided only when the
    /// Riemann sum clears the threshold by more than the discretization
    /// slack: one cell per run of possibly-true samples, plus two cells per
    /// atom of the body for runs the grid may have missed.
    pub fn eval3(&self, f: &Formula, choice: &QuantifierChoice, env: &mut [f64]) -> Tri {
        match f {
            Formula::Atom(a) => Some(self.atom(&a.lhs, a.rel, &a.rhs, env)),
            Formula::Not(a) => self.eval3(a, choice, env).map(|b| !b),
            Formula::And(a, b) => match (self.eval3(a, choice, env), self.eval3(b, choice, env)) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            },
            Formula::Or(a, b) => match (self.eval3(a, choice, env), self.eval3(b, choice, env)) {
                (Some(true), _) | (_, Some(true)) => Some(true),
                (Some(false), Some(false)) => Some(false),
                _ => None,
            },
            Formula::Quant(q) => {
                let v = self.pos(&q.var);
                let r = self.fiber_resolution;
                let saved = env[v];
                let wanted = q.kind == QuantKind::Exists;
                let (mut certain, mut possible, mut runs) = (0usize, 0usize, 0usize);
                let mut in_run = false;
                for i in 0..r {
                    env[v] = self.sample(v, i, r);
                    let t = self.eval3(&q.body, choice, env).map(|b| b == wanted);
                    if t == Some(true) {
                        certain += 1;
                    }
                    let maybe = t != Some(false);
                    if maybe {
                        possible += 1;
                        if !in_run {
                            runs += 1;
                        }
                    }
                    in_run = maybe;
                }
                env[v] = saved;
                let h = self.width[v] / r as f64;
                let slack = (runs + 2 * q.body.atoms().len()) as f64 * h;
                let t = Self::threshold(choice, q).to_f64().unwrap();
                let lo = certain as f64 * h - slack;
                let hi = possible as f64 * h + slack;
                let exceeds = if lo > t {
                    Some(true)
                } else if hi <= t {
                    Some(false)
                } else {
                    None
                };
                if wanted {
                    exceeds
                } else {
                    exceeds.map(|b| !b)
                }
            }
        }
    }

    /// Midpoint grid over `vars` (domain positions) with `r` points per axis,
    /// in row-major order (last variable fastest).
    pub fn grid_points(&self, vars: &[usize], r: usize) -> Vec<Vec<f64>> {
        let total = r.pow(vars.len() as u32);
        (0..total)
            .map(|mut k| {
                let mut p = vec![0.0; vars.len()];
                for j in (0..vars.len()).rev() {
                    p[j] = self.sample(vars[j], k % r, r);
                    k /= r;
                }
                p
            })
            .collect()
    }

    /// Domain positions of the free variables of `f`, ascending.
    pub fn free_positions(&self, f: &Formula) -> Vec<usize> {
        let mut p: Vec<usize> = f.free_vars().iter().map(|v| self.pos(v)).collect();
        p.sort_unstable();
        p
    }

    /// Full environment for a point over `free` (other coordinates at the
    /// domain midpoint; they are bound before use).
    fn env_for(&self, free: &[usize], point: &[f64]) -> Vec<f64> {
        let mut env: Vec<f64> = (0..self.domain.len())
            .map(|i| self.lo[i] + 0.5 * self.width[i])
            .collect();
        for (&i, &x) in free.iter().zip(point) {
            env[i] = x;
        }
        env
    }
}

/// Result of [`grid_eval`]: truth values at the midpoints of a regular grid
/// over the free variables.
#[derive(Clone, Debug, PartialEq)]
pub struct GridEval {
    pub vars: Vec<String>,
    pub resolution: usize,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<bool>,
}

impl GridEval {
    /// Value at grid indices (one per free variable).
    pub fn at(&self, idx: &[usize]) -> bool {
        let k = idx.iter().fold(0, |acc, &i| acc * self.resolution + i);
        self.values[k]
    }
}

/// Evaluates `f` under a fixed choice at every midpoint of a grid with
/// `resolution` points per axis, using the same resolution for volume
/// quantifiers.
pub fn grid_eval(
    f: &Formula,
    domain: &Domain,
    choice: &QuantifierChoice,
    resolution: usize,
) -> GridEval {
    assert!(resolution >= 2, "resolution must be at least 2");
    let oracle = Oracle::new(domain, resolution);
    let free = oracle.free_positions(f);
    let points = oracle.grid_points(&free, resolution);
    let values = points
        .par_iter()
        .map(|p| oracle.eval(f, choice, &mut oracle.env_for(&free, p)))
        .collect();
    GridEval {
        vars: free
            .iter()
            .map(|&i| domain.vars()[i].name.clone())
            .collect(),
        resolution,
        points,
        values,
    }
}

/// Per-tag choice that makes `f` as true as possible (`truthy`) or as false
/// as possible: quantifiers under an even number of negations get their
/// lower annotation bound when seeking truth, the others their upper bound.
/// `forall` counts as a negated `exists`. Meaningful for free formulas,
/// where every non-deterministic tag occurs once.
pub fn extreme_choice(f: &Formula, truthy: bool) -> QuantifierChoice {
    fn walk(f: &Formula, positive: bool, truthy: bool, out: &mut QuantifierChoice) {
        match f {
            Formula::Atom(_) => {}
            Formula::Not(a) => walk(a, !positive, truthy, out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                walk(a, positive, truthy, out);
                walk(b, positive, truthy, out);
            }
            Formula::Quant(q) => {
                // polarity of the underlying exists
                let pos = positive == (q.kind == QuantKind::Exists);
                let low = pos == truthy;
                let v = if low {
                    q.annotation.lo()
                } else {
                    q.annotation.hi()
                };
                out.insert(q.tag, v.clone());
                // forall v. phi is not (exists v. not phi): the body keeps
                // the polarity of the quantifier either way
                walk(&q.body, positive, truthy, out);
            }
        }
    }
    let mut out = QuantifierChoice::new();
    walk(f, true, truthy, &mut out);
    out
}

/// A grid point where a solver claim and the oracle disagree.
#[derive(Clone, Debug, PartialEq)]
pub struct Contradiction {
    pub point: Vec<f64>,
    pub claim: &'static str,
}

/// Checks solver claims against the Kleene oracle on a midpoint grid over
/// the result's variables:
/// - points in `favorable.lower` are not definitely false under the
///   truth-seeking choice;
/// - points outside `favorable.upper` are not definitely true under the
///   falsity-seeking choice;
/// - with a robust result, points in its lower bound are not definitely
///   false under the falsity-seeking choice and points outside its upper
///   bound are not definitely true under the truth-seeking choice.
pub fn find_contradictions(
    f: &Formula,
    domain: &Domain,
    favorable: &BiPaving,
    robust: Option<&BiPaving>,
    resolution: usize,
    fiber_resolution: usize,
) -> Vec<Contradiction> {
    let oracle = Oracle::new(domain, fiber_resolution);
    let free: Vec<usize> = favorable.vars().iter().map(|v| oracle.pos(v)).collect();
    let truthy = extreme_choice(f, true);
    let falsy = extreme_choice(f, false);
    oracle
        .grid_points(&free, resolution)
        .into_par_iter()
        .flat_map_iter(|p| {
            let mut env = oracle.env_for(&free, &p);
            let mut out = Vec::new();
            let mut check =
                |claim: &'static str, applies: bool, choice: &QuantifierChoice, bad: bool| {
                    if applies && oracle.eval3(f, choice, &mut env) == Some(bad) {
                        out.push(Contradiction {
                            point: p.clone(),
                            claim,
                        });
                    }
                };
            check(
                "lower",
                favorable.lower().contains_point(&p),
                &truthy,
                false,
            );
            check(
                "outside upper",
                !favorable.upper().contains_point(&p),
                &falsy,
                true,
            );
            if let Some(r) = robust {
                check("robust lower", r.lower().contains_point(&p), &falsy, false);
                check(
                    "outside robust upper",
                    !r.upper().contains_point(&p),
                    &truthy,
                    true,
                );
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Tag};

    fn choice(q: (i64, i64)) -> QuantifierChoice {
        [(Tag(1), Rational::new(q.0.into(), q.1.into()))]
            .into_iter()
            .collect()
    }

    #[test]
    fn disk_at_origin() {
        let (f, d) = parse("(<= (+ (* x x) (* y y)) 1)", "(domain (x -1 1) (y -1 1))").unwrap();
        let g = grid_eval(&f, &d, &QuantifierChoice::new(), 2);
        assert!(g.values.iter().all(|&v| v));
        let g = grid_eval(&f, &d, &QuantifierChoice::new(), 5);
        assert!(g.at(&[2, 2]) && !g.at(&[0, 0]));
    }

    #[test]
    fn quantified_disk_fibers() {
        let (f, d) = parse(
            "(exists :tag 1 :q [1 1] y (<= (+ (* x x) (* y y)) 1))",
            "(domain (x -2 2) (y -2 2))",
        )
        .unwrap();
        let o = Oracle::new(&d, 2001);
        let c = choice((1, 1));
        assert!(o.eval(&f, &c, &mut [0.0, 0.0]));
        assert!(!o.eval(&f, &c, &mut [0.95, 0.0]));
        assert_eq!(o.eval3(&f, &c, &mut [0.95, 0.0]), Some(false));
        // fiber 2*sqrt(1 - x^2) = 1 exactly at x = sqrt(3)/2
        assert_eq!(o.eval3(&f, &c, &mut [0.866, 0.0]), None);
    }

    #[test]
    fn doubling_resolution_only_changes_boundary_points() {
        let (f, d) = parse("(<= (+ (* x x) (* y y)) 1)", "(domain (x -2 2) (y -2 2))").unwrap();
        let none = QuantifierChoice::new();
        let (r, h) = (40, 0.1);
        let (coarse, fine) = (grid_eval(&f, &d, &none, r), grid_eval(&f, &d, &none, 2 * r));
        for i in 0..r {
            for j in 0..r {
                let p = &coarse.points[i * r + j];
                let radius = (p[0] * p[0] + p[1] * p[1]).sqrt();
                for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    if fine.at(&[2 * i + a, 2 * j + b]) != coarse.at(&[i, j]) {
                        assert!((radius - 1.0).abs() <= h * 2f64.sqrt(), "{p:?}");
                    }
                }
            }
        }

        let (f, d) = parse(
            "(exists :tag 1 :q [1 1] y (<= (+ (* x x) (* y y)) 1))",
            "(domain (x -2 2) (y -2 2))",
        )
        .unwrap();
        let c = choice((1, 1));
        let (r, h) = (64, 4.0 / 64.0);
        let (coarse, fine) = (grid_eval(&f, &d, &c, r), grid_eval(&f, &d, &c, 2 * r));
        for i in 0..r {
            let x = coarse.points[i][0];
            for k in [2 * i, 2 * i + 1] {
                if fine.at(&[k]) != coarse.at(&[i]) {
                    assert!((x.abs() - 0.75f64.sqrt()).abs() <= 2.0 * h, "{x}");
                }
            }
            // away from the boundary the verdict is the analytic one
            if (x.abs() - 0.75f64.sqrt()).abs() > 2.0 * h {
                assert_eq!(coarse.at(&[i]), x.abs() < 0.75f64.sqrt());
            }
        }
    }

    #[test]
    fn exact_fallback_decides_ties() {
        let (f, d) = parse("(= (* 3 x) 1)", "(domain (x 0 1))").unwrap();
        let o = Oracle::new(&d, 2);
        assert!(!o.eval(&f, &QuantifierChoice::new(), &mut [1.0 / 3.0]));
        let (f, _) = parse("(= (* 4 x) 1)", "(domain (x 0 1))").unwrap();
        assert!(o.eval(&f, &QuantifierChoice::new(), &mut [0.25]));
    }

    #[test]
    fn extreme_choices_follow_polarity() {
        let (f, _) = parse(
            "(and (exists :tag 1 :q [1 2] x (> x 0)) (not (forall :tag 2 :q [3 4] y (exists :tag 3 :q [5 6] x (> x y)))))",
            "(domain (x 0 9) (y 0 9))",
        )
        .unwrap();
        let t = extreme_choice(&f, true);
        assert_eq!(t.to_string(), "{1: 1, 2: 3, 3: 6}");
        let fl = extreme_choice(&f, false);
        assert_eq!(fl.to_string(), "{1: 2, 2: 4, 3: 5}");
    }
}
