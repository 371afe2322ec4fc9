//! Closed real intervals with outward-rounded `f64` endpoints.
//!
//! Every operation returns an interval containing the exact real result. The
//! hardware rounding mode is never touched: each endpoint is computed
//! round-to-nearest and then nudged one ulp outward only when an error-free
//! transformation (TwoSum for sums, FMA for products) shows the rounded value
//! is on the wrong side of the exact one. Exact results therefore stay exact,
//! and evaluation is reentrant.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::formula::{Domain, Term};

/// Products smaller than this may have lost bits to underflow, so the FMA
/// residual is no longer exact.
const TINY: f64 = 1.0e-290;

/// Closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// # Panics
    /// If `lo > hi` or either bound is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "invalid interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub const fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Tightest `f64` interval containing the rational `r`.
    pub fn from_rational(r: &BigRational) -> Self {
        let approx = r.to_f64().unwrap_or(f64::NAN);
        if approx.is_nan() {
            return if r.is_zero() {
                Interval::point(0.0)
            } else {
                Interval::new(f64::NEG_INFINITY, f64::INFINITY)
            };
        }
        match BigRational::from_float(approx) {
            Some(exact) if exact == *r => Interval::point(approx),
            Some(exact) if exact < *r => Interval::new(approx, approx.next_up()),
            Some(_) => Interval::new(approx.next_down(), approx),
            // `approx` is infinite: the rational overflows f64.
            None if approx > 0.0 => Interval::new(f64::MAX, f64::INFINITY),
            None => Interval::new(f64::NEG_INFINITY, f64::MIN),
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Outward-rounded enclosure of the width.
    pub fn width_enclosure(&self) -> Interval {
        Interval::point(self.hi) - Interval::point(self.lo)
    }

    pub fn midpoint(&self) -> f64 {
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `self ⊆ other`.
    pub fn is_subset(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// True if the two intervals share a sub-interval of positive length.
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return if s == f64::INFINITY && a.is_finite() && b.is_finite() {
            f64::MAX
        } else {
            s
        };
    }
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    if err < 0.0 {
        s.next_down()
    } else {
        s
    }
}

fn add_up(a: f64, b: f64) -> f64 {
    -add_down(-a, -b)
}

fn mul_down(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if !p.is_finite() {
        return if p == f64::INFINITY && a.is_finite() && b.is_finite() {
            f64::MAX
        } else {
            p
        };
    }
    if p.abs() < TINY {
        return p.next_down();
    }
    if a.mul_add(b, -p) < 0.0 {
        p.next_down()
    } else {
        p
    }
}

fn mul_up(a: f64, b: f64) -> f64 {
    -mul_down(-a, b)
}

/// Outward-rounded sum.
pub fn iv_add(a: Interval, b: Interval) -> Interval {
    Interval {
        lo: add_down(a.lo, b.lo),
        hi: add_up(a.hi, b.hi),
    }
}

/// Outward-rounded difference.
pub fn iv_sub(a: Interval, b: Interval) -> Interval {
    iv_add(a, iv_neg(b))
}

/// Outward-rounded product.
pub fn iv_mul(a: Interval, b: Interval) -> Interval {
    let lows = [
        mul_down(a.lo, b.lo),
        mul_down(a.lo, b.hi),
        mul_down(a.hi, b.lo),
        mul_down(a.hi, b.hi),
    ];
    let highs = [
        mul_up(a.lo, b.lo),
        mul_up(a.lo, b.hi),
        mul_up(a.hi, b.lo),
        mul_up(a.hi, b.hi),
    ];
    Interval {
        lo: lows.into_iter().fold(f64::INFINITY, f64::min),
        hi: highs.into_iter().fold(f64::NEG_INFINITY, f64::max),
    }
}

pub fn iv_neg(a: Interval) -> Interval {
    Interval {
        lo: -a.hi,
        hi: -a.lo,
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        iv_add(self, rhs)
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        iv_sub(self, rhs)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        iv_mul(self, rhs)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        iv_neg(self)
    }
}

/// A term with variables resolved to domain positions and constants
/// pre-converted to enclosing intervals.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Interval),
    Var(usize),
    Add(Vec<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Vec<Expr>),
    Neg(Box<Expr>),
}

impl Expr {
    /// Resolves `term` against `domain`. Returns the first undeclared
    /// variable name on failure.
    pub fn compile(term: &Term, domain: &Domain) -> Result<Expr, String> {
        Ok(match term {
            Term::Const(c) => Expr::Const(Interval::from_rational(c)),
            Term::Var(name) => Expr::Var(domain.index_of(name).ok_or_else(|| name.clone())?),
            Term::Add(ts) => Expr::Add(
                ts.iter()
                    .map(|t| Expr::compile(t, domain))
                    .collect::<Result<_, _>>()?,
            ),
            Term::Sub(a, b) => Expr::Sub(
                Box::new(Expr::compile(a, domain)?),
                Box::new(Expr::compile(b, domain)?),
            ),
            Term::Mul(ts) => Expr::Mul(
                ts.iter()
                    .map(|t| Expr::compile(t, domain))
                    .collect::<Result<_, _>>()?,
            ),
            Term::Neg(a) => Expr::Neg(Box::new(Expr::compile(a, domain)?)),
        })
    }

    /// Natural interval extension: `sides[i]` bounds variable `i`.
    pub fn eval(&self, sides: &[Interval]) -> Interval {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => sides[*i],
            Expr::Add(ts) => ts
                .iter()
                .map(|t| t.eval(sides))
                .reduce(iv_add)
                .unwrap_or(Interval::point(0.0)),
            Expr::Sub(a, b) => iv_sub(a.eval(sides), b.eval(sides)),
            Expr::Mul(ts) => ts
                .iter()
                .map(|t| t.eval(sides))
                .reduce(iv_mul)
                .unwrap_or(Interval::point(1.0)),
            Expr::Neg(a) => iv_neg(a.eval(sides)),
        }
    }

    /// Variable positions occurring in the expression, ascending.
    pub fn variables(&self) -> Vec<usize> {
        fn walk(e: &Expr, out: &mut Vec<usize>) {
            match e {
                Expr::Const(_) => {}
                Expr::Var(i) => out.push(*i),
                Expr::Add(ts) | Expr::Mul(ts) => ts.iter().for_each(|t| walk(t, out)),
                Expr::Sub(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Expr::Neg(a) => walk(a, out),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Renumbers variables through `map` (old position -> new position).
    pub fn remap(&self, map: &[Option<usize>]) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(i) => Expr::Var(map[*i].expect("variable missing from remap table")),
            Expr::Add(ts) => Expr::Add(ts.iter().map(|t| t.remap(map)).collect()),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.remap(map)), Box::new(b.remap(map))),
            Expr::Mul(ts) => Expr::Mul(ts.iter().map(|t| t.remap(map)).collect()),
            Expr::Neg(a) => Expr::Neg(Box::new(a.remap(map))),
        }
    }
}

/// Encloses the range of `t` over `sides` (one interval per domain variable,
/// in domain order).
///
/// # Panics
/// If `t` mentions a variable not declared in `domain`.
pub fn eval_term(t: &Term, domain: &Domain, sides: &[Interval]) -> Interval {
    Expr::compile(t, domain)
        .unwrap_or_else(|name| panic!("undeclared variable `{name}`"))
        .eval(sides)
}

/// Exact rational value of an `f64`, used by tests that need an exact
/// reference.
pub fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi)
    }

    #[test]
    fn affine_example_is_tight() {
        let x = iv(2.0, 3.0);
        let r = x * Interval::point(2.0) + Interval::point(1.0);
        assert_eq!(r, iv(5.0, 7.0));
    }

    #[test]
    fn additive_identity() {
        let a = iv(-0.3, 1.7);
        assert_eq!(Interval::point(0.0) + a, a);
    }

    #[test]
    fn straddling_product_matches_endpoint_enumeration() {
        let a = iv(-1.0, 2.0);
        let ends = [-1.0f64, 2.0];
        let products: Vec<f64> = ends
            .iter()
            .flat_map(|x| ends.iter().map(move |y| x * y))
            .collect();
        let lo = products.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = products.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(a * a, iv(lo, hi));
        assert_eq!(a * a, iv(-2.0, 4.0));
    }

    #[test]
    fn inexact_sum_is_widened_outward() {
        let r = Interval::point(0.1) + Interval::point(0.2);
        let exact_sum = exact(0.1) + exact(0.2);
        assert!(exact(r.lo) <= exact_sum && exact_sum <= exact(r.hi));
        assert!(r.lo < r.hi);
    }

    #[test]
    fn inexact_product_is_widened_outward() {
        let r = Interval::point(0.1) * Interval::point(3.0);
        let p = exact(0.1) * exact(3.0);
        assert!(exact(r.lo) <= p && p <= exact(r.hi));
    }

    #[test]
    fn rational_enclosure() {
        let third = BigRational::new(1.into(), 3.into());
        let e = Interval::from_rational(&third);
        assert!(exact(e.lo) < third && third < exact(e.hi));
        assert_eq!(e.hi, e.lo.next_up());
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(Interval::from_rational(&half), Interval::point(0.5));
    }

    #[test]
    fn overflow_stays_sound() {
        let big = Interval::point(f64::MAX);
        let s = big + big;
        assert_eq!(s.lo, f64::MAX);
        assert_eq!(s.hi, f64::INFINITY);
    }

    #[test]
    fn underflow_stays_sound() {
        let tiny = Interval::point(1e-200);
        let p = tiny * tiny;
        // exact product 1e-400 is below the smallest subnormal
        assert!(p.lo <= 0.0 && p.hi > 0.0);
    }
}
