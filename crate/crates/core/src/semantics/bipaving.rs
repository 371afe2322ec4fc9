//! Pairs of pavings and the operations that propagate them through formulas.

use crate::formula::Annotation;
use crate::interval::Interval;
use crate::paving::{IntervalBox, Paving, PavingError};

/// A lower and an upper paving over the same variables.
///
/// `lower` holds the assignments determined true and the complement of
/// `upper` those determined false. Normally `lower ⊆ upper`; after a
/// projection with favorable thresholds `lower \ upper` may be non-empty and
/// collects assignments that are true under one quantifier choice and false
/// under another.
#[derive(Clone, Debug, PartialEq)]
pub struct BiPaving {
    lower: Paving,
    upper: Paving,
}

/// The four-way split of a region induced by a [`BiPaving`].
#[derive(Clone, Debug)]
pub struct Regions {
    pub true_set: Paving,
    pub false_set: Paving,
    pub unknown: Paving,
    pub ambivalent: Paving,
}

impl BiPaving {
    pub fn new(lower: Paving, upper: Paving) -> Result<BiPaving, PavingError> {
        if lower.vars() != upper.vars() || lower.region() != upper.region() {
            return Err(PavingError::DomainMismatch {
                left: lower.vars().to_vec(),
                right: upper.vars().to_vec(),
            });
        }
        Ok(BiPaving { lower, upper })
    }

    /// Determined true everywhere.
    pub fn full(vars: Vec<String>, region: IntervalBox) -> BiPaving {
        let f = Paving::full(vars, region);
        BiPaving {
            lower: f.clone(),
            upper: f,
        }
    }

    /// Determined false everywhere.
    pub fn empty(vars: Vec<String>, region: IntervalBox) -> BiPaving {
        let e = Paving::empty(vars, region);
        BiPaving {
            lower: e.clone(),
            upper: e,
        }
    }

    /// Nothing determined.
    pub fn unknown(vars: Vec<String>, region: IntervalBox) -> BiPaving {
        BiPaving {
            lower: Paving::empty(vars.clone(), region.clone()),
            upper: Paving::full(vars, region),
        }
    }

    pub fn lower(&self) -> &Paving {
        &self.lower
    }

    pub fn upper(&self) -> &Paving {
        &self.upper
    }

    pub fn vars(&self) -> &[String] {
        self.lower.vars()
    }

    pub fn region(&self) -> &IntervalBox {
        self.lower.region()
    }

    /// Volume of `upper \ lower`.
    pub fn error(&self) -> f64 {
        self.upper
            .difference(&self.lower)
            .expect("bounds share variables")
            .volume()
    }

    pub fn regions(&self) -> Regions {
        let both = |r: Result<Paving, PavingError>| r.expect("bounds share variables").coalesce();
        Regions {
            true_set: both(self.lower.intersect(&self.upper)),
            false_set: both(self.lower.union(&self.upper)).complement().coalesce(),
            unknown: both(self.upper.difference(&self.lower)),
            ambivalent: both(self.lower.difference(&self.upper)),
        }
    }

    pub fn cylinder(&self, vars: &[String], region: &IntervalBox) -> Result<BiPaving, PavingError> {
        Ok(BiPaving {
            lower: self.lower.cylinder(vars, region)?,
            upper: self.upper.cylinder(vars, region)?,
        })
    }

    pub fn coalesce(&self) -> BiPaving {
        BiPaving {
            lower: self.lower.coalesce(),
            upper: self.upper.coalesce(),
        }
    }
}

pub fn bp_error(a: &BiPaving) -> f64 {
    a.error()
}

/// `(complement(upper), complement(lower))`.
pub fn bp_not(a: &BiPaving) -> BiPaving {
    BiPaving {
        lower: a.upper.complement().coalesce(),
        upper: a.lower.complement().coalesce(),
    }
}

pub fn bp_and(a: &BiPaving, b: &BiPaving) -> Result<BiPaving, PavingError> {
    Ok(BiPaving {
        lower: a.lower.intersect(&b.lower)?.coalesce(),
        upper: a.upper.intersect(&b.upper)?.coalesce(),
    })
}

pub fn bp_or(a: &BiPaving, b: &BiPaving) -> Result<BiPaving, PavingError> {
    Ok(BiPaving {
        lower: a.lower.union(&b.lower)?.coalesce(),
        upper: a.upper.union(&b.upper)?.coalesce(),
    })
}

/// Volume thresholds applied by a projection: the lower paving's fibers are
/// compared against `lower`, the upper paving's against `upper`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    pub lower: Interval,
    pub upper: Interval,
}

impl Thresholds {
    /// `(q̲, q̄)`: lower bound true under the choice most favorable to truth,
    /// upper bound false under the choice most favorable to falsity. This
    /// pairing makes the projection convergent.
    pub fn favorable(a: &Annotation) -> Thresholds {
        Thresholds {
            lower: a.lo_enclosure(),
            upper: a.hi_enclosure(),
        }
    }

    /// `(q̄, q̲)`: lower bound true and upper complement false under every
    /// choice in the annotation.
    pub fn robust(a: &Annotation) -> Thresholds {
        Thresholds {
            lower: a.hi_enclosure(),
            upper: a.lo_enclosure(),
        }
    }

    /// A single chosen threshold.
    pub fn fixed(q: Interval) -> Thresholds {
        Thresholds { lower: q, upper: q }
    }
}

/// Existential projection along `var`, returning pavings over the remaining
/// variables. A cell enters the lower result only if its certified lower
/// fiber length exceeds the threshold for certain, and the upper result
/// whenever its upper fiber length might exceed it.
pub fn bp_project(
    a: &BiPaving,
    var: &str,
    thresholds: Thresholds,
) -> Result<BiPaving, PavingError> {
    let select = |p: &Paving, keep: &dyn Fn(Interval) -> bool| -> Result<Paving, PavingError> {
        let k = p
            .vars()
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| PavingError::UnknownVariable(var.to_owned()))?;
        let mut vars = p.vars().to_vec();
        vars.remove(k);
        let cells = p.fiber_lengths(var)?;
        let boxes = cells
            .into_iter()
            .filter(|c| keep(c.enclosure))
            .map(|c| c.base);
        Ok(Paving::from_disjoint(vars, p.region().without(k), boxes).coalesce())
    };
    let t = thresholds;
    Ok(BiPaving {
        lower: select(&a.lower, &|e| e.lo > t.lower.hi)?,
        upper: select(&a.upper, &|e| e.hi > t.upper.lo)?,
    })
}

/// Existential projection with favorable thresholds, extended back to a
/// cylinder over the input's variables (constant along `var`).
pub fn bp_project_exists(
    a: &BiPaving,
    var: &str,
    annotation: &Annotation,
) -> Result<BiPaving, PavingError> {
    bp_project(a, var, Thresholds::favorable(annotation))?.cylinder(a.vars(), a.region())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi)
    }

    fn b2(x: (f64, f64), y: (f64, f64)) -> IntervalBox {
        IntervalBox::new([iv(x.0, x.1), iv(y.0, y.1)])
    }

    fn vars() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    fn square(lo: f64, hi: f64) -> IntervalBox {
        b2((lo, hi), (lo, hi))
    }

    #[test]
    fn error_of_unit_square_is_four() {
        let region = square(-2.0, 2.0);
        let s1 = Paving::from_disjoint(vars(), region.clone(), [square(-1.0, 1.0)]);
        let a = BiPaving::new(Paving::empty(vars(), region), s1).unwrap();
        assert_eq!(bp_error(&a), 4.0);
    }

    #[test]
    fn conjunction_with_unknown_keeps_upper() {
        let region = square(-2.0, 2.0);
        let s1 = Paving::from_disjoint(vars(), region.clone(), [square(-1.0, 1.0)]);
        let a = BiPaving::new(Paving::empty(vars(), region.clone()), s1.clone()).unwrap();
        let b = BiPaving::unknown(vars(), region.clone());
        let c = bp_and(&a, &b).unwrap();
        assert!(c.lower().is_empty());
        assert_eq!(c.upper().coalesce(), s1.coalesce());
        let t = BiPaving::full(vars(), region);
        assert_eq!(bp_and(&a, &t).unwrap(), a.coalesce());
    }

    #[test]
    fn negation_swaps_and_complements() {
        let region = square(0.0, 4.0);
        let lower = Paving::from_disjoint(vars(), region.clone(), [square(1.0, 2.0)]);
        let upper = Paving::from_disjoint(vars(), region.clone(), [square(0.5, 3.0)]);
        let a = BiPaving::new(lower, upper).unwrap();
        let n = bp_not(&a);
        assert_eq!(n.lower().volume(), 16.0 - 6.25);
        assert_eq!(n.upper().volume(), 15.0);
        assert_eq!(bp_error(&n), bp_error(&a));
        assert_eq!(bp_not(&n), a.coalesce());
        let u = BiPaving::unknown(vars(), region);
        assert_eq!(bp_not(&u), u);
    }

    #[test]
    fn constant_fiber_above_both_thresholds() {
        let region = b2((0.0, 1.0), (0.0, 3.0));
        let p = Paving::full(vars(), region.clone());
        let a = BiPaving::new(p.clone(), p).unwrap();
        let out = bp_project_exists(&a, "y", &Annotation::ratio(1, 2, 1)).unwrap();
        assert!(out.lower().is_full());
        assert_eq!(bp_error(&out), 0.0);
        let empty = BiPaving::empty(vars(), region);
        let out = bp_project_exists(&empty, "y", &Annotation::ratio(1, 2, 1)).unwrap();
        assert!(out.upper().is_empty());
    }

    #[test]
    fn threshold_policies_differ_between_the_bounds() {
        // fiber length 1.5 along y for x in [0, 1]; annotation [1, 2]
        let region = b2((0.0, 1.0), (0.0, 3.0));
        let p = Paving::from_disjoint(vars(), region, [b2((0.0, 1.0), (0.0, 1.5))]);
        let a = BiPaving::new(p.clone(), p).unwrap();
        let ann = Annotation::ratio(1, 2, 1);
        let fav = bp_project(&a, "y", Thresholds::favorable(&ann)).unwrap();
        // true for q = 1, false for q = 2
        assert!(fav.lower().is_full() && fav.upper().is_empty());
        let rob = bp_project(&a, "y", Thresholds::robust(&ann)).unwrap();
        assert!(rob.lower().is_empty() && rob.upper().is_full());
        let fixed = bp_project(&a, "y", Thresholds::fixed(Interval::point(1.25))).unwrap();
        assert!(fixed.lower().is_full() && fixed.upper().is_full());
    }

    #[test]
    fn regions_partition_the_region() {
        let region = square(0.0, 4.0);
        let lower = Paving::from_disjoint(vars(), region.clone(), [square(0.0, 2.0)]);
        let upper = Paving::from_disjoint(vars(), region.clone(), [square(1.0, 3.0)]);
        let a = BiPaving::new(lower, upper).unwrap();
        let r = a.regions();
        assert_eq!(r.true_set.volume(), 1.0);
        assert_eq!(r.ambivalent.volume(), 3.0);
        assert_eq!(r.unknown.volume(), 3.0);
        assert_eq!(r.false_set.volume(), 9.0);
        assert_eq!(a.error(), 3.0);
    }
}
