//! Finite unions of interior-disjoint axis-aligned boxes.
//!
//! A [`Paving`] lives in an ambient box (its region) over a named list of
//! variables. All set operations keep the boxes interior-disjoint, so the
//! volume of a paving is the sum of its box volumes.

mod arrangement;
mod bvh;

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::formula::Domain;
use crate::interval::Interval;

use bvh::Bvh;

/// Sums with Neumaier's compensated algorithm.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub type Sides = SmallVec<[Interval; 4]>;

/// Axis-aligned closed box, one side per variable.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalBox {
    sides: Sides,
}

impl IntervalBox {
    pub fn new(sides: impl IntoIterator<Item = Interval>) -> IntervalBox {
        IntervalBox {
            sides: sides.into_iter().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[Interval] {
        &self.sides
    }

    pub fn side(&self, d: usize) -> Interval {
        self.sides[d]
    }

    pub fn with_side(&self, d: usize, side: Interval) -> IntervalBox {
        let mut b = self.clone();
        b.sides[d] = side;
        b
    }

    /// Product of side widths (1 for the zero-dimensional box).
    pub fn volume(&self) -> f64 {
        self.sides.iter().map(Interval::width).product()
    }

    pub fn center(&self, d: usize) -> f64 {
        self.sides[d].midpoint()
    }

    pub fn widest(&self) -> usize {
        (0..self.dim())
            .max_by(|&a, &b| {
                self.sides[a]
                    .width()
                    .total_cmp(&self.sides[b].width())
                    .then(b.cmp(&a))
            })
            .unwrap_or(0)
    }

    pub fn contains_point(&self, point: &[f64]) -> bool {
        self.sides.iter().zip(point).all(|(s, &x)| s.contains(x))
    }

    /// True if the boxes share a sub-box of positive volume.
    pub fn overlaps(&self, other: &IntervalBox) -> bool {
        self.sides
            .iter()
            .zip(&other.sides)
            .all(|(a, b)| a.overlaps(b))
    }

    /// Common sub-box, if it has positive volume.
    pub fn intersection(&self, other: &IntervalBox) -> Option<IntervalBox> {
        if !self.overlaps(other) {
            return None;
        }
        Some(IntervalBox::new(
            self.sides
                .iter()
                .zip(&other.sides)
                .map(|(a, b)| a.intersection(b).expect("overlapping sides")),
        ))
    }

    pub fn is_subset(&self, other: &IntervalBox) -> bool {
        self.sides
            .iter()
            .zip(&other.sides)
            .all(|(a, b)| a.is_subset(b))
    }

    pub fn hull(&self, other: &IntervalBox) -> IntervalBox {
        IntervalBox::new(self.sides.iter().zip(&other.sides).map(|(a, b)| a.hull(b)))
    }

    /// Splits at `at` along `d` (which must lie inside that side).
    pub fn split(&self, d: usize, at: f64) -> (IntervalBox, IntervalBox) {
        let s = self.sides[d];
        (
            self.with_side(d, Interval::new(s.lo, at)),
            self.with_side(d, Interval::new(at, s.hi)),
        )
    }

    /// Halves the widest side. Returns `None` when the midpoint cannot be
    /// represented strictly between the endpoints.
    pub fn bisect(&self) -> Option<(IntervalBox, IntervalBox)> {
        let d = self.widest();
        let s = self.sides.get(d)?;
        let m = s.midpoint();
        (s.lo < m && m < s.hi).then(|| self.split(d, m))
    }

    /// The box with side `d` removed.
    pub fn without(&self, d: usize) -> IntervalBox {
        let mut sides = self.sides.clone();
        sides.remove(d);
        IntervalBox { sides }
    }

    fn is_degenerate(&self) -> bool {
        self.sides
            .iter()
            .any(|s| s.lo.partial_cmp(&s.hi) != Some(std::cmp::Ordering::Less))
    }

    fn cmp_lex(&self, other: &IntervalBox) -> std::cmp::Ordering {
        for (a, b) in self.sides.iter().zip(&other.sides) {
            let c = a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi));
            if c.is_ne() {
                return c;
            }
        }
        self.dim().cmp(&other.dim())
    }
}

impl fmt::Display for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sides.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PavingError {
    #[error("pavings live over different variables: {left:?} vs {right:?}")]
    DomainMismatch {
        left: Vec<String>,
        right: Vec<String>,
    },
    #[error("variable `{0}` is not a paving coordinate")]
    UnknownVariable(String),
    #[error("invalid paving JSON: {0}")]
    Json(String),
}

/// One cell of a fiber decomposition: over every point of `base` the set of
/// values of the projected variable inside the paving has measure `length`.
/// `enclosure` is a rigorous interval around that measure.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberCell {
    pub base: IntervalBox,
    pub length: f64,
    pub enclosure: Interval,
}

/// Measurable subset of a box: a finite union of interior-disjoint boxes.
#[derive(Clone, Debug)]
pub struct Paving {
    vars: Vec<String>,
    region: IntervalBox,
    boxes: Vec<IntervalBox>,
    index: OnceLock<Bvh>,
}

impl PartialEq for Paving {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.region == other.region && self.boxes == other.boxes
    }
}

#[derive(Serialize, Deserialize)]
struct PavingJson {
    vars: Vec<String>,
    boxes: Vec<Vec<[f64; 2]>>,
}

impl Paving {
    fn make(vars: Vec<String>, region: IntervalBox, boxes: Vec<IntervalBox>) -> Paving {
        Paving {
            vars,
            region,
            boxes,
            index: OnceLock::new(),
        }
    }

    pub fn empty(vars: Vec<String>, region: IntervalBox) -> Paving {
        assert_eq!(vars.len(), region.dim(), "one side per variable");
        Paving::make(vars, region, Vec::new())
    }

    pub fn full(vars: Vec<String>, region: IntervalBox) -> Paving {
        assert_eq!(vars.len(), region.dim(), "one side per variable");
        let boxes = if region.is_degenerate() {
            Vec::new()
        } else {
            vec![region.clone()]
        };
        Paving::make(vars, region, boxes)
    }

    /// Variable names and ambient box for the given domain positions.
    pub fn region_of(domain: &Domain, positions: &[usize]) -> (Vec<String>, IntervalBox) {
        let vars = positions
            .iter()
            .map(|&i| domain.vars()[i].name.clone())
            .collect();
        let region = IntervalBox::new(positions.iter().map(|&i| domain.bounds()[i]));
        (vars, region)
    }

    pub fn empty_over(domain: &Domain) -> Paving {
        let all: Vec<usize> = (0..domain.len()).collect();
        let (vars, region) = Paving::region_of(domain, &all);
        Paving::empty(vars, region)
    }

    pub fn full_over(domain: &Domain) -> Paving {
        let all: Vec<usize> = (0..domain.len()).collect();
        let (vars, region) = Paving::region_of(domain, &all);
        Paving::full(vars, region)
    }

    /// Builds a paving from boxes already known to be interior-disjoint.
    /// Boxes are clipped to the region and degenerate pieces dropped.
    pub fn from_disjoint(
        vars: Vec<String>,
        region: IntervalBox,
        boxes: impl IntoIterator<Item = IntervalBox>,
    ) -> Paving {
        assert_eq!(vars.len(), region.dim(), "one side per variable");
        let boxes = boxes
            .into_iter()
            .filter_map(|b| {
                assert_eq!(b.dim(), region.dim(), "box dimension");
                if region.dim() == 0 {
                    Some(b)
                } else {
                    b.intersection(&region)
                }
            })
            .collect();
        Paving::make(vars, region, boxes)
    }

    /// Builds a paving from arbitrary, possibly overlapping, boxes.
    pub fn from_boxes(
        vars: Vec<String>,
        region: IntervalBox,
        boxes: impl IntoIterator<Item = IntervalBox>,
    ) -> Paving {
        let mut acc = Paving::empty(vars.clone(), region.clone());
        for b in boxes {
            let single = Paving::from_disjoint(vars.clone(), region.clone(), [b]);
            acc = acc.union(&single).expect("same variables");
        }
        acc
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn region(&self) -> &IntervalBox {
        &self.region
    }

    pub fn boxes(&self) -> &[IntervalBox] {
        &self.boxes
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// True if the paving covers its whole region.
    pub fn is_full(&self) -> bool {
        self.complement().is_empty()
    }

    pub fn volume(&self) -> f64 {
        neumaier_sum(self.boxes.iter().map(IntervalBox::volume))
    }

    fn bvh(&self) -> &Bvh {
        self.index.get_or_init(|| Bvh::build(&self.boxes))
    }

    /// Whether the closed union of the boxes contains `point` (coordinates
    /// in variable order).
    pub fn contains_point(&self, point: &[f64]) -> bool {
        self.bvh().contains_point(&self.boxes, point)
    }

    /// Boxes with positive-volume overlap with `query`.
    pub fn overlapping(&self, query: &IntervalBox) -> Vec<&IntervalBox> {
        self.bvh()
            .overlapping(&self.boxes, query)
            .into_iter()
            .map(|i| &self.boxes[i])
            .collect()
    }

    fn check(&self, other: &Paving) -> Result<(), PavingError> {
        if self.vars != other.vars || self.region != other.region {
            return Err(PavingError::DomainMismatch {
                left: self.vars.clone(),
                right: other.vars.clone(),
            });
        }
        Ok(())
    }

    fn with_boxes(&self, boxes: Vec<IntervalBox>) -> Paving {
        Paving::make(self.vars.clone(), self.region.clone(), boxes)
    }

    pub fn intersect(&self, other: &Paving) -> Result<Paving, PavingError> {
        self.check(other)?;
        if self.dim() == 0 {
            let full = !self.is_empty() && !other.is_empty();
            return Ok(self.with_boxes(if full { self.boxes.clone() } else { vec![] }));
        }
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let boxes = small
            .boxes
            .par_iter()
            .flat_map_iter(|b| {
                large
                    .overlapping(b)
                    .into_iter()
                    .filter_map(|c| b.intersection(c))
                    .collect::<Vec<_>>()
            })
            .collect();
        Ok(self.with_boxes(boxes))
    }

    /// `self \ other`.
    pub fn difference(&self, other: &Paving) -> Result<Paving, PavingError> {
        self.check(other)?;
        if self.dim() == 0 {
            return Ok(self.with_boxes(if other.is_empty() {
                self.boxes.clone()
            } else {
                vec![]
            }));
        }
        let boxes = self
            .boxes
            .par_iter()
            .flat_map_iter(|b| {
                let holes: Vec<IntervalBox> = other.overlapping(b).into_iter().cloned().collect();
                let mut out = Vec::new();
                arrangement::subtract(b, &holes, &mut out);
                out
            })
            .collect();
        Ok(self.with_boxes(boxes))
    }

    pub fn union(&self, other: &Paving) -> Result<Paving, PavingError> {
        let extra = other.difference(self)?;
        let mut boxes = self.boxes.clone();
        boxes.extend(extra.boxes);
        Ok(self.with_boxes(boxes))
    }

    /// Region minus the paving.
    pub fn complement(&self) -> Paving {
        if self.dim() == 0 {
            return if self.is_empty() {
                Paving::full(self.vars.clone(), self.region.clone())
            } else {
                self.with_boxes(vec![])
            };
        }
        let mut out = Vec::new();
        if !self.region.is_degenerate() {
            arrangement::subtract(&self.region, &self.boxes, &mut out);
        }
        self.with_boxes(out)
    }

    pub fn symmetric_difference(&self, other: &Paving) -> Result<Paving, PavingError> {
        self.difference(other)?.union(&other.difference(self)?)
    }

    /// Cylinder over a larger variable set: every variable of `self` must
    /// appear in `vars` with the same side in `region`.
    pub fn cylinder(&self, vars: &[String], region: &IntervalBox) -> Result<Paving, PavingError> {
        let mut map = Vec::with_capacity(self.dim());
        for (k, v) in self.vars.iter().enumerate() {
            let j = vars
                .iter()
                .position(|w| w == v)
                .filter(|&j| region.side(j) == self.region.side(k))
                .ok_or_else(|| PavingError::DomainMismatch {
                    left: self.vars.clone(),
                    right: vars.to_vec(),
                })?;
            map.push(j);
        }
        let boxes = self.boxes.iter().map(|b| {
            let mut sides = region.sides.clone();
            for (k, &j) in map.iter().enumerate() {
                sides[j] = b.side(k);
            }
            IntervalBox { sides }
        });
        Ok(Paving::make(
            vars.to_vec(),
            region.clone(),
            boxes.filter(|b| !b.is_degenerate()).collect(),
        ))
    }

    /// Decomposes the region of the remaining variables into cells on which
    /// the measure of the fiber along `var` is constant.
    pub fn fiber_lengths(&self, var: &str) -> Result<Vec<FiberCell>, PavingError> {
        let k = self
            .vars
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| PavingError::UnknownVariable(var.to_owned()))?;
        let items = self
            .boxes
            .iter()
            .map(|b| (b.without(k), b.side(k)))
            .collect();
        let mut out = Vec::new();
        arrangement::fibers(self.region.without(k), items, &mut out);
        Ok(out)
    }

    /// Merges face-adjacent boxes that agree on every other side, then sorts
    /// the boxes canonically. The represented set is unchanged.
    pub fn coalesce(&self) -> Paving {
        let mut boxes = self.boxes.clone();
        loop {
            let before = boxes.len();
            for d in 0..self.dim() {
                boxes = merge_along(boxes, d);
            }
            if boxes.len() == before {
                break;
            }
        }
        boxes.sort_by(IntervalBox::cmp_lex);
        self.with_boxes(boxes)
    }

    /// Same set with boxes in canonical order.
    pub fn canonical(&self) -> Paving {
        let mut boxes = self.boxes.clone();
        boxes.sort_by(IntervalBox::cmp_lex);
        self.with_boxes(boxes)
    }

    /// Boxes as `[[lo, hi], ...]` lists, the shape used in JSON output.
    pub fn box_bounds(&self) -> Vec<Vec<[f64; 2]>> {
        self.boxes
            .iter()
            .map(|b| b.sides.iter().map(|s| [s.lo, s.hi]).collect())
            .collect()
    }

    /// `{"vars":[...],"boxes":[[[lo,hi],...],...]}`
    pub fn to_json(&self) -> String {
        serde_json::to_string(&PavingJson {
            vars: self.vars.clone(),
            boxes: self.box_bounds(),
        })
        .expect("paving serializes")
    }

    /// Reads the JSON encoding back; the boxes must be interior-disjoint and
    /// inside `region`.
    pub fn from_json(json: &str, region: IntervalBox) -> Result<Paving, PavingError> {
        let raw: PavingJson =
            serde_json::from_str(json).map_err(|e| PavingError::Json(e.to_string()))?;
        if raw.vars.len() != region.dim() {
            return Err(PavingError::Json(format!(
                "{} variables for a {}-dimensional region",
                raw.vars.len(),
                region.dim()
            )));
        }
        let mut boxes = Vec::with_capacity(raw.boxes.len());
        for b in raw.boxes {
            if b.len() != region.dim()
                || b.iter()
                    .any(|[lo, hi]| lo.is_nan() || hi.is_nan() || lo > hi)
            {
                return Err(PavingError::Json(format!("malformed box {b:?}")));
            }
            let b = IntervalBox::new(b.iter().map(|&[lo, hi]| Interval::new(lo, hi)));
            if !b.is_subset(&region) {
                return Err(PavingError::Json(format!("box {b} leaves the region")));
            }
            boxes.push(b);
        }
        Ok(Paving::from_disjoint(raw.vars, region, boxes))
    }
}

fn side_key(b: &IntervalBox, skip: usize) -> Vec<(u64, u64)> {
    b.sides
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != skip)
        .map(|(_, s)| (s.lo.to_bits(), s.hi.to_bits()))
        .collect()
}

fn merge_along(boxes: Vec<IntervalBox>, d: usize) -> Vec<IntervalBox> {
    let mut groups: Vec<Vec<IntervalBox>> = Vec::new();
    let mut slot: HashMap<Vec<(u64, u64)>, usize> = HashMap::new();
    for b in boxes {
        let key = side_key(&b, d);
        let i = *slot.entry(key).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[i].push(b);
    }
    let mut out = Vec::new();
    for mut group in groups {
        group.sort_by(|a, b| a.side(d).lo.total_cmp(&b.side(d).lo));
        let mut current: Option<IntervalBox> = None;
        for b in group {
            current = Some(match current {
                Some(c) if c.side(d).hi == b.side(d).lo => {
                    c.with_side(d, Interval::new(c.side(d).lo, b.side(d).hi))
                }
                Some(c) => {
                    out.push(c);
                    b
                }
                None => b,
            });
        }
        out.extend(current);
    }
    out
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

    fn xy(lo: f64, hi: f64) -> (Vec<String>, IntervalBox) {
        (vec!["x".into(), "y".into()], b2((lo, hi), (lo, hi)))
    }

    fn paving(region: (f64, f64), boxes: &[IntervalBox]) -> Paving {
        let (vars, r) = xy(region.0, region.1);
        Paving::from_disjoint(vars, r, boxes.iter().cloned())
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(neumaier_sum(v), 2.0);
    }

    #[test]
    fn union_by_inclusion_exclusion() {
        let a = paving((0.0, 2.0), &[b2((0.0, 1.0), (0.0, 1.0))]);
        let b = paving((0.0, 2.0), &[b2((0.5, 1.5), (0.0, 1.0))]);
        let u = a.union(&b).unwrap();
        // 1 + 1 - 0.5
        assert_eq!(u.volume(), 1.5);
        assert_eq!(a.intersect(&b).unwrap().volume(), 0.5);
        assert_eq!(u.coalesce().len(), 1);
    }

    #[test]
    fn full_and_empty_volumes() {
        let (vars, r) = xy(-2.0, 2.0);
        assert_eq!(Paving::full(vars.clone(), r.clone()).volume(), 16.0);
        assert_eq!(Paving::empty(vars, r).volume(), 0.0);
    }

    #[test]
    fn complement_is_an_involution() {
        let a = paving(
            (0.0, 4.0),
            &[b2((0.0, 1.0), (0.5, 3.0)), b2((2.0, 3.5), (1.0, 2.0))],
        );
        let c = a.complement();
        assert_eq!(a.volume() + c.volume(), 16.0);
        let cc = c.complement();
        assert_eq!(cc.volume(), a.volume());
        assert_eq!(cc.symmetric_difference(&a).unwrap().volume(), 0.0);
        assert_eq!(cc.coalesce(), a.coalesce());
    }

    #[test]
    fn intersect_with_full_is_identity() {
        let a = paving((0.0, 4.0), &[b2((0.0, 1.0), (0.5, 3.0))]);
        let (vars, r) = xy(0.0, 4.0);
        let full = Paving::full(vars, r);
        assert_eq!(a.intersect(&full).unwrap().coalesce(), a.coalesce());
    }

    #[test]
    fn mismatched_variables_are_rejected() {
        let a = paving((0.0, 1.0), &[]);
        let b = Paving::empty(vec!["x".into(), "z".into()], b2((0.0, 1.0), (0.0, 1.0)));
        assert!(matches!(
            a.union(&b),
            Err(PavingError::DomainMismatch { .. })
        ));
    }

    #[test]
    fn fiber_of_two_stacked_boxes() {
        let a = Paving::from_disjoint(
            vec!["x".into(), "y".into()],
            b2((0.0, 1.0), (0.0, 4.0)),
            [b2((0.0, 1.0), (0.0, 2.0)), b2((0.0, 1.0), (3.0, 4.0))],
        );
        let cells = a.fiber_lengths("y").unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].length, 3.0);
        assert_eq!(cells[0].enclosure, Interval::point(3.0));
        assert_eq!(cells[0].base, IntervalBox::new([iv(0.0, 1.0)]));
    }

    #[test]
    fn fiber_of_empty_paving_is_zero() {
        let cells = paving((0.0, 1.0), &[]).fiber_lengths("x").unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].length, 0.0);
        assert!(paving((0.0, 1.0), &[]).fiber_lengths("z").is_err());
    }

    #[test]
    fn fubini_on_staircase() {
        let a = paving(
            (0.0, 3.0),
            &[
                b2((0.0, 1.0), (0.0, 3.0)),
                b2((1.0, 2.0), (0.0, 2.0)),
                b2((2.0, 3.0), (1.0, 1.5)),
            ],
        );
        let cells = a.fiber_lengths("y").unwrap();
        let total = neumaier_sum(cells.iter().map(|c| c.base.volume() * c.length));
        assert_eq!(total, a.volume());
        assert_eq!(total, 5.5);
    }

    #[test]
    fn cylinder_extends_missing_variables() {
        let a = Paving::from_disjoint(
            vec!["y".into()],
            IntervalBox::new([iv(0.0, 2.0)]),
            [IntervalBox::new([iv(0.0, 1.0)])],
        );
        let (vars, r) = xy(0.0, 2.0);
        let c = a.cylinder(&vars, &r).unwrap();
        assert_eq!(c.volume(), 2.0);
        assert!(c.contains_point(&[1.7, 0.5]));
        assert!(!c.contains_point(&[1.7, 1.5]));
    }

    #[test]
    fn zero_dimensional_pavings_are_truth_values() {
        let t = Paving::full(vec![], IntervalBox::new([]));
        let f = Paving::empty(vec![], IntervalBox::new([]));
        assert_eq!(t.volume(), 1.0);
        assert!(t.is_full() && f.is_empty());
        assert!(t.intersect(&f).unwrap().is_empty());
        assert!(t.union(&f).unwrap().is_full());
        assert!(f.complement().is_full());
        assert!(t.contains_point(&[]));
        let cells = Paving::from_disjoint(
            vec!["x".into()],
            IntervalBox::new([iv(0.0, 1.0)]),
            [IntervalBox::new([iv(0.0, 0.25)])],
        )
        .fiber_lengths("x")
        .unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].length, 0.25);
    }

    #[test]
    fn json_round_trip() {
        let a = paving((0.0, 4.0), &[b2((0.0, 1.0), (0.5, 3.0))]);
        let text = a.to_json();
        assert_eq!(
            text,
            r#"{"vars":["x","y"],"boxes":[[[0.0,1.0],[0.5,3.0]]]}"#
        );
        let back = Paving::from_json(&text, a.region().clone()).unwrap();
        assert_eq!(back, a);
        assert!(Paving::from_json(
            r#"{"vars":["x","y"],"boxes":[[[0,9],[0,1]]]}"#,
            a.region().clone()
        )
        .is_err());
    }
}
