//! Adaptive arrangements: a region is split along the median of the box faces
//! that cut through it, until every remaining box either misses a cell or
//! covers it completely.

use super::{neumaier_sum, FiberCell, IntervalBox};
use crate::interval::{iv_add, Interval};

/// Appends to `out` disjoint boxes covering `region` minus the union of
/// `holes`. The holes may overlap one another.
pub(crate) fn subtract(region: &IntervalBox, holes: &[IntervalBox], out: &mut Vec<IntervalBox>) {
    let clipped: Vec<IntervalBox> = holes
        .iter()
        .filter_map(|h| h.intersection(region))
        .collect();
    subtract_clipped(region.clone(), clipped, out);
}

fn subtract_clipped(region: IntervalBox, holes: Vec<IntervalBox>, out: &mut Vec<IntervalBox>) {
    if holes.is_empty() {
        out.push(region);
        return;
    }
    if holes.iter().any(|h| h.sides() == region.sides()) {
        return;
    }
    if holes.len() == 1 {
        slabs(region, &holes[0], out);
        return;
    }
    let Some((d, at)) = choose_split(&region, holes.iter()) else {
        // every hole spans the region in every coordinate
        return;
    };
    let (left, right) = region.split(d, at);
    let (mut lh, mut rh) = (Vec::new(), Vec::new());
    for h in holes {
        if let Some(c) = h.intersection(&left) {
            lh.push(c);
        }
        if let Some(c) = h.intersection(&right) {
            rh.push(c);
        }
    }
    subtract_clipped(left, lh, out);
    subtract_clipped(right, rh, out);
}

/// Region minus one box inside it, as at most `2 * dim` slabs.
fn slabs(mut region: IntervalBox, hole: &IntervalBox, out: &mut Vec<IntervalBox>) {
    for d in 0..region.dim() {
        let (r, h) = (region.side(d), hole.side(d));
        if h.lo > r.lo {
            out.push(region.with_side(d, Interval::new(r.lo, h.lo)));
        }
        if h.hi < r.hi {
            out.push(region.with_side(d, Interval::new(h.hi, r.hi)));
        }
        region = region.with_side(d, h);
    }
}

/// Dimension with the most faces strictly inside `region`, split at the
/// median of those faces. `None` if no face cuts the region.
pub(crate) fn choose_split<'a>(
    region: &IntervalBox,
    boxes: impl Iterator<Item = &'a IntervalBox> + Clone,
) -> Option<(usize, f64)> {
    let mut best: Option<(usize, Vec<f64>)> = None;
    for d in 0..region.dim() {
        let r = region.side(d);
        let mut faces: Vec<f64> = boxes
            .clone()
            .flat_map(|b| [b.side(d).lo, b.side(d).hi])
            .filter(|&c| r.lo < c && c < r.hi)
            .collect();
        if faces.len() > best.as_ref().map_or(0, |(_, f)| f.len()) {
            faces.sort_unstable_by(f64::total_cmp);
            best = Some((d, faces));
        }
    }
    best.map(|(d, faces)| (d, faces[faces.len() / 2]))
}

/// Fiber cells over `region` for boxes given as (base box, extent along the
/// projected variable). Each output cell is covered entirely by, or disjoint
/// from, every input base box, so the fiber length is constant on it.
pub(crate) fn fibers(
    region: IntervalBox,
    items: Vec<(IntervalBox, Interval)>,
    out: &mut Vec<FiberCell>,
) {
    let items: Vec<(IntervalBox, Interval)> = items
        .into_iter()
        .filter_map(|(b, e)| b.intersection(&region).map(|c| (c, e)))
        .collect();
    match choose_split(&region, items.iter().map(|(b, _)| b)) {
        None => {
            let length = neumaier_sum(items.iter().map(|(_, e)| e.width()));
            let enclosure = items
                .iter()
                .map(|(_, e)| e.width_enclosure())
                .fold(Interval::point(0.0), iv_add);
            out.push(FiberCell {
                base: region,
                length,
                enclosure,
            });
        }
        Some((d, at)) => {
            let (left, right) = region.split(d, at);
            fibers(left, items.clone(), out);
            fibers(right, items, out);
        }
    }
}
