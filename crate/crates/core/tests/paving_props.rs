use aqsolve_core::{Interval, IntervalBox, Paving};
use proptest::prelude::*;

const SIDE: i32 = 8;

fn region() -> IntervalBox {
    IntervalBox::new([
        Interval::new(0.0, SIDE as f64),
        Interval::new(0.0, SIDE as f64),
    ])
}

fn vars() -> Vec<String> {
    vec!["x".into(), "y".into()]
}

type Rect = (i32, i32, i32, i32);

fn rect() -> impl Strategy<Value = Rect> {
    (0..SIDE, 0..SIDE, 1..=SIDE, 1..=SIDE)
        .prop_map(|(x, y, w, h)| (x, y, (x + w).min(SIDE), (y + h).min(SIDE)))
}

fn paving(rects: &[Rect]) -> Paving {
    Paving::from_boxes(
        vars(),
        region(),
        rects.iter().map(|&(x0, y0, x1, y1)| {
            IntervalBox::new([
                Interval::new(x0 as f64, x1 as f64),
                Interval::new(y0 as f64, y1 as f64),
            ])
        }),
    )
}

/// Area by counting covered unit cells.
fn cell_area(rects: &[Rect]) -> f64 {
    let mut n = 0;
    for i in 0..SIDE {
        for j in 0..SIDE {
            if rects
                .iter()
                .any(|&(x0, y0, x1, y1)| x0 <= i && i < x1 && y0 <= j && j < y1)
            {
                n += 1;
            }
        }
    }
    n as f64
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs() + b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn union_volume_matches_cell_count(a in prop::collection::vec(rect(), 0..6)) {
        let p = paving(&a);
        prop_assert!(near(p.volume(), cell_area(&a)));
        let boxes = p.boxes();
        for (i, b) in boxes.iter().enumerate() {
            for c in &boxes[i + 1..] {
                prop_assert!(!b.overlaps(c));
            }
        }
    }

    #[test]
    fn volume_is_additive(a in prop::collection::vec(rect(), 0..5), b in prop::collection::vec(rect(), 0..5)) {
        let (p, q) = (paving(&a), paving(&b));
        let u = p.union(&q).unwrap();
        let i = p.intersect(&q).unwrap();
        prop_assert!(near(u.volume() + i.volume(), p.volume() + q.volume()));
        let d = p.difference(&q).unwrap();
        prop_assert!(near(d.volume() + i.volume(), p.volume()));
    }

    #[test]
    fn complement_laws(a in prop::collection::vec(rect(), 0..6)) {
        let p = paving(&a);
        let c = p.complement();
        prop_assert!(near(p.volume() + c.volume(), region().volume()));
        prop_assert_eq!(p.intersect(&c).unwrap().volume(), 0.0);
        prop_assert_eq!(c.complement().symmetric_difference(&p).unwrap().volume(), 0.0);
    }

    #[test]
    fn fibers_integrate_to_volume(a in prop::collection::vec(rect(), 0..6), along_x in any::<bool>()) {
        let p = paving(&a);
        let var = if along_x { "x" } else { "y" };
        let cells = p.fiber_lengths(var).unwrap();
        let total: f64 = cells.iter().map(|c| c.base.volume() * c.length).sum();
        prop_assert!(near(total, p.volume()));
        for c in &cells {
            prop_assert!(c.enclosure.lo <= c.length && c.length <= c.enclosure.hi);
        }
        let base: f64 = cells.iter().map(|c| c.base.volume()).sum();
        prop_assert!(near(base, SIDE as f64));
    }

    #[test]
    fn membership_follows_set_operations(
        a in prop::collection::vec(rect(), 0..5),
        b in prop::collection::vec(rect(), 0..5),
        pts in prop::collection::vec((0.0f64..8.0, 0.0f64..8.0), 40),
    ) {
        let (p, q) = (paving(&a), paving(&b));
        let u = p.union(&q).unwrap();
        let i = p.intersect(&q).unwrap();
        let d = p.difference(&q).unwrap();
        let inside = |r: &[Rect], x: f64, y: f64| r.iter().any(|&(x0, y0, x1, y1)| {
            (x0 as f64) < x && x < x1 as f64 && (y0 as f64) < y && y < y1 as f64
        });
        for (x, y) in pts {
            // skip points on the integer grid lines
            if x.fract() == 0.0 || y.fract() == 0.0 {
                continue;
            }
            let (ia, ib) = (inside(&a, x, y), inside(&b, x, y));
            prop_assert_eq!(p.contains_point(&[x, y]), ia);
            prop_assert_eq!(u.contains_point(&[x, y]), ia || ib);
            prop_assert_eq!(i.contains_point(&[x, y]), ia && ib);
            prop_assert_eq!(d.contains_point(&[x, y]), ia && !ib);
        }
    }

    #[test]
    fn coalesce_and_json_preserve_the_set(a in prop::collection::vec(rect(), 0..6)) {
        let p = paving(&a);
        let c = p.coalesce();
        prop_assert!(c.len() <= p.len());
        prop_assert_eq!(c.symmetric_difference(&p).unwrap().volume(), 0.0);
        let back = Paving::from_json(&p.to_json(), region()).unwrap();
        prop_assert_eq!(back, p);
    }
}
