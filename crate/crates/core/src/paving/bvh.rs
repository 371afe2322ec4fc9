//! Bounding-volume hierarchy over a fixed list of boxes.

use super::IntervalBox;

const LEAF_SIZE: usize = 8;
const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Node {
    bounds: IntervalBox,
    left: u32,
    right: u32,
    start: u32,
    end: u32,
}

#[derive(Clone, Debug)]
pub(crate) struct Bvh {
    nodes: Vec<Node>,
    order: Vec<u32>,
}

impl Bvh {
    pub(crate) fn build(boxes: &[IntervalBox]) -> Bvh {
        let mut bvh = Bvh {
            nodes: Vec::with_capacity(2 * boxes.len() / LEAF_SIZE + 1),
            order: (0..boxes.len() as u32).collect(),
        };
        if !boxes.is_empty() {
            bvh.build_node(boxes, 0, boxes.len());
        }
        bvh
    }

    fn build_node(&mut self, boxes: &[IntervalBox], start: usize, end: usize) -> u32 {
        let slice = &self.order[start..end];
        let bounds = slice[1..]
            .iter()
            .fold(boxes[slice[0] as usize].clone(), |acc, &i| {
                acc.hull(&boxes[i as usize])
            });
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            bounds: bounds.clone(),
            left: NONE,
            right: NONE,
            start: start as u32,
            end: end as u32,
        });
        if end - start <= LEAF_SIZE || bounds.dim() == 0 {
            return id;
        }
        let d = bounds.widest();
        let mid = start + (end - start) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            boxes[a as usize]
                .center(d)
                .total_cmp(&boxes[b as usize].center(d))
        });
        let left = self.build_node(boxes, start, mid);
        let right = self.build_node(boxes, mid, end);
        let node = &mut self.nodes[id as usize];
        node.left = left;
        node.right = right;
        id
    }

    /// Indices of boxes sharing positive volume with `query`, ascending.
    pub(crate) fn overlapping(&self, boxes: &[IntervalBox], query: &IntervalBox) -> Vec<usize> {
        let mut out = Vec::new();
        self.walk(
            |b| b.overlaps(query),
            |i| {
                if boxes[i].overlaps(query) {
                    out.push(i)
                }
            },
        );
        out.sort_unstable();
        out
    }

    /// Whether some box contains `point` (boxes are closed).
    pub(crate) fn contains_point(&self, boxes: &[IntervalBox], point: &[f64]) -> bool {
        let found = std::cell::Cell::new(false);
        self.walk(
            |b| !found.get() && b.contains_point(point),
            |i| {
                if boxes[i].contains_point(point) {
                    found.set(true)
                }
            },
        );
        found.get()
    }

    fn walk(&self, mut descend: impl FnMut(&IntervalBox) -> bool, mut visit: impl FnMut(usize)) {
        if self.nodes.is_empty() {
            return;
        }
        let mut stack = vec![0u32];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id as usize];
            if !descend(&node.bounds) {
                continue;
            }
            if node.left == NONE {
                for &i in &self.order[node.start as usize..node.end as usize] {
                    visit(i as usize);
                }
            } else {
                stack.push(node.right);
                stack.push(node.left);
            }
        }
    }
}
