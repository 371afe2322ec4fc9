//! Branch-and-bound solving of a single atom by interval evaluation.
//!
//! An atom only constrains its own variables, so it is solved over those
//! alone; the caller extends the result to a cylinder where needed.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::formula::{Atom, Domain, Relation};
use crate::interval::{Expr, Interval};
use crate::paving::{neumaier_sum, IntervalBox, Paving};
use crate::semantics::BiPaving;

pub const DEFAULT_MAX_BOXES: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    True,
    False,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum AtomicError {
    #[error(
        "budget unreachable for `{atom}`: {boxes} boxes leave unknown volume {unknown} (budget {budget})"
    )]
    BudgetUnreachable {
        atom: String,
        boxes: usize,
        unknown: f64,
        budget: f64,
    },
}

/// Decides `g rel 0` over a box from an enclosure `g` of `lhs - rhs`.
pub fn classify_enclosure(g: Interval, rel: Relation) -> Classification {
    use Classification::*;
    let (t, f) = match rel {
        Relation::Le => (g.hi <= 0.0, g.lo > 0.0),
        Relation::Lt => (g.hi < 0.0, g.lo >= 0.0),
        Relation::Ge => (g.lo >= 0.0, g.hi < 0.0),
        Relation::Gt => (g.lo > 0.0, g.hi <= 0.0),
        Relation::Eq => (g.lo == 0.0 && g.hi == 0.0, g.lo > 0.0 || g.hi < 0.0),
    };
    match (t, f) {
        (true, _) => True,
        (_, true) => False,
        _ => Unknown,
    }
}

/// Classifies an atom over a box given in domain order.
///
/// # Panics
/// If the atom mentions a variable missing from `domain`.
pub fn classify_box(atom: &Atom, domain: &Domain, b: &IntervalBox) -> Classification {
    let g = Expr::compile(&atom.difference(), domain)
        .unwrap_or_else(|name| panic!("undeclared variable `{name}`"))
        .eval(b.sides());
    classify_enclosure(g, atom.rel)
}

/// Unknown box waiting to be bisected; larger volume first, then older.
struct Pending {
    volume: f64,
    seq: u64,
    cell: IntervalBox,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        self.volume
            .total_cmp(&other.volume)
            .then(other.seq.cmp(&self.seq))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AtomicSolver {
    pub max_boxes: usize,
}

impl Default for AtomicSolver {
    fn default() -> Self {
        AtomicSolver {
            max_boxes: DEFAULT_MAX_BOXES,
        }
    }
}

/// Atom compiled against its own variables.
#[derive(Clone, Debug)]
pub struct LocalAtom {
    /// Domain positions of the atom's variables, ascending.
    pub positions: Vec<usize>,
    pub vars: Vec<String>,
    pub region: IntervalBox,
    /// Product of the domain widths of all other variables.
    pub other_volume: f64,
    expr: Expr,
    rel: Relation,
    text: String,
}

impl LocalAtom {
    pub fn new(atom: &Atom, domain: &Domain) -> Result<LocalAtom, String> {
        let expr = Expr::compile(&atom.difference(), domain)?;
        let positions = expr.variables();
        let mut map = vec![None; domain.len()];
        for (k, &p) in positions.iter().enumerate() {
            map[p] = Some(k);
        }
        let (vars, region) = Paving::region_of(domain, &positions);
        let other_volume = (0..domain.len())
            .filter(|i| !positions.contains(i))
            .map(|i| domain.width(i))
            .product();
        Ok(LocalAtom {
            positions,
            vars,
            region,
            other_volume,
            expr: expr.remap(&map),
            rel: atom.rel,
            text: atom.to_string(),
        })
    }

    pub fn classify(&self, b: &IntervalBox) -> Classification {
        classify_enclosure(self.expr.eval(b.sides()), self.rel)
    }
}

impl AtomicSolver {
    pub fn new(max_boxes: usize) -> AtomicSolver {
        AtomicSolver { max_boxes }
    }

    /// Solves over the atom's own variables until the unknown volume there is
    /// below `budget`. Bisection order depends only on the atom, so a
    /// smaller budget continues the same refinement further.
    pub fn solve_local(&self, atom: &LocalAtom, budget: f64) -> Result<BiPaving, AtomicError> {
        let mut lower = Vec::new();
        let mut stuck = Vec::new();
        let mut heap = BinaryHeap::new();
        let mut seq = 0u64;
        let mut unknown = 0.0;
        let mut push = |cell: IntervalBox,
                        heap: &mut BinaryHeap<Pending>,
                        lower: &mut Vec<IntervalBox>,
                        unknown: &mut f64| {
            match atom.classify(&cell) {
                Classification::True => lower.push(cell),
                Classification::False => {}
                Classification::Unknown => {
                    let volume = cell.volume();
                    *unknown += volume;
                    seq += 1;
                    heap.push(Pending { volume, seq, cell });
                }
            }
        };
        push(atom.region.clone(), &mut heap, &mut lower, &mut unknown);
        loop {
            if unknown < budget {
                // the running total drifts; confirm with a fresh sum
                unknown = neumaier_sum(
                    heap.iter()
                        .map(|p: &Pending| p.volume)
                        .chain(stuck.iter().map(IntervalBox::volume)),
                );
                if unknown < budget {
                    break;
                }
            }
            let count = lower.len() + heap.len() + stuck.len();
            let Some(Pending { volume, cell, .. }) = heap.pop() else {
                return Err(self.unreachable(atom, count, unknown, budget));
            };
            if count >= self.max_boxes {
                return Err(self.unreachable(atom, count, unknown, budget));
            }
            match cell.bisect() {
                Some((a, b)) => {
                    unknown -= volume;
                    push(a, &mut heap, &mut lower, &mut unknown);
                    push(b, &mut heap, &mut lower, &mut unknown);
                }
                None => stuck.push(cell),
            }
        }
        let unknown_boxes = heap.into_iter().map(|p| p.cell).chain(stuck);
        let lower_paving = Paving::from_disjoint(atom.vars.clone(), atom.region.clone(), lower);
        let upper = Paving::from_disjoint(
            atom.vars.clone(),
            atom.region.clone(),
            lower_paving.boxes().iter().cloned().chain(unknown_boxes),
        );
        Ok(BiPaving::new(lower_paving.coalesce(), upper.coalesce()).expect("same variables"))
    }

    fn unreachable(
        &self,
        atom: &LocalAtom,
        boxes: usize,
        unknown: f64,
        budget: f64,
    ) -> AtomicError {
        AtomicError::BudgetUnreachable {
            atom: atom.text.clone(),
            boxes,
            unknown,
            budget,
        }
    }

    /// Solves `atom` over the whole domain so that the unknown volume there is
    /// below `budget`.
    pub fn solve(
        &self,
        atom: &Atom,
        domain: &Domain,
        budget: f64,
    ) -> Result<BiPaving, AtomicError> {
        let local = LocalAtom::new(atom, domain)
            .unwrap_or_else(|name| panic!("undeclared variable `{name}`"));
        let bp = self.solve_local(&local, budget / local.other_volume)?;
        let all: Vec<usize> = (0..domain.len()).collect();
        let (vars, region) = Paving::region_of(domain, &all);
        Ok(bp
            .cylinder(&vars, &region)
            .expect("atom variables are declared"))
    }
}

/// [`AtomicSolver::solve`] with the default box cap.
pub fn solve_atomic(atom: &Atom, domain: &Domain, budget: f64) -> Result<BiPaving, AtomicError> {
    AtomicSolver::default().solve(atom, domain, budget)
}
