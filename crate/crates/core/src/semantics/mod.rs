//! Propagation of bipavings through formulas, error budgeting and the
//! top-level solver.

mod bipaving;
mod sentence;

use rayon::prelude::*;
use thiserror::Error;

use crate::atomic::{AtomicError, AtomicSolver, LocalAtom, DEFAULT_MAX_BOXES};
use crate::formula::{is_free, Domain, Formula, FormulaError, QuantKind, Quantifier, Tag};
use crate::paving::{Paving, PavingError};

pub use bipaving::{
    bp_and, bp_error, bp_not, bp_or, bp_project, bp_project_exists, BiPaving, Regions, Thresholds,
};
pub use sentence::{
    choice_grid, evaluate_sentence, ChoiceOutcome, QuantifierChoice, SentenceConfig,
    SentenceEvaluator, SentenceReport, Verdict,
};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SolveError {
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("formula is not free: tags {0:?} are shared by non-deterministic quantifiers")]
    NotFree(Vec<u32>),
    #[error("budget collapse: quantifier tag {tag} has zero-width annotation {annotation}; exact volume thresholds cannot be approximated")]
    BudgetCollapse { tag: Tag, annotation: String },
    #[error(transparent)]
    BudgetUnreachable(#[from] AtomicError),
    #[error("error {error} still not below {epsilon} after {rounds} refinement rounds")]
    Unconverged {
        error: f64,
        epsilon: f64,
        rounds: u32,
    },
    #[error("expected a sentence, but {0:?} occur free")]
    NotASentence(Vec<String>),
    #[error(transparent)]
    Paving(#[from] PavingError),
}

impl SolveError {
    /// Whether the failure is about the requested precision rather than the
    /// input itself.
    pub fn is_budget_failure(&self) -> bool {
        matches!(
            self,
            SolveError::BudgetCollapse { .. }
                | SolveError::BudgetUnreachable(_)
                | SolveError::Unconverged { .. }
        )
    }
}

/// Per-atom error budgets, in formula pre-order, measured over the whole
/// domain box.
///
/// The root receives `epsilon`; negation passes its budget on; each side of
/// a conjunction or disjunction gets half; a quantifier over `v` with
/// annotation width `w` scales by `w / L_v` where `L_v` is the width of `v`.
pub fn budget(f: &Formula, epsilon: f64, domain: &Domain) -> Result<Vec<f64>, SolveError> {
    fn walk(f: &Formula, b: f64, domain: &Domain, out: &mut Vec<f64>) -> Result<(), SolveError> {
        match f {
            Formula::Atom(_) => out.push(b),
            Formula::Not(a) => walk(a, b, domain, out)?,
            Formula::And(l, r) | Formula::Or(l, r) => {
                walk(l, b / 2.0, domain, out)?;
                walk(r, b / 2.0, domain, out)?;
            }
            Formula::Quant(q) => {
                let w = annotation_width(q)?;
                let i =
                    domain
                        .index_of(&q.var)
                        .ok_or_else(|| FormulaError::UndeclaredVariable {
                            location: None,
                            name: q.var.clone(),
                        })?;
                walk(&q.body, b * w / domain.width(i), domain, out)?;
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(f, epsilon, domain, &mut out)?;
    Ok(out)
}

pub(crate) fn annotation_width(q: &Quantifier) -> Result<f64, SolveError> {
    let w = q.annotation.hi_enclosure().lo - q.annotation.lo_enclosure().hi;
    if q.annotation.is_deterministic() || w <= 0.0 {
        return Err(SolveError::BudgetCollapse {
            tag: q.tag,
            annotation: q.annotation.to_string(),
        });
    }
    Ok(w)
}

/// How quantifier thresholds are picked during propagation.
#[derive(Clone, Copy, Debug)]
pub enum ThresholdPolicy<'a> {
    /// Lower bound under `q̲`, upper bound under `q̄`: determined true means
    /// true for some choice. Convergent.
    Favorable,
    /// Lower bound under `q̄`, upper bound under `q̲`: determined true or false
    /// under every choice. Not convergent for fibers inside the annotation.
    Robust,
    /// One threshold per tag.
    Fixed(&'a QuantifierChoice),
}

impl ThresholdPolicy<'_> {
    fn thresholds(&self, q: &Quantifier) -> Thresholds {
        match self {
            ThresholdPolicy::Favorable => Thresholds::favorable(&q.annotation),
            ThresholdPolicy::Robust => Thresholds::robust(&q.annotation),
            ThresholdPolicy::Fixed(choice) => Thresholds::fixed(choice.enclosure(q)),
        }
    }
}

/// Atoms of a formula compiled against a domain, in pre-order.
pub(crate) struct CompiledAtoms {
    pub(crate) atoms: Vec<LocalAtom>,
}

impl CompiledAtoms {
    pub(crate) fn new(f: &Formula, domain: &Domain) -> Result<CompiledAtoms, SolveError> {
        let atoms = f
            .atoms()
            .into_iter()
            .map(|a| {
                LocalAtom::new(a, domain).map_err(|name| {
                    SolveError::Formula(FormulaError::UndeclaredVariable {
                        location: None,
                        name,
                    })
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(CompiledAtoms { atoms })
    }

    /// Solves every atom; `budgets` are whole-domain budgets.
    pub(crate) fn solve(
        &self,
        solver: &AtomicSolver,
        budgets: &[f64],
    ) -> Result<Vec<BiPaving>, AtomicError> {
        self.atoms
            .par_iter()
            .zip(budgets)
            .map(|(a, &b)| solver.solve_local(a, b / a.other_volume))
            .collect()
    }
}

/// Bottom-up propagation of solved atoms through `f`. Every intermediate
/// result lives over the domain positions it depends on.
pub(crate) fn propagate(
    f: &Formula,
    domain: &Domain,
    compiled: &CompiledAtoms,
    solved: &[BiPaving],
    policy: ThresholdPolicy<'_>,
) -> Result<(Vec<usize>, BiPaving), SolveError> {
    let mut next = 0;
    walk(f, domain, compiled, solved, policy, &mut next)
}

fn align(
    domain: &Domain,
    (pa, a): (Vec<usize>, BiPaving),
    (pb, b): (Vec<usize>, BiPaving),
) -> Result<(Vec<usize>, BiPaving, BiPaving), PavingError> {
    let mut positions = pa.clone();
    positions.extend(pb);
    positions.sort_unstable();
    positions.dedup();
    let (vars, region) = Paving::region_of(domain, &positions);
    let a = a.cylinder(&vars, &region)?;
    let b = b.cylinder(&vars, &region)?;
    Ok((positions, a, b))
}

fn walk(
    f: &Formula,
    domain: &Domain,
    compiled: &CompiledAtoms,
    solved: &[BiPaving],
    policy: ThresholdPolicy<'_>,
    next: &mut usize,
) -> Result<(Vec<usize>, BiPaving), SolveError> {
    Ok(match f {
        Formula::Atom(_) => {
            let i = *next;
            *next += 1;
            (compiled.atoms[i].positions.clone(), solved[i].clone())
        }
        Formula::Not(a) => {
            let (p, bp) = walk(a, domain, compiled, solved, policy, next)?;
            (p, bp_not(&bp))
        }
        Formula::And(l, r) | Formula::Or(l, r) => {
            let left = walk(l, domain, compiled, solved, policy, next)?;
            let right = walk(r, domain, compiled, solved, policy, next)?;
            let (p, a, b) = align(domain, left, right)?;
            let bp = if matches!(f, Formula::And(..)) {
                bp_and(&a, &b)?
            } else {
                bp_or(&a, &b)?
            };
            (p, bp)
        }
        Formula::Quant(q) => {
            let (mut p, mut body) = walk(&q.body, domain, compiled, solved, policy, next)?;
            let v = domain
                .index_of(&q.var)
                .ok_or_else(|| FormulaError::UndeclaredVariable {
                    location: None,
                    name: q.var.clone(),
                })?;
            if !p.contains(&v) {
                p.push(v);
                p.sort_unstable();
                let (vars, region) = Paving::region_of(domain, &p);
                body = body.cylinder(&vars, &region)?;
            }
            p.retain(|&i| i != v);
            let t = policy.thresholds(q);
            let bp = match q.kind {
                QuantKind::Exists => bp_project(&body, &q.var, t)?,
                QuantKind::Forall => bp_not(&bp_project(&bp_not(&body), &q.var, t)?),
            };
            (p, bp)
        }
    })
}

#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub max_boxes: usize,
    /// Refinement rounds, each halving every atom budget, before giving up.
    pub max_rounds: u32,
}

impl SolverConfig {
    pub fn new(epsilon: f64) -> SolverConfig {
        SolverConfig {
            epsilon,
            max_boxes: DEFAULT_MAX_BOXES,
            max_rounds: 24,
        }
    }
}

/// Result of [`Solver::solve`].
#[derive(Clone, Debug)]
pub struct Solution {
    /// Convergent result: lower is true for some quantifier choice, the
    /// complement of upper false for some choice; `error < epsilon`.
    pub result: BiPaving,
    /// Same atoms under robust thresholds: lower is true for every choice,
    /// the complement of upper false for every choice.
    pub robust: BiPaving,
    /// Rounds used (1 when the initial budgets sufficed).
    pub rounds: u32,
    /// Atom budgets of the last round, in formula pre-order.
    pub atom_budgets: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct Solver {
    pub config: SolverConfig,
}

impl Solver {
    pub fn new(config: SolverConfig) -> Solver {
        Solver { config }
    }

    pub fn solve(&self, f: &Formula, domain: &Domain) -> Result<Solution, SolveError> {
        let eps = self.config.epsilon;
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(SolveError::InvalidEpsilon(eps));
        }
        f.validate(domain)?;
        if !is_free(f) {
            let mut shared: Vec<u32> = f
                .quantifiers()
                .iter()
                .filter(|q| !q.annotation.is_deterministic())
                .map(|q| q.tag.0)
                .collect();
            shared.sort_unstable();
            let dup: Vec<u32> = shared
                .windows(2)
                .filter(|w| w[0] == w[1])
                .map(|w| w[0])
                .collect();
            return Err(SolveError::NotFree(dup));
        }
        let mut budgets = budget(f, eps, domain)?;
        let compiled = CompiledAtoms::new(f, domain)?;
        let solver = AtomicSolver::new(self.config.max_boxes);
        let mut error = f64::INFINITY;
        for round in 1..=self.config.max_rounds {
            let solved = compiled.solve(&solver, &budgets)?;
            let (_, result) = propagate(f, domain, &compiled, &solved, ThresholdPolicy::Favorable)?;
            error = result.error();
            if error < eps {
                let (_, robust) =
                    propagate(f, domain, &compiled, &solved, ThresholdPolicy::Robust)?;
                return Ok(Solution {
                    result,
                    robust,
                    rounds: round,
                    atom_budgets: budgets,
                });
            }
            budgets.iter_mut().for_each(|b| *b /= 2.0);
        }
        Err(SolveError::Unconverged {
            error,
            epsilon: eps,
            rounds: self.config.max_rounds,
        })
    }
}

/// Solves `f` over `domain` to error below `epsilon` with default limits and
/// returns the convergent bipaving over the free variables of `f`.
pub fn solve(f: &Formula, domain: &Domain, epsilon: f64) -> Result<BiPaving, SolveError> {
    Ok(Solver::new(SolverConfig::new(epsilon))
        .solve(f, domain)?
        .result)
}
