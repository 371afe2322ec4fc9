//! Sound solver for polynomial constraints with interval-annotated volume
//! quantifiers.
//!
//! A formula is solved into a pair of pavings over its free variables: an
//! inner set where it is determined true and an outer set outside of which it
//! is determined false. The gap between the two has measure below a requested
//! error bound.

pub mod atomic;
pub mod formula;
pub mod interval;
pub mod oracle;
pub mod paving;
pub mod semantics;

pub use atomic::{classify_box, solve_atomic, AtomicError, AtomicSolver, Classification};
pub use formula::{
    is_free, parse, parse_domain, parse_formula, parse_problem, parse_problem_with, to_nnf,
    Annotation, Atom, Domain, DomainVar, Formula, FormulaError, Location, QuantKind, Quantifier,
    Rational, Relation, Tag, Term,
};
pub use interval::Interval;
pub use paving::{FiberCell, IntervalBox, Paving, PavingError};
pub use semantics::{
    bp_and, bp_error, bp_not, bp_or, bp_project, bp_project_exists, budget, evaluate_sentence,
    solve, BiPaving, QuantifierChoice, SentenceConfig, SentenceEvaluator, SentenceReport, Solution,
    SolveError, Solver, SolverConfig, ThresholdPolicy, Thresholds, Verdict,
};
