//! Benchmark fixtures shared by the criterion benches.

use aqsolve_core::{parse, Domain, Formula};

/// Unit disk `x^2 + y^2 <= 1` on `[-2, 2]^2`.
pub const DISK: &str = "(<= (+ (* x x) (* y y)) 1)";

/// Points `x` over which at least half of the disk's `y`-fiber is solutions.
pub const QUANTIFIED_DISK: &str = "(exists :q [1/2 1] y (<= (+ (* x x) (* y y)) 1))";

pub const SQUARE_DOMAIN: &str = "(domain (x -2 2) (y -2 2))";

pub fn problem(formula: &str) -> (Formula, Domain) {
    parse(formula, SQUARE_DOMAIN).expect("fixture parses")
}
