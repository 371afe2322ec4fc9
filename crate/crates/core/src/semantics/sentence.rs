//! Truth of sentences under sampled quantifier choices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::{annotation_width, propagate, CompiledAtoms, SolveError, ThresholdPolicy};
use crate::atomic::{AtomicSolver, DEFAULT_MAX_BOXES};
use crate::formula::{fmt_rational, Annotation, Domain, Formula, Quantifier, Rational, Tag};
use crate::interval::Interval;

/// One threshold per tag.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuantifierChoice(BTreeMap<Tag, Rational>);

impl QuantifierChoice {
    pub fn new() -> QuantifierChoice {
        QuantifierChoice::default()
    }

    pub fn insert(&mut self, tag: Tag, q: Rational) {
        self.0.insert(tag, q);
    }

    pub fn get(&self, tag: Tag) -> Option<&Rational> {
        self.0.get(&tag)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Tag, &Rational)> {
        self.0.iter().map(|(t, q)| (*t, q))
    }

    /// Every tag of `f` chosen inside its annotation.
    pub fn is_valid_for(&self, f: &Formula) -> bool {
        let anns = f.tag_annotations();
        anns.len() == self.0.len()
            && anns
                .iter()
                .all(|(t, a)| self.0.get(t).is_some_and(|q| a.contains(q)))
    }

    /// Enclosure of the threshold for `q`'s tag, falling back to the lower
    /// annotation bound for unchosen tags.
    pub(crate) fn enclosure(&self, q: &Quantifier) -> Interval {
        match self.0.get(&q.tag) {
            Some(r) => Interval::from_rational(r),
            None => q.annotation.lo_enclosure(),
        }
    }
}

impl FromIterator<(Tag, Rational)> for QuantifierChoice {
    fn from_iter<I: IntoIterator<Item = (Tag, Rational)>>(iter: I) -> Self {
        QuantifierChoice(iter.into_iter().collect())
    }
}

impl fmt::Display for QuantifierChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(t, q)| format!("{t}: {}", fmt_rational(q)))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    True,
    False,
    /// Some choice makes the sentence true and another makes it false.
    Ambivalent,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Ambivalent => "ambivalent",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceOutcome {
    pub choice: QuantifierChoice,
    /// `True`, `False` or `Unknown`.
    pub verdict: Verdict,
    /// Refinement round that decided the choice (0 if never decided).
    pub round: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SentenceReport {
    pub verdict: Verdict,
    pub outcomes: Vec<ChoiceOutcome>,
    /// Choice making the sentence true, nearest to the annotation midpoints.
    pub true_witness: Option<QuantifierChoice>,
    /// Choice making the sentence false, nearest to the annotation midpoints.
    pub false_witness: Option<QuantifierChoice>,
}

/// Values tried for one annotation: both bounds and `samples - 2` evenly
/// spaced interior points (the midpoint alone when `samples == 1`).
fn tag_values(a: &Annotation, samples: usize) -> Vec<Rational> {
    if a.is_deterministic() {
        return vec![a.lo().clone()];
    }
    if samples <= 1 {
        return vec![(a.lo() + a.hi()) / Rational::from_integer(2.into())];
    }
    let n = BigInt::from(samples - 1);
    (0..samples)
        .map(|k| a.lo() + a.width() * Rational::new(BigInt::from(k), n.clone()))
        .collect()
}

/// Quantifier choices to try for `f`: the product of per-tag values, or when
/// that exceeds `cap`, the all-lower and all-upper choices plus a seeded
/// random sample of the product.
pub fn choice_grid(f: &Formula, samples: usize, cap: usize, seed: u64) -> Vec<QuantifierChoice> {
    let tags: Vec<(Tag, Vec<Rational>)> = f
        .tag_annotations()
        .into_iter()
        .map(|(t, a)| (t, tag_values(&a, samples)))
        .collect();
    let total = tags
        .iter()
        .try_fold(1usize, |acc, (_, v)| acc.checked_mul(v.len()));
    let pick = |idx: &[usize]| -> QuantifierChoice {
        tags.iter()
            .zip(idx)
            .map(|((t, v), &i)| (*t, v[i].clone()))
            .collect()
    };
    match total {
        Some(total) if total <= cap.max(1) => {
            let mut out = Vec::with_capacity(total);
            let mut idx = vec![0usize; tags.len()];
            loop {
                out.push(pick(&idx));
                // odometer increment, last tag fastest
                let mut k = tags.len();
                loop {
                    if k == 0 {
                        return out;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < tags[k].1.len() {
                        break;
                    }
                    idx[k] = 0;
                }
            }
        }
        _ => {
            let mut rng = StdRng::seed_from_u64(seed);
            let mut seen = BTreeSet::new();
            let lows = vec![0; tags.len()];
            let highs: Vec<usize> = tags.iter().map(|(_, v)| v.len() - 1).collect();
            seen.insert(lows);
            seen.insert(highs);
            while seen.len() < cap.max(2) {
                let idx: Vec<usize> = tags
                    .iter()
                    .map(|(_, v)| rng.random_range(0..v.len()))
                    .collect();
                seen.insert(idx);
            }
            let mut chosen: Vec<Vec<usize>> = seen.into_iter().collect();
            chosen.sort();
            chosen.iter().map(|i| pick(i)).collect()
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SentenceConfig {
    pub epsilon: f64,
    pub choices: usize,
    pub max_boxes: usize,
    /// Budget halvings tried after the first round.
    pub refinements: u32,
    pub seed: u64,
    /// Largest number of choices evaluated.
    pub max_choices: usize,
}

impl SentenceConfig {
    pub fn new(epsilon: f64, choices: usize) -> SentenceConfig {
        SentenceConfig {
            epsilon,
            choices,
            max_boxes: DEFAULT_MAX_BOXES,
            refinements: 8,
            seed: 0,
            max_choices: 4096,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SentenceEvaluator {
    pub config: SentenceConfig,
}

impl SentenceEvaluator {
    pub fn new(config: SentenceConfig) -> SentenceEvaluator {
        SentenceEvaluator { config }
    }

    /// Decides a sentence for each sampled choice. With a fixed choice every
    /// quantifier is an exact volume threshold, so the formula is solved
    /// with whole-domain atom budgets `epsilon / 2^r` for increasing `r`
    /// until the choice is decided or the refinements run out.
    pub fn evaluate(&self, f: &Formula, domain: &Domain) -> Result<SentenceReport, SolveError> {
        let cfg = &self.config;
        if !(cfg.epsilon > 0.0 && cfg.epsilon.is_finite()) {
            return Err(SolveError::InvalidEpsilon(cfg.epsilon));
        }
        f.validate(domain)?;
        let free = f.free_vars();
        if !free.is_empty() {
            return Err(SolveError::NotASentence(free.into_iter().collect()));
        }
        // an exact volume threshold is ill-posed: refuse rather than guess
        for q in f.quantifiers() {
            annotation_width(q)?;
        }
        let choices = choice_grid(f, cfg.choices, cfg.max_choices, cfg.seed);
        let compiled = CompiledAtoms::new(f, domain)?;
        let solver = AtomicSolver::new(cfg.max_boxes);
        let mut outcomes: Vec<ChoiceOutcome> = choices
            .into_iter()
            .map(|choice| ChoiceOutcome {
                choice,
                verdict: Verdict::Unknown,
                round: 0,
            })
            .collect();
        for round in 0..=cfg.refinements {
            let b = cfg.epsilon / f64::from(1u32 << round.min(31));
            let budgets = vec![b; compiled.atoms.len()];
            let Ok(solved) = compiled.solve(&solver, &budgets) else {
                // the box cap was hit: finer rounds cannot succeed either
                break;
            };
            for o in outcomes
                .iter_mut()
                .filter(|o| o.verdict == Verdict::Unknown)
            {
                let policy = ThresholdPolicy::Fixed(&o.choice);
                let (_, bp) = propagate(f, domain, &compiled, &solved, policy)?;
                if bp.lower().is_full() {
                    o.verdict = Verdict::True;
                } else if bp.upper().is_empty() {
                    o.verdict = Verdict::False;
                }
                if o.verdict != Verdict::Unknown {
                    o.round = round + 1;
                }
            }
            if outcomes.iter().all(|o| o.verdict != Verdict::Unknown) {
                break;
            }
        }
        let anns = f.tag_annotations();
        let witness = |v: Verdict| {
            outcomes
                .iter()
                .filter(|o| o.verdict == v)
                .min_by(|a, b| {
                    midpoint_distance(&a.choice, &anns)
                        .total_cmp(&midpoint_distance(&b.choice, &anns))
                })
                .map(|o| o.choice.clone())
        };
        let true_witness = witness(Verdict::True);
        let false_witness = witness(Verdict::False);
        let verdict = match (&true_witness, &false_witness) {
            (Some(_), Some(_)) => Verdict::Ambivalent,
            (Some(_), None) => Verdict::True,
            (None, Some(_)) => Verdict::False,
            (None, None) => Verdict::Unknown,
        };
        Ok(SentenceReport {
            verdict,
            outcomes,
            true_witness,
            false_witness,
        })
    }
}

/// Sum over tags of the distance to the annotation midpoint, relative to
/// the annotation width.
fn midpoint_distance(c: &QuantifierChoice, anns: &BTreeMap<Tag, Annotation>) -> f64 {
    c.iter()
        .filter_map(|(t, q)| {
            let a = anns.get(&t)?;
            if a.is_deterministic() {
                return Some(0.0);
            }
            let mid = (a.lo() + a.hi()) / Rational::from_integer(2.into());
            ((q - mid).abs() / a.width()).to_f64()
        })
        .sum()
}

/// [`SentenceEvaluator::evaluate`] with default limits.
pub fn evaluate_sentence(
    f: &Formula,
    domain: &Domain,
    epsilon: f64,
    choice_samples: usize,
) -> Result<SentenceReport, SolveError> {
    SentenceEvaluator::new(SentenceConfig::new(epsilon, choice_samples)).evaluate(f, domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    const PSI: &str = "(and (>= x 0) (<= x 4))";
    const LINE: &str = "(domain (x 0 10))";

    #[test]
    fn zero_width_annotation_collapses() {
        let (f, d) = parse("(exists :q [1 1] x (<= x 5))", LINE).unwrap();
        let err = evaluate_sentence(&f, &d, 0.01, 3).unwrap_err();
        assert!(matches!(err, SolveError::BudgetCollapse { .. }));
    }

    #[test]
    fn ambivalent_with_witnesses() {
        let src = format!("(exists :q [3 5] x {PSI})");
        let (f, d) = parse(&src, LINE).unwrap();
        let r = evaluate_sentence(&f, &d, 0.01, 5).unwrap();
        assert_eq!(r.verdict, Verdict::Ambivalent);
        assert_eq!(r.true_witness.unwrap().get(Tag(1)), Some(&q(7, 2)));
        assert_eq!(r.false_witness.unwrap().get(Tag(1)), Some(&q(9, 2)));
        let at_four = r
            .outcomes
            .iter()
            .find(|o| o.choice.get(Tag(1)) == Some(&q(4, 1)));
        assert_eq!(at_four.unwrap().verdict, Verdict::Unknown);
    }

    #[test]
    fn shared_tag_contradiction_is_false() {
        let a = format!("(exists :tag 1 :q [3 5] x {PSI})");
        let src = format!("(and {a} (not {a}))");
        let (f, d) = parse(&src, LINE).unwrap();
        for n in [3, 4, 7] {
            assert_eq!(
                evaluate_sentence(&f, &d, 0.01, n).unwrap().verdict,
                Verdict::False
            );
        }
    }

    #[test]
    fn long_solution_is_true() {
        let (f, d) = parse("(exists :q [0 1] x (>= x 0))", LINE).unwrap();
        let r = evaluate_sentence(&f, &d, 0.01, 3).unwrap();
        assert_eq!(r.verdict, Verdict::True);
        assert!(r.false_witness.is_none());
    }

    #[test]
    fn free_variables_are_rejected() {
        let (f, d) = parse("(<= x 1)", LINE).unwrap();
        assert!(matches!(
            evaluate_sentence(&f, &d, 0.1, 3),
            Err(SolveError::NotASentence(_))
        ));
    }

    #[test]
    fn grid_covers_product_or_samples() {
        let (f, _) = parse(
            "(and (exists :q [0 1] x (>= x 0)) (exists :q [0 2] x (>= x 1)))",
            LINE,
        )
        .unwrap();
        let all = choice_grid(&f, 3, 100, 0);
        assert_eq!(all.len(), 9);
        assert!(all.iter().all(|c| c.is_valid_for(&f)));
        assert_eq!(all[0].to_string(), "{1: 0, 2: 0}");
        assert_eq!(all[8].to_string(), "{1: 1, 2: 2}");
        let few = choice_grid(&f, 3, 4, 7);
        assert_eq!(few.len(), 4);
        assert!(few.contains(&all[0]) && few.contains(&all[8]));
        assert_eq!(few, choice_grid(&f, 3, 4, 7));
    }
}
