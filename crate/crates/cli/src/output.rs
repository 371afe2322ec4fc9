//! JSON result documents.

use std::collections::BTreeMap;

use aqsolve_core::{BiPaving, Formula, Paving, QuantifierChoice, SentenceReport, Verdict};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

type Boxes = Vec<Vec<[f64; 2]>>;

/// Output document. The four box lists partition the free-variable space:
/// determined true only, determined false only, undetermined, and
/// determined both ways. `error` is the volume of the undetermined boxes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultJson {
    /// Verdict for the whole space, or null when it is not uniform.
    pub verdict: Option<String>,
    pub vars: Vec<String>,
    pub true_boxes: Boxes,
    pub false_boxes: Boxes,
    pub unknown_boxes: Boxes,
    pub ambivalent_boxes: Boxes,
    pub error: f64,
    pub choices_used: Value,
}

impl ResultJson {
    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn choice_map(c: &QuantifierChoice) -> Value {
    let m: BTreeMap<String, String> = c
        .iter()
        .map(|(t, q)| (t.to_string(), q.to_string()))
        .collect();
    json!(m)
}

/// Document for a solved formula. `choices_used` lists each tag's
/// annotation, the range of thresholds the solution accounts for.
pub fn solve_json(f: &Formula, result: &BiPaving) -> ResultJson {
    let r = result.regions();
    let uniform = [
        (&r.true_set, Verdict::True),
        (&r.false_set, Verdict::False),
        (&r.unknown, Verdict::Unknown),
        (&r.ambivalent, Verdict::Ambivalent),
    ]
    .into_iter()
    .find(|(p, _)| p.is_full())
    .map(|(_, v)| v.to_string());
    let tags: BTreeMap<String, [String; 2]> = f
        .tag_annotations()
        .into_iter()
        .map(|(t, a)| (t.to_string(), [a.lo().to_string(), a.hi().to_string()]))
        .collect();
    let bounds = |p: &Paving| p.coalesce().box_bounds();
    ResultJson {
        verdict: uniform,
        vars: result.vars().to_vec(),
        true_boxes: bounds(&r.true_set),
        false_boxes: bounds(&r.false_set),
        unknown_boxes: bounds(&r.unknown),
        ambivalent_boxes: bounds(&r.ambivalent),
        error: result.error(),
        choices_used: json!(tags),
    }
}

/// Document for an evaluated sentence. The space is a single point, listed
/// under the verdict's box list; `choices_used` holds the witnesses.
pub fn eval_json(report: &SentenceReport) -> ResultJson {
    let point = || vec![Vec::new()];
    let pick = |v: Verdict| {
        if report.verdict == v {
            point()
        } else {
            Vec::new()
        }
    };
    let witness = |w: &Option<QuantifierChoice>| w.as_ref().map_or(Value::Null, choice_map);
    ResultJson {
        verdict: Some(report.verdict.to_string()),
        vars: Vec::new(),
        true_boxes: pick(Verdict::True),
        false_boxes: pick(Verdict::False),
        unknown_boxes: pick(Verdict::Unknown),
        ambivalent_boxes: pick(Verdict::Ambivalent),
        error: if report.verdict == Verdict::Unknown {
            1.0
        } else {
            0.0
        },
        choices_used: json!({
            "true": witness(&report.true_witness),
            "false": witness(&report.false_witness),
            "evaluated": report.outcomes.len(),
        }),
    }
}
