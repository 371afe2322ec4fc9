//! Deterministic SVG 1.1 rendering of two-variable results.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use aqsolve_core::{BiPaving, IntervalBox, Paving};

use crate::CliError;

#[derive(Debug, thiserror::Error)]
pub enum SvgError {
    #[error("SVG output needs exactly 2 free variables, found {0}")]
    Dimension(usize),
    #[error("cannot write {path}: {message}")]
    Io { path: String, message: String },
}

impl From<SvgError> for CliError {
    fn from(e: SvgError) -> CliError {
        CliError::Input(e.to_string())
    }
}

const PLOT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const LEGEND: f64 = 150.0;

const TRUE_FILL: &str = "#2e9e44";
const FALSE_FILL: &str = "#d2352b";
const UNKNOWN_FILL: &str = "#a0a0a0";
const AMBIVALENT_FILL: &str = "#f0a500";

/// Shortest decimal form with at most 3 fractional digits.
fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_owned()
    } else {
        s.to_owned()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * PLOT
    }

    fn py(&self, y: f64) -> f64 {
        MARGIN + (self.y.1 - y) / (self.y.1 - self.y.0) * PLOT
    }

    fn rect(&self, out: &mut String, b: &IntervalBox, fill: &str) {
        let (x0, x1) = (self.px(b.side(0).lo), self.px(b.side(0).hi));
        let (y0, y1) = (self.py(b.side(1).hi), self.py(b.side(1).lo));
        let _ = writeln!(
            out,
            r#"    <rect x="{}" y="{}" width="{}" height="{}" fill="{fill}"/>"#,
            num(x0),
            num(y0),
            num(x1 - x0),
            num(y1 - y0)
        );
    }
}

/// Renders one rectangle per box of the true, false, unknown and ambivalent
/// regions, with axes, bound labels and a legend. Identical inputs give
/// byte-identical output.
pub fn render_svg(result: &BiPaving) -> Result<String, SvgError> {
    let vars = result.vars();
    if vars.len() != 2 {
        return Err(SvgError::Dimension(vars.len()));
    }
    let region = result.region();
    let frame = Frame {
        x: (region.side(0).lo, region.side(0).hi),
        y: (region.side(1).lo, region.side(1).hi),
    };
    let width = MARGIN * 2.0 + PLOT + LEGEND;
    let height = MARGIN * 2.0 + PLOT;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = num(width),
        h = num(height)
    );
    let _ = writeln!(out, r#"  <rect width="100%" height="100%" fill="white"/>"#);

    let r = result.regions();
    let layers: [(&str, &Paving, &str); 4] = [
        ("true", &r.true_set, TRUE_FILL),
        ("false", &r.false_set, FALSE_FILL),
        ("unknown", &r.unknown, UNKNOWN_FILL),
        ("ambivalent", &r.ambivalent, AMBIVALENT_FILL),
    ];
    for (name, paving, fill) in layers {
        let _ = writeln!(out, r#"  <g id="{name}" stroke="none">"#);
        for b in paving.coalesce().boxes() {
            frame.rect(&mut out, b, fill);
        }
        let _ = writeln!(out, "  </g>");
    }

    // axes along the bottom and left edges of the plot
    let (left, right) = (MARGIN, MARGIN + PLOT);
    let (top, bottom) = (MARGIN, MARGIN + PLOT);
    let _ = writeln!(
        out,
        r#"  <g id="axes" stroke="black" stroke-width="1" fill="none">"#
    );
    let _ = writeln!(
        out,
        r#"    <rect x="{}" y="{}" width="{}" height="{}"/>"#,
        num(left),
        num(top),
        num(PLOT),
        num(PLOT)
    );
    let ticks = |lo: f64, hi: f64| [lo, 0.5 * (lo + hi), hi];
    for x in ticks(frame.x.0, frame.x.1) {
        let px = num(frame.px(x));
        let _ = writeln!(
            out,
            r#"    <line x1="{px}" y1="{}" x2="{px}" y2="{}"/>"#,
            num(bottom),
            num(bottom + 5.0)
        );
    }
    for y in ticks(frame.y.0, frame.y.1) {
        let py = num(frame.py(y));
        let _ = writeln!(
            out,
            r#"    <line x1="{}" y1="{py}" x2="{}" y2="{py}"/>"#,
            num(left - 5.0),
            num(left)
        );
    }
    let _ = writeln!(out, "  </g>");

    let _ = writeln!(
        out,
        r#"  <g id="labels" font-family="sans-serif" font-size="12" fill="black">"#
    );
    for x in ticks(frame.x.0, frame.x.1) {
        let _ = writeln!(
            out,
            r#"    <text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            num(frame.px(x)),
            num(bottom + 18.0),
            num(x)
        );
    }
    for y in ticks(frame.y.0, frame.y.1) {
        let _ = writeln!(
            out,
            r#"    <text x="{}" y="{}" text-anchor="end">{}</text>"#,
            num(left - 8.0),
            num(frame.py(y) + 4.0),
            num(y)
        );
    }
    let _ = writeln!(
        out,
        r#"    <text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        num(left + PLOT / 2.0),
        num(bottom + 42.0),
        escape(&vars[0])
    );
    let _ = writeln!(
        out,
        r#"    <text x="{x}" y="{y}" text-anchor="middle" font-size="14" transform="rotate(-90 {x} {y})">{}</text>"#,
        escape(&vars[1]),
        x = num(left - 40.0),
        y = num(top + PLOT / 2.0)
    );
    let _ = writeln!(out, "  </g>");

    let _ = writeln!(
        out,
        r#"  <g id="legend" font-family="sans-serif" font-size="12" fill="black">"#
    );
    for (i, (name, _, fill)) in layers.iter().enumerate() {
        let y = top + 10.0 + 24.0 * i as f64;
        let _ = writeln!(
            out,
            r#"    <rect x="{}" y="{}" width="14" height="14" fill="{fill}" stroke="black"/>"#,
            num(right + 20.0),
            num(y)
        );
        let _ = writeln!(
            out,
            r#"    <text x="{}" y="{}">{name}</text>"#,
            num(right + 42.0),
            num(y + 11.0)
        );
    }
    let _ = writeln!(out, "  </g>");
    out.push_str("</svg>\n");
    Ok(out)
}

/// Writes [`render_svg`] output to `path`.
pub fn emit_svg(result: &BiPaving, path: &Path) -> Result<(), SvgError> {
    let svg = render_svg(result)?;
    fs::write(path, svg).map_err(|e| SvgError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use aqsolve_core::{parse, solve, Interval};

    fn square() -> (Vec<String>, IntervalBox) {
        (
            vec!["x".into(), "y".into()],
            IntervalBox::new([Interval::new(-2.0, 2.0), Interval::new(-2.0, 2.0)]),
        )
    }

    #[test]
    fn false_everywhere_draws_one_red_square() {
        let (vars, region) = square();
        let svg = render_svg(&BiPaving::empty(vars, region)).unwrap();
        assert_eq!(svg.matches("<rect").count(), 1 + 1 + 1 + 4);
        assert!(svg.contains(r##"<rect x="60" y="60" width="480" height="480" fill="#d2352b"/>"##));
        assert!(svg.contains(">-2</text>") && svg.contains(">x</text>"));
    }

    #[test]
    fn disk_rendering_is_deterministic() {
        let (f, d) = parse("(<= (+ (* x x) (* y y)) 1)", "(domain (x -2 2) (y -2 2))").unwrap();
        let a = render_svg(&solve(&f, &d, 0.1).unwrap()).unwrap();
        let b = render_svg(&solve(&f, &d, 0.1).unwrap()).unwrap();
        assert_eq!(a, b);
        for fill in [TRUE_FILL, FALSE_FILL, UNKNOWN_FILL] {
            assert!(a.contains(&format!("fill=\"{fill}\"/>")));
        }
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let (f, d) = parse("(<= x y)", "(domain (x 0 1) (y 0 1) (z 0 1))").unwrap();
        let bp = solve(&f, &d, 0.1).unwrap();
        assert!(render_svg(&bp).is_ok());
        let (f, d) = parse("(<= (+ x y) z)", "(domain (x 0 1) (y 0 1) (z 0 1))").unwrap();
        let bp = solve(&f, &d, 0.2).unwrap();
        assert!(matches!(render_svg(&bp), Err(SvgError::Dimension(3))));
    }
}
