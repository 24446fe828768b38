//! CSV tables and standalone SVG plots of piecewise polynomials and
//! Duistermaat-Heckman measures.

use std::fmt::Write as _;

use crate::filtrations::{Atom, DHMeasure};
use crate::poly::PiecewisePolynomial;
use crate::rational::{format_rational, int, to_decimal, to_f64, Rational};

/// Samples per chamber in SVG plots.
pub const SVG_SAMPLES: usize = 256;

/// `p/q`, optionally followed by a 12-digit decimal.
pub fn fmt_q(q: &Rational, decimals: bool) -> String {
    if decimals {
        format!("{} ({})", format_rational(q), to_decimal(q, 12))
    } else {
        format_rational(q)
    }
}

/// `per_piece + 1` exact equally spaced points on each piece, shared
/// endpoints listed once.
fn sample_points(curve: &PiecewisePolynomial, per_piece: usize) -> Vec<(Rational, Rational)> {
    let per_piece = per_piece.max(1);
    let mut out = Vec::new();
    let count = curve.pieces().len();
    for (i, (a, b, p)) in curve.intervals().enumerate() {
        let last = if i + 1 == count {
            per_piece
        } else {
            per_piece - 1
        };
        for k in 0..=last {
            let t = a + (b - a) * int(k as i64) / int(per_piece as i64);
            out.push((t.clone(), p.eval(&t)));
        }
    }
    out
}

/// `tau,value,decimal` rows.
pub fn curve_csv(curve: &PiecewisePolynomial, per_piece: usize) -> String {
    let mut out = String::from("tau,value,value_decimal\n");
    for (t, v) in sample_points(curve, per_piece) {
        writeln!(
            out,
            "{},{},{}",
            format_rational(&t),
            format_rational(&v),
            to_decimal(&v, 12)
        )
        .unwrap();
    }
    out
}

/// `kind,tau,value` rows: density samples, then atoms with their masses.
pub fn dh_csv(nu: &DHMeasure, per_piece: usize) -> String {
    let mut out = String::from("kind,tau,value\n");
    for (t, v) in sample_points(&nu.density, per_piece) {
        writeln!(
            out,
            "density,{},{}",
            format_rational(&t),
            format_rational(&v)
        )
        .unwrap();
    }
    for Atom { location, mass } in &nu.atoms {
        writeln!(
            out,
            "atom,{},{}",
            format_rational(location),
            format_rational(mass)
        )
        .unwrap();
    }
    out
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Line plot of each named curve, with atoms drawn as vertical bars.
pub fn svg_plot(title: &str, series: &[(&str, &PiecewisePolynomial)], atoms: &[Atom]) -> String {
    let (w, h, pad) = (640.0, 400.0, 48.0);
    let mut pts: Vec<Vec<(f64, f64)>> = Vec::new();
    for (_, c) in series {
        pts.push(
            sample_points(c, SVG_SAMPLES)
                .iter()
                .map(|(t, v)| (to_f64(t), to_f64(v)))
                .collect(),
        );
    }
    let all = pts
        .iter()
        .flatten()
        .copied()
        .chain(atoms.iter().map(|a| (to_f64(&a.location), to_f64(&a.mass))))
        .chain(std::iter::once((0.0, 0.0)));
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for (x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(out, r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#, w / 2.0, escape(title)).unwrap();
    writeln!(
        out,
        r#"<g stroke="black" stroke-width="1"><line x1="{pad}" y1="{yb}" x2="{xr}" y2="{yb}"/><line x1="{pad}" y1="{pad}" x2="{pad}" y2="{yb}"/></g>"#,
        yb = h - pad,
        xr = w - pad
    )
    .unwrap();
    for (label, x, y, anchor) in [
        (format!("{x0:.4}"), pad, h - pad + 16.0, "start"),
        (format!("{x1:.4}"), w - pad, h - pad + 16.0, "end"),
        (format!("{y0:.4}"), pad - 4.0, h - pad, "end"),
        (format!("{y1:.4}"), pad - 4.0, pad + 4.0, "end"),
    ] {
        writeln!(out, r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="10" text-anchor="{anchor}">{label}</text>"#).unwrap();
    }
    for (i, ((name, _), p)) in series.iter().zip(&pts).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = p
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            w - pad - 100.0,
            pad + 14.0 * i as f64,
            escape(name)
        )
        .unwrap();
    }
    for a in atoms {
        let x = sx(to_f64(&a.location));
        writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black" stroke-width="3"/>"#,
            sy(0.0),
            sy(to_f64(&a.mass))
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
