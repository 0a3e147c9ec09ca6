//! Static SVG drawing of a network. Only the first two coordinates are
//! drawn.

use std::fmt::Write;

use abot_core::{Network, TransportProblem};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 32.0;
const MAX_STROKE: f64 = 8.0;

struct Frame {
    lo: [f64; 2],
    scale: f64,
}

impl Frame {
    fn fit(points: &[&[f64]]) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                let x = p.get(k).copied().unwrap_or(0.0);
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        let scale = if span > 0.0 { (SIZE - 2.0 * MARGIN) / span } else { 1.0 };
        Self { lo, scale }
    }

    // y grows downwards in SVG
    fn map(&self, p: &[f64]) -> (f64, f64) {
        let x = p.first().copied().unwrap_or(0.0);
        let y = p.get(1).copied().unwrap_or(0.0);
        (
            MARGIN + (x - self.lo[0]) * self.scale,
            SIZE - MARGIN - (y - self.lo[1]) * self.scale,
        )
    }
}

/// Hue from edge direction, so antiparallel flows are told apart.
fn direction_colour(a: &[f64], b: &[f64]) -> String {
    let dx = b.first().unwrap_or(&0.0) - a.first().unwrap_or(&0.0);
    let dy = b.get(1).unwrap_or(&0.0) - a.get(1).unwrap_or(&0.0);
    let deg = dy.atan2(dx).to_degrees().rem_euclid(360.0);
    format!("hsl({deg:.0},70%,40%)")
}

pub fn render(net: &Network, problem: &TransportProblem) -> String {
    let edges = net.current.edges();
    let mut pts: Vec<&[f64]> = problem.sources.iter().chain(&problem.targets).map(|t| t.p.as_slice()).collect();
    pts.extend(net.steiner_positions.iter().map(|p| p.as_slice()));
    for e in edges {
        pts.push(&e.a);
        pts.push(&e.b);
    }
    let frame = Frame::fit(&pts);
    let top = edges.iter().map(|e| problem.h.cost(e.theta)).fold(0.0, f64::max);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for e in edges {
        let (x1, y1) = frame.map(&e.a);
        let (x2, y2) = frame.map(&e.b);
        let w = if top > 0.0 { 0.5 + (MAX_STROKE - 0.5) * problem.h.cost(e.theta) / top } else { 1.0 };
        let (from, to) = if e.theta >= 0.0 { (&e.a, &e.b) } else { (&e.b, &e.a) };
        let _ = writeln!(
            s,
            r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{}" stroke-width="{w:.3}" stroke-linecap="round"/>"#,
            direction_colour(from, to)
        );
    }
    let mut dot = |p: &[f64], r: f64, fill: &str| {
        let (x, y) = frame.map(p);
        let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{r}" fill="{fill}" stroke="black"/>"#);
    };
    for t in &problem.sources {
        dot(&t.p, 6.0, "#1f77b4");
    }
    for t in &problem.targets {
        dot(&t.p, 6.0, "#d62728");
    }
    for p in &net.steiner_positions {
        dot(p, 4.0, "#2ca02c");
    }
    s.push_str("</svg>\n");
    s
}
