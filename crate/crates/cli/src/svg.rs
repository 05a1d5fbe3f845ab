//! Flat SVG renderings on a fixed 400x400 view box.

use std::fmt::Write;

const SIZE: f64 = 400.0;
const HALF: f64 = 180.0;

struct Frame {
    cx: f64,
    cy: f64,
    s: f64,
}

impl Frame {
    fn fit(points: &[(f64, f64)]) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            return Self { cx: 0.0, cy: 0.0, s: 1.0 };
        }
        let s = 0.5 * (x1 - x0).max(y1 - y0);
        Self {
            cx: 0.5 * (x0 + x1),
            cy: 0.5 * (y0 + y1),
            s: if s > 0.0 { s } else { 1.0 },
        }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (
            SIZE / 2.0 + HALF * (x - self.cx) / self.s,
            SIZE / 2.0 - HALF * (y - self.cy) / self.s,
        )
    }
}

fn header() -> String {
    format!("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SIZE} {SIZE}\" width=\"{SIZE}\" height=\"{SIZE}\">\n")
}

fn points_attr(frame: &Frame, pts: &[(f64, f64)]) -> String {
    let mut s = String::new();
    for (i, &p) in pts.iter().enumerate() {
        let (x, y) = frame.map(p);
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x:.4},{y:.4}");
    }
    s
}

/// Inner boundary polyline (closed) and the outer supporting polygon.
pub fn boundary(inner: &[(f64, f64)], outer: &[(f64, f64)]) -> String {
    let all: Vec<(f64, f64)> = inner.iter().chain(outer).copied().collect();
    let frame = Frame::fit(&all);
    let mut out = header();
    if !outer.is_empty() {
        let _ = writeln!(
            out,
            "<polygon points=\"{}\" fill=\"none\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>",
            points_attr(&frame, outer)
        );
    }
    let mut closed = inner.to_vec();
    if let Some(&first) = inner.first() {
        closed.push(first);
    }
    let _ = writeln!(
        out,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#000\"/>",
        points_attr(&frame, &closed)
    );
    out.push_str("</svg>\n");
    out
}

pub fn scatter(points: &[(f64, f64)]) -> String {
    let frame = Frame::fit(points);
    let mut out = header();
    for &p in points {
        let (x, y) = frame.map(p);
        let _ = writeln!(out, "<circle cx=\"{x:.4}\" cy=\"{y:.4}\" r=\"2\"/>");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_frames_render() {
        let s = boundary(&[(1.0, 1.0)], &[]);
        assert!(s.contains("200.0000,200.0000"));
        let s = scatter(&[]);
        assert!(s.ends_with("</svg>\n"));
    }

    #[test]
    fn segment_spans_the_box() {
        let s = boundary(&[(0.0, 0.0), (1.0, 0.0)], &[]);
        assert!(s.contains("20.0000,200.0000 380.0000,200.0000"));
    }
}
