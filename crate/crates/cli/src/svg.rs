//! SVG 1.1 drawing of a 3×3 slice: the spectral polygon in the trace plane,
//! vertex labels, edge labels and optional trajectories.
//!
//! A point `x` of the plane `x₁+x₂+x₃ = tr` is mapped isometrically to
//! `(u₁·(x−c), u₂·(x−c))` with `c = (tr/3)(1,1,1)`, `u₁ = (1,−1,0)/√2` and
//! `u₂ = (1,1,−2)/√6`, then scaled uniformly to the canvas with the second
//! axis pointing up.

use std::fmt::Write;

use toda_polytope::polytope::SpectralPolytope;

use crate::report::{diag_label, set_label};

const WIDTH: f64 = 560.0;
const HEIGHT: f64 = 520.0;
const MARGIN: f64 = 110.0;

pub fn project(x: &[f64], trace: f64) -> (f64, f64) {
    let c = trace / 3.0;
    let (a, b, d) = (x[0] - c, x[1] - c, x[2] - c);
    ((a - b) / 2f64.sqrt(), (a + b - 2.0 * d) / 6f64.sqrt())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Canvas {
    cx: f64,
    cy: f64,
    scale: f64,
}

impl Canvas {
    fn fit(points: &[(f64, f64)]) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let span = (x1 - x0).max(y1 - y0);
        let scale = if span > 0.0 {
            ((WIDTH - 2.0 * MARGIN) / (x1 - x0).max(1e-300)).min((HEIGHT - 2.0 * MARGIN) / (y1 - y0).max(1e-300))
        } else {
            1.0
        };
        Self {
            cx: (x0 + x1) / 2.0,
            cy: (y0 + y1) / 2.0,
            scale,
        }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (
            WIDTH / 2.0 + self.scale * (x - self.cx),
            HEIGHT / 2.0 - self.scale * (y - self.cy),
        )
    }
}

/// Pushes `p` away from `center` by `dist` canvas units.
fn outward(p: (f64, f64), center: (f64, f64), dist: f64) -> (f64, f64) {
    let (dx, dy) = (p.0 - center.0, p.1 - center.1);
    let len = dx.hypot(dy);
    if len == 0.0 {
        (p.0, p.1 - dist)
    } else {
        (p.0 + dist * dx / len, p.1 + dist * dy / len)
    }
}

fn anchor(p: (f64, f64), center: (f64, f64)) -> &'static str {
    let dx = p.0 - center.0;
    if dx > 5.0 {
        "start"
    } else if dx < -5.0 {
        "end"
    } else {
        "middle"
    }
}

/// Renders the polygon of a three-dimensional spectral polytope.
///
/// `base` is the BFR image of the input matrix and `trajectories` are lists
/// of BFR points drawn as polylines.
pub fn render(title: &str, polytope: &SpectralPolytope, base: &[f64], trajectories: &[Vec<Vec<f64>>]) -> String {
    let tr = polytope.trace;
    let spread = polytope.lambda[0] - polytope.lambda[polytope.lambda.len() - 1];
    let tight = 1e-9 * spread.max(1.0);

    // Vertices with labels, in counter-clockwise order around their mean.
    let mut vertices: Vec<((f64, f64), String, &Vec<f64>)> = polytope
        .accessible_perms
        .iter()
        .zip(&polytope.extremal_vertices)
        .map(|(pi, v)| (project(v, tr), diag_label(&pi.permuted_diagonal(&polytope.lambda)), v))
        .collect();
    let k = vertices.len() as f64;
    let mean = vertices
        .iter()
        .fold((0.0, 0.0), |acc, (p, _, _)| (acc.0 + p.0 / k, acc.1 + p.1 / k));
    vertices.sort_by(|a, b| {
        let ta = (a.0 .1 - mean.1).atan2(a.0 .0 - mean.0);
        let tb = (b.0 .1 - mean.1).atan2(b.0 .0 - mean.0);
        ta.total_cmp(&tb)
    });

    let mut all: Vec<(f64, f64)> = vertices.iter().map(|v| v.0).collect();
    all.push(project(base, tr));
    for t in trajectories {
        all.extend(t.iter().map(|x| project(x, tr)));
    }
    let canvas = Canvas::fit(&all);
    let center = canvas.map(mean);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, "<title>{}</title>", escape(title));
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    let screen: Vec<(f64, f64)> = vertices.iter().map(|v| canvas.map(v.0)).collect();
    if screen.len() >= 2 {
        let pts: Vec<String> = screen.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            svg,
            r##"<polygon class="polytope" points="{}" fill="#dde8f5" stroke="#1f4e89" stroke-width="1.5"/>"##,
            pts.join(" ")
        );
    }

    // Edges: label each side with its binding half-space.
    let sides = match vertices.len() {
        0 | 1 => 0,
        2 => 1,
        n => n,
    };
    for s in 0..sides {
        let (a, b) = (&vertices[s], &vertices[(s + 1) % vertices.len()]);
        let Some(h) = polytope
            .halfspaces
            .iter()
            .find(|h| h.slack(a.2).abs() <= tight && h.slack(b.2).abs() <= tight)
        else {
            continue;
        };
        let (pa, pb) = (canvas.map(a.0), canvas.map(b.0));
        let mid = ((pa.0 + pb.0) / 2.0, (pa.1 + pb.1) / 2.0);
        let at = outward(mid, center, 14.0);
        let color = if h.is_permutohedral() { "#555555" } else { "#b03020" };
        if !h.is_permutohedral() {
            let _ = writeln!(
                svg,
                r#"<line class="chopping" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2.5"/>"#,
                pa.0, pa.1, pb.0, pb.1
            );
        }
        let _ = writeln!(
            svg,
            r#"<text class="edge-label" x="{:.2}" y="{:.2}" font-size="11" fill="{color}" text-anchor="{}">I={} J={}</text>"#,
            at.0,
            at.1,
            anchor(at, center),
            set_label(&h.set),
            set_label(&h.j_set)
        );
    }

    for t in trajectories {
        let pts: Vec<String> = t
            .iter()
            .map(|x| {
                let (px, py) = canvas.map(project(x, tr));
                format!("{px:.2},{py:.2}")
            })
            .collect();
        let _ = writeln!(
            svg,
            r##"<polyline class="trajectory" points="{}" fill="none" stroke="#2e7d32" stroke-width="1.5"/>"##,
            pts.join(" ")
        );
    }

    for (v, p) in vertices.iter().zip(&screen) {
        let at = outward(*p, center, 12.0);
        let _ = writeln!(
            svg,
            r##"<circle class="vertex" cx="{:.2}" cy="{:.2}" r="3.5" fill="#1f4e89"/>"##,
            p.0, p.1
        );
        let _ = writeln!(
            svg,
            r#"<text class="vertex-label" x="{:.2}" y="{:.2}" font-size="13" text-anchor="{}">{}</text>"#,
            at.0,
            at.1 + 4.0,
            anchor(at, center),
            v.1
        );
    }

    let (bx, by) = canvas.map(project(base, tr));
    let _ = writeln!(svg, r#"<circle class="base-point" cx="{bx:.2}" cy="{by:.2}" r="3" fill="black"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="12">S</text>"#,
        bx + 6.0,
        by - 6.0
    );
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_is_an_isometry_of_the_trace_plane() {
        let a = [4.0, 2.0, 1.0];
        let b = [1.0, 2.0, 4.0];
        let (pa, pb) = (project(&a, 7.0), project(&b, 7.0));
        let plane = ((3.0f64).powi(2) * 2.0).sqrt();
        assert!(((pa.0 - pb.0).hypot(pa.1 - pb.1) - plane).abs() < 1e-12);
        assert_eq!(project(&[7.0 / 3.0; 3], 7.0), (0.0, 0.0));
    }
}
