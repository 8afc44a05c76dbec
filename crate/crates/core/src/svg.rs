//! Static SVG rendering of marked triangles and flip sequences.

use std::fmt::Write;

use crate::flips::glued::Face;
use crate::geom::Vec2;
use crate::surface::MarkedTriangle;

const PANEL: f64 = 240.0;
const PAD: f64 = 16.0;

/// Maps a bounding box into one panel, y pointing up.
struct Frame {
    min: Vec2,
    scale: f64,
    height: f64,
}

impl Frame {
    fn fit(points: &[Vec2]) -> Self {
        let (mut lo, mut hi) = (points[0], points[0]);
        for p in points {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
        let scale = (PANEL - 2.0 * PAD) / span;
        Self { min: lo, scale, height: (hi.y - lo.y) * scale }
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        (PAD + (p.x - self.min.x) * self.scale, PAD + self.height - (p.y - self.min.y) * self.scale)
    }

    fn points(&self, ps: &[Vec2]) -> String {
        ps.iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn document(panels: &[String]) -> String {
    let width = PANEL * panels.len().max(1) as f64;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL}" viewBox="0 0 {width} {PANEL}">"#
    )
    .unwrap();
    for (i, body) in panels.iter().enumerate() {
        writeln!(out, r#"<g class="panel" transform="translate({},0)">"#, PANEL * i as f64).unwrap();
        out.push_str(body);
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Outline, the three marks and the dashed inner triangle p1p2p3, in one
/// group.
fn surface_body(m: &MarkedTriangle) -> String {
    let (v, p) = (m.vertices(), m.marks());
    let all: Vec<Vec2> = v.iter().chain(p.iter()).copied().collect();
    let f = Frame::fit(&all);
    let mut s = String::from("<g class=\"surface\">\n");
    writeln!(s, r#"<polygon class="outline" points="{}" fill="none" stroke="black"/>"#, f.points(&v)).unwrap();
    writeln!(
        s,
        r#"<polygon class="inner" points="{}" fill="none" stroke="gray" stroke-dasharray="4 3"/>"#,
        f.points(&p)
    )
    .unwrap();
    for (i, &q) in p.iter().enumerate() {
        let (x, y) = f.map(q);
        writeln!(s, r#"<circle class="mark" cx="{x:.3}" cy="{y:.3}" r="3"/>"#).unwrap();
        writeln!(s, r#"<text x="{:.3}" y="{:.3}" font-size="10">p{}</text>"#, x + 4.0, y - 4.0, i + 1).unwrap();
    }
    s.push_str("</g>\n");
    s
}

/// A single marked triangle.
pub fn render_surface(m: &MarkedTriangle) -> String {
    document(&[surface_body(m)])
}

fn triangulation_body(faces: &[Face], caption: &str) -> String {
    let all: Vec<Vec2> = faces.iter().flat_map(|f| f.triangle.vertices()).collect();
    let fr = Frame::fit(&all);
    let mut s = String::new();
    for (i, face) in faces.iter().enumerate() {
        let v = face.triangle.vertices();
        writeln!(s, r#"<polygon class="face" data-face="{i}" points="{}" fill="none" stroke="black"/>"#, fr.points(&v))
            .unwrap();
        for (c, &q) in v.iter().enumerate() {
            let (x, y) = fr.map(q);
            writeln!(s, r#"<text x="{:.3}" y="{:.3}" font-size="9">{}</text>"#, x + 2.0, y - 2.0, face.label(c))
                .unwrap();
        }
    }
    writeln!(s, r#"<text class="caption" x="{PAD}" y="{}" font-size="11">{caption}</text>"#, PANEL - 4.0).unwrap();
    s
}

/// One panel per developed triangulation, captioned left to right.
pub fn render_sequence(states: &[(Vec<Face>, String)]) -> String {
    let bodies: Vec<String> = states.iter().map(|(faces, cap)| triangulation_body(faces, cap)).collect();
    document(&bodies)
}
