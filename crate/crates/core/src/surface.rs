//! Marked-triangle coordinates: the triple ↔ triangle maps, the tetrahedral
//! gluing, angle pairs and the Delaunay classifiers.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flips::glued::{Face, GlueSpec, GluedTriangulation, Singularity};
use crate::geom::{angle_between, HalfDilation, Triangle, Vec2};
use crate::tol::Tolerances;

const ZERO_SUM_TOL: f64 = 1e-12;
const MARK_TOL: f64 = 1e-12;
const COLLINEAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Counterclockwise,
    Clockwise,
}

/// ((v1, λ1), (v2, λ2), (v3, λ3)) with v1 + v2 + v3 = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTriple", into = "RawTriple")]
pub struct MarkedTriple {
    v1: Vec2,
    v2: Vec2,
    v3: Vec2,
    lambda: [f64; 3],
}

/// Unvalidated wire form of [`MarkedTriple`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTriple {
    pub v1: Vec2,
    pub v2: Vec2,
    pub v3: Vec2,
    pub lambda: [f64; 3],
}

impl TryFrom<RawTriple> for MarkedTriple {
    type Error = Error;
    fn try_from(r: RawTriple) -> Result<Self> {
        MarkedTriple::from_parts(r.v1, r.v2, r.v3, r.lambda)
    }
}

impl From<MarkedTriple> for RawTriple {
    fn from(t: MarkedTriple) -> Self {
        RawTriple { v1: t.v1, v2: t.v2, v3: t.v3, lambda: t.lambda }
    }
}

impl MarkedTriple {
    /// Builds the triple with v3 = −(v1 + v2).
    pub fn new(v1: Vec2, v2: Vec2, lambda: [f64; 3]) -> Result<Self> {
        Self::from_parts(v1, v2, -(v1 + v2), lambda)
    }

    /// Builds the triple from all three vectors, revalidating the zero sum.
    pub fn from_parts(v1: Vec2, v2: Vec2, v3: Vec2, lambda: [f64; 3]) -> Result<Self> {
        for (name, v) in [("v1", v1), ("v2", v2), ("v3", v3)] {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        for (i, &l) in lambda.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::NonPositiveLambda { index: i + 1, value: l });
            }
        }
        let scale = v1.max_abs().max(v2.max_abs()).max(v3.max_abs());
        let residual = (v1 + v2 + v3).max_abs();
        if residual > ZERO_SUM_TOL * scale {
            return Err(Error::ZeroSum { residual });
        }
        let t = Self { v1, v2, v3, lambda };
        if t.big_triangle().is_degenerate(Tolerances::default().degeneracy) {
            return Err(Error::DegenerateInput);
        }
        Ok(t)
    }

    pub fn v1(&self) -> Vec2 {
        self.v1
    }

    pub fn v2(&self) -> Vec2 {
        self.v2
    }

    pub fn v3(&self) -> Vec2 {
        self.v3
    }

    pub fn vectors(&self) -> [Vec2; 3] {
        [self.v1, self.v2, self.v3]
    }

    pub fn lambda(&self) -> [f64; 3] {
        self.lambda
    }

    pub fn orientation(&self) -> Orientation {
        if self.v1.cross(self.v2) > 0.0 {
            Orientation::Counterclockwise
        } else {
            Orientation::Clockwise
        }
    }

    /// Triangle (0, v1, v1 + v2).
    pub fn big_triangle(&self) -> Triangle {
        Triangle::new(Vec2::ZERO, self.v1, self.v1 + self.v2)
    }

    /// Equality as half-dilation surfaces with fixed marking: vectors scaled
    /// to |v1| = 1 agree up to a common sign within `tol`, ratios agree
    /// relatively.
    pub fn canonical_equal(&self, other: &MarkedTriple, tol: f64) -> bool {
        let unit = |t: &MarkedTriple| {
            let s = 1.0 / t.v1.norm();
            [t.v1 * s, t.v2 * s]
        };
        let (a, b) = (unit(self), unit(other));
        let close = |sign: f64| (0..2).all(|i| (a[i] - b[i] * sign).max_abs() <= tol);
        (close(1.0) || close(-1.0))
            && (0..3).all(|i| (self.lambda[i] - other.lambda[i]).abs() <= tol * self.lambda[i].max(other.lambda[i]))
    }
}

/// Triangle with one marked point strictly inside each side. Side i runs
/// from `vertices[i-1]` to `vertices[i]` (mod 3) and carries `marks[i-1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkedTriangle {
    vertices: [Vec2; 3],
    marks: [Vec2; 3],
}

impl MarkedTriangle {
    pub fn new(vertices: [Vec2; 3], marks: [Vec2; 3], tol: &Tolerances) -> Result<Self> {
        if Triangle::from_array(vertices).is_degenerate(tol.degeneracy) {
            return Err(Error::DegenerateTriangle);
        }
        let m = Self { vertices, marks };
        for side in 1..=3 {
            m.side_parameter(side)?;
        }
        Ok(m)
    }

    pub fn vertices(&self) -> [Vec2; 3] {
        self.vertices
    }

    pub fn marks(&self) -> [Vec2; 3] {
        self.marks
    }

    pub fn triangle(&self) -> Triangle {
        Triangle::from_array(self.vertices)
    }

    pub fn inner_triangle(&self) -> Triangle {
        Triangle::from_array(self.marks)
    }

    fn side(&self, side: usize) -> (Vec2, Vec2) {
        (self.vertices[side - 1], self.vertices[side % 3])
    }

    /// (near, far) signed projections of the mark onto its side, in units of
    /// |side|²; their sum is 1.
    fn side_parameter(&self, side: usize) -> Result<(f64, f64)> {
        let (start, end) = self.side(side);
        let p = self.marks[side - 1];
        let d = end - start;
        let len_sq = d.norm_sq();
        let near = (p - start).dot(d) / len_sq;
        let far = (end - p).dot(d) / len_sq;
        let off_line = (p - start).cross(d).abs() / len_sq;
        if !(near > MARK_TOL && far > MARK_TOL && off_line <= COLLINEAR_TOL) {
            return Err(Error::MarkNotInterior { side });
        }
        Ok((near, far))
    }
}

/// The map 𝒯: vertices (0, v1, v1 + v2), marks p_i = start_i + v_i/(λ_i + 1).
pub fn to_marked_triangle(t: &MarkedTriple) -> MarkedTriangle {
    let o = Vec2::ZERO;
    let a = t.v1;
    let b = t.v1 + t.v2;
    let [l1, l2, l3] = t.lambda;
    MarkedTriangle { vertices: [o, a, b], marks: [o + t.v1 / (l1 + 1.0), a + t.v2 / (l2 + 1.0), b + t.v3 / (l3 + 1.0)] }
}

/// The map 𝒯⁻¹: λ_i is far/near along side i.
pub fn from_marked_triangle(m: &MarkedTriangle) -> Result<MarkedTriple> {
    let mut lambda = [0.0; 3];
    for side in 1..=3 {
        let (near, far) = m.side_parameter(side)?;
        lambda[side - 1] = far / near;
    }
    let [o, a, b] = m.vertices;
    MarkedTriple::from_parts(a - o, b - a, o - b, lambda)
}

/// Corner angles α, β, γ of the big triangle (at vertices 0, 1, 2) and the
/// inner-triangle angles paired with them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnglePairs {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Inner angle at p2.
    pub alpha_p: f64,
    /// Inner angle at p3.
    pub beta_p: f64,
    /// Inner angle at p1.
    pub gamma_p: f64,
}

impl AnglePairs {
    /// Sums indexed by flip index: [γ + γ′, α + α′, β + β′]. Sum k is the
    /// opposite-angle sum of the folded edge p4p_k and of the inner edge
    /// opposite p_k.
    pub fn sums(&self) -> [f64; 3] {
        [self.gamma + self.gamma_p, self.alpha + self.alpha_p, self.beta + self.beta_p]
    }
}

pub fn angle_pairs(m: &MarkedTriangle, tol: &Tolerances) -> Result<AnglePairs> {
    let [o, a, b] = m.vertices;
    let [p1, p2, p3] = m.marks;
    if m.triangle().is_degenerate(tol.degeneracy) || m.inner_triangle().is_degenerate(tol.degeneracy) {
        return Err(Error::DegenerateTriangle);
    }
    Ok(AnglePairs {
        alpha: angle_between(o, a, b),
        beta: angle_between(a, b, o),
        gamma: angle_between(b, o, a),
        alpha_p: angle_between(p2, p3, p1),
        beta_p: angle_between(p3, p1, p2),
        gamma_p: angle_between(p1, p2, p3),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DelaunayStatus {
    UniqueTetrahedral,
    /// Sum `pair` equals π: four Delaunay triangulations.
    NonUniqueFourFold {
        pair: usize,
    },
    /// Sum `pair` is the largest and exceeds π.
    NotDelaunay {
        pair: usize,
    },
}

impl DelaunayStatus {
    pub fn is_delaunay(&self) -> bool {
        !matches!(self, DelaunayStatus::NotDelaunay { .. })
    }
}

/// Classifies by the three angle-pair sums.
pub fn status_from_sums(sums: [f64; 3], tol: &Tolerances) -> Result<DelaunayStatus> {
    let near: Vec<usize> = (0..3).filter(|&k| (sums[k] - PI).abs() <= tol.angle).collect();
    if near.len() >= 2 {
        return Err(Error::AmbiguousStatus(sums));
    }
    let (worst, &max) =
        sums.iter().enumerate().fold((0, &f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    if max > PI + tol.angle {
        return Ok(DelaunayStatus::NotDelaunay { pair: worst + 1 });
    }
    Ok(match near.first() {
        Some(&k) => DelaunayStatus::NonUniqueFourFold { pair: k + 1 },
        None => DelaunayStatus::UniqueTetrahedral,
    })
}

pub fn delaunay_status(m: &MarkedTriangle, tol: &Tolerances) -> Result<DelaunayStatus> {
    status_from_sums(angle_pairs(m, tol)?.sums(), tol)
}

/// The map 𝒢: inner face p1p2p3 and the three corner faces, with the corner
/// sub-segments of side k folded about p_k. All triangle corners become p4.
pub fn glue(m: &MarkedTriangle, tol: &Tolerances) -> Result<GluedTriangulation> {
    use Singularity::*;
    let [o, a, b] = m.vertices;
    let [p1, p2, p3] = m.marks;
    let t = from_marked_triangle(m)?;
    let [l1, l2, l3] = t.lambda();
    let ccw = t.orientation() == Orientation::Counterclockwise;
    let face = |pts: [Vec2; 3], labels: [Singularity; 3]| {
        if ccw {
            Face::new(pts, labels)
        } else {
            Face::new([pts[0], pts[2], pts[1]], [labels[0], labels[2], labels[1]])
        }
    };
    let faces = vec![
        face([p1, p2, p3], [P1, P2, P3]),
        face([o, p1, p3], [P4, P1, P3]),
        face([a, p2, p1], [P4, P2, P1]),
        face([b, p3, p2], [P4, P3, P2]),
    ];
    let id = HalfDilation::IDENTITY;
    let specs = [
        GlueSpec::new((0, 2), (P1, P2), id),
        GlueSpec::new((0, 3), (P2, P3), id),
        GlueSpec::new((0, 1), (P3, P1), id),
        GlueSpec::new((1, 2), (P4, P1), HalfDilation::about(p1, -l1)),
        GlueSpec::new((2, 3), (P4, P2), HalfDilation::about(p2, -l2)),
        GlueSpec::new((3, 1), (P4, P3), HalfDilation::about(p3, -l3)),
    ];
    GluedTriangulation::from_faces(faces, &specs, tol)
}

/// Minimal triangulation types of the pillowcase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriangulationKind {
    /// {3,3,3,3}
    Tetrahedral,
    /// {2,2,4,4}
    TwoTwoFourFour,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    /// Faces around each vertex orbit, ascending.
    pub counts: [usize; 4],
    pub kind: TriangulationKind,
}

/// Accepts only {3,3,3,3} and {2,2,4,4}.
pub fn classify_partition(mut counts: [usize; 4]) -> Result<Partition> {
    counts.sort_unstable();
    let kind = match counts {
        [3, 3, 3, 3] => TriangulationKind::Tetrahedral,
        [2, 2, 4, 4] => TriangulationKind::TwoTwoFourFour,
        _ => return Err(Error::InvalidTriangulation(format!("vertex degrees {counts:?}"))),
    };
    Ok(Partition { counts, kind })
}

pub fn classify_combinatorics(g: &GluedTriangulation) -> Result<Partition> {
    for e in g.edge_orbits() {
        if e.ends.0 == e.ends.1 {
            return Err(Error::InvalidTriangulation(format!("edge {} is a loop at {}", e.id, e.ends.0)));
        }
    }
    let counts: Vec<usize> = g.vertex_orbits().iter().map(|o| o.corners.len()).collect();
    let counts: [usize; 4] =
        counts.try_into().map_err(|c: Vec<usize>| Error::InvalidTriangulation(format!("{} vertex orbits", c.len())))?;
    classify_partition(counts)
}

/// Σ over singularities of (2π − cone angle), divided by 2π: the Euler
/// characteristic, 2 for the sphere.
pub fn euler_characteristic(g: &GluedTriangulation) -> f64 {
    g.cone_angles().iter().map(|(_, theta)| 2.0 * PI - theta).sum::<f64>() / (2.0 * PI)
}
