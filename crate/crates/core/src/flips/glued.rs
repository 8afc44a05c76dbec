//! Chart-level triangulations: four planar faces, each in its own chart,
//! glued along sides by half-dilations.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{angle_between, harmonic_index_triangle, HalfDilation, Triangle, Vec2};
use crate::surface::{from_marked_triangle, MarkedTriangle, MarkedTriple};
use crate::tol::Tolerances;

const MATCH_TOL: f64 = 1e-9;

/// The four cone points. p4 is the image of the marked triangle's corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Singularity {
    P1,
    P2,
    P3,
    P4,
}

impl Singularity {
    pub const ALL: [Singularity; 4] = [Singularity::P1, Singularity::P2, Singularity::P3, Singularity::P4];

    /// 1..=4.
    pub fn index(self) -> usize {
        self as usize + 1
    }
}

impl fmt::Display for Singularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.index())
    }
}

/// Side `side` of face `face` runs from corner `side` to corner `side + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Slot {
    pub face: usize,
    pub side: usize,
}

impl Slot {
    pub const fn new(face: usize, side: usize) -> Self {
        Self { face, side }
    }
}

/// Maps this slot's chart onto the partner's chart: corner `side` goes to
/// the partner's corner `side + 1` and corner `side + 1` to corner `side`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gluing {
    pub partner: Slot,
    pub map: HalfDilation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub triangle: Triangle,
    pub labels: [Singularity; 3],
}

impl Face {
    pub fn new(points: [Vec2; 3], labels: [Singularity; 3]) -> Self {
        Self { triangle: Triangle::from_array(points), labels }
    }

    pub fn point(&self, corner: usize) -> Vec2 {
        self.triangle.vertex(corner)
    }

    pub fn label(&self, corner: usize) -> Singularity {
        self.labels[corner % 3]
    }

    /// Angle at `corner`.
    pub fn angle(&self, corner: usize) -> f64 {
        angle_between(self.point(corner), self.point(corner + 1), self.point(corner + 2))
    }

    fn side_with(&self, ends: (Singularity, Singularity)) -> Option<usize> {
        (0..3).find(|&s| {
            let (a, b) = (self.label(s), self.label(s + 1));
            (a, b) == ends || (b, a) == ends
        })
    }
}

/// Gluing request located by endpoint labels: the side of `faces.0` with
/// endpoints `ends` is glued to the matching side of `faces.1`, and `map`
/// carries the first chart onto the second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlueSpec {
    pub faces: (usize, usize),
    pub ends: (Singularity, Singularity),
    pub map: HalfDilation,
}

impl GlueSpec {
    pub fn new(faces: (usize, usize), ends: (Singularity, Singularity), map: HalfDilation) -> Self {
        Self { faces, ends, map }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexOrbit {
    pub label: Singularity,
    /// (face, corner) pairs, ascending.
    pub corners: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeOrbit {
    pub id: usize,
    /// Lower slot first.
    pub slots: (Slot, Slot),
    /// Endpoint labels in the order of the first slot's side.
    pub ends: (Singularity, Singularity),
}

impl EdgeOrbit {
    /// Index k of the paired flip Φ_k touching this edge on a tetrahedral
    /// triangulation: the non-p4 end of p4p_k, or the label missing from an
    /// inner edge.
    pub fn flip_index(&self) -> Option<usize> {
        use Singularity::*;
        match self.ends {
            (a, b) if a == b => None,
            (P4, x) | (x, P4) => Some(x.index()),
            (a, b) => [P1, P2, P3].into_iter().find(|&x| x != a && x != b).map(Singularity::index),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluedTriangulation {
    faces: Vec<Face>,
    gluings: Vec<[Gluing; 3]>,
    vertex_orbits: Vec<VertexOrbit>,
}

impl GluedTriangulation {
    /// Assembles and validates a triangulation from faces and gluing requests.
    pub fn from_faces(faces: Vec<Face>, specs: &[GlueSpec], tol: &Tolerances) -> Result<Self> {
        let mut slots: Vec<[Option<Gluing>; 3]> = vec![[None; 3]; faces.len()];
        for spec in specs {
            let (f, g) = spec.faces;
            let locate = |face: usize| {
                faces.get(face).and_then(|fc| fc.side_with(spec.ends)).map(|side| Slot::new(face, side)).ok_or_else(
                    || Error::InvalidTriangulation(format!("face {face} has no side {}{}", spec.ends.0, spec.ends.1)),
                )
            };
            let (a, b) = (locate(f)?, locate(g)?);
            for (from, to, map) in [(a, b, spec.map), (b, a, spec.map.inverse())] {
                let cell = &mut slots[from.face][from.side];
                if cell.is_some() {
                    return Err(Error::InvalidTriangulation(format!("slot {from:?} glued twice")));
                }
                *cell = Some(Gluing { partner: to, map });
            }
        }
        let gluings = slots
            .into_iter()
            .enumerate()
            .map(|(f, row)| {
                let mut out = [Gluing { partner: Slot::new(f, 0), map: HalfDilation::IDENTITY }; 3];
                for (s, g) in row.into_iter().enumerate() {
                    out[s] = g.ok_or_else(|| Error::InvalidTriangulation(format!("slot ({f},{s}) unglued")))?;
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut g = Self { faces, gluings, vertex_orbits: Vec::new() };
        g.rebuild_orbits()?;
        g.validate(tol)?;
        Ok(g)
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn gluing(&self, slot: Slot) -> &Gluing {
        &self.gluings[slot.face][slot.side]
    }

    pub fn vertex_orbits(&self) -> &[VertexOrbit] {
        &self.vertex_orbits
    }

    fn slots(&self) -> impl Iterator<Item = Slot> + '_ {
        (0..self.faces.len()).flat_map(|f| (0..3).map(move |s| Slot::new(f, s)))
    }

    fn rebuild_orbits(&mut self) -> Result<()> {
        let n = self.faces.len() * 3;
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        let idx = |f: usize, c: usize| f * 3 + c % 3;
        for k in self.slots().collect::<Vec<_>>() {
            let Gluing { partner: h, .. } = *self.gluing(k);
            for (x, y) in
                [(idx(k.face, k.side), idx(h.face, h.side + 1)), (idx(k.face, k.side + 1), idx(h.face, h.side))]
            {
                let (rx, ry) = (root(&mut parent, x), root(&mut parent, y));
                parent[rx.max(ry)] = rx.min(ry);
            }
        }
        let mut orbits: Vec<VertexOrbit> = Vec::new();
        let mut owner: Vec<Option<usize>> = vec![None; n];
        for i in 0..n {
            let r = root(&mut parent, i);
            let (f, c) = (i / 3, i % 3);
            let label = self.faces[f].label(c);
            match owner[r] {
                Some(o) => {
                    if orbits[o].label != label {
                        return Err(Error::InvalidTriangulation(format!(
                            "corner ({f},{c}) labelled {label} joins orbit of {}",
                            orbits[o].label
                        )));
                    }
                    orbits[o].corners.push((f, c));
                }
                None => {
                    owner[r] = Some(orbits.len());
                    orbits.push(VertexOrbit { label, corners: vec![(f, c)] });
                }
            }
        }
        orbits.sort_by_key(|o| o.label);
        if orbits.windows(2).any(|w| w[0].label == w[1].label) {
            return Err(Error::InvalidTriangulation("two vertex orbits share a label".into()));
        }
        self.vertex_orbits = orbits;
        Ok(())
    }

    /// Checks every structural and geometric invariant.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidTriangulation(m));
        if self.faces.len() != 4 {
            return bad(format!("{} faces", self.faces.len()));
        }
        for (i, f) in self.faces.iter().enumerate() {
            if !f.triangle.is_positive(tol.degeneracy) {
                return bad(format!("face {i} is degenerate or clockwise"));
            }
        }
        for k in self.slots() {
            let gl = self.gluing(k);
            let h = gl.partner;
            if h == k || h.face >= self.faces.len() || h.side > 2 {
                return bad(format!("slot {k:?} has invalid partner {h:?}"));
            }
            if self.gluing(h).partner != k {
                return bad(format!("gluing at {k:?} is not an involution"));
            }
            if !(gl.map.scale.is_finite() && gl.map.scale != 0.0) {
                return bad(format!("gluing at {k:?} has scale {}", gl.map.scale));
            }
            let (f, g) = (&self.faces[k.face], &self.faces[h.face]);
            if f.label(k.side) != g.label(h.side + 1) || f.label(k.side + 1) != g.label(h.side) {
                return bad(format!("gluing at {k:?} mismatches endpoint labels"));
            }
            let len = (g.point(h.side + 1) - g.point(h.side)).norm();
            let e0 = (gl.map.apply(f.point(k.side)) - g.point(h.side + 1)).norm();
            let e1 = (gl.map.apply(f.point(k.side + 1)) - g.point(h.side)).norm();
            if e0.max(e1) > MATCH_TOL * len {
                return bad(format!("gluing at {k:?} does not carry side onto side ({:e})", e0.max(e1) / len));
            }
        }
        if self.edge_orbits().len() != 6 || self.vertex_orbits.len() != 4 {
            return bad(format!("{} edges, {} vertices", self.edge_orbits().len(), self.vertex_orbits.len()));
        }
        for (label, theta) in self.cone_angles() {
            if (theta - PI).abs() > tol.angle {
                return bad(format!("cone angle at {label} is {theta}"));
            }
        }
        Ok(())
    }

    /// Edge orbits ordered by their lower slot.
    pub fn edge_orbits(&self) -> Vec<EdgeOrbit> {
        let mut out = Vec::new();
        for k in self.slots() {
            let h = self.gluing(k).partner;
            if k < h {
                let f = &self.faces[k.face];
                out.push(EdgeOrbit { id: out.len(), slots: (k, h), ends: (f.label(k.side), f.label(k.side + 1)) });
            }
        }
        out
    }

    fn edge(&self, edge: usize) -> Result<EdgeOrbit> {
        self.edge_orbits().get(edge).copied().ok_or(Error::NoSuchEdge(edge))
    }

    /// Sum of the two angles facing the edge, one per incident face.
    pub fn opposite_angle_sum(&self, edge: usize) -> Result<f64> {
        let (a, b) = self.edge(edge)?.slots;
        Ok(self.faces[a.face].angle(a.side + 2) + self.faces[b.face].angle(b.side + 2))
    }

    pub fn is_locally_delaunay(&self, edge: usize, tol: &Tolerances) -> Result<bool> {
        Ok(self.opposite_angle_sum(edge)? <= PI + tol.angle)
    }

    /// Total corner angle per singularity, ordered p1..p4.
    pub fn cone_angles(&self) -> Vec<(Singularity, f64)> {
        self.vertex_orbits
            .iter()
            .map(|o| (o.label, o.corners.iter().map(|&(f, c)| self.faces[f].angle(c)).sum()))
            .collect()
    }

    pub fn harmonic_index(&self, tol: &Tolerances) -> Result<f64> {
        self.faces.iter().map(|f| harmonic_index_triangle(&f.triangle, tol.degeneracy)).sum()
    }

    /// Faces around each singularity, ordered p1..p4.
    pub fn degrees(&self) -> [usize; 4] {
        let mut d = [0; 4];
        for o in &self.vertex_orbits {
            d[o.label.index() - 1] = o.corners.len();
        }
        d
    }

    /// Every vertex meets exactly three faces.
    pub fn is_tetrahedral(&self) -> bool {
        self.degrees() == [3; 4]
    }

    /// Replaces the diagonal of the quadrilateral formed by the two faces
    /// incident to `edge`. The new faces reuse the old face indices; the
    /// new diagonal is side 2 of both.
    pub fn flip_edge(&self, edge: usize, tol: &Tolerances) -> Result<Self> {
        let EdgeOrbit { slots: (k, h), .. } = self.edge(edge)?;
        let (f, s, g, t) = (k.face, k.side, h.face, h.side);
        if f == g {
            return Err(Error::SelfGluedEdge { edge });
        }
        let from_g = self.gluing(k).map.inverse();
        let (ff, gf) = (&self.faces[f], &self.faces[g]);
        let (a, b, c) = (ff.point(s), ff.point(s + 1), ff.point(s + 2));
        let (la, lb, lc) = (ff.label(s), ff.label(s + 1), ff.label(s + 2));
        let d = from_g.apply(gf.point(t + 2));
        let ld = gf.label(t + 2);
        let new_f = Face::new([c, a, d], [lc, la, ld]);
        let new_g = Face::new([d, b, c], [ld, lb, lc]);
        if !new_f.triangle.is_positive(tol.degeneracy) || !new_g.triangle.is_positive(tol.degeneracy) {
            return Err(Error::NonConvexQuad { edge });
        }

        // Old slot → (new slot, old chart → new chart).
        let id = HalfDilation::IDENTITY;
        let moved = [
            (Slot::new(f, (s + 2) % 3), Slot::new(f, 0), id),
            (Slot::new(g, (t + 1) % 3), Slot::new(f, 1), from_g),
            (Slot::new(g, (t + 2) % 3), Slot::new(g, 0), from_g),
            (Slot::new(f, (s + 1) % 3), Slot::new(g, 1), id),
        ];
        let relocate = |x: Slot| moved.iter().find(|m| m.0 == x).map_or((x, id), |m| (m.1, m.2));

        let mut gluings = self.gluings.clone();
        for old in self.slots() {
            if old == k || old == h {
                continue;
            }
            let gl = self.gluing(old);
            let (nk, chg_k) = relocate(old);
            let (nh, chg_h) = relocate(gl.partner);
            let map = chg_h.after(&gl.map.after(&chg_k.inverse()));
            gluings[nk.face][nk.side] = Gluing { partner: nh, map };
        }
        gluings[f][2] = Gluing { partner: Slot::new(g, 2), map: id };
        gluings[g][2] = Gluing { partner: Slot::new(f, 2), map: id };

        let mut faces = self.faces.clone();
        faces[f] = new_f;
        faces[g] = new_g;
        let mut out = Self { faces, gluings, vertex_orbits: Vec::new() };
        out.renormalize(f);
        out.renormalize(g);
        out.rebuild_orbits()?;
        out.validate(tol)?;
        Ok(out)
    }

    /// Moves face `i` to a chart with corner 0 at the origin and longest
    /// side 1.
    fn renormalize(&mut self, i: usize) {
        let face = &self.faces[i];
        let scale = 1.0 / face.triangle.longest_side_sq().sqrt();
        let chart = HalfDilation::new(scale, -face.point(0) * scale);
        let back = chart.inverse();
        self.faces[i].triangle = Triangle::from_array(face.triangle.vertices().map(|p| chart.apply(p)));
        for k in self.slots().collect::<Vec<_>>() {
            let gl = &mut self.gluings[k.face][k.side];
            if k.face == i {
                gl.map = gl.map.after(&back);
            }
            if gl.partner.face == i {
                gl.map = chart.after(&gl.map);
            }
        }
    }

    /// Lays the faces out in one plane along a breadth-first spanning tree
    /// of the dual graph, starting from face 0 in its own chart.
    pub fn develop(&self) -> Vec<Face> {
        let mut placed: Vec<Option<HalfDilation>> = vec![None; self.faces.len()];
        placed[0] = Some(HalfDilation::IDENTITY);
        let mut queue = VecDeque::from([0]);
        while let Some(f) = queue.pop_front() {
            let to_plane = placed[f].expect("queued faces are placed");
            for s in 0..3 {
                let gl = self.gluing(Slot::new(f, s));
                let g = gl.partner.face;
                if placed[g].is_none() {
                    placed[g] = Some(to_plane.after(&gl.map.inverse()));
                    queue.push_back(g);
                }
            }
        }
        self.faces
            .iter()
            .zip(placed)
            .map(|(face, m)| {
                let m = m.unwrap_or(HalfDilation::IDENTITY);
                Face {
                    triangle: Triangle::from_array(face.triangle.vertices().map(|p| m.apply(p))),
                    labels: face.labels,
                }
            })
            .collect()
    }

    /// Recovers the marked triple from a tetrahedral triangulation by
    /// developing the three corner faces around the inner face p1p2p3.
    pub fn to_marked_triple(&self, tol: &Tolerances) -> Result<MarkedTriple> {
        if !self.is_tetrahedral() {
            return Err(Error::InvalidTriangulation(format!("degrees {:?} are not tetrahedral", self.degrees())));
        }
        let inner = self
            .faces
            .iter()
            .position(|f| !f.labels.contains(&Singularity::P4))
            .ok_or_else(|| Error::InvalidTriangulation("no face avoids p4".into()))?;
        let face = &self.faces[inner];
        let mut marks = [Vec2::ZERO; 3];
        let mut corners = [Vec2::ZERO; 3];
        for s in 0..3 {
            marks[face.label(s).index() - 1] = face.point(s);
            let gl = self.gluing(Slot::new(inner, s));
            let across = &self.faces[gl.partner.face];
            if across.label(gl.partner.side + 2) != Singularity::P4 {
                return Err(Error::InvalidTriangulation("inner side not opposite p4".into()));
            }
            let p4 = gl.map.inverse().apply(across.point(gl.partner.side + 2));
            // O faces p3p1, A faces p1p2, B faces p2p3.
            let (x, y) = (face.label(s).index(), face.label(s + 1).index());
            let slot = match (x.min(y), x.max(y)) {
                (1, 2) => 1,
                (2, 3) => 2,
                _ => 0,
            };
            corners[slot] = p4;
        }
        let m = MarkedTriangle::new(corners, marks, tol)?;
        from_marked_triangle(&m)
    }
}
