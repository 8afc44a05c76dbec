//! Planar primitives: vectors, triangles, angles, 2×2 matrices and the
//! harmonic index.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Chart coordinate. Serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Vec2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<(f64, f64)> for Vec2 {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Largest absolute coordinate.
    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs())
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

/// Three vertices; faces of a triangulation are kept counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub a: Vec2,
    pub b: Vec2,
    pub c: Vec2,
}

impl Triangle {
    pub const fn new(a: Vec2, b: Vec2, c: Vec2) -> Self {
        Self { a, b, c }
    }

    pub fn from_array(p: [Vec2; 3]) -> Self {
        Self::new(p[0], p[1], p[2])
    }

    pub fn vertices(&self) -> [Vec2; 3] {
        [self.a, self.b, self.c]
    }

    /// Vertex `i` taken mod 3.
    pub fn vertex(&self, i: usize) -> Vec2 {
        self.vertices()[i % 3]
    }

    pub fn longest_side_sq(&self) -> f64 {
        (self.b - self.a).norm_sq().max((self.c - self.b).norm_sq()).max((self.a - self.c).norm_sq())
    }

    /// |signed area| < tol · (longest side)², or any coordinate non-finite.
    pub fn is_degenerate(&self, tol: f64) -> bool {
        let area = signed_area(self);
        !area.is_finite() || area.abs() < tol * self.longest_side_sq() || self.longest_side_sq() == 0.0
    }

    /// Non-degenerate and counterclockwise.
    pub fn is_positive(&self, tol: f64) -> bool {
        !self.is_degenerate(tol) && signed_area(self) > 0.0
    }
}

/// ½·cross(b − a, c − a); positive iff counterclockwise.
pub fn signed_area(t: &Triangle) -> f64 {
    0.5 * (t.b - t.a).cross(t.c - t.a)
}

/// Unsigned angle at `p` between rays to `q` and `r`, in [0, π].
pub fn angle_between(p: Vec2, q: Vec2, r: Vec2) -> f64 {
    let u = q - p;
    let w = r - p;
    u.cross(w).abs().atan2(u.dot(w))
}

/// Interior angle at vertex `vertex_index` (0, 1 or 2).
pub fn angle_at(t: &Triangle, vertex_index: usize, tol: f64) -> Result<f64> {
    if t.is_degenerate(tol) {
        return Err(Error::DegenerateTriangle);
    }
    let i = vertex_index % 3;
    Ok(angle_between(t.vertex(i), t.vertex(i + 1), t.vertex(i + 2)))
}

/// Σ side² / area.
pub fn harmonic_index_triangle(t: &Triangle, tol: f64) -> Result<f64> {
    if t.is_degenerate(tol) {
        return Err(Error::DegenerateTriangle);
    }
    let l2 = (t.b - t.a).norm_sq() + (t.c - t.b).norm_sq() + (t.a - t.c).norm_sq();
    Ok(l2 / signed_area(t).abs())
}

pub fn harmonic_index_triangulation(ts: &[Triangle], tol: f64) -> Result<f64> {
    ts.iter().map(|t| harmonic_index_triangle(t, tol)).sum()
}

/// Real 2×2 matrix `[[a, b], [c, d]]`, serialized row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[[f64; 2]; 2]", into = "[[f64; 2]; 2]")]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl From<[[f64; 2]; 2]> for Mat2 {
    fn from(m: [[f64; 2]; 2]) -> Self {
        Self::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl From<Mat2> for [[f64; 2]; 2] {
    fn from(m: Mat2) -> Self {
        m.rows()
    }
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// Matrix whose columns are `u` and `v`.
    pub fn from_columns(u: Vec2, v: Vec2) -> Self {
        Self::new(u.x, v.x, u.y, v.y)
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::SingularMatrix(det.abs()));
        }
        Ok(Self::new(self.d / det, -self.b / det, -self.c / det, self.a / det))
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        Vec2::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().fold(0.0_f64, |m, e| m.max(e.abs()))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// z ↦ scale·z + offset with real nonzero `scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfDilation {
    pub scale: f64,
    pub offset: Vec2,
}

impl HalfDilation {
    pub const IDENTITY: HalfDilation = HalfDilation { scale: 1.0, offset: Vec2::ZERO };

    pub fn new(scale: f64, offset: Vec2) -> Self {
        Self { scale, offset }
    }

    /// Dilation by `scale` fixing `center`.
    pub fn about(center: Vec2, scale: f64) -> Self {
        Self::new(scale, center - center * scale)
    }

    pub fn apply(&self, z: Vec2) -> Vec2 {
        z * self.scale + self.offset
    }

    pub fn inverse(&self) -> Self {
        Self::new(1.0 / self.scale, -self.offset / self.scale)
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &HalfDilation) -> Self {
        Self::new(self.scale * first.scale, first.offset * self.scale + self.offset)
    }
}
