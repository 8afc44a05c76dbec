//! The paired flips Φ1, Φ2, Φ3 on marked triples, their basis matrices and
//! ψ compositions, plus the chart-level single-edge flip and the flipping
//! algorithm.
//!
//! Basis matrices use the column convention: column i holds the coordinates
//! of the image of v_i in the basis (v1, v2), so the ambient linear map is
//! P·M·P⁻¹ with P = [v1 v2].
//!
//! Two versions of each flip are exposed. [`phi`] is the displayed vector
//! formula with ratios carried over unchanged. [`surface_phi`] is the flip of
//! the actual surface: same vectors, every ratio inverted. Only the latter is
//! an involution and agrees with chart-level flipping.

pub mod algorithm;
pub mod glued;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Mat2, Vec2};
use crate::surface::MarkedTriple;

pub use algorithm::{flipping_algorithm, FlipStep, FlipTrace};
pub use glued::{EdgeOrbit, Face, GluedTriangulation, Singularity, Slot};

/// Composition pairs (j, i), meaning Φ_j after Φ_i.
pub const PSI_PAIRS: [(usize, usize); 3] = [(3, 2), (2, 1), (1, 3)];

/// Linear part of a flip in the basis (v1, v2), column convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AffineFlipMatrix(pub Mat2);

impl AffineFlipMatrix {
    pub fn matrix(&self) -> Mat2 {
        self.0
    }

    /// Images of the basis vectors.
    pub fn apply_to_basis(&self, v1: Vec2, v2: Vec2) -> (Vec2, Vec2) {
        let m = self.0;
        (v1 * m.a + v2 * m.c, v1 * m.b + v2 * m.d)
    }

    /// P·M·P⁻¹ with P = [v1 v2].
    pub fn ambient(&self, v1: Vec2, v2: Vec2) -> Result<Mat2> {
        let p = Mat2::from_columns(v1, v2);
        Ok(p * self.0 * p.inverse()?)
    }
}

fn check_index(i: usize) -> Result<()> {
    if (1..=3).contains(&i) {
        Ok(())
    } else {
        Err(Error::BadFlipIndex(i))
    }
}

fn check_pair(j: usize, i: usize) -> Result<()> {
    if PSI_PAIRS.contains(&(j, i)) {
        Ok(())
    } else {
        Err(Error::UnsupportedPair { j, i })
    }
}

/// Φ1: (−(λ1+1)v3 − v1, −v2, λ1v3); Φ2: (λ2v1, −(λ2+1)v1 − v2, −v3);
/// Φ3: (−v1, λ3v2, −(λ3+1)v2 − v3). The long entry is evaluated as minus
/// the sum of the other two, which is the same vector without cancellation.
fn flip_vectors(i: usize, t: &MarkedTriple) -> [Vec2; 3] {
    let [v1, v2, v3] = t.vectors();
    let [l1, l2, l3] = t.lambda();
    match i {
        1 => {
            let (b, c) = (-v2, v3 * l1);
            [-(b + c), b, c]
        }
        2 => {
            let (a, c) = (v1 * l2, -v3);
            [a, -(a + c), c]
        }
        _ => {
            let (a, b) = (-v1, v2 * l3);
            [a, b, -(a + b)]
        }
    }
}

fn rebuild(v: [Vec2; 3], lambda: [f64; 3]) -> Result<MarkedTriple> {
    MarkedTriple::from_parts(v[0], v[1], v[2], lambda).map_err(|e| match e {
        Error::DegenerateInput => Error::InvalidTriangulation("flip produced dependent vectors".into()),
        other => other,
    })
}

/// Displayed Φ_i formula; ratios unchanged.
pub fn phi(i: usize, t: &MarkedTriple) -> Result<MarkedTriple> {
    check_index(i)?;
    rebuild(flip_vectors(i, t), t.lambda())
}

/// Φ_i as a flip of the surface: the vectors of [`phi`] with every ratio
/// inverted. An involution.
pub fn surface_phi(i: usize, t: &MarkedTriple) -> Result<MarkedTriple> {
    check_index(i)?;
    rebuild(flip_vectors(i, t), t.lambda().map(f64::recip))
}

/// Basis matrix of Φ_i at ratios `lambda`.
pub fn phi_basis_matrix(i: usize, lambda: [f64; 3]) -> Result<AffineFlipMatrix> {
    check_index(i)?;
    let [l1, l2, l3] = lambda;
    Ok(AffineFlipMatrix(match i {
        1 => Mat2::new(l1, 0.0, l1 + 1.0, -1.0),
        2 => Mat2::new(l2, -(l2 + 1.0), 0.0, -1.0),
        _ => Mat2::new(-1.0, 0.0, 0.0, l3),
    }))
}

/// Basis matrix of Φ_i at `t`; determinant −λ_i.
pub fn phi_matrix(i: usize, t: &MarkedTriple) -> Result<AffineFlipMatrix> {
    phi_basis_matrix(i, t.lambda())
}

/// ψ_{j,i} = Φ_j ∘ Φ_i with [`phi`], expressed in the basis of `t`. Since
/// the intermediate basis is P·M_i, the composite basis matrix is M_i·M_j.
pub fn psi_matrix(j: usize, i: usize, t: &MarkedTriple) -> Result<AffineFlipMatrix> {
    check_pair(j, i)?;
    let mid = phi(i, t)?;
    Ok(AffineFlipMatrix(phi_matrix(i, t)?.0 * phi_matrix(j, &mid)?.0))
}

/// ψ_{j,i} with [`surface_phi`]: basis matrix M_i(λ)·M_j(1/λ).
pub fn surface_psi_matrix(j: usize, i: usize, t: &MarkedTriple) -> Result<AffineFlipMatrix> {
    check_pair(j, i)?;
    let mid = surface_phi(i, t)?;
    Ok(AffineFlipMatrix(phi_matrix(i, t)?.0 * phi_matrix(j, &mid)?.0))
}

/// The printed ψ matrices, verbatim, for auditing.
pub fn printed_psi_matrix(j: usize, i: usize, lambda: [f64; 3]) -> Result<AffineFlipMatrix> {
    check_pair(j, i)?;
    let [l1, l2, l3] = lambda;
    Ok(AffineFlipMatrix(match (j, i) {
        (3, 2) => Mat2::new(-l2, -l3 * (l2 + 1.0), 0.0, -l3),
        (2, 1) => Mat2::new(l1 * l2, l2 * (l1 + 1.0), -l1 * (l2 + 1.0), -l1 * l2 - l1 - l2),
        _ => Mat2::new(l3 * l1, 0.0, l3 * (l1 + 1.0), 1.0),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use crate::surface::{to_marked_triangle, TriangulationKind};
    use proptest::prelude::*;

    fn triple(v1: (f64, f64), v2: (f64, f64), lambda: [f64; 3]) -> MarkedTriple {
        MarkedTriple::new(v1.into(), v2.into(), lambda).unwrap()
    }

    fn near(a: Vec2, b: Vec2, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn phi3_example() {
        let t = triple((1.0, 0.0), (0.0, 1.0), [1.0, 1.0, 2.0]);
        let u = phi(3, &t).unwrap();
        assert_eq!(u.vectors(), [Vec2::new(-1.0, 0.0), Vec2::new(0.0, 2.0), Vec2::new(1.0, -2.0)]);
        assert_eq!(u.lambda(), t.lambda());
    }

    #[test]
    fn phi1_example() {
        let t = triple((1.0, 0.0), (0.0, 1.0), [1.0, 3.0, 0.5]);
        assert_eq!(t.v3(), Vec2::new(-1.0, -1.0));
        assert_eq!(phi(1, &t).unwrap().v1(), Vec2::new(1.0, 2.0));
    }

    #[test]
    fn phi_matrix_examples() {
        let t = triple((1.0, 0.0), (0.0, 1.0), [1.0, 1.0, 2.0]);
        let m1 = phi_matrix(1, &t).unwrap().0;
        assert_eq!(m1, Mat2::new(1.0, 0.0, 2.0, -1.0));
        assert_eq!(m1.det(), -1.0);
        assert_eq!(phi_matrix(3, &t).unwrap().0, Mat2::new(-1.0, 0.0, 0.0, 2.0));
    }

    #[test]
    fn psi_examples() {
        let t = triple((1.0, 0.0), (0.0, 1.0), [1.0; 3]);
        let m = psi_matrix(3, 2, &t).unwrap().0;
        assert_eq!(m, Mat2::new(-1.0, -2.0, 0.0, -1.0));
        assert_eq!(m.trace().powi(2) / m.det(), 4.0);
        assert_eq!(printed_psi_matrix(3, 2, [1.0; 3]).unwrap().0, m);
        let l = [1.5, 0.5, 3.0];
        let t = triple((0.3, 0.1), (-0.2, 0.9), l);
        assert_eq!(psi_matrix(1, 3, &t).unwrap().0, Mat2::new(-l[0], 0.0, l[2] * (l[0] + 1.0), -l[2]));
        assert_eq!(printed_psi_matrix(1, 3, l).unwrap().0, Mat2::new(l[2] * l[0], 0.0, l[2] * (l[0] + 1.0), 1.0));
    }

    #[test]
    fn unsupported_pairs() {
        let t = triple((1.0, 0.0), (0.0, 1.0), [1.0; 3]);
        assert_eq!(psi_matrix(2, 3, &t), Err(Error::UnsupportedPair { j: 2, i: 3 }));
        assert!(printed_psi_matrix(1, 1, [1.0; 3]).is_err());
        assert_eq!(phi(4, &t), Err(Error::BadFlipIndex(4)));
    }

    #[test]
    fn literal_phi3_squared() {
        let t = triple((0.4, 0.2), (-0.1, 0.8), [0.6, 1.7, 2.3]);
        let u = phi(3, &phi(3, &t).unwrap()).unwrap();
        assert!(near(u.v1(), t.v1(), 1e-15));
        assert!(near(u.v2(), t.v2() * (2.3 * 2.3), 1e-15));
    }

    /// Φ1², Φ2² by double substitution: Φ1² scales v1 + v2 by λ1², Φ2²
    /// scales v1 by λ2², each fixing the other spanning vector.
    #[test]
    fn literal_phi_squared_others() {
        let t = triple((0.4, 0.2), (-0.1, 0.8), [0.6, 1.7, 2.3]);
        let u = phi(1, &phi(1, &t).unwrap()).unwrap();
        assert!(near(u.v3(), t.v3() * (0.6 * 0.6), 1e-15));
        assert!(near(u.v2(), t.v2(), 1e-15));
        let w = phi(2, &phi(2, &t).unwrap()).unwrap();
        assert!(near(w.v1(), t.v1() * (1.7 * 1.7), 1e-15));
        assert!(near(w.v3(), t.v3(), 1e-15));
    }

    #[test]
    fn surface_psi_traces_match_closed_forms() {
        let l = [0.7, 2.2, 1.3];
        let t = triple((1.0, 0.1), (-0.3, 1.0), l);
        for (j, i) in PSI_PAIRS {
            let m = surface_psi_matrix(j, i, &t).unwrap().0;
            let x = l[j - 1] * l[i - 1];
            assert!((m.trace().powi(2) / m.det() - (x + 2.0 + 1.0 / x)).abs() < 1e-12);
        }
    }

    /// A flip sequence through chart-level flips reproduces surface_phi.
    #[test]
    fn surface_phi_matches_double_flip() {
        let tol = crate::tol::Tolerances::default();
        let t = triple((1.0, 0.2), (-0.4, 0.9), [0.7, 1.8, 2.5]);
        let g = crate::surface::glue(&to_marked_triangle(&t), &tol).unwrap();
        for k in 1..=3 {
            let edges: Vec<_> = g.edge_orbits().into_iter().filter(|e| e.flip_index() == Some(k)).collect();
            assert_eq!(edges.len(), 2);
            let h = g.flip_edge(edges[0].id, &tol).unwrap();
            let diagonal = crate::flips::glued::Slot::new(edges[0].slots.0.face, 2);
            let partner = h
                .edge_orbits()
                .into_iter()
                .filter(|e| e.slots.0 != diagonal && e.slots.1 != diagonal)
                .find(|e| e.ends == edges[1].ends || (e.ends.1, e.ends.0) == edges[1].ends)
                .unwrap();
            let h2 = h.flip_edge(partner.id, &tol).unwrap();
            assert_eq!(crate::surface::classify_combinatorics(&h2).unwrap().kind, TriangulationKind::Tetrahedral);
            let got = h2.to_marked_triple(&tol).unwrap();
            assert!(got.canonical_equal(&surface_phi(k, &t).unwrap(), 1e-10), "k = {k}");
        }
    }

    proptest! {
        #[test]
        fn prop_phi_invariants(t in sample::arb_triple(), i in 1usize..=3) {
            let u = phi(i, &t).unwrap();
            prop_assert_eq!(u.lambda(), t.lambda());
            let scale = u.vectors().iter().fold(0.0f64, |m, v| m.max(v.max_abs()));
            prop_assert!((u.v1() + u.v2() + u.v3()).max_abs() <= 1e-12 * scale);
            let m = phi_matrix(i, &t).unwrap();
            let (a, b) = m.apply_to_basis(t.v1(), t.v2());
            prop_assert!(near(a, u.v1(), 1e-12 * scale.max(1.0)));
            prop_assert!(near(b, u.v2(), 1e-12 * scale.max(1.0)));
            prop_assert!((m.0.det() + t.lambda()[i - 1]).abs() <= 1e-12 * t.lambda()[i - 1].max(1.0));
        }

        #[test]
        fn prop_surface_phi_involution(t in sample::arb_triple(), i in 1usize..=3) {
            let back = surface_phi(i, &surface_phi(i, &t).unwrap()).unwrap();
            prop_assert!(back.canonical_equal(&t, 1e-12));
        }

        #[test]
        fn prop_psi_literal_traces(t in sample::arb_triple()) {
            let l = t.lambda();
            for (j, i) in PSI_PAIRS {
                let m = psi_matrix(j, i, &t).unwrap().0;
                prop_assert!(m.det() > 0.0);
                let want = (l[i - 1] + l[j - 1]).powi(2) / (l[i - 1] * l[j - 1]);
                prop_assert!((m.trace().powi(2) / m.det() - want).abs() <= 1e-9 * want);
            }
        }

        #[test]
        fn prop_surface_psi_reproduces_double_flip(t in sample::arb_triple()) {
            for (j, i) in PSI_PAIRS {
                let image = surface_phi(j, &surface_phi(i, &t).unwrap()).unwrap();
                for k in 0..3 {
                    prop_assert!((image.lambda()[k] - t.lambda()[k]).abs() <= 1e-15 * t.lambda()[k]);
                }
                let (a, b) = surface_psi_matrix(j, i, &t).unwrap().apply_to_basis(t.v1(), t.v2());
                let scale = image.v1().max_abs().max(image.v2().max_abs());
                prop_assert!(near(a, image.v1(), 1e-12 * scale));
                prop_assert!(near(b, image.v2(), 1e-12 * scale));
            }
        }
    }
}
