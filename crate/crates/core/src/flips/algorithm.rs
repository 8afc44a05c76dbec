//! Flip non-locally-Delaunay edges until none remain.

use std::f64::consts::PI;

use log::warn;
use serde::{Deserialize, Serialize};

use super::glued::GluedTriangulation;
use crate::error::{Error, Result};
use crate::tol::Tolerances;

pub const DEFAULT_MAX_STEPS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlipStep {
    pub edge: usize,
    pub hrm_before: f64,
    pub hrm_after: f64,
    /// Opposite-angle sum of the edge before flipping.
    #[serde(skip)]
    pub angle_sum: f64,
    /// Φ index of the flipped edge when flipped from a tetrahedral state.
    #[serde(skip)]
    pub flip_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlipTrace {
    pub initial: GluedTriangulation,
    pub steps: Vec<FlipStep>,
    /// Φ index per consecutive pair of flips between tetrahedral states.
    pub phi_pairs: Vec<usize>,
    /// Vertex degrees p1..p4 before the first step and after every step.
    pub degrees: Vec<[usize; 4]>,
    pub final_: GluedTriangulation,
}

/// Repeatedly flips the edge with the largest opposite-angle sum (lowest id
/// on ties) while that sum exceeds π + `tol.angle`.
pub fn flipping_algorithm(g: &GluedTriangulation, max_steps: usize, tol: &Tolerances) -> Result<FlipTrace> {
    let mut cur = g.clone();
    let mut steps: Vec<FlipStep> = Vec::new();
    let mut degrees = vec![cur.degrees()];
    loop {
        let mut best: Option<(usize, f64)> = None;
        for e in cur.edge_orbits() {
            let s = cur.opposite_angle_sum(e.id)?;
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((e.id, s));
            }
        }
        let (edge, angle_sum) = best.ok_or_else(|| Error::InvalidTriangulation("no edges".into()))?;
        if angle_sum <= PI + tol.angle {
            break;
        }
        if steps.len() >= max_steps {
            return Err(Error::StepLimitExceeded(max_steps));
        }
        let flip_index = if cur.is_tetrahedral() { cur.edge_orbits()[edge].flip_index() } else { None };
        let hrm_before = cur.harmonic_index(tol)?;
        cur = cur.flip_edge(edge, tol)?;
        let hrm_after = cur.harmonic_index(tol)?;
        if hrm_after > hrm_before + 1e-9 * hrm_before {
            warn!("harmonic index rose from {hrm_before} to {hrm_after} flipping edge {edge}");
        }
        steps.push(FlipStep { edge, hrm_before, hrm_after, angle_sum, flip_index });
        degrees.push(cur.degrees());
    }
    let phi_pairs = recover_phi_pairs(&steps, &degrees);
    Ok(FlipTrace { initial: g.clone(), steps, phi_pairs, degrees, final_: cur })
}

/// A step pair from a tetrahedral state to a tetrahedral state is one Φ_k,
/// with k read off the first flipped edge.
fn recover_phi_pairs(steps: &[FlipStep], degrees: &[[usize; 4]]) -> Vec<usize> {
    let mut out = Vec::new();
    for (n, pair) in steps.chunks(2).enumerate() {
        let (start, end) = (degrees[2 * n], degrees.get(2 * n + 2));
        match (pair[0].flip_index, end) {
            (Some(k), Some(&d)) if start == [3; 4] && d == [3; 4] => out.push(k),
            _ => warn!("flips {} and {} do not form a paired flip", 2 * n, 2 * n + 1),
        }
    }
    out
}

impl FlipTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flips::surface_phi;
    use crate::geom::Vec2;
    use crate::sample;
    use crate::surface::{glue, to_marked_triangle, MarkedTriple};
    use proptest::prelude::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn run(t: &MarkedTriple) -> FlipTrace {
        let g = glue(&to_marked_triangle(t), &tol()).unwrap();
        flipping_algorithm(&g, DEFAULT_MAX_STEPS, &tol()).unwrap()
    }

    #[test]
    fn delaunay_input_needs_no_flips() {
        let t = MarkedTriple::new(Vec2::new(1.0, 0.0), Vec2::new(-0.5, 0.8), [1.0; 3]).unwrap();
        let tr = run(&t);
        assert!(tr.is_empty());
        assert!(tr.phi_pairs.is_empty());
        assert_eq!(tr.final_, tr.initial);
    }

    #[test]
    fn one_violated_sum_takes_two_flips() {
        let base = MarkedTriple::new(Vec2::new(1.0, 0.0), Vec2::new(-0.5, 0.8), [1.2, 0.9, 1.1]).unwrap();
        let t = surface_phi(2, &base).unwrap();
        let tr = run(&t);
        assert_eq!(tr.len(), 2);
        assert_eq!(tr.phi_pairs, vec![2]);
        let got = tr.final_.to_marked_triple(&tol()).unwrap();
        assert!(got.canonical_equal(&base, 1e-10));
    }

    #[test]
    fn step_limit_reported() {
        let base = MarkedTriple::new(Vec2::new(1.0, 0.0), Vec2::new(-0.5, 0.8), [1.2, 0.9, 1.1]).unwrap();
        let t = surface_phi(2, &base).unwrap();
        let g = glue(&to_marked_triangle(&t), &tol()).unwrap();
        assert_eq!(flipping_algorithm(&g, 1, &tol()), Err(Error::StepLimitExceeded(1)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn prop_trace_invariants(t in sample::arb_scrambled_triple(6)) {
            let tr = run(&t);
            prop_assert_eq!(tr.len() % 2, 0);
            for (i, s) in tr.steps.iter().enumerate() {
                prop_assert!(s.hrm_after <= s.hrm_before * (1.0 + 1e-9));
                prop_assert!(s.hrm_after < s.hrm_before);
                let mut d = tr.degrees[i + 1];
                d.sort_unstable();
                prop_assert_eq!(d, if i % 2 == 0 { [2, 2, 4, 4] } else { [3; 4] });
            }
            prop_assert_eq!(tr.phi_pairs.len(), tr.len() / 2);
            for e in tr.final_.edge_orbits() {
                prop_assert!(tr.final_.is_locally_delaunay(e.id, &tol()).unwrap());
            }
        }
    }
}
