//! Delaunay normalization by paired flips, Veech-group generators, trace
//! classification and the trace audit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flips::{printed_psi_matrix, psi_matrix, surface_phi, surface_psi_matrix, PSI_PAIRS};
use crate::geom::{Mat2, Vec2};
use crate::surface::{delaunay_status, to_marked_triangle, DelaunayStatus, MarkedTriple};
use crate::tol::Tolerances;

/// Flips by Φ_k while some angle-pair sum k exceeds π. Returns the Delaunay
/// triple and the Φ word in application order.
pub fn delaunay_normalize(t: &MarkedTriple, max_steps: usize, tol: &Tolerances) -> Result<(MarkedTriple, Vec<usize>)> {
    let mut cur = *t;
    let mut word = Vec::new();
    loop {
        match delaunay_status(&to_marked_triangle(&cur), tol)? {
            DelaunayStatus::NotDelaunay { pair } => {
                if word.len() >= max_steps {
                    return Err(Error::StepLimitExceeded(max_steps));
                }
                cur = surface_phi(pair, &cur)?;
                word.push(pair);
            }
            _ => return Ok((cur, word)),
        }
    }
}

/// Applies a Φ word in order.
pub fn apply_word(t: &MarkedTriple, word: &[usize]) -> Result<MarkedTriple> {
    word.iter().try_fold(*t, |cur, &k| surface_phi(k, &cur))
}

/// Canonical equality modulo the alternative Delaunay representative when
/// one angle-pair sum equals π.
pub fn delaunay_equivalent(a: &MarkedTriple, b: &MarkedTriple, eq_tol: f64, tol: &Tolerances) -> Result<bool> {
    if a.canonical_equal(b, eq_tol) {
        return Ok(true);
    }
    for (x, y) in [(a, b), (b, a)] {
        if let DelaunayStatus::NonUniqueFourFold { pair } = delaunay_status(&to_marked_triangle(x), tol)? {
            if surface_phi(pair, x)?.canonical_equal(y, eq_tol) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Invertible 2×2 matrix modulo nonzero scalars, scaled so that its
/// largest-magnitude entry (first in row-major order on ties) is +1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjectiveMatrix(Mat2);

impl ProjectiveMatrix {
    pub fn new(m: Mat2) -> Result<Self> {
        if !m.entries().iter().all(|e| e.is_finite()) {
            return Err(Error::NonFinite("matrix entry"));
        }
        let max = m.max_abs();
        let pivot = m
            .entries()
            .into_iter()
            .find(|e| e.abs() >= max * (1.0 - 1e-12))
            .filter(|&p| p != 0.0)
            .ok_or(Error::SingularMatrix(0.0))?;
        let c = m.scale(1.0 / pivot);
        if c.det().abs() <= 1e-12 {
            return Err(Error::SingularMatrix(c.det().abs()));
        }
        Ok(Self(c))
    }

    pub fn matrix(&self) -> Mat2 {
        self.0
    }

    pub fn det(&self) -> f64 {
        self.0.det()
    }
}

/// tr²/det; scale- and conjugation-invariant.
pub fn normalized_trace_sq(a: &ProjectiveMatrix) -> Result<f64> {
    matrix_trace_sq(&a.0)
}

fn matrix_trace_sq(m: &Mat2) -> Result<f64> {
    let det = m.det();
    if det < 0.0 {
        return Err(Error::NegativeDeterminant(det));
    }
    if det == 0.0 {
        return Err(Error::SingularMatrix(0.0));
    }
    Ok(m.trace().powi(2) / det)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementClass {
    pub kind: ElementKind,
    pub normalized_trace_sq: f64,
    /// Translation length; 0 for parabolic, absent for elliptic.
    pub length: Option<f64>,
}

pub fn classify(a: &ProjectiveMatrix, tol: &Tolerances) -> Result<ElementClass> {
    classify_trace_sq(normalized_trace_sq(a)?, tol)
}

/// Thresholds at 4 with band `tol.parabolic`.
pub fn classify_trace_sq(x: f64, tol: &Tolerances) -> Result<ElementClass> {
    let (kind, length) = if x < 4.0 - tol.parabolic {
        (ElementKind::Elliptic, None)
    } else if x <= 4.0 + tol.parabolic {
        (ElementKind::Parabolic, Some(0.0))
    } else {
        (ElementKind::Hyperbolic, Some(trace_to_length(x.sqrt(), tol)?))
    };
    Ok(ElementClass { kind, normalized_trace_sq: x, length })
}

/// l with |tr| = 2 cosh l.
pub fn trace_to_length(tr_abs: f64, tol: &Tolerances) -> Result<f64> {
    if tr_abs.is_nan() || tr_abs < 2.0 - tol.parabolic {
        return Err(Error::TraceBelowTwo(tr_abs));
    }
    Ok((tr_abs / 2.0).max(1.0).acosh())
}

/// x + 2 + 1/x at x = λ3λ2, λ2λ1, λ1λ3, in [`PSI_PAIRS`] order.
pub fn closed_form_traces(lambda: [f64; 3]) -> Result<[f64; 3]> {
    for (i, &l) in lambda.iter().enumerate() {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::NonPositiveLambda { index: i + 1, value: l });
        }
    }
    Ok(PSI_PAIRS.map(|(j, i)| {
        let x = lambda[j - 1] * lambda[i - 1];
        x + 2.0 + 1.0 / x
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub pair: (usize, usize),
    /// Ambient matrix P·M·P⁻¹, projectively normalized.
    pub matrix: ProjectiveMatrix,
    /// Basis matrix before conjugation.
    pub basis_matrix: Mat2,
    pub class: ElementClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub generators: [Generator; 3],
    pub source_lambdas: [f64; 3],
    pub basis: [Vec2; 2],
}

/// The three ψ classes at a Delaunay triple, built from the surface flips.
pub fn veech_generators(t: &MarkedTriple, tol: &Tolerances) -> Result<GeneratorSet> {
    if let DelaunayStatus::NotDelaunay { pair } = delaunay_status(&to_marked_triangle(t), tol)? {
        return Err(Error::NotDelaunayInput(pair));
    }
    let mut gens = Vec::with_capacity(3);
    for (j, i) in PSI_PAIRS {
        let m = surface_psi_matrix(j, i, t)?;
        let ambient = m.ambient(t.v1(), t.v2())?;
        if ambient.det() <= 0.0 {
            return Err(Error::NegativeDeterminant(ambient.det()));
        }
        let matrix = ProjectiveMatrix::new(ambient)?;
        let class = classify(&matrix, tol)?;
        gens.push(Generator { pair: (j, i), matrix, basis_matrix: m.0, class });
    }
    Ok(GeneratorSet {
        generators: gens.try_into().expect("three pairs"),
        source_lambdas: t.lambda(),
        basis: [t.v1(), t.v2()],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditDeltas {
    pub composition_vs_printed: f64,
    pub composition_vs_closed_form: f64,
    pub printed_vs_closed_form: f64,
    pub surface_vs_closed_form: f64,
}

/// Normalized squared traces of one ψ pair from four sources.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub pair: (usize, usize),
    /// Composition of the ratio-preserving Φ formulas.
    pub composition: f64,
    /// Printed matrix.
    pub printed: f64,
    /// Closed form x + 2 + 1/x.
    pub closed_form: f64,
    /// Composition of the surface flips.
    pub surface: f64,
    pub delta: AuditDeltas,
    /// Some delta exceeds 1e−9 relative.
    pub flagged: bool,
}

pub fn trace_audit(t: &MarkedTriple) -> Result<Vec<AuditRecord>> {
    let closed = closed_form_traces(t.lambda())?;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs());
    PSI_PAIRS
        .iter()
        .zip(closed)
        .map(|(&(j, i), closed_form)| {
            let composition = matrix_trace_sq(&psi_matrix(j, i, t)?.0)?;
            let printed = matrix_trace_sq(&printed_psi_matrix(j, i, t.lambda())?.0)?;
            let surface = matrix_trace_sq(&surface_psi_matrix(j, i, t)?.0)?;
            let delta = AuditDeltas {
                composition_vs_printed: composition - printed,
                composition_vs_closed_form: composition - closed_form,
                printed_vs_closed_form: printed - closed_form,
                surface_vs_closed_form: surface - closed_form,
            };
            let flagged =
                [(composition, printed), (composition, closed_form), (printed, closed_form), (surface, closed_form)]
                    .iter()
                    .any(|&(a, b)| rel(a, b) > 1e-9);
            Ok(AuditRecord { pair: (j, i), composition, printed, closed_form, surface, delta, flagged })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_3;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn pm(a: f64, b: f64, c: f64, d: f64) -> ProjectiveMatrix {
        ProjectiveMatrix::new(Mat2::new(a, b, c, d)).unwrap()
    }

    fn rotation(theta: f64) -> ProjectiveMatrix {
        pm(theta.cos(), -theta.sin(), theta.sin(), theta.cos())
    }

    #[test]
    fn trace_sq_examples() {
        assert_eq!(normalized_trace_sq(&pm(1.0, 0.0, 0.0, 1.0)).unwrap(), 4.0);
        assert_eq!(normalized_trace_sq(&pm(2.0, 0.0, 0.0, 1.0)).unwrap(), 4.5);
        assert!(normalized_trace_sq(&rotation(std::f64::consts::FRAC_PI_2)).unwrap().abs() < 1e-30);
        assert!(matches!(normalized_trace_sq(&pm(1.0, 0.0, 0.0, -1.0)), Err(Error::NegativeDeterminant(_))));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&pm(-1.0, -2.0, 0.0, -1.0), &tol()).unwrap().kind, ElementKind::Parabolic);
        let h = classify(&pm(2.0, 0.0, 0.0, 1.0), &tol()).unwrap();
        assert_eq!(h.kind, ElementKind::Hyperbolic);
        assert!((h.length.unwrap() - (4.5f64.sqrt() / 2.0).acosh()).abs() < 1e-15);
        let e = classify(&rotation(FRAC_PI_3), &tol()).unwrap();
        assert_eq!(e.kind, ElementKind::Elliptic);
        assert_eq!(e.length, None);
    }

    #[test]
    fn length_examples() {
        assert_eq!(trace_to_length(2.0, &tol()).unwrap(), 0.0);
        assert!((trace_to_length(2.0 * 1f64.cosh(), &tol()).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(trace_to_length(1.9, &tol()), Err(Error::TraceBelowTwo(1.9)));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form_traces([1.0; 3]).unwrap(), [4.0; 3]);
        assert_eq!(closed_form_traces([2.0, 1.0, 1.0]).unwrap(), [4.0, 4.5, 4.5]);
        assert!(closed_form_traces([1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn projective_canonical_form() {
        let a = pm(-1.0, -2.0, 0.0, -1.0);
        assert_eq!(a.matrix(), Mat2::new(0.5, 1.0, -0.0, 0.5));
        assert_eq!(pm(3.0, -3.0, 1.0, 2.0).matrix().a, 1.0);
        assert!(ProjectiveMatrix::new(Mat2::new(1.0, 2.0, 2.0, 4.0)).is_err());
        assert!(ProjectiveMatrix::new(Mat2::new(0.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn unit_generators_are_parabolic() {
        let t = MarkedTriple::new(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), [1.0; 3]).unwrap();
        let g = veech_generators(&t, &tol()).unwrap();
        assert_eq!(g.generators[0].matrix, pm(-1.0, -2.0, 0.0, -1.0));
        for gen in g.generators {
            assert_eq!(gen.class.kind, ElementKind::Parabolic);
            assert_eq!(gen.class.length, Some(0.0));
        }
    }

    #[test]
    fn non_delaunay_rejected() {
        let t = MarkedTriple::new(Vec2::new(1.0, 0.0), Vec2::new(-0.9, 0.15), [1.0; 3]).unwrap();
        assert!(matches!(veech_generators(&t, &tol()), Err(Error::NotDelaunayInput(_))));
    }

    #[test]
    fn normalize_undoes_one_flip() {
        let base = MarkedTriple::new(Vec2::new(1.0, 0.0), Vec2::new(-0.5, 0.8), [1.2, 0.9, 1.1]).unwrap();
        let (out, word) = delaunay_normalize(&surface_phi(2, &base).unwrap(), 100, &tol()).unwrap();
        assert_eq!(word, vec![2]);
        assert!(out.canonical_equal(&base, 1e-12));
        let (same, empty) = delaunay_normalize(&base, 100, &tol()).unwrap();
        assert!(empty.is_empty());
        assert_eq!(same, base);
    }

    #[test]
    fn audit_at_unit_ratios_agrees() {
        let t = MarkedTriple::new(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), [1.0; 3]).unwrap();
        for r in trace_audit(&t).unwrap() {
            assert!(!r.flagged);
            assert_eq!([r.composition, r.printed, r.closed_form, r.surface], [4.0; 4]);
        }
    }

    #[test]
    fn audit_reports_one_three_discrepancy() {
        let l = [2.0, 0.5, 3.0];
        let t = MarkedTriple::new(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), l).unwrap();
        let recs = trace_audit(&t).unwrap();
        let r13 = recs[2];
        assert_eq!(r13.pair, (1, 3));
        assert!((r13.printed - r13.closed_form).abs() < 1e-12);
        assert!(r13.delta.composition_vs_printed.abs() > 1e-3);
        assert!(r13.flagged);
        let r32 = recs[0];
        assert!((r32.composition - (l[1] + l[2]).powi(2) / (l[1] * l[2])).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn prop_trace_sq_invariant(
            m in prop::array::uniform4(-3.0f64..3.0),
            c in prop::array::uniform4(-3.0f64..3.0),
            s in prop_oneof![-50.0f64..-0.02, 0.02f64..50.0],
        ) {
            let a = Mat2::new(m[0], m[1], m[2], m[3]);
            let q = Mat2::new(c[0], c[1], c[2], c[3]);
            prop_assume!(a.det() > 0.1 && q.det().abs() > 0.5);
            let conj = q * a.scale(s) * q.inverse().unwrap();
            let x = normalized_trace_sq(&ProjectiveMatrix::new(a).unwrap()).unwrap();
            let y = normalized_trace_sq(&ProjectiveMatrix::new(conj).unwrap()).unwrap();
            prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0));
        }

        #[test]
        fn prop_projective_scale_invariant(m in prop::array::uniform4(-3.0f64..3.0), s in 0.1f64..10.0, neg: bool) {
            let a = Mat2::new(m[0], m[1], m[2], m[3]);
            prop_assume!(a.det().abs() > 1e-3);
            let s = if neg { -s } else { s };
            let (x, y) = (ProjectiveMatrix::new(a).unwrap().matrix(), ProjectiveMatrix::new(a.scale(s)).unwrap().matrix());
            for (p, q) in x.entries().iter().zip(y.entries()) {
                prop_assert!((p - q).abs() <= 1e-12);
            }
        }

        #[test]
        fn prop_generators_never_elliptic(t in sample::arb_triple()) {
            let (d, _) = delaunay_normalize(&t, 1000, &tol()).unwrap();
            let g = veech_generators(&d, &tol()).unwrap();
            let closed = closed_form_traces(d.lambda()).unwrap();
            for (gen, c) in g.generators.iter().zip(closed) {
                prop_assert!(gen.class.kind != ElementKind::Elliptic);
                prop_assert!((gen.class.normalized_trace_sq - c).abs() <= 1e-9 * c);
            }
        }

        /// Each ambient generator maps the Delaunay surface to a triple that
        /// normalizes back to the same surface.
        #[test]
        fn prop_generators_stabilize(t in sample::arb_triple()) {
            let (d, _) = delaunay_normalize(&t, 1000, &tol()).unwrap();
            prop_assume!(matches!(delaunay_status(&to_marked_triangle(&d), &tol()), Ok(DelaunayStatus::UniqueTetrahedral)));
            for gen in veech_generators(&d, &tol()).unwrap().generators {
                let a = gen.matrix.matrix();
                let moved = MarkedTriple::new(a.apply(d.v1()), a.apply(d.v2()), d.lambda()).unwrap();
                let (back, _) = delaunay_normalize(&moved, 1000, &tol()).unwrap();
                prop_assert!(back.canonical_equal(&d, 1e-8));
            }
        }

        #[test]
        fn prop_audit_one_three_printed_identity(l in prop::array::uniform3(0.05f64..20.0)) {
            let t = MarkedTriple::new(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), l).unwrap();
            let r = trace_audit(&t).unwrap()[2];
            prop_assert!((r.printed - r.closed_form).abs() <= 1e-12 * r.closed_form);
            prop_assert!((r.surface - r.closed_form).abs() <= 1e-9 * r.closed_form);
        }

        #[test]
        fn prop_normalize_word_reproduces(t in sample::arb_scrambled_triple(10)) {
            let (out, word) = delaunay_normalize(&t, 1000, &tol()).unwrap();
            let replay = apply_word(&t, &word).unwrap();
            prop_assert_eq!(replay, out);
        }
    }
}
