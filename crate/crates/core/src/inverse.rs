//! From a target triple of normalized squared traces back to dilation ratios.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol::{rel_close, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Roots of y + 1/y = x − 2. The minus root is taken as 1/s₊ to avoid
/// cancellation.
pub fn s_pm(x: f64, sign: Sign, tol: &Tolerances) -> Result<f64> {
    if x.is_nan() || x < 4.0 - tol.boundary {
        return Err(Error::BelowFour(x));
    }
    let x = x.max(4.0);
    let plus = ((x - 2.0) + (x * x - 4.0 * x).sqrt()) / 2.0;
    Ok(match sign {
        Sign::Plus => plus,
        Sign::Minus => 1.0 / plus,
    })
}

/// (a, b, c) ∈ [4, ∞)³; slightly-below-4 components are clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetTriple {
    a: f64,
    b: f64,
    c: f64,
}

impl TargetTriple {
    pub fn new(a: f64, b: f64, c: f64, tol: &Tolerances) -> Result<Self> {
        let mut v = [a, b, c];
        for x in &mut v {
            if !(x.is_finite() && *x >= 4.0 - tol.boundary) {
                return Err(Error::BelowFour(*x));
            }
            if *x < 4.0 {
                warn!("target component {x} clamped to 4");
                *x = 4.0;
            }
        }
        Ok(Self { a: v[0], b: v[1], c: v[2] })
    }

    pub fn values(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    /// arccosh(√x / 2) per component: the curve lengths.
    pub fn lengths(&self) -> [f64; 3] {
        self.values().map(|x| (x.sqrt() / 2.0).max(1.0).acosh())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFamily {
    pub target: TargetTriple,
    /// Distinct solutions, lexicographically sorted.
    pub solutions: Vec<[f64; 3]>,
    /// Indices into `solutions`, grouped by the reciprocal involution.
    pub classes: Vec<Vec<usize>>,
    /// 1/(λ1λ2λ3) of each class's first member.
    pub lambda4: Vec<f64>,
}

/// Solves λ3λ2 = sa, λ2λ1 = sb, λ1λ3 = sc.
fn ratios(sa: f64, sb: f64, sc: f64) -> [f64; 3] {
    [(sb * sc / sa).sqrt(), (sa * sb / sc).sqrt(), (sa * sc / sb).sqrt()]
}

fn same(x: &[f64; 3], y: &[f64; 3], tol: f64) -> bool {
    x.iter().zip(y).all(|(p, q)| rel_close(*p, *q, tol))
}

fn dedup_sorted(mut v: Vec<[f64; 3]>, tol: f64) -> Vec<[f64; 3]> {
    let mut out: Vec<[f64; 3]> = Vec::new();
    for x in v.drain(..) {
        if !out.iter().any(|y| same(&x, y, tol)) {
            out.push(x);
        }
    }
    out.sort_by(|p, q| {
        p.iter().zip(q).map(|(a, b)| a.total_cmp(b)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}

/// All eight sign choices, deduplicated; classes left empty.
pub fn solve_ratios(t: &TargetTriple, tol: &Tolerances) -> Result<SolutionFamily> {
    let [a, b, c] = t.values();
    let mut raw = Vec::with_capacity(8);
    for sa in Sign::BOTH {
        for sb in Sign::BOTH {
            for sc in Sign::BOTH {
                raw.push(ratios(s_pm(a, sa, tol)?, s_pm(b, sb, tol)?, s_pm(c, sc, tol)?));
            }
        }
    }
    Ok(SolutionFamily { target: *t, solutions: dedup_sorted(raw, tol.dedup), classes: Vec::new(), lambda4: Vec::new() })
}

/// The eight triples generated from the all-plus solution: four ratio
/// patterns and their reciprocals.
pub fn table_pattern(base: [f64; 3]) -> Vec<[f64; 3]> {
    let [l1, l2, l3] = base;
    let l4 = 1.0 / (l1 * l2 * l3);
    let four = [[l1, l2, l3], [l2, l1, l4], [l4, l3, l2], [l3, l4, l1]];
    four.iter().flat_map(|x| [*x, x.map(f64::recip)]).collect()
}

/// Pairs solutions with their reciprocals, computes λ4 per class and checks
/// the eight-triple table.
pub fn group_solutions(f: &SolutionFamily, tol: &Tolerances) -> Result<SolutionFamily> {
    let n = f.solutions.len();
    let mut class_of: Vec<Option<usize>> = vec![None; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if class_of[i].is_some() {
            continue;
        }
        let recip = f.solutions[i].map(f64::recip);
        let j = (0..n)
            .find(|&j| same(&f.solutions[j], &recip, tol.dedup))
            .ok_or_else(|| Error::TableMismatch(format!("no reciprocal for {:?}", f.solutions[i])))?;
        if class_of[j].is_some() {
            return Err(Error::TableMismatch(format!("reciprocal of {:?} already paired", f.solutions[i])));
        }
        let members = if i == j { vec![i] } else { vec![i.min(j), i.max(j)] };
        for &m in &members {
            class_of[m] = Some(classes.len());
        }
        classes.push(members);
    }
    let lambda4 = classes.iter().map(|c| 1.0 / f.solutions[c[0]].iter().product::<f64>()).collect();

    let [a, b, c] = f.target.values();
    let base = ratios(s_pm(a, Sign::Plus, tol)?, s_pm(b, Sign::Plus, tol)?, s_pm(c, Sign::Plus, tol)?);
    let expected = dedup_sorted(table_pattern(base), tol.dedup);
    let matches = expected.len() == n && expected.iter().all(|e| f.solutions.iter().any(|s| same(e, s, tol.dedup)));
    if !matches {
        return Err(Error::TableMismatch(format!("{n} solutions vs {} table entries", expected.len())));
    }
    Ok(SolutionFamily { target: f.target, solutions: f.solutions.clone(), classes, lambda4 })
}

/// [`solve_ratios`] then [`group_solutions`].
pub fn solve(t: &TargetTriple, tol: &Tolerances) -> Result<SolutionFamily> {
    group_solutions(&solve_ratios(t, tol)?, tol)
}
