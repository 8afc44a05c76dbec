//! Seeded random surfaces for sweeps and property tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::flips::surface_phi;
use crate::geom::Vec2;
use crate::surface::MarkedTriple;

/// Minimum |sin| of the angle between v1 and v2.
const MIN_SINE: f64 = 0.05;
const LAMBDA_RANGE: (f64, f64) = (0.1, 10.0);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn triple_from(c: [f64; 4], log_l: [f64; 3]) -> Option<MarkedTriple> {
    let (v1, v2) = (Vec2::new(c[0], c[1]), Vec2::new(c[2], c[3]));
    if v1.cross(v2).abs() < MIN_SINE * v1.norm() * v2.norm() {
        return None;
    }
    MarkedTriple::new(v1, v2, log_l.map(f64::exp)).ok()
}

/// v1, v2 uniform in [−2, 2]², λ log-uniform in [0.1, 10]; rejection keeps
/// the angle between v1 and v2 away from 0 and π.
pub fn random_triple<R: Rng>(rng: &mut R) -> MarkedTriple {
    let (lo, hi) = (LAMBDA_RANGE.0.ln(), LAMBDA_RANGE.1.ln());
    loop {
        let c = [(); 4].map(|_| rng.gen_range(-2.0..2.0));
        let l = [(); 3].map(|_| rng.gen_range(lo..hi));
        if let Some(t) = triple_from(c, l) {
            return t;
        }
    }
}

/// A random surface followed by a random Φ word of length ≤ `max_len`.
pub fn random_scrambled<R: Rng>(rng: &mut R, max_len: usize) -> MarkedTriple {
    let mut t = random_triple(rng);
    let len = rng.gen_range(0..=max_len);
    for _ in 0..len {
        t = surface_phi(rng.gen_range(1..=3), &t).expect("flips of valid triples stay valid");
    }
    t
}

pub fn random_lambda<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> [f64; 3] {
    [(); 3].map(|_| rng.gen_range(lo..hi))
}

#[cfg(test)]
pub(crate) use strategies::*;
