//! Named numerical tolerances.

use serde::{Deserialize, Serialize};

/// Tolerance set threaded through every predicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative area threshold: degenerate iff |area| < degeneracy · (longest side)².
    pub degeneracy: f64,
    /// Absolute radians for "angle sum equals pi".
    pub angle: f64,
    /// Band around 4 for parabolic normalized squared traces.
    pub parabolic: f64,
    /// Componentwise relative tolerance for identifying inverse solutions.
    pub dedup: f64,
    /// Slack below 4 (targets) and 2 (traces) absorbed by clamping.
    pub boundary: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { degeneracy: 1e-12, angle: 1e-9, parabolic: 1e-9, dedup: 1e-9, boundary: 1e-12 }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 5] = ["degeneracy", "angle", "parabolic", "dedup", "boundary"];

    /// Overrides one named tolerance; `None` if the key is unknown.
    pub fn set(&mut self, key: &str, value: f64) -> Option<()> {
        let slot = match key {
            "degeneracy" => &mut self.degeneracy,
            "angle" => &mut self.angle,
            "parabolic" => &mut self.parabolic,
            "dedup" => &mut self.dedup,
            "boundary" => &mut self.boundary,
            _ => return None,
        };
        *slot = value;
        Some(())
    }
}

/// |a − b| ≤ tol · max(|a|, |b|).
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}
