//! Half-dilation pillowcases from marked triangles.
//!
//! A marked triple ((v1,λ1),(v2,λ2),(v3,λ3)) with v1 + v2 + v3 = 0 fixes a
//! triangle with one point on each side; folding the corners onto the inner
//! triangle yields a sphere with four cone points of angle π. The crate
//! builds that surface, flips it to Delaunay form, computes its Veech-group
//! generators and solves the inverse length problem.

pub mod cli;
pub mod error;
pub mod flips;
pub mod geom;
pub mod inverse;
pub mod sample;
pub mod surface;
pub mod svg;
pub mod tol;
pub mod veech;

pub use error::{Error, Result};
pub use tol::Tolerances;
