//! Numerical tolerances used across the crate.
//!
//! Every threshold lives here so that checks, constructions and reports refer
//! to the same numbers.

use serde::{Deserialize, Serialize};

/// Relative epsilon for hull orientation predicates.
pub const HULL_EPS: f64 = 1e-12;
/// Relative plane distance under which adjacent hull triangles are merged.
pub const COPLANAR_EPS: f64 = 1e-9;
/// Directions closer than this (chordal distance) are merged into one atom.
pub const ATOM_MERGE: f64 = 1e-8;
/// Mixed-measure weights above `-POSITIVITY * scale` are clamped to zero.
pub const POSITIVITY: f64 = 1e-9;
/// Atoms with `|weight| <= DROP * scale` are removed after polarization.
pub const DROP: f64 = 1e-12;
/// Unit vectors must have norm within this of one.
pub const UNIT: f64 = 1e-12;
/// SL(n) membership: `|det - 1|` bound.
pub const SL_DET: f64 = 1e-10;

/// Tolerances applied by the verification lab.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Exact finite-sum pipeline.
    pub exact: f64,
    /// Covariance identities on the exact pipeline.
    pub covariance: f64,
    /// Equality cases on the exact pipeline.
    pub equality_exact: f64,
    /// Equality cases that go through quadrature or ball approximants.
    pub equality_quadrature: f64,
    /// Default bound for quadrature-backed normalization checks.
    pub quadrature: f64,
    /// Multiplier applied to the measured quadrature proxy.
    pub proxy_factor: f64,
    /// Floor for the measured quadrature proxy.
    pub proxy_floor: f64,
    /// Variational limit against the integral formula (relative).
    pub limit: f64,
    /// Fubini-type identity between centroid and polar projection bodies.
    pub fubini: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            exact: 1e-9,
            covariance: 1e-8,
            equality_exact: 1e-6,
            equality_quadrature: 1e-2,
            quadrature: 5e-3,
            proxy_factor: 3.0,
            proxy_floor: 1e-9,
            limit: 1e-4,
            fubini: 5e-3,
        }
    }
}
