//! Regular-polygon generalized probabilistic theories.
//!
//! Builds the n-gon models, enumerates the extreme states of the maximal
//! bipartite composition with dihedral symmetry reduction, partitions the
//! entangled ones into local-equivalence classes, and evaluates Hardy and
//! CHSH nonlocality of pure and noisy bipartite states.

pub mod cli;
pub mod composite;
pub mod enumerate;
pub mod error;
pub mod golden;
pub mod library;
pub mod linalg;
pub mod mixture;
pub mod nonlocality;
pub mod polygon;
pub mod report;
pub mod symmetry;

use serde::{Deserialize, Serialize};

pub use composite::{joint_prob, product_state, BipartiteEffect, BipartiteState};
pub use error::{Error, Result};
pub use linalg::{Mat3, Vec3};
pub use polygon::{build_model, PolygonModel};

/// Global comparison tolerance.
pub const TAU: f64 = 1e-9;

/// Numerical thresholds; every field defaults to [`TAU`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Validity / positivity threshold.
    pub tau: f64,
    /// Relative pivot threshold for singular facet systems.
    pub rank: f64,
    /// Zero constraints and strict positivity in Hardy checks.
    pub hardy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tau: TAU,
            rank: TAU,
            hardy: TAU,
        }
    }
}
