//! Conjugacy in split groups of Euclidean isometries.
//!
//! A split group `H = T_H ⋊ H_0` is given by a finite spherical group `H_0`
//! of orthogonal matrices and a translation lattice `L_H ≅ R^a × Z^b`. This
//! crate computes coconjugation sets in closed form, conjugators of minimal
//! translation norm, and empirical conjugator-length growth, together with
//! brute-force Cayley-graph oracles used to check them.

pub mod conjugacy;
pub mod coxeter;
pub mod cvp;
pub mod descriptor;
pub mod group;
pub mod growth;
pub mod lattice;
pub mod linalg;
pub mod snf;

mod error;

pub use error::{Error, Result};
pub use group::{Ball, Isometry, SplitGroup};
pub use lattice::{Lattice, LatticeCoords};
pub use linalg::{Matrix, Subspace, Vector};

use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every module.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Equality and orthogonality checks.
    pub eps: f64,
    /// Rank decisions, relative to the largest column norm.
    pub rank: f64,
    /// Lattice membership: distance of coefficients to integers and residual.
    pub lattice: f64,
    /// Decimal places kept when hashing group elements.
    pub key_decimals: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps: 1e-9,
            rank: 1e-9,
            lattice: 1e-6,
            key_decimals: 6,
        }
    }
}
