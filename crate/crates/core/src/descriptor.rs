//! JSON group descriptors.
//!
//! ```json
//! { "dim": 2,
//!   "spherical_generators": [[[0, -1], [1, 0]]],
//!   "lattice": { "real_basis": [], "int_basis": [[1, 0], [0, 1]] },
//!   "generators": [{ "lambda": [1, 0], "spherical": [[1, 0], [0, 1]] }] }
//! ```
//!
//! Matrices are row-major: either a list of rows or one flat list of
//! `dim * dim` numbers.

use serde::{Deserialize, Serialize};

use crate::group::{Isometry, SplitGroup};
use crate::lattice::Lattice;
use crate::linalg::{Matrix, Vector};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixRepr {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl MatrixRepr {
    pub fn to_matrix(&self, dim: usize) -> Result<Matrix> {
        let m = match self {
            MatrixRepr::Rows(rows) => Matrix::from_rows(rows),
            MatrixRepr::Flat(flat) => Matrix::from_row_major(dim, flat),
        }
        .ok_or_else(|| Error::InvalidInput("matrix is not square".into()))?;
        if m.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: m.dim(),
            });
        }
        if !m.is_finite() {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        Ok(m)
    }
}

impl From<&Matrix> for MatrixRepr {
    fn from(m: &Matrix) -> Self {
        MatrixRepr::Rows(m.rows())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeDescriptor {
    #[serde(default)]
    pub real_basis: Vec<Vec<f64>>,
    #[serde(default)]
    pub int_basis: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryDescriptor {
    pub lambda: Vec<f64>,
    pub spherical: MatrixRepr,
}

impl IsometryDescriptor {
    pub fn to_isometry(&self, dim: usize) -> Result<Isometry> {
        let lambda = checked_vector(&self.lambda, dim)?;
        Ok(Isometry::new(lambda, self.spherical.to_matrix(dim)?))
    }
}

impl From<&Isometry> for IsometryDescriptor {
    fn from(h: &Isometry) -> Self {
        IsometryDescriptor {
            lambda: h.translation.0.clone(),
            spherical: (&h.spherical).into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub dim: usize,
    pub spherical_generators: Vec<MatrixRepr>,
    pub lattice: LatticeDescriptor,
    pub generators: Vec<IsometryDescriptor>,
}

fn checked_vector(v: &[f64], dim: usize) -> Result<Vector> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("vector has non-finite entries".into()));
    }
    Ok(Vector(v.to_vec()))
}

impl GroupDescriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Builds the group (saturating `H_0`); the caller runs
    /// [`SplitGroup::validate`].
    pub fn to_group(&self) -> Result<SplitGroup> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::InvalidInput("dim must be positive".into()));
        }
        let spherical = self
            .spherical_generators
            .iter()
            .map(|m| m.to_matrix(n))
            .collect::<Result<Vec<_>>>()?;
        let real = self
            .lattice
            .real_basis
            .iter()
            .map(|v| checked_vector(v, n))
            .collect::<Result<Vec<_>>>()?;
        let int = self
            .lattice
            .int_basis
            .iter()
            .map(|v| checked_vector(v, n))
            .collect::<Result<Vec<_>>>()?;
        let generators = self
            .generators
            .iter()
            .map(|g| g.to_isometry(n))
            .collect::<Result<Vec<_>>>()?;
        SplitGroup::new(n, spherical, Lattice::new(n, real, int), generators)
    }

    /// Descriptor of an existing group. Its generating set is the
    /// symmetrized one.
    pub fn from_group(g: &SplitGroup) -> Self {
        GroupDescriptor {
            dim: g.dim(),
            spherical_generators: g.spherical_generators().iter().map(MatrixRepr::from).collect(),
            lattice: LatticeDescriptor {
                real_basis: g.lattice().real_basis.iter().map(|v| v.0.clone()).collect(),
                int_basis: g.lattice().int_basis.iter().map(|v| v.0.clone()).collect(),
            },
            generators: g.generators().iter().map(IsometryDescriptor::from).collect(),
        }
    }
}

/// A pair `(h, h')` for conjugacy queries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDescriptor {
    pub h: IsometryDescriptor,
    pub h_prime: IsometryDescriptor,
}
