//! Closed subgroups `R^a × Z^b` of `R^n` and linear algebra over them.
//!
//! A lattice is stored as `a` real generators (the identity component) and
//! `b` integer generators, jointly linearly independent. Maps that preserve a
//! lattice are turned into coordinate form, where the integer block is solved
//! exactly with Smith normal form and the real block by least squares.

use serde::{Deserialize, Serialize};

use crate::linalg::{self, least_squares_coeffs, Matrix, Subspace, Vector};
use crate::snf::{self, IntMatrix};
use crate::{Error, Result, Tolerances};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub dim: usize,
    pub real_basis: Vec<Vector>,
    pub int_basis: Vec<Vector>,
}

/// Coordinates of a lattice vector: `v = sum r_i real_i + sum m_j int_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeCoords {
    pub real_coeffs: Vec<f64>,
    pub int_coeffs: Vec<i64>,
}

impl Lattice {
    pub fn new(dim: usize, real_basis: Vec<Vector>, int_basis: Vec<Vector>) -> Self {
        Lattice {
            dim,
            real_basis,
            int_basis,
        }
    }

    /// The discrete lattice `Z b_1 + ... + Z b_k`.
    pub fn integer(dim: usize, int_basis: Vec<Vector>) -> Self {
        Self::new(dim, Vec::new(), int_basis)
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(dim, Vec::new(), Vec::new())
    }

    /// `Z^n` with the standard basis.
    pub fn standard(dim: usize) -> Self {
        Self::integer(dim, (0..dim).map(|i| Vector::unit(dim, i)).collect())
    }

    pub fn rank(&self) -> usize {
        self.real_basis.len() + self.int_basis.len()
    }

    pub fn is_discrete(&self) -> bool {
        self.real_basis.is_empty()
    }

    /// Real generators followed by integer generators.
    pub fn basis(&self) -> Vec<Vector> {
        self.real_basis.iter().chain(&self.int_basis).cloned().collect()
    }

    pub fn real_span(&self, tol: &Tolerances) -> Subspace {
        linalg::span(self.dim, &self.real_basis, tol)
    }

    pub fn span(&self, tol: &Tolerances) -> Subspace {
        linalg::span(self.dim, &self.basis(), tol)
    }

    /// Every generator has the right dimension and finite entries, the
    /// generators are independent and there are at most `dim` of them.
    pub fn is_well_formed(&self, tol: &Tolerances) -> bool {
        let basis = self.basis();
        basis.iter().all(|v| v.dim() == self.dim && v.is_finite())
            && basis.len() <= self.dim
            && linalg::orthonormalize(&basis, tol).len() == basis.len()
    }

    pub fn point(&self, coords: &LatticeCoords) -> Vector {
        let mut v = Vector::combination(self.dim, &self.real_basis, &coords.real_coeffs);
        let ints: Vec<f64> = coords.int_coeffs.iter().map(|&m| m as f64).collect();
        v = &v + &Vector::combination(self.dim, &self.int_basis, &ints);
        v
    }

    /// Unrounded coefficients `(real, int)` of the best approximation of `v`
    /// in the real span, and the residual distance.
    pub fn raw_coords(&self, v: &Vector) -> Option<(Vec<f64>, Vec<f64>, f64)> {
        let basis = self.basis();
        let c = least_squares_coeffs(&basis, v)?;
        let residual = (v - &Vector::combination(self.dim, &basis, &c)).norm();
        let a = self.real_basis.len();
        Some((c[..a].to_vec(), c[a..].to_vec(), residual))
    }

    /// Coordinates of `v`, or `None` if `v` is not a lattice vector within
    /// `tol.lattice`.
    pub fn coords(&self, v: &Vector, tol: &Tolerances) -> Option<LatticeCoords> {
        if v.dim() != self.dim {
            return None;
        }
        let (real, int, residual) = self.raw_coords(v)?;
        if residual >= tol.lattice * v.norm().max(1.0) {
            return None;
        }
        let mut ints = Vec::with_capacity(int.len());
        for x in int {
            let r = x.round();
            if (x - r).abs() >= tol.lattice || r.abs() > i64::MAX as f64 / 2.0 {
                return None;
            }
            ints.push(r as i64);
        }
        Some(LatticeCoords {
            real_coeffs: real,
            int_coeffs: ints,
        })
    }

    pub fn contains(&self, v: &Vector, tol: &Tolerances) -> bool {
        self.coords(v, tol).is_some()
    }
}

/// A linear map that preserves a lattice, written in lattice coordinates:
/// `real_real` (a x a) and `int_real` (a x b, real parts of images of integer
/// generators) are real, `int_int` (b x b) is integral. The real-to-integer
/// block vanishes because the identity component is preserved.
pub(crate) struct CoordMap {
    real_real: Vec<Vec<f64>>,
    int_real: Vec<Vec<f64>>,
    int_int: IntMatrix,
}

impl CoordMap {
    pub(crate) fn new(lattice: &Lattice, m: &Matrix, tol: &Tolerances) -> Result<Self> {
        let a = lattice.real_basis.len();
        let b = lattice.int_basis.len();
        let mut real_real = vec![vec![0.0; a]; a];
        for (j, r) in lattice.real_basis.iter().enumerate() {
            let image = m.mul_vec(r);
            let (re, int, residual) = lattice
                .raw_coords(&image)
                .ok_or_else(|| Error::InvalidInput("degenerate lattice basis".into()))?;
            if residual >= tol.lattice * image.norm().max(1.0) || int.iter().any(|x| x.abs() >= tol.lattice) {
                return Err(Error::InvalidInput(format!(
                    "map does not preserve the real part of the lattice (generator {j})"
                )));
            }
            for i in 0..a {
                real_real[i][j] = re[i];
            }
        }
        let mut int_real = vec![vec![0.0; b]; a];
        let mut int_int = IntMatrix::zeros(b, b);
        for (j, g) in lattice.int_basis.iter().enumerate() {
            let image = m.mul_vec(g);
            let c = lattice.coords(&image, tol).ok_or_else(|| {
                Error::InvalidInput(format!("map does not preserve the lattice (integer generator {j})"))
            })?;
            for (i, x) in c.real_coeffs.into_iter().enumerate() {
                int_real[i][j] = x;
            }
            for (i, &x) in c.int_coeffs.iter().enumerate() {
                int_int.set(i, j, x as i128);
            }
        }
        Ok(CoordMap {
            real_real,
            int_real,
            int_int,
        })
    }

    fn real_dim(&self) -> usize {
        self.real_real.len()
    }

    fn real_matrix(&self) -> Matrix {
        Matrix::from_rows(&self.real_real).expect("square block")
    }

    fn int_real_times(&self, m: &[i128]) -> Vector {
        Vector(
            self.int_real
                .iter()
                .map(|row| row.iter().zip(m).map(|(x, &k)| x * k as f64).sum())
                .collect(),
        )
    }
}

fn to_f64(v: &[i128]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

fn to_i64(v: &[i128]) -> Result<Vec<i64>> {
    v.iter().map(|&x| i64::try_from(x).map_err(|_| Error::Overflow)).collect()
}

/// Ambient vector with real coefficients `real` and integer coefficients `int`.
fn ambient(lattice: &Lattice, real: &[f64], int: &[i128]) -> Vector {
    let v = Vector::combination(lattice.dim, &lattice.real_basis, real);
    &v + &Vector::combination(lattice.dim, &lattice.int_basis, &to_f64(int))
}

/// The image `M L` as a lattice, for a map `M` preserving `L`.
///
/// Real generators of the image span `M R^a`; the integer generators are a
/// Z-basis of `M Z^b` modulo that span, found by Smith reduction of the
/// integer block.
pub fn image_lattice(lattice: &Lattice, m: &Matrix, tol: &Tolerances) -> Result<Lattice> {
    let n = lattice.dim;
    let map = CoordMap::new(lattice, m, tol)?;
    let real_images: Vec<Vector> = lattice.real_basis.iter().map(|r| m.mul_vec(r)).collect();
    let real_span = linalg::span(n, &real_images, tol);

    let (v, rank) = snf::column_reduction(&map.int_int)?;
    let int_images: Vec<Vector> = lattice.int_basis.iter().map(|g| m.mul_vec(g)).collect();
    let combos: Vec<Vector> = (0..v.ncols())
        .map(|j| Vector::combination(n, &int_images, &to_f64(&v.column(j))))
        .collect();

    let mut int_basis: Vec<Vector> = combos[..rank].iter().map(|g| real_span.reject(g)).collect();
    // Combinations with vanishing integer part land in the real span of L.
    // They either lie in the image's real span already or add new discrete
    // directions there.
    for g in &combos[rank..] {
        let rest = real_span.reject(g);
        if rest.norm() < tol.lattice * g.norm().max(1.0) {
            continue;
        }
        let mut trial = real_span.basis.clone();
        trial.extend(int_basis.iter().cloned());
        trial.push(rest.clone());
        if linalg::orthonormalize(&trial, tol).len() != trial.len() {
            return Err(Error::Unsupported(
                "image of the lattice is not closed or needs integer-relation detection".into(),
            ));
        }
        int_basis.push(rest);
    }
    Ok(Lattice::new(n, real_span.basis, int_basis))
}

/// `Ker(M) ∩ L` for a map `M` preserving `L`.
pub fn kernel_lattice(lattice: &Lattice, m: &Matrix, tol: &Tolerances) -> Result<Lattice> {
    let n = lattice.dim;
    let map = CoordMap::new(lattice, m, tol)?;
    let a = map.real_dim();

    let real_kernel: Vec<Vector> = if a == 0 {
        Vec::new()
    } else {
        linalg::kernel_basis(&map.real_matrix(), tol)
            .basis
            .iter()
            .map(|c| Vector::combination(n, &lattice.real_basis, c.as_slice()))
            .collect()
    };
    let real_span = linalg::span(n, &real_kernel, tol);

    let int_kernel = snf::kernel(&map.int_int)?;
    let real_pinv = (a > 0).then(|| linalg::pseudoinverse(&map.real_matrix(), tol));
    let mut int_basis = Vec::with_capacity(int_kernel.len());
    for k in &int_kernel {
        let coupling = map.int_real_times(k);
        let real = match &real_pinv {
            Some(p) => {
                let c = p.mul_vec(&coupling).scale(-1.0);
                let miss = &map.real_matrix().mul_vec(&c) + &coupling;
                if miss.norm() >= tol.lattice * coupling.norm().max(1.0) {
                    return Err(Error::Unsupported(
                        "kernel intersection requires integer relations among real coefficients".into(),
                    ));
                }
                c.0
            }
            None => Vec::new(),
        };
        let v = ambient(lattice, &real, k);
        int_basis.push(real_span.reject(&v));
    }
    let out = Lattice::new(n, real_span.basis, int_basis);
    for v in out.basis() {
        if m.mul_vec(&v).norm() >= tol.lattice * v.norm().max(1.0) {
            return Err(Error::Inconsistent("kernel lattice vector is not annihilated".into()));
        }
    }
    Ok(out)
}

/// Some `x ∈ L` with `M x = b`, for a map `M` preserving `L`; `Ok(None)` if
/// no lattice solution exists.
pub fn solve_in_lattice(lattice: &Lattice, m: &Matrix, b: &Vector, tol: &Tolerances) -> Result<Option<Vector>> {
    let Some(target) = lattice.coords(b, tol) else {
        return Ok(None);
    };
    let map = CoordMap::new(lattice, m, tol)?;
    let a = map.real_dim();
    let rhs_int: Vec<i128> = target.int_coeffs.iter().map(|&x| x as i128).collect();
    let Some(sol) = snf::solve(&map.int_int, &rhs_int)? else {
        return Ok(None);
    };
    let accept = |x: &Vector| (&m.mul_vec(x) - b).norm() < tol.lattice * b.norm().max(1.0);

    if a == 0 {
        let x = ambient(lattice, &[], &sol.particular);
        return Ok(accept(&x).then_some(x));
    }

    let real_m = map.real_matrix();
    let pinv = linalg::pseudoinverse(&real_m, tol);
    let target_real = Vector(target.real_coeffs.clone());
    let solve_real = |ints: &[i128]| -> Vector {
        let rhs = &target_real - &map.int_real_times(ints);
        pinv.mul_vec(&rhs)
    };
    let c = solve_real(&sol.particular);
    let x = ambient(lattice, c.as_slice(), &sol.particular);
    if accept(&x) {
        return Ok(Some(x));
    }
    if sol.kernel.is_empty() {
        return Ok(None);
    }
    // The real block alone cannot absorb the coupling; move along the integer
    // kernel to the least-squares best shift and test the rounded point.
    let proj_off_image = {
        let img = linalg::image_basis(&real_m, tol);
        move |v: &Vector| img.reject(v)
    };
    let residual0 = proj_off_image(&(&target_real - &map.int_real_times(&sol.particular)));
    let dirs: Vec<Vector> = sol
        .kernel
        .iter()
        .map(|k| proj_off_image(&map.int_real_times(k)))
        .collect();
    let Some(shift) = least_squares_coeffs_any(&dirs, &residual0, tol) else {
        return Ok(None);
    };
    let mut ints = sol.particular.clone();
    for (k, s) in sol.kernel.iter().zip(shift) {
        let r = s.round() as i128;
        for (x, kx) in ints.iter_mut().zip(k) {
            *x += r * kx;
        }
    }
    let c = solve_real(&ints);
    let x = ambient(lattice, c.as_slice(), &ints);
    let _ = to_i64(&ints)?;
    Ok(accept(&x).then_some(x))
}

/// Least squares for possibly dependent `dirs`, through their independent
/// subset.
fn least_squares_coeffs_any(dirs: &[Vector], target: &Vector, tol: &Tolerances) -> Option<Vec<f64>> {
    let mut chosen = Vec::new();
    let mut kept: Vec<Vector> = Vec::new();
    for (i, d) in dirs.iter().enumerate() {
        let mut trial = kept.clone();
        trial.push(d.clone());
        if linalg::orthonormalize(&trial, tol).len() == trial.len() {
            kept = trial;
            chosen.push(i);
        }
    }
    let c = least_squares_coeffs(&kept, target)?;
    let mut out = vec![0.0; dirs.len()];
    for (i, x) in chosen.into_iter().zip(c) {
        out[i] = x;
    }
    Some(out)
}
