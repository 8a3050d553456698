//! Dense small-dimension real linear algebra.
//!
//! Everything here works on square `n x n` matrices and length-`n` vectors
//! with `n` in the single digits. Rank decisions use column-pivoted
//! elimination with a tolerance relative to the largest column norm.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::Tolerances;

/// A real column vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(pub Vec<f64>);

impl Vector {
    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|x| x * s).collect())
    }

    /// `self + s * other`
    pub fn axpy(&self, s: f64, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Linear combination `sum_i coeffs[i] * vectors[i]` in dimension `n`.
    pub fn combination(n: usize, vectors: &[Vector], coeffs: &[f64]) -> Vector {
        let mut out = Vector::zeros(n);
        for (v, &c) in vectors.iter().zip(coeffs) {
            for (o, x) in out.0.iter_mut().zip(&v.0) {
                *o += c * x;
            }
        }
        out
    }

    /// Lexicographic comparison with a tolerance; entries closer than `eps`
    /// compare equal.
    pub fn lex_cmp(&self, other: &Vector, eps: f64) -> std::cmp::Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            if (a - b).abs() > eps {
                return a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal);
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        self.axpy(-1.0, rhs)
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x:.6}")?;
        }
        write!(f, ")")
    }
}

/// A square real matrix stored row-major.
///
/// Serializes as a list of rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<f64>>", try_from = "Vec<Vec<f64>>")]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.rows()
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = String;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self, String> {
        Matrix::from_rows(&rows).ok_or_else(|| "matrix must be square".to_string())
    }
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &d) in entries.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Returns `None` unless `rows` is square.
    pub fn from_rows(rows: &[Vec<f64>]) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(Matrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Row-major flat data of length `n * n`.
    pub fn from_row_major(n: usize, data: &[f64]) -> Option<Self> {
        (data.len() == n * n).then(|| Matrix {
            n,
            data: data.to_vec(),
        })
    }

    /// Builds the matrix whose columns are `cols` (padded with zero columns
    /// up to `n`).
    pub fn from_columns(n: usize, cols: &[Vector]) -> Self {
        let mut m = Self::zeros(n);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                m[(i, j)] = c[i];
            }
        }
        m
    }

    /// Outer product `a b^T`.
    pub fn outer(a: &Vector, b: &Vector) -> Self {
        let n = a.dim();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = a[i] * b[j];
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).take(self.n).collect()
    }

    pub fn row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector((0..self.n).map(|i| self[(i, j)]).collect())
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.n).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        debug_assert_eq!(self.n, v.dim());
        Vector(
            self.data
                .chunks(self.n.max(1))
                .take(self.n)
                .map(|row| row.iter().zip(&v.0).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn approx_eq(&self, other: &Matrix, eps: f64) -> bool {
        self.n == other.n && (self - other).max_abs() <= eps
    }

    /// `M M^T ~ Id`
    pub fn is_orthogonal(&self, eps: f64) -> bool {
        (self * &self.transpose()).approx_eq(&Matrix::identity(self.n), eps)
    }

    /// Spectral norm, estimated by power iteration on `M^T M`.
    ///
    /// Iteration is started from every coordinate vector and from the all-ones
    /// vector and the largest estimate wins, so a start vector orthogonal to
    /// the top singular direction cannot hide it.
    pub fn operator_norm(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        let gram = &self.transpose() * self;
        let mut starts: Vec<Vector> = (0..n).map(|i| Vector::unit(n, i)).collect();
        starts.push(Vector(vec![1.0; n]));
        let mut best: f64 = 0.0;
        for mut v in starts {
            let mut estimate = 0.0;
            for _ in 0..5000 {
                let w = gram.mul_vec(&v);
                let norm = w.norm();
                if norm == 0.0 {
                    estimate = 0.0;
                    break;
                }
                let next = w.scale(1.0 / norm);
                let converged = (norm - estimate).abs() <= 1e-15 * norm.max(1.0);
                estimate = norm;
                v = next;
                if converged {
                    break;
                }
            }
            best = best.max(estimate);
        }
        best.sqrt()
    }

    /// Inverse via Gauss-Jordan elimination with partial pivoting, refined by
    /// one step of Newton iteration. `None` if a pivot vanishes.
    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.n;
        let scale = self.max_abs();
        if n == 0 {
            return Some(Matrix::zeros(0));
        }
        if scale == 0.0 {
            return None;
        }
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))
                .expect("nonempty range");
            if a[(pivot, col)].abs() <= f64::EPSILON * scale {
                return None;
            }
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= p;
                inv[(col, j)] /= p;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[(i, col)];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[(i, j)] -= f * a[(col, j)];
                    inv[(i, j)] -= f * inv[(col, j)];
                }
            }
        }
        // X <- X (2I - A X)
        let residual = &Matrix::identity(n).scale(2.0) - &(self * &inv);
        Some(&inv * &residual)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.n {
            self.data.swap(a * self.n + j, b * self.n + j);
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        debug_assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", Vector(row.clone()))?;
        }
        Ok(())
    }
}

/// A linear subspace of `R^n` given by an orthonormal basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Subspace {
    pub ambient_dim: usize,
    pub basis: Vec<Vector>,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace {
            ambient_dim: n,
            basis: Vec::new(),
        }
    }

    pub fn full(n: usize) -> Self {
        Subspace {
            ambient_dim: n,
            basis: (0..n).map(|i| Vector::unit(n, i)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, v: &Vector) -> Vector {
        let mut out = Vector::zeros(self.ambient_dim);
        for b in &self.basis {
            out = out.axpy(b.dot(v), b);
        }
        out
    }

    /// `v` minus its projection.
    pub fn reject(&self, v: &Vector) -> Vector {
        v - &self.project(v)
    }

    pub fn contains(&self, v: &Vector, eps: f64) -> bool {
        self.reject(v).norm() < eps * v.norm().max(1.0)
    }
}

/// Orthonormal basis of the span of `vectors`, by modified Gram-Schmidt with
/// reorthogonalization. Vectors whose residual falls below the rank
/// tolerance (relative to the largest input norm) are dropped.
pub fn orthonormalize(vectors: &[Vector], tol: &Tolerances) -> Vec<Vector> {
    let scale = vectors.iter().map(Vector::norm).fold(0.0, f64::max);
    let mut basis: Vec<Vector> = Vec::new();
    if scale == 0.0 {
        return basis;
    }
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                w = w.axpy(-b.dot(&w), b);
            }
        }
        let norm = w.norm();
        if norm > tol.rank * scale {
            basis.push(w.scale(1.0 / norm));
        }
    }
    basis
}

/// Subspace spanned by `vectors` (ambient dimension `n`).
pub fn span(n: usize, vectors: &[Vector], tol: &Tolerances) -> Subspace {
    Subspace {
        ambient_dim: n,
        basis: orthonormalize(vectors, tol),
    }
}

/// Reduced row echelon form with column pivoting over the columns in order.
/// Returns the reduced matrix and the pivot columns.
fn rref(m: &Matrix, tol: &Tolerances) -> (Matrix, Vec<usize>) {
    let n = m.dim();
    let scale = m.columns().iter().map(Vector::norm).fold(0.0, f64::max);
    let threshold = tol.rank * scale;
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == n {
            break;
        }
        let best = (row..n)
            .max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))
            .expect("nonempty range");
        if a[(best, col)].abs() <= threshold {
            for i in row..n {
                a[(i, col)] = 0.0;
            }
            continue;
        }
        a.swap_rows(row, best);
        let p = a[(row, col)];
        for j in 0..n {
            a[(row, j)] /= p;
        }
        for i in 0..n {
            if i != row {
                let f = a[(i, col)];
                if f != 0.0 {
                    for j in 0..n {
                        a[(i, j)] -= f * a[(row, j)];
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

pub fn rank(m: &Matrix, tol: &Tolerances) -> usize {
    rref(m, tol).1.len()
}

/// Orthonormal basis of `Ker(M)`.
pub fn kernel_basis(m: &Matrix, tol: &Tolerances) -> Subspace {
    let n = m.dim();
    let (r, pivots) = rref(m, tol);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let raw: Vec<Vector> = free
        .iter()
        .map(|&f| {
            let mut v = Vector::unit(n, f);
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r[(row, f)];
            }
            v
        })
        .collect();
    // Free-variable vectors are independent by construction; keep all of them.
    let mut basis: Vec<Vector> = Vec::with_capacity(raw.len());
    for v in raw {
        let mut w = v;
        for _ in 0..2 {
            for b in &basis {
                w = w.axpy(-b.dot(&w), b);
            }
        }
        let norm = w.norm();
        basis.push(w.scale(1.0 / norm));
    }
    Subspace {
        ambient_dim: n,
        basis,
    }
}

/// Orthonormal basis of the column space of `M`.
pub fn image_basis(m: &Matrix, tol: &Tolerances) -> Subspace {
    let (_, pivots) = rref(m, tol);
    let cols: Vec<Vector> = pivots.iter().map(|&c| m.column(c)).collect();
    let mut basis: Vec<Vector> = Vec::with_capacity(cols.len());
    for v in cols {
        let mut w = v;
        for _ in 0..2 {
            for b in &basis {
                w = w.axpy(-b.dot(&w), b);
            }
        }
        let norm = w.norm();
        basis.push(w.scale(1.0 / norm));
    }
    Subspace {
        ambient_dim: m.dim(),
        basis,
    }
}

/// Moore-Penrose pseudoinverse of a square matrix via `A+ = A1 A2^{-1}`.
///
/// `A1` holds an orthonormal basis `v_1..v_r` of `Im(A^T)` followed by zero
/// columns; `A2` holds `A v_1..A v_r` followed by an orthonormal basis of
/// `Ker(A^T)`. `A2` is invertible because `A` maps `Im(A^T)` bijectively
/// onto `Im(A)`, and `Ker(A^T)` is the orthogonal complement of `Im(A)`.
pub fn pseudoinverse(a: &Matrix, tol: &Tolerances) -> Matrix {
    let n = a.dim();
    let at = a.transpose();
    let row_space = image_basis(&at, tol);
    let left_kernel = kernel_basis(&at, tol);
    let r = row_space.dim();
    if r == 0 {
        return Matrix::zeros(n);
    }
    let a1 = Matrix::from_columns(n, &row_space.basis);
    let mut a2_cols: Vec<Vector> = row_space.basis.iter().map(|v| a.mul_vec(v)).collect();
    if r + left_kernel.dim() == n {
        a2_cols.extend(left_kernel.basis.iter().cloned());
    } else {
        // Rank decisions on A and A^T disagreed at the tolerance boundary;
        // complete with the orthogonal complement of span(A v_i) instead.
        let mut seed = a2_cols.clone();
        seed.extend((0..n).map(|i| Vector::unit(n, i)));
        let full = orthonormalize(&seed, tol);
        a2_cols.extend(full.into_iter().skip(r));
    }
    let a2 = Matrix::from_columns(n, &a2_cols);
    match a2.inverse() {
        Some(a2_inv) => &a1 * &a2_inv,
        None => Matrix::zeros(n),
    }
}

/// Frobenius residuals of the four Penrose conditions, in order
/// `APA - A`, `PAP - P`, `AP - (AP)^T`, `PA - (PA)^T`.
pub fn penrose_residuals(a: &Matrix, p: &Matrix) -> [f64; 4] {
    let ap = a * p;
    let pa = p * a;
    [
        (&(&ap * a) - a).frobenius_norm(),
        (&(&pa * p) - p).frobenius_norm(),
        (&ap - &ap.transpose()).frobenius_norm(),
        (&pa - &pa.transpose()).frobenius_norm(),
    ]
}

/// True iff all four Penrose residuals are below `tol.eps`.
pub fn penrose_check(a: &Matrix, p: &Matrix, tol: &Tolerances) -> bool {
    penrose_residuals(a, p).iter().all(|&r| r < tol.eps)
}

/// Minimum-norm least-squares solution `A+ b`.
///
/// The caller decides consistency from the residual `|A x0 - b|`.
pub fn min_norm_solution(a: &Matrix, b: &Vector, tol: &Tolerances) -> Vector {
    pseudoinverse(a, tol).mul_vec(b)
}

/// Solves the symmetric positive definite system `G x = rhs` by Cholesky
/// decomposition. `None` if `G` is not numerically positive definite.
pub(crate) fn solve_spd(g: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let k = g.len();
    let mut l = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let s: f64 = (0..j).map(|p| l[i][p] * l[j][p]).sum();
            if i == j {
                let d = g[i][i] - s;
                if d <= 0.0 {
                    return None;
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (g[i][j] - s) / l[j][j];
            }
        }
    }
    let mut y = vec![0.0; k];
    for i in 0..k {
        let s: f64 = (0..i).map(|p| l[i][p] * y[p]).sum();
        y[i] = (rhs[i] - s) / l[i][i];
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|p| l[p][i] * x[p]).sum();
        x[i] = (y[i] - s) / l[i][i];
    }
    Some(x)
}

/// Gram matrix `G_ij = <b_i, b_j>`.
pub(crate) fn gram(vectors: &[Vector]) -> Vec<Vec<f64>> {
    vectors
        .iter()
        .map(|a| vectors.iter().map(|b| a.dot(b)).collect())
        .collect()
}

/// Coefficients `c` minimizing `|sum c_i b_i - target|` for independent `b`.
pub(crate) fn least_squares_coeffs(basis: &[Vector], target: &Vector) -> Option<Vec<f64>> {
    if basis.is_empty() {
        return Some(Vec::new());
    }
    let g = gram(basis);
    let rhs: Vec<f64> = basis.iter().map(|b| b.dot(target)).collect();
    let mut c = solve_spd(&g, &rhs)?;
    // One step of iterative refinement.
    let n = target.dim();
    let r = target - &Vector::combination(n, basis, &c);
    let rhs2: Vec<f64> = basis.iter().map(|b| b.dot(&r)).collect();
    if let Some(dc) = solve_spd(&g, &rhs2) {
        for (ci, d) in c.iter_mut().zip(dc) {
            *ci += d;
        }
    }
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn rot(theta: f64) -> Matrix {
        let (s, c) = theta.sin_cos();
        Matrix::from_rows(&[vec![c, -s], vec![s, c]]).unwrap()
    }

    fn gram_is_identity(basis: &[Vector]) -> bool {
        basis.iter().enumerate().all(|(i, a)| {
            basis.iter().enumerate().all(|(j, b)| {
                let want = if i == j { 1.0 } else { 0.0 };
                (a.dot(b) - want).abs() < 1e-9
            })
        })
    }

    #[test]
    fn orthonormalize_examples() {
        let e = orthonormalize(&[Vector(vec![1.0, 0.0]), Vector(vec![0.0, 1.0])], &tol());
        assert_eq!(e, vec![Vector(vec![1.0, 0.0]), Vector(vec![0.0, 1.0])]);

        let d = orthonormalize(&[Vector(vec![1.0, 0.0]), Vector(vec![2.0, 0.0])], &tol());
        assert_eq!(d, vec![Vector(vec![1.0, 0.0])]);

        let s = orthonormalize(&[Vector(vec![1.0, 1.0]), Vector(vec![1.0, 0.0])], &tol());
        assert_eq!(s.len(), 2);
        assert!(gram_is_identity(&s));

        assert!(orthonormalize(&[], &tol()).is_empty());
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&Matrix::identity(3), &tol()).dim(), 0);
        assert_eq!(kernel_basis(&Matrix::zeros(3), &tol()).dim(), 3);
        let m = &Matrix::identity(2) - &rot(2.0 * std::f64::consts::PI / 3.0);
        // det(Id - R) = 2 - 2cos(120deg) = 3
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        assert!((det - 3.0).abs() < 1e-12);
        assert_eq!(kernel_basis(&m, &tol()).dim(), 0);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = Matrix::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 6.0],
            vec![1.0, 0.0, 1.0],
        ])
        .unwrap();
        let k = kernel_basis(&m, &tol());
        assert_eq!(k.dim(), 1);
        for v in &k.basis {
            assert!(m.mul_vec(v).norm() < 1e-9);
        }
    }

    #[test]
    fn image_examples() {
        assert_eq!(image_basis(&Matrix::identity(3), &tol()).dim(), 3);
        let d = image_basis(&Matrix::diag(&[1.0, 0.0]), &tol());
        assert_eq!(d.basis, vec![Vector(vec![1.0, 0.0])]);

        // Reflection across the line spanned by (1, 1); normal is (1, -1)/sqrt2.
        let normal = Vector(vec![1.0, -1.0]).scale(1.0 / 2f64.sqrt());
        let refl = &Matrix::identity(2) - &Matrix::outer(&normal, &normal).scale(2.0);
        let m = &Matrix::identity(2) - &refl;
        let img = image_basis(&m, &tol());
        assert_eq!(img.dim(), 1);
        assert!((img.basis[0].dot(&normal).abs() - 1.0).abs() < 1e-12);
        for c in m.columns() {
            assert!(img.contains(&c, 1e-9));
        }
    }

    #[test]
    fn pseudoinverse_examples() {
        let id = Matrix::identity(3);
        assert!(pseudoinverse(&id, &tol()).approx_eq(&id, 1e-12));

        let d = Matrix::diag(&[2.0, 0.0]);
        let p = pseudoinverse(&d, &tol());
        assert!(p.approx_eq(&Matrix::diag(&[0.5, 0.0]), 1e-12));
        assert!(penrose_check(&d, &p, &tol()));

        let ones = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let p = pseudoinverse(&ones, &tol());
        assert!(p.approx_eq(&ones.scale(0.25), 1e-12));
        assert!(penrose_check(&ones, &p, &tol()));
        // min-norm on a consistent sample: x0 = (1, 1) for b = (2, 2)
        let x0 = p.mul_vec(&Vector(vec![2.0, 2.0]));
        assert!((&x0 - &Vector(vec![1.0, 1.0])).norm() < 1e-12);
        for t in [-3.0, -0.5, 0.25, 2.0] {
            let x = x0.axpy(t, &Vector(vec![1.0, -1.0]));
            assert!(x0.norm() <= x.norm() + 1e-12);
        }
    }

    #[test]
    fn penrose_check_examples() {
        assert!(penrose_check(&Matrix::identity(2), &Matrix::identity(2), &tol()));
        assert!(penrose_check(&Matrix::zeros(2), &Matrix::zeros(2), &tol()));
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        let r = penrose_residuals(&a, &a.transpose());
        assert!(r.iter().any(|&x| x > 1e-3));
        assert!(!penrose_check(&a, &a.transpose(), &tol()));
    }

    #[test]
    fn min_norm_examples() {
        let b = Vector(vec![0.3, -1.2, 4.0]);
        assert_eq!(min_norm_solution(&Matrix::identity(3), &b, &tol()), b);
        let z = min_norm_solution(&Matrix::zeros(2), &Vector::zeros(2), &tol());
        assert_eq!(z, Vector::zeros(2));

        let normal = Vector(vec![3.0, 4.0]).scale(0.2);
        let refl = &Matrix::identity(2) - &Matrix::outer(&normal, &normal).scale(2.0);
        let a = &Matrix::identity(2) - &refl;
        let b = normal.scale(1.7);
        let x0 = min_norm_solution(&a, &b, &tol());
        assert!((&a.mul_vec(&x0) - &b).norm() < 1e-12);
        for k in &kernel_basis(&a, &tol()).basis {
            assert!(x0.dot(k).abs() < 1e-12);
        }
    }

    #[test]
    fn operator_norm_of_known_matrices() {
        assert!((Matrix::diag(&[3.0, -5.0, 1.0]).operator_norm() - 5.0).abs() < 1e-9);
        assert!((rot(0.7).operator_norm() - 1.0).abs() < 1e-9);
        let m = Matrix::from_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        assert!((m.operator_norm() - 2.0).abs() < 1e-9);
        assert_eq!(Matrix::zeros(2).operator_norm(), 0.0);
    }

    #[test]
    fn matrix_serde_as_rows() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[1.0,2.0],[3.0,4.0]]");
        let back: Matrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<Matrix>("[[1.0,2.0]]").is_err());
    }
}
