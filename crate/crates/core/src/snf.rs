//! Smith normal form over the integers and integer linear systems.

use crate::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    /// Builds the `rows x columns.len()` matrix with the given columns.
    pub fn from_columns(rows: usize, columns: &[Vec<i128>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: i128) {
        self.data[i * self.cols + j] = x;
    }

    pub fn column(&self, j: usize) -> Vec<i128> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul_vec(&self, v: &[i128]) -> Result<Vec<i128>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).try_fold(0i128, |acc, j| {
                    self.get(i, j)
                        .checked_mul(v[j])
                        .and_then(|p| acc.checked_add(p))
                        .ok_or(Error::Overflow)
                })
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: i128) -> Result<()> {
        for j in 0..self.cols {
            let v = self
                .get(src, j)
                .checked_mul(f)
                .and_then(|p| self.get(dst, j).checked_add(p))
                .ok_or(Error::Overflow)?;
            self.set(dst, j, v);
        }
        Ok(())
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: i128) -> Result<()> {
        for i in 0..self.rows {
            let v = self
                .get(i, src)
                .checked_mul(f)
                .and_then(|p| self.get(i, dst).checked_add(p))
                .ok_or(Error::Overflow)?;
            self.set(i, dst, v);
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = self.get(i, j);
            self.set(i, j, -v);
        }
    }
}

/// `U A V = D` with `U`, `V` unimodular and `D` diagonal, `d_1 | d_2 | ...`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Nonzero invariant factors, all positive.
    pub diagonal: Vec<i128>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }
}

pub fn smith(a: &IntMatrix) -> Result<Smith> {
    let (m, k) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(k);
    let mut diagonal = Vec::new();

    for t in 0..m.min(k) {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let Some((pi, pj)) = min_nonzero(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..m {
                let q = d.get(i, t).div_euclid(d.get(t, t));
                if q != 0 {
                    d.add_row(i, t, -q)?;
                    u.add_row(i, t, -q)?;
                }
                if d.get(i, t) != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..k {
                let q = d.get(t, j).div_euclid(d.get(t, t));
                if q != 0 {
                    d.add_col(j, t, -q)?;
                    v.add_col(j, t, -q)?;
                }
                if d.get(t, j) != 0 {
                    dirty = true;
                }
            }
            if dirty {
                let (pi, pj) = min_nonzero_cross(&d, t);
                d.swap_rows(t, pi);
                u.swap_rows(t, pi);
                d.swap_cols(t, pj);
                v.swap_cols(t, pj);
                continue;
            }
            // Divisibility: fold a offending row into the pivot row.
            let p = d.get(t, t);
            let offender = (t + 1..m).find(|&i| (t + 1..k).any(|j| d.get(i, j) % p != 0));
            match offender {
                Some(i) => {
                    d.add_row(t, i, 1)?;
                    u.add_row(t, i, 1)?;
                }
                None => break,
            }
        }
        if d.get(t, t) < 0 {
            d.negate_row(t);
            u.negate_row(t);
        }
        diagonal.push(d.get(t, t));
    }
    Ok(Smith { u, v, diagonal })
}

fn min_nonzero(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows {
        for j in t..d.cols {
            let x = d.get(i, j);
            if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Smallest nonzero entry in row `t` or column `t` (from `t` on).
fn min_nonzero_cross(d: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let mut best_abs = d.get(t, t).abs();
    for i in t..d.rows {
        let x = d.get(i, t).abs();
        if x != 0 && (best_abs == 0 || x < best_abs) {
            best = (i, t);
            best_abs = x;
        }
    }
    for j in t..d.cols {
        let x = d.get(t, j).abs();
        if x != 0 && (best_abs == 0 || x < best_abs) {
            best = (t, j);
            best_abs = x;
        }
    }
    best
}

/// Solution set `particular + Z-span(kernel)` of an integer system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntSolution {
    pub particular: Vec<i128>,
    pub kernel: Vec<Vec<i128>>,
}

/// Solves `A x = b` over the integers. `Ok(None)` if there is no integer
/// solution.
pub fn solve(a: &IntMatrix, b: &[i128]) -> Result<Option<IntSolution>> {
    let k = a.cols;
    let s = smith(a)?;
    let c = s.u.mul_vec(b)?;
    let r = s.rank();
    if c[r..].iter().any(|&x| x != 0) {
        return Ok(None);
    }
    let mut y = vec![0i128; k];
    for i in 0..r {
        if c[i] % s.diagonal[i] != 0 {
            return Ok(None);
        }
        y[i] = c[i] / s.diagonal[i];
    }
    let particular = s.v.mul_vec(&y)?;
    let kernel = (r..k).map(|j| s.v.column(j)).collect();
    Ok(Some(IntSolution { particular, kernel }))
}

/// A basis of the integer kernel of `A`.
pub fn kernel(a: &IntMatrix) -> Result<Vec<Vec<i128>>> {
    let s = smith(a)?;
    Ok((s.rank()..a.cols).map(|j| s.v.column(j)).collect())
}

/// Unimodular `V` such that the first `rank` columns of `A V` are independent
/// and the rest vanish; returns `(V, rank)`.
pub fn column_reduction(a: &IntMatrix) -> Result<(IntMatrix, usize)> {
    let s = smith(a)?;
    let r = s.rank();
    Ok((s.v, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
        let mut out = IntMatrix::zeros(a.rows, b.cols);
        for i in 0..a.rows {
            for j in 0..b.cols {
                out.set(i, j, (0..a.cols).map(|p| a.get(i, p) * b.get(p, j)).sum());
            }
        }
        out
    }

    fn det(m: &IntMatrix) -> i128 {
        // Laplace expansion, fine for the tiny matrices here.
        let n = m.rows;
        if n == 1 {
            return m.get(0, 0);
        }
        (0..n)
            .map(|j| {
                let minor = IntMatrix::from_rows(
                    &(1..n)
                        .map(|i| (0..n).filter(|&c| c != j).map(|c| m.get(i, c)).collect())
                        .collect::<Vec<_>>(),
                );
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m.get(0, j) * det(&minor)
            })
            .sum()
    }

    fn check(a: &IntMatrix, expected_diag: &[i128]) {
        let s = smith(a).unwrap();
        assert_eq!(s.diagonal, expected_diag);
        assert_eq!(det(&s.u).abs(), 1);
        assert_eq!(det(&s.v).abs(), 1);
        let d = mul(&mul(&s.u, a), &s.v);
        for i in 0..d.rows {
            for j in 0..d.cols {
                let want = if i == j && i < s.rank() { s.diagonal[i] } else { 0 };
                assert_eq!(d.get(i, j), want, "entry ({i},{j})");
            }
        }
        for w in s.diagonal.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
    }

    #[test]
    fn smith_of_small_matrices() {
        check(&IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]), &[2, 6, 12]);
        check(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]), &[1, 6]);
        check(&IntMatrix::from_rows(&[vec![1, 1], vec![1, 1]]), &[1]);
        check(&IntMatrix::from_rows(&[vec![0, 0], vec![0, 0]]), &[]);
        check(&IntMatrix::from_rows(&[vec![2, -1], vec![-1, 2]]), &[1, 3]);
    }

    #[test]
    fn solve_integer_systems() {
        // (Id - s1) on the A2 coroot lattice, in coroot coordinates:
        // s1(a1) = -a1, s1(a2) = a1 + a2, so Id - s1 = [[2, -1], [0, 0]].
        let a = IntMatrix::from_rows(&[vec![2, -1], vec![0, 0]]);
        let sol = solve(&a, &[3, 0]).unwrap().unwrap();
        assert_eq!(a.mul_vec(&sol.particular).unwrap(), vec![3, 0]);
        assert_eq!(sol.kernel.len(), 1);
        assert_eq!(a.mul_vec(&sol.kernel[0]).unwrap(), vec![0, 0]);
        assert!(solve(&a, &[3, 1]).unwrap().is_none());

        let two = IntMatrix::from_rows(&[vec![2, 0], vec![0, 2]]);
        assert!(solve(&two, &[1, 0]).unwrap().is_none());
        assert_eq!(solve(&two, &[4, -2]).unwrap().unwrap().particular, vec![2, -1]);
    }

    #[test]
    fn kernel_of_rank_deficient() {
        let a = IntMatrix::from_rows(&[vec![1, 2, 3], vec![2, 4, 6]]);
        let k = kernel(&a).unwrap();
        assert_eq!(k.len(), 2);
        for v in k {
            assert_eq!(a.mul_vec(&v).unwrap(), vec![0, 0]);
        }
    }
}
