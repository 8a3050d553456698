//! Closest-vector search in low-rank lattices by bounded enumeration.

use crate::linalg::{self, gram, solve_spd, Vector};

/// LLL reduction (`delta = 3/4`) of an independent basis. Returns the reduced
/// basis; it generates the same lattice.
pub fn lll_reduce(basis: &[Vector]) -> Vec<Vector> {
    let k = basis.len();
    if k <= 1 {
        return basis.to_vec();
    }
    let delta = 0.75;
    let mut b = basis.to_vec();
    let mut i = 1;
    let mut guard = 0usize;
    while i < k {
        guard += 1;
        if guard > 100_000 {
            break;
        }
        let (mut mu, _) = gram_schmidt(&b);
        for j in (0..i).rev() {
            let q = mu[i][j].round();
            if q != 0.0 {
                b[i] = b[i].axpy(-q, &b[j]);
                let (head, tail) = mu.split_at_mut(i);
                for (a, b) in tail[0][..j].iter_mut().zip(&head[j][..j]) {
                    *a -= q * b;
                }
                mu[i][j] -= q;
            }
        }
        let (mu, norms) = gram_schmidt(&b);
        if norms[i] >= (delta - mu[i][i - 1] * mu[i][i - 1]) * norms[i - 1] {
            i += 1;
        } else {
            b.swap(i, i - 1);
            i = i.saturating_sub(1).max(1);
        }
    }
    b
}

/// Gram-Schmidt coefficients `mu[i][j]` and squared norms of the
/// orthogonalized vectors.
fn gram_schmidt(b: &[Vector]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let k = b.len();
    let mut star: Vec<Vector> = Vec::with_capacity(k);
    let mut mu = vec![vec![0.0; k]; k];
    let mut norms = vec![0.0; k];
    for i in 0..k {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = if norms[j] > 0.0 { b[i].dot(&star[j]) / norms[j] } else { 0.0 };
            v = v.axpy(-mu[i][j], &star[j]);
        }
        norms[i] = v.dot(&v);
        star.push(v);
    }
    (mu, norms)
}

/// Real coefficients of the orthogonal projection of `target` onto the span
/// of `basis`.
pub fn projection_coeffs(basis: &[Vector], target: &Vector) -> Vec<f64> {
    linalg::least_squares_coeffs(basis, target).unwrap_or_else(|| vec![0.0; basis.len()])
}

/// Integer combinations `(coeffs, point)` of `basis` with
/// `|point - center| <= radius`.
///
/// Enumerates the box `|c_i - c*_i| <= radius * sqrt((G^{-1})_ii)` around
/// the projected center `c*`, which contains every such point.
pub fn lattice_points_in_ball(basis: &[Vector], center: &Vector, radius: f64) -> Vec<(Vec<i64>, Vector)> {
    let n = center.dim();
    let k = basis.len();
    if k == 0 {
        return if center.norm() <= radius {
            vec![(Vec::new(), Vector::zeros(n))]
        } else {
            Vec::new()
        };
    }
    let g = gram(basis);
    let c_star = projection_coeffs(basis, center);
    let widths: Vec<f64> = (0..k)
        .map(|i| {
            let e: Vec<f64> = (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect();
            let col = solve_spd(&g, &e).unwrap_or_else(|| vec![f64::INFINITY; k]);
            radius * col[i].max(0.0).sqrt()
        })
        .collect();
    let ranges: Vec<(i64, i64)> = c_star
        .iter()
        .zip(&widths)
        .map(|(c, w)| ((c - w).ceil() as i64, (c + w).floor() as i64))
        .collect();
    if ranges.iter().any(|(lo, hi)| lo > hi) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut coeffs: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        let cf: Vec<f64> = coeffs.iter().map(|&c| c as f64).collect();
        let p = Vector::combination(n, basis, &cf);
        if (&p - center).norm() <= radius {
            out.push((coeffs.clone(), p));
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == k {
                return out;
            }
            if coeffs[pos] < ranges[pos].1 {
                coeffs[pos] += 1;
                break;
            }
            coeffs[pos] = ranges[pos].0;
            pos += 1;
        }
    }
}

/// Babai rounding: round the projection coefficients of `target`.
pub fn babai_round(basis: &[Vector], target: &Vector) -> Vector {
    let c: Vec<f64> = projection_coeffs(basis, target).iter().map(|x| x.round()).collect();
    Vector::combination(target.dim(), basis, &c)
}

/// Upper bound on the covering radius: `sum |b_i| / 2`.
pub fn covering_radius_bound(basis: &[Vector]) -> f64 {
    basis.iter().map(Vector::norm).sum::<f64>() / 2.0
}

/// All lattice points within `tie_eps` of the minimal distance to `target`.
/// Only the component of `target` in the span of `basis` matters.
pub fn closest_vectors(basis: &[Vector], target: &Vector, tie_eps: f64) -> Vec<Vector> {
    if basis.is_empty() {
        return vec![Vector::zeros(target.dim())];
    }
    let reduced = lll_reduce(basis);
    let coeffs = projection_coeffs(&reduced, target);
    let projected = Vector::combination(target.dim(), &reduced, &coeffs);
    let babai = babai_round(&reduced, &projected);
    let radius = (&babai - &projected).norm().min(covering_radius_bound(&reduced)) + tie_eps;
    let candidates = lattice_points_in_ball(&reduced, &projected, radius);
    let best = candidates
        .iter()
        .map(|(_, p)| (p - &projected).norm())
        .fold(f64::INFINITY, f64::min);
    candidates
        .into_iter()
        .filter(|(_, p)| (p - &projected).norm() <= best + tie_eps)
        .map(|(_, p)| p)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_closest(basis: &[Vector], target: &Vector, span: i64) -> f64 {
        let mut best = f64::INFINITY;
        let k = basis.len();
        let mut c = vec![-span; k];
        loop {
            let cf: Vec<f64> = c.iter().map(|&x| x as f64).collect();
            let p = Vector::combination(target.dim(), basis, &cf);
            best = best.min((&p - target).norm());
            let mut i = 0;
            loop {
                if i == k {
                    return best;
                }
                if c[i] < span {
                    c[i] += 1;
                    break;
                }
                c[i] = -span;
                i += 1;
            }
        }
    }

    #[test]
    fn lll_keeps_the_lattice_and_shortens() {
        let b = vec![Vector(vec![1.0, 0.0]), Vector(vec![17.0, 1.0])];
        let r = lll_reduce(&b);
        assert!(r.iter().all(|v| v.norm() <= 1.0 + 1e-12));
        let det = |m: &[Vector]| (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs();
        assert!((det(&r) - det(&b)).abs() < 1e-9);
    }

    #[test]
    fn closest_matches_brute_force() {
        let basis = vec![Vector(vec![2.0, 0.3, 0.0]), Vector(vec![0.7, 1.9, 0.1]), Vector(vec![0.2, -0.4, 1.5])];
        for t in [
            Vector(vec![0.3, 0.4, 0.1]),
            Vector(vec![5.1, -2.2, 3.3]),
            Vector(vec![-1.0, 7.7, 0.0]),
        ] {
            let got = closest_vectors(&basis, &t, 1e-12);
            let d = (&got[0] - &t).norm();
            assert!((d - brute_force_closest(&basis, &t, 8)).abs() < 1e-9);
        }
    }

    #[test]
    fn ties_are_all_reported() {
        let basis = vec![Vector(vec![1.0, 0.0])];
        let got = closest_vectors(&basis, &Vector(vec![0.5, 3.0]), 1e-9);
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn points_in_ball_count() {
        // Z^2 points within radius 2 of the origin: 13.
        let basis = vec![Vector(vec![1.0, 0.0]), Vector(vec![0.0, 1.0])];
        assert_eq!(lattice_points_in_ball(&basis, &Vector::zeros(2), 2.0).len(), 13);
        assert_eq!(lattice_points_in_ball(&[], &Vector::zeros(2), 0.0).len(), 1);
    }
}
