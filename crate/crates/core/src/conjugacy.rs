//! Coconjugation sets and minimum-norm conjugators.
//!
//! For `h = t^λ h0` and `h' = t^λ' h0'` in a split group `H`, every
//! conjugator `k` with `k h k^{-1} = h'` has the form `t^{η + f} u`, where
//! `u h0 u^{-1} = h0'`, `λ' - uλ` lies in `Mod(h0') = (Id - h0') L_H`, `η` is
//! one lattice solution of `(Id - h0') η = λ' - uλ`, and `f` ranges over
//! `Fix(h0') ∩ L_H`. The sets for distinct `u` are disjoint.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::cvp;
use crate::group::{Isometry, SplitGroup};
use crate::lattice::{self, Lattice};
use crate::linalg::{self, Matrix, Vector};
use crate::{Error, Result};

/// `(Id - h0') L_H` as a lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModLattice {
    pub lattice: Lattice,
}

impl ModLattice {
    pub fn contains(&self, v: &Vector, g: &SplitGroup) -> bool {
        self.lattice.contains(v, g.tolerances())
    }
}

/// The conjugators `t^{eta + f} u`, `f ∈ fix_lattice`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoconjCoset {
    pub u: Matrix,
    pub eta: Vector,
    pub fix_lattice: Lattice,
}

impl CoconjCoset {
    /// The member with integer fix-lattice coefficients `int_coeffs` and
    /// real coefficients `real_coeffs`.
    pub fn member(&self, real_coeffs: &[f64], int_coeffs: &[i64]) -> Isometry {
        let n = self.eta.dim();
        let ints: Vec<f64> = int_coeffs.iter().map(|&x| x as f64).collect();
        let f = &Vector::combination(n, &self.fix_lattice.real_basis, real_coeffs)
            + &Vector::combination(n, &self.fix_lattice.int_basis, &ints);
        Isometry::new(&self.eta + &f, self.u.clone())
    }

    pub fn contains(&self, k: &Isometry, g: &SplitGroup) -> bool {
        let tol = g.tolerances();
        k.spherical.approx_eq(&self.u, 10.0 * tol.lattice)
            && self.fix_lattice.contains(&(&k.translation - &self.eta), tol)
    }
}

/// Disjoint union of cosets; empty iff the pair is not conjugate.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoconjugationSet {
    pub cosets: Vec<CoconjCoset>,
}

impl CoconjugationSet {
    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }

    pub fn contains(&self, k: &Isometry, g: &SplitGroup) -> bool {
        self.cosets.iter().any(|c| c.contains(k, g))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinConjugatorResult {
    pub conjugator: Isometry,
    /// Euclidean norm of the conjugator's translation part.
    pub ctn: f64,
    pub witnessing_coset_index: usize,
}

fn require_member(g: &SplitGroup, h: &Isometry, name: &str) -> Result<()> {
    if h.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: h.dim(),
        });
    }
    if !g.contains(h) {
        return Err(Error::InvalidInput(format!("{name} is not an element of the group")));
    }
    Ok(())
}

fn is_identity(m: &Matrix, g: &SplitGroup) -> bool {
    m.approx_eq(&Matrix::identity(m.dim()), 10.0 * g.tolerances().lattice)
}

/// All `u ∈ H_0` with `u h0 u^{-1} = h0'`, in `H_0` order.
pub fn spherical_coconjugators(g: &SplitGroup, h0: &Matrix, h0p: &Matrix) -> Vec<Matrix> {
    let eps = 10.0 * g.tolerances().lattice;
    g.spherical_group()
        .iter()
        .filter(|u| (&(*u * h0) * &u.transpose()).approx_eq(h0p, eps))
        .cloned()
        .collect()
}

/// `Mod(h0') = (Id - h0') L_H`.
pub fn mod_lattice(g: &SplitGroup, h0p: &Matrix) -> Result<ModLattice> {
    let a = &Matrix::identity(g.dim()) - h0p;
    Ok(ModLattice {
        lattice: lattice::image_lattice(g.lattice(), &a, g.tolerances())?,
    })
}

/// `Fix(h0') ∩ L_H`, with an LLL-reduced integer part.
pub fn fix_lattice(g: &SplitGroup, h0p: &Matrix) -> Result<Lattice> {
    if is_identity(h0p, g) {
        let mut l = g.lattice().clone();
        l.int_basis = cvp::lll_reduce(&l.int_basis);
        return Ok(l);
    }
    let a = &Matrix::identity(g.dim()) - h0p;
    let mut l = lattice::kernel_lattice(g.lattice(), &a, g.tolerances())?;
    l.int_basis = cvp::lll_reduce(&l.int_basis);
    Ok(l)
}

/// The `u` from [`spherical_coconjugators`] with `λ' - uλ ∈ Mod(h0')`.
pub fn translation_compatible(
    g: &SplitGroup,
    h0: &Matrix,
    h0p: &Matrix,
    lambda: &Vector,
    lambda_p: &Vector,
) -> Result<Vec<Matrix>> {
    let modl = mod_lattice(g, h0p)?;
    Ok(spherical_coconjugators(g, h0, h0p)
        .into_iter()
        .filter(|u| modl.contains(&(lambda_p - &u.mul_vec(lambda)), g))
        .collect())
}

/// A lattice vector `η` with `(Id - h0') η = λ' - uλ`, or `None`.
///
/// When `h0' = Id` the system degenerates to `λ' = uλ`, which is checked
/// directly and answered with `η = 0`.
pub fn solve_eta(
    g: &SplitGroup,
    u: &Matrix,
    lambda: &Vector,
    lambda_p: &Vector,
    h0p: &Matrix,
) -> Result<Option<Vector>> {
    let tol = g.tolerances();
    let b = lambda_p - &u.mul_vec(lambda);
    if is_identity(h0p, g) {
        let consistent = b.norm() < tol.lattice * lambda_p.norm().max(1.0);
        return Ok(consistent.then(|| Vector::zeros(g.dim())));
    }
    let a = &Matrix::identity(g.dim()) - h0p;
    lattice::solve_in_lattice(g.lattice(), &a, &b, tol)
}

/// The minimum-norm real solution `η0 = (Id - h0')^+ (λ' - uλ)`.
pub fn continuous_minimizer(g: &SplitGroup, u: &Matrix, lambda: &Vector, lambda_p: &Vector, h0p: &Matrix) -> Vector {
    let a = &Matrix::identity(g.dim()) - h0p;
    let b = lambda_p - &u.mul_vec(lambda);
    linalg::min_norm_solution(&a, &b, g.tolerances())
}

/// The coconjugation set from `h` to `h'` as a disjoint union of cosets.
pub fn coconjugation_set(g: &SplitGroup, h: &Isometry, h_prime: &Isometry) -> Result<CoconjugationSet> {
    require_member(g, h, "h")?;
    require_member(g, h_prime, "h'")?;
    let (lambda, h0) = (&h.translation, &h.spherical);
    let (lambda_p, h0p) = (&h_prime.translation, &h_prime.spherical);
    let compatible = translation_compatible(g, h0, h0p, lambda, lambda_p)?;
    if compatible.is_empty() {
        return Ok(CoconjugationSet::default());
    }
    let fix = fix_lattice(g, h0p)?;
    let mut cosets = Vec::with_capacity(compatible.len());
    for u in compatible {
        let eta = solve_eta(g, &u, lambda, lambda_p, h0p)?.ok_or_else(|| {
            Error::Inconsistent(format!(
                "λ' - uλ lies in Mod(h0') but (Id - h0')η = λ' - uλ has no lattice solution for u = {u:?}"
            ))
        })?;
        cosets.push(CoconjCoset {
            u,
            eta,
            fix_lattice: fix.clone(),
        });
    }
    Ok(CoconjugationSet { cosets })
}

pub fn is_conjugate(g: &SplitGroup, h: &Isometry, h_prime: &Isometry) -> Result<bool> {
    Ok(!coconjugation_set(g, h, h_prime)?.is_empty())
}

/// Shortest translation vectors in one coset: minimizers of `|η + f|` over
/// `f ∈ fix_lattice`, ties included.
pub fn coset_minimizers(coset: &CoconjCoset, g: &SplitGroup) -> Vec<Vector> {
    let tol = g.tolerances();
    let n = coset.eta.dim();
    let real_span = coset.fix_lattice.real_span(tol);
    let offset = real_span.reject(&coset.eta);
    let projected: Vec<Vector> = coset.fix_lattice.int_basis.iter().map(|f| real_span.reject(f)).collect();
    if projected.is_empty() {
        return vec![offset];
    }
    let target = offset.scale(-1.0);
    cvp::closest_vectors(&projected, &target, tol.eps)
        .into_iter()
        .map(|c| &offset + &c)
        .filter(|v| v.dim() == n)
        .collect()
}

/// A conjugator of minimal translation norm, or `None` if `h` and `h'` are
/// not conjugate. Ties are broken by coset order, then lexicographically by
/// translation vector.
pub fn min_norm_conjugator(g: &SplitGroup, h: &Isometry, h_prime: &Isometry) -> Result<Option<MinConjugatorResult>> {
    let set = coconjugation_set(g, h, h_prime)?;
    Ok(min_norm_in_set(&set, g))
}

pub fn min_norm_in_set(set: &CoconjugationSet, g: &SplitGroup) -> Option<MinConjugatorResult> {
    let eps = g.tolerances().eps;
    let mut candidates: Vec<(usize, Vector)> = set
        .cosets
        .iter()
        .enumerate()
        .flat_map(|(i, c)| coset_minimizers(c, g).into_iter().map(move |v| (i, v)))
        .collect();
    let best = candidates.iter().map(|(_, v)| v.norm()).fold(f64::INFINITY, f64::min);
    candidates.retain(|(_, v)| v.norm() <= best + eps);
    candidates.sort_by(|(i, a), (j, b)| i.cmp(j).then_with(|| a.lex_cmp(b, eps)));
    let (index, translation) = candidates.into_iter().next()?;
    Some(MinConjugatorResult {
        ctn: translation.norm(),
        conjugator: Isometry::new(translation, set.cosets[index].u.clone()),
        witnessing_coset_index: index,
    })
}

/// `cl(h, h')` by breadth-first search, testing each element directly;
/// `None` if no conjugator has word length at most `max_radius`.
pub fn conjugator_length_bfs(
    g: &SplitGroup,
    h: &Isometry,
    h_prime: &Isometry,
    max_radius: usize,
) -> Result<Option<usize>> {
    let eps = 10.0 * g.tolerances().lattice;
    let found = g.bfs_find(max_radius, |k| {
        k.compose_unchecked(h).compose_unchecked(&k.inverse()).approx_eq(h_prime, eps)
    })?;
    Ok(found.map(|(l, _)| l))
}

/// Orders results canonically: by norm, then lexicographically.
pub fn canonical_order(a: &Vector, b: &Vector, eps: f64) -> Ordering {
    let (na, nb) = (a.norm(), b.norm());
    if (na - nb).abs() > eps {
        na.total_cmp(&nb)
    } else {
        a.lex_cmp(b, eps)
    }
}
