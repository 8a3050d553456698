//! Concrete split groups: affine Weyl groups of type `Ã_n` and
//! crystallographic groups built from a point group and a lattice.
//!
//! Type `A_n` coroots `e_i - e_{i+1}` live in the hyperplane `sum x_i = 0` of
//! `R^{n+1}`; they are re-expressed in an orthonormal basis of that
//! hyperplane (Gram-Schmidt of the simple roots) so the ambient dimension is
//! the rank. Coroots have squared length 2, so roots and coroots coincide and
//! the reflection in `α` is `Id - α α^T`.

use serde::{Deserialize, Serialize};

use crate::group::{saturate, Isometry, SplitGroup, SPHERICAL_CAP};
use crate::lattice::Lattice;
use crate::linalg::{orthonormalize, Matrix, Vector};
use crate::{Error, Result, Tolerances};

/// Largest rank with `|W(A_rank)| = (rank + 1)!` under the spherical cap.
pub const MAX_AFFINE_A_RANK: usize = 7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoxeterDatum {
    pub type_label: String,
    pub rank: usize,
    pub simple_coroots: Vec<Vector>,
    pub simple_reflections: Vec<Matrix>,
    /// `s_0, s_1, ..., s_rank`, with `s_0 = t^{θ∨} s_θ`.
    pub affine_simple_generators: Vec<Isometry>,
    pub highest_coroot: Vector,
}

impl CoxeterDatum {
    /// `C_ij = <α_i, α_j∨> = 2 <α_i, α_j> / <α_j, α_j>`.
    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let a = &self.simple_coroots;
        a.iter()
            .map(|ai| {
                a.iter()
                    .map(|aj| (2.0 * ai.dot(aj) / aj.dot(aj)).round() as i64)
                    .collect()
            })
            .collect()
    }

    /// The simple reflection `s_i` for `i` in `1..=rank`.
    pub fn s(&self, i: usize) -> &Matrix {
        &self.simple_reflections[i - 1]
    }

    /// Product `s_{i_1} s_{i_2} ...` of simple reflections (indices from 1).
    pub fn word(&self, letters: &[usize]) -> Matrix {
        letters
            .iter()
            .fold(Matrix::identity(self.rank), |acc, &i| &acc * self.s(i))
    }

    /// Integer combination of simple coroots.
    pub fn coroot_combination(&self, coeffs: &[i64]) -> Vector {
        let c: Vec<f64> = coeffs.iter().map(|&x| x as f64).collect();
        Vector::combination(self.rank, &self.simple_coroots, &c)
    }
}

/// The Cartan matrix of type `A_n`.
pub fn cartan_matrix_a(rank: usize) -> Vec<Vec<i64>> {
    (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| match i.abs_diff(j) {
                    0 => 2,
                    1 => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect()
}

pub fn reflection(alpha: &Vector) -> Matrix {
    let n = alpha.dim();
    &Matrix::identity(n) - &Matrix::outer(alpha, alpha).scale(2.0 / alpha.dot(alpha))
}

/// Simple coroots of `A_rank` in orthonormal coordinates of the hyperplane.
pub fn simple_coroots_a(rank: usize) -> Vec<Vector> {
    let big = rank + 1;
    let roots: Vec<Vector> = (0..rank)
        .map(|i| {
            let mut v = Vector::zeros(big);
            v[i] = 1.0;
            v[i + 1] = -1.0;
            v
        })
        .collect();
    let frame = orthonormalize(&roots, &Tolerances::default());
    roots
        .iter()
        .map(|r| {
            let mut c = Vector(frame.iter().map(|q| q.dot(r)).collect());
            // exact zeros above the diagonal of the triangular embedding
            for x in c.0.iter_mut() {
                if x.abs() < 1e-14 {
                    *x = 0.0;
                }
            }
            c
        })
        .collect()
}

/// The affine Weyl group `Ã_rank` with generating set `{s_0, ..., s_rank}`.
pub fn build_affine_a(rank: usize) -> Result<(SplitGroup, CoxeterDatum)> {
    if rank == 0 {
        return Err(Error::InvalidInput("rank must be at least 1".into()));
    }
    if rank > MAX_AFFINE_A_RANK {
        return Err(Error::CapExceeded {
            what: "Weyl group size for the requested rank",
            cap: SPHERICAL_CAP,
        });
    }
    let coroots = simple_coroots_a(rank);
    let reflections: Vec<Matrix> = coroots.iter().map(reflection).collect();
    let theta = coroots.iter().fold(Vector::zeros(rank), |acc, a| &acc + a);
    let s0 = Isometry::new(theta.clone(), reflection(&theta));
    let mut affine = vec![s0];
    affine.extend(reflections.iter().cloned().map(Isometry::linear));

    let lattice = Lattice::integer(rank, coroots.clone());
    let group = SplitGroup::new(rank, reflections.clone(), lattice, affine.clone())?;
    let datum = CoxeterDatum {
        type_label: format!("A~{rank}"),
        rank,
        simple_coroots: coroots,
        simple_reflections: reflections,
        affine_simple_generators: affine,
        highest_coroot: theta,
    };
    Ok((group, datum))
}

/// Split crystallographic group with point group generated by `point_gens`
/// and translation lattice `lattice`; generators are the point generators
/// and the translations by the lattice basis.
pub fn build_crystallographic(point_gens: Vec<Matrix>, lattice: Lattice) -> Result<SplitGroup> {
    let n = lattice.dim;
    let tol = Tolerances::default();
    saturate(n, &point_gens, SPHERICAL_CAP, &tol)?;
    let mut gens: Vec<Isometry> = point_gens.iter().cloned().map(Isometry::linear).collect();
    gens.extend(lattice.basis().into_iter().map(Isometry::translation));
    let group = SplitGroup::new(n, point_gens, lattice, gens)?;
    let violations = group.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidInput(violations.join("; ")));
    }
    Ok(group)
}

fn rotation(theta: f64) -> Matrix {
    let (s, c) = theta.sin_cos();
    Matrix::from_rows(&[vec![c, -s], vec![s, c]]).expect("2x2")
}

/// Names accepted by [`preset`].
pub fn preset_names() -> Vec<String> {
    let mut names: Vec<String> = (1..=MAX_AFFINE_A_RANK).map(|r| format!("A~{r}")).collect();
    names.extend(["p1", "p2", "p4"].map(String::from));
    names
}

/// Named groups: `A~1` .. `A~7`, and the wallpaper groups `p1` (abelian,
/// `Z^2`), `p2` (point group `{±Id}`) and `p4` (quarter turns).
pub fn preset(name: &str) -> Result<SplitGroup> {
    if let Some(rank) = name.strip_prefix("A~").or_else(|| name.strip_prefix("a~")) {
        let rank: usize = rank
            .parse()
            .map_err(|_| Error::InvalidInput(format!("unknown preset {name:?}")))?;
        return build_affine_a(rank).map(|(g, _)| g);
    }
    match name {
        "p1" => build_crystallographic(Vec::new(), Lattice::standard(2)),
        "p2" => build_crystallographic(vec![Matrix::identity(2).scale(-1.0)], Lattice::standard(2)),
        "p4" => build_crystallographic(vec![rotation(std::f64::consts::FRAC_PI_2)], Lattice::standard(2)),
        _ => Err(Error::InvalidInput(format!(
            "unknown preset {name:?}; known presets: {}",
            preset_names().join(", ")
        ))),
    }
}

/// The worked `Ã_2` pair: `h = t^{α1∨+α2∨} s1` and
/// `h' = t^{4α1∨+3α2∨} s1 s2 s1`, whose shortest conjugator has spherical
/// part `s2`.
#[derive(Clone, Debug)]
pub struct Fig1Data {
    pub h: Isometry,
    pub h_prime: Isometry,
    pub expected_u: Matrix,
}

pub fn fig1_data() -> Fig1Data {
    let (_, datum) = build_affine_a(2).expect("rank 2 is always buildable");
    Fig1Data {
        h: Isometry::new(datum.coroot_combination(&[1, 1]), datum.s(1).clone()),
        h_prime: Isometry::new(datum.coroot_combination(&[4, 3]), datum.word(&[1, 2, 1])),
        expected_u: datum.s(2).clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-9;

    #[test]
    fn a2_has_six_spherical_elements_and_validates() {
        let (g, datum) = build_affine_a(2).unwrap();
        assert_eq!(g.spherical_group().len(), 6);
        assert!(g.validate().is_empty(), "{:?}", g.validate());
        assert_eq!(datum.cartan_matrix(), cartan_matrix_a(2));
        assert_eq!(datum.type_label, "A~2");
        for a in &datum.simple_coroots {
            assert!((a.dot(a) - 2.0).abs() < EPS);
        }
    }

    #[test]
    fn a1_is_infinite_dihedral() {
        let (g, datum) = build_affine_a(1).unwrap();
        assert_eq!(g.spherical_group().len(), 2);
        assert_eq!(g.lattice().int_basis.len(), 1);
        assert!((datum.simple_coroots[0][0].abs() - 2f64.sqrt()).abs() < EPS);
        // sphere sizes of the infinite dihedral group: 1, 2, 2, 2, ...
        assert_eq!(g.ball(5).unwrap().sphere_sizes(), vec![1, 2, 2, 2, 2, 2]);
    }

    #[test]
    fn weyl_elements_permute_the_coroot_lattice() {
        let (g, datum) = build_affine_a(2).unwrap();
        let tol = Tolerances::default();
        for u in g.spherical_group() {
            for a in &datum.simple_coroots {
                assert!(g.lattice().contains(&u.mul_vec(a), &tol));
            }
            // bijective: the inverse also preserves it
            for a in &datum.simple_coroots {
                assert!(g.lattice().contains(&u.transpose().mul_vec(a), &tol));
            }
        }
    }

    #[test]
    fn coxeter_relations_hold() {
        for rank in 1..=4 {
            let (_, datum) = build_affine_a(rank).unwrap();
            let id = Matrix::identity(rank);
            for i in 1..=rank {
                let s = datum.s(i);
                assert!((s * s).approx_eq(&id, EPS));
                assert!(s.is_orthogonal(EPS));
                for j in i + 1..=rank {
                    let st = s * datum.s(j);
                    let order = if j == i + 1 { 3 } else { 2 };
                    let mut p = id.clone();
                    for _ in 0..order {
                        p = &p * &st;
                    }
                    assert!(p.approx_eq(&id, EPS), "(s{i} s{j})^{order} != 1");
                }
            }
            assert_eq!(datum.cartan_matrix(), cartan_matrix_a(rank));
        }
    }

    #[test]
    fn affine_generator_is_translated_highest_reflection() {
        let (_, datum) = build_affine_a(3).unwrap();
        let theta = datum.coroot_combination(&[1, 1, 1]);
        let expected = Isometry::translation(theta.clone())
            .compose(&Isometry::linear(reflection(&theta)))
            .unwrap();
        assert!(datum.affine_simple_generators[0].approx_eq(&expected, EPS));
        // s_0 fixes the hyperplane <x, θ> = 1 pointwise
        let x = theta.scale(0.5);
        assert!((&datum.affine_simple_generators[0].apply(&x) - &x).norm() < EPS);
    }

    #[test]
    fn rank_cap() {
        assert!(build_affine_a(0).is_err());
        assert!(matches!(build_affine_a(8), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn wallpaper_presets() {
        let p1 = preset("p1").unwrap();
        assert_eq!(p1.spherical_group().len(), 1);
        let p2 = preset("p2").unwrap();
        assert_eq!(p2.spherical_group().len(), 2);
        let p4 = preset("p4").unwrap();
        assert_eq!(p4.spherical_group().len(), 4);
        // p2 sphere sizes by hand: generators {-Id, t±e1, t±e2} (5 of them)
        // radius 1: 5 new elements.
        assert_eq!(p2.ball(1).unwrap().len(), 6);
        assert!(preset("q7").is_err());
    }

    #[test]
    fn crystallographic_rejects_unstable_lattice() {
        let lattice = Lattice::integer(2, vec![Vector(vec![1.0, 0.0]), Vector(vec![0.3, 1.0])]);
        let err = build_crystallographic(vec![rotation(std::f64::consts::FRAC_PI_2)], lattice);
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn fig1_pair() {
        let d = fig1_data();
        let (g, datum) = build_affine_a(2).unwrap();
        assert!(g.contains(&d.h));
        assert!(g.contains(&d.h_prime));
        assert!(d.h.spherical.approx_eq(datum.s(1), EPS));
        assert!(d.expected_u.approx_eq(datum.s(2), EPS));
        let lp = g.lattice_coords(&d.h_prime.translation).unwrap();
        assert_eq!(lp.int_coeffs, vec![4, 3]);
    }
}
