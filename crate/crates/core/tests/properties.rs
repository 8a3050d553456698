use conjlen_core::conjugacy;
use conjlen_core::coxeter::build_affine_a;
use conjlen_core::linalg::{penrose_residuals, pseudoinverse, min_norm_solution};
use conjlen_core::{Isometry, Lattice, Matrix, Tolerances, Vector};
use proptest::prelude::*;

fn matrix(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-2.0f64..2.0, n * n).prop_map(move |d| Matrix::from_row_major(n, &d).unwrap())
}

fn low_rank(n: usize) -> impl Strategy<Value = Matrix> {
    (1..n, prop::collection::vec(-2.0f64..2.0, 2 * n * n)).prop_map(move |(r, d)| {
        let b: Vec<Vector> = (0..r).map(|i| Vector(d[i * n..(i + 1) * n].to_vec())).collect();
        let c: Vec<Vector> = (0..r).map(|i| Vector(d[n * n + i * n..n * n + (i + 1) * n].to_vec())).collect();
        let mut m = Matrix::zeros(n);
        for (u, v) in b.iter().zip(&c) {
            m = &m + &Matrix::outer(u, v);
        }
        m
    })
}

fn a2_element() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..3, 0..10)
}

fn word(g: &conjlen_core::SplitGroup, w: &[usize]) -> Isometry {
    w.iter()
        .fold(Isometry::identity(g.dim()), |acc, &i| acc.compose(&g.generators()[i]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn penrose_conditions_hold((full, deficient) in (2usize..=6).prop_flat_map(|n| (matrix(n), low_rank(n)))) {
        let tol = Tolerances::default();
        for a in [full, deficient] {
            let p = pseudoinverse(&a, &tol);
            for r in penrose_residuals(&a, &p) {
                prop_assert!(r < 1e-9, "residual {r}");
            }
        }
    }

    #[test]
    fn min_norm_solution_is_shortest(a in low_rank(4), x in prop::collection::vec(-3.0f64..3.0, 4)) {
        let tol = Tolerances::default();
        let x = Vector(x);
        let b = a.mul_vec(&x);
        let s = min_norm_solution(&a, &b, &tol);
        prop_assert!((&a.mul_vec(&s) - &b).norm() < 1e-8);
        prop_assert!(s.norm() <= x.norm() + 1e-9);
    }

    #[test]
    fn group_axioms(a in a2_element(), b in a2_element(), c in a2_element()) {
        let (g, _) = build_affine_a(2).unwrap();
        let (x, y, z) = (word(&g, &a), word(&g, &b), word(&g, &c));
        let l = x.compose(&y).unwrap().compose(&z).unwrap();
        let r = x.compose(&y.compose(&z).unwrap()).unwrap();
        prop_assert!(l.approx_eq(&r, 1e-9));
        let id = Isometry::identity(2);
        prop_assert!(x.compose(&id).unwrap().approx_eq(&x, 1e-12));
        prop_assert!(x.compose(&x.inverse()).unwrap().approx_eq(&id, 1e-9));
        prop_assert!(g.contains(&l));
    }

    #[test]
    fn lattice_coordinates_round_trip(c in prop::collection::vec(-20i64..20, 2), r in -5.0f64..5.0) {
        let tol = Tolerances::default();
        let l = Lattice::new(2, vec![Vector(vec![1.0, 0.0])], vec![Vector(vec![0.5, 1.0])]);
        let v = Vector(vec![r + 0.5 * c[0] as f64, c[0] as f64]);
        let coords = l.coords(&v, &tol).unwrap();
        prop_assert_eq!(coords.int_coeffs[0], c[0]);
        prop_assert!((&l.point(&coords) - &v).norm() < 1e-9);
        let (g, d) = build_affine_a(2).unwrap();
        let w = d.coroot_combination(&c);
        let back = g.lattice().coords(&w, &tol).unwrap();
        prop_assert!((&g.lattice().point(&back) - &w).norm() < 1e-9);
        prop_assert!(!g.lattice().contains(&w.axpy(0.25, &d.simple_coroots[0]), &tol));
    }

    #[test]
    fn conjugators_from_cosets_conjugate(h in a2_element(), k in a2_element(), m in -3i64..3) {
        let (g, _) = build_affine_a(2).unwrap();
        let h = word(&g, &h);
        let hp = word(&g, &k).conjugate(&h).unwrap();
        let set = conjugacy::coconjugation_set(&g, &h, &hp).unwrap();
        prop_assert!(!set.is_empty());
        for c in &set.cosets {
            let ints = vec![m; c.fix_lattice.int_basis.len()];
            let reals = vec![0.0; c.fix_lattice.real_basis.len()];
            prop_assert!(c.member(&reals, &ints).conjugate(&h).unwrap().approx_eq(&hp, 1e-8));
        }
        let r = conjugacy::min_norm_conjugator(&g, &h, &hp).unwrap().unwrap();
        prop_assert!(r.conjugator.conjugate(&h).unwrap().approx_eq(&hp, 1e-8));
        prop_assert!(r.ctn <= word(&g, &k).translation.norm() + 1e-9);
    }
}
