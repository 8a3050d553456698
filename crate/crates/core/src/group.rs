//! Elements and split subgroups `H = T_H ⋊ H_0` of `Isom(E^n)`.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::lattice::{Lattice, LatticeCoords};
use crate::linalg::{Matrix, Vector};
use crate::{Error, Result, Tolerances};

/// Cap on the size of a saturated spherical group.
pub const SPHERICAL_CAP: usize = 100_000;

/// Default cap on the number of elements a Cayley-graph ball may hold.
pub const BALL_CAP: usize = 2_000_000;

/// The isometry `x -> spherical * x + translation`, i.e. `t^λ h_0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    #[serde(rename = "lambda")]
    pub translation: Vector,
    pub spherical: Matrix,
}

impl Isometry {
    pub fn new(translation: Vector, spherical: Matrix) -> Self {
        Isometry {
            translation,
            spherical,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(Vector::zeros(n), Matrix::identity(n))
    }

    pub fn translation(lambda: Vector) -> Self {
        let n = lambda.dim();
        Self::new(lambda, Matrix::identity(n))
    }

    pub fn linear(spherical: Matrix) -> Self {
        let n = spherical.dim();
        Self::new(Vector::zeros(n), spherical)
    }

    pub fn dim(&self) -> usize {
        self.spherical.dim()
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.spherical.mul_vec(x) + &self.translation
    }

    /// `(t^λ u)(t^μ v) = t^{λ + uμ} uv`
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Isometry) -> Isometry {
        Isometry {
            translation: &self.translation + &self.spherical.mul_vec(&other.translation),
            spherical: &self.spherical * &other.spherical,
        }
    }

    /// `(t^λ u)^{-1} = t^{-u^{-1}λ} u^{-1}`; `u^{-1} = u^T` for orthogonal `u`.
    pub fn inverse(&self) -> Isometry {
        let inv = self.spherical.transpose();
        Isometry {
            translation: inv.mul_vec(&self.translation).scale(-1.0),
            spherical: inv,
        }
    }

    /// `k h k^{-1}` with `k = self`.
    pub fn conjugate(&self, h: &Isometry) -> Result<Isometry> {
        Ok(self.compose(h)?.compose_unchecked(&self.inverse()))
    }

    pub fn approx_eq(&self, other: &Isometry, eps: f64) -> bool {
        self.dim() == other.dim()
            && (&self.translation - &other.translation).max_abs() <= eps
            && self.spherical.approx_eq(&other.spherical, eps)
    }

    /// Hash key: every entry rounded to `decimals` places.
    pub fn key(&self, decimals: u32) -> ElementKey {
        let scale = 10f64.powi(decimals as i32);
        ElementKey(
            self.spherical
                .row_major()
                .iter()
                .chain(self.translation.as_slice())
                .map(|x| round_key(*x, scale))
                .collect(),
        )
    }
}

/// Rounded entries of a group element, used for deduplication.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementKey(pub Vec<i64>);

fn round_key(x: f64, scale: f64) -> i64 {
    let r = (x * scale).round() as i64;
    // fold -0 into 0
    if r == 0 {
        0
    } else {
        r
    }
}

pub fn matrix_key(m: &Matrix, decimals: u32) -> ElementKey {
    let scale = 10f64.powi(decimals as i32);
    ElementKey(m.row_major().iter().map(|x| round_key(*x, scale)).collect())
}

/// A split group `H = T_H ⋊ H_0` with a finite generating set `S`.
#[derive(Clone, Debug)]
pub struct SplitGroup {
    dim: usize,
    spherical_generators: Vec<Matrix>,
    spherical_group: Vec<Matrix>,
    spherical_index: HashMap<ElementKey, usize>,
    lattice: Lattice,
    generators: Vec<Isometry>,
    tol: Tolerances,
}

impl SplitGroup {
    /// Builds the group from spherical generators (saturated into `H_0`), a
    /// lattice, and a generating set (symmetrized under inversion). Nothing
    /// is validated here; see [`SplitGroup::validate`].
    pub fn new(
        dim: usize,
        spherical_generators: Vec<Matrix>,
        lattice: Lattice,
        generators: Vec<Isometry>,
    ) -> Result<Self> {
        Self::with_tolerances(dim, spherical_generators, lattice, generators, Tolerances::default())
    }

    pub fn with_tolerances(
        dim: usize,
        spherical_generators: Vec<Matrix>,
        lattice: Lattice,
        generators: Vec<Isometry>,
        tol: Tolerances,
    ) -> Result<Self> {
        check_dims(dim, &spherical_generators, &lattice, &generators)?;
        let spherical_group = saturate(dim, &spherical_generators, SPHERICAL_CAP, &tol)?;
        Ok(Self::assemble(dim, spherical_generators, spherical_group, lattice, generators, tol))
    }

    /// Uses `spherical_group` verbatim as `H_0`, without saturation. Meant
    /// for checking [`SplitGroup::validate`] against malformed data.
    pub fn from_parts(
        dim: usize,
        spherical_generators: Vec<Matrix>,
        spherical_group: Vec<Matrix>,
        lattice: Lattice,
        generators: Vec<Isometry>,
    ) -> Result<Self> {
        check_dims(dim, &spherical_generators, &lattice, &generators)?;
        if spherical_group.iter().any(|m| m.dim() != dim) {
            return Err(Error::InvalidInput("spherical element of wrong dimension".into()));
        }
        Ok(Self::assemble(
            dim,
            spherical_generators,
            spherical_group,
            lattice,
            generators,
            Tolerances::default(),
        ))
    }

    fn assemble(
        dim: usize,
        spherical_generators: Vec<Matrix>,
        spherical_group: Vec<Matrix>,
        lattice: Lattice,
        generators: Vec<Isometry>,
        tol: Tolerances,
    ) -> Self {
        let spherical_index = spherical_group
            .iter()
            .enumerate()
            .map(|(i, m)| (matrix_key(m, tol.key_decimals), i))
            .collect();
        let mut symmetric: Vec<Isometry> = Vec::with_capacity(2 * generators.len());
        let mut seen: HashMap<ElementKey, ()> = HashMap::new();
        for g in generators.iter().cloned().chain(generators.iter().map(Isometry::inverse)) {
            if seen.insert(g.key(tol.key_decimals), ()).is_none() {
                symmetric.push(g);
            }
        }
        SplitGroup {
            dim,
            spherical_generators,
            spherical_group,
            spherical_index,
            lattice,
            generators: symmetric,
            tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn spherical_generators(&self) -> &[Matrix] {
        &self.spherical_generators
    }

    /// `H_0`, identity first when saturated.
    pub fn spherical_group(&self) -> &[Matrix] {
        &self.spherical_group
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// The symmetrized generating set.
    pub fn generators(&self) -> &[Isometry] {
        &self.generators
    }

    pub fn is_discrete(&self) -> bool {
        self.lattice.is_discrete()
    }

    /// Position of `m` in `H_0`.
    pub fn spherical_position(&self, m: &Matrix) -> Option<usize> {
        self.spherical_index
            .get(&matrix_key(m, self.tol.key_decimals))
            .copied()
            .filter(|&i| self.spherical_group[i].approx_eq(m, 10.0 * self.tol.lattice))
    }

    /// `h ∈ H`: spherical part in `H_0` and translation part in `L_H`.
    pub fn contains(&self, h: &Isometry) -> bool {
        h.dim() == self.dim
            && self.spherical_position(&h.spherical).is_some()
            && self.lattice.contains(&h.translation, &self.tol)
    }

    pub fn lattice_coords(&self, v: &Vector) -> Option<LatticeCoords> {
        self.lattice.coords(v, &self.tol)
    }

    /// All violated invariants, as readable messages. Empty iff the data
    /// describes a split group.
    pub fn validate(&self) -> Vec<String> {
        let tol = &self.tol;
        let eps = 10.0 * tol.lattice;
        let mut out = Vec::new();
        let n = self.dim;

        if !self.lattice.is_well_formed(tol) {
            out.push("lattice generators are not linearly independent (or exceed the dimension)".into());
        }
        for (i, m) in self.spherical_group.iter().enumerate() {
            if !m.is_finite() || !m.is_orthogonal(eps) {
                out.push(format!("spherical element {i} is not orthogonal"));
            }
        }
        if self.spherical_position(&Matrix::identity(n)).is_none() {
            out.push("identity is missing from the spherical group".into());
        }
        for (i, g) in self.spherical_generators.iter().enumerate() {
            if self.spherical_position(g).is_none() {
                out.push(format!("spherical generator {i} is not in the spherical group"));
            }
        }
        // Closure: H_0 * gens ⊆ H_0, inverses present, and every element is
        // reachable from the generators.
        let mut closure_ok = true;
        'outer: for (i, a) in self.spherical_group.iter().enumerate() {
            for g in &self.spherical_generators {
                if self.spherical_position(&(a * g)).is_none() {
                    out.push(format!("spherical group is not closed under products (element {i})"));
                    closure_ok = false;
                    break 'outer;
                }
            }
            if self.spherical_position(&a.transpose()).is_none() {
                out.push(format!("spherical group is not closed under inverses (element {i})"));
                closure_ok = false;
                break;
            }
        }
        if closure_ok {
            match saturate(n, &self.spherical_generators, SPHERICAL_CAP, tol) {
                Ok(generated) if generated.len() != self.spherical_group.len() => {
                    out.push(format!(
                        "spherical group has {} elements but its generators produce {}",
                        self.spherical_group.len(),
                        generated.len()
                    ));
                }
                Ok(_) => {}
                Err(e) => out.push(format!("spherical generators: {e}")),
            }
        }
        // H_0 must stabilize L_H.
        for (i, u) in self.spherical_group.iter().enumerate() {
            let moved_int = self
                .lattice
                .int_basis
                .iter()
                .any(|l| !self.lattice.contains(&u.mul_vec(l), tol));
            let moved_real = self.lattice.real_basis.iter().any(|r| {
                let image = u.mul_vec(r);
                match self.lattice.raw_coords(&image) {
                    Some((_, int, residual)) => {
                        residual >= tol.lattice * image.norm().max(1.0)
                            || int.iter().any(|x| x.abs() >= tol.lattice)
                    }
                    None => true,
                }
            });
            if moved_int || moved_real {
                out.push(format!("lattice is not stable under spherical element {i}"));
                break;
            }
        }
        for (i, g) in self.generators.iter().enumerate() {
            if self.spherical_position(&g.spherical).is_none() {
                out.push(format!("generator {i} has spherical part outside the spherical group"));
            }
            if !self.lattice.contains(&g.translation, tol) {
                out.push(format!("generator {i} has translation part outside the lattice"));
            }
        }
        out
    }

    pub fn require_discrete(&self) -> Result<()> {
        if self.is_discrete() {
            Ok(())
        } else {
            Err(Error::Unsupported(
                "word length is only available for discrete groups (empty real lattice part)".into(),
            ))
        }
    }

    /// The Cayley-graph ball of the given radius.
    pub fn ball(&self, radius: usize) -> Result<Ball> {
        self.ball_with_cap(radius, BALL_CAP)
    }

    pub fn ball_with_cap(&self, radius: usize, cap: usize) -> Result<Ball> {
        self.require_discrete()?;
        let mut ball = Ball::new(self.dim, self.tol.key_decimals);
        let mut frontier = vec![0usize];
        for r in 1..=radius {
            let mut next = Vec::new();
            for &i in &frontier {
                for s in &self.generators {
                    let g = ball.elements[i].compose_unchecked(s);
                    if let Some(j) = ball.insert(g, r) {
                        if ball.len() > cap {
                            return Err(Error::CapExceeded {
                                what: "ball size",
                                cap,
                            });
                        }
                        next.push(j);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(ball)
    }

    /// `ℓ_S(g)` if it is at most `max_radius`, `None` otherwise.
    pub fn word_length(&self, g: &Isometry, max_radius: usize) -> Result<Option<usize>> {
        if g.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: g.dim(),
            });
        }
        let target = g.key(self.tol.key_decimals);
        let decimals = self.tol.key_decimals;
        Ok(self
            .bfs_find(max_radius, |k| k.key(decimals) == target)?
            .map(|(l, _)| l))
    }

    /// Breadth-first search of the Cayley graph for the first element (in
    /// order of word length) satisfying `pred`, up to `max_radius`.
    pub fn bfs_find<F>(&self, max_radius: usize, mut pred: F) -> Result<Option<(usize, Isometry)>>
    where
        F: FnMut(&Isometry) -> bool,
    {
        self.require_discrete()?;
        let mut ball = Ball::new(self.dim, self.tol.key_decimals);
        if pred(&ball.elements[0]) {
            return Ok(Some((0, ball.elements[0].clone())));
        }
        let mut frontier: VecDeque<usize> = VecDeque::from([0]);
        while let Some(i) = frontier.pop_front() {
            let r = ball.lengths[i];
            if r >= max_radius {
                break;
            }
            for s in &self.generators {
                let h = ball.elements[i].compose_unchecked(s);
                if let Some(j) = ball.insert(h, r + 1) {
                    if pred(&ball.elements[j]) {
                        return Ok(Some((r + 1, ball.elements[j].clone())));
                    }
                    if ball.len() > BALL_CAP {
                        return Err(Error::CapExceeded {
                            what: "ball size",
                            cap: BALL_CAP,
                        });
                    }
                    frontier.push_back(j);
                }
            }
        }
        Ok(None)
    }
}

fn check_dims(dim: usize, spherical: &[Matrix], lattice: &Lattice, generators: &[Isometry]) -> Result<()> {
    let bad = |got: usize| Error::DimensionMismatch { expected: dim, got };
    if let Some(m) = spherical.iter().find(|m| m.dim() != dim) {
        return Err(bad(m.dim()));
    }
    if lattice.dim != dim {
        return Err(bad(lattice.dim));
    }
    if let Some(v) = lattice.basis().iter().find(|v| v.dim() != dim) {
        return Err(bad(v.dim()));
    }
    if let Some(g) = generators.iter().find(|g| g.dim() != dim || g.translation.dim() != dim) {
        return Err(bad(g.translation.dim().max(g.dim())));
    }
    Ok(())
}

/// Closure of `generators` under multiplication, identity first.
pub fn saturate(n: usize, generators: &[Matrix], cap: usize, tol: &Tolerances) -> Result<Vec<Matrix>> {
    let mut elements = vec![Matrix::identity(n)];
    let mut seen: HashMap<ElementKey, ()> = HashMap::from([(matrix_key(&elements[0], tol.key_decimals), ())]);
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        for g in generators {
            let m = &elements[i] * g;
            if seen.insert(matrix_key(&m, tol.key_decimals), ()).is_none() {
                elements.push(m);
                if elements.len() > cap {
                    return Err(Error::CapExceeded {
                        what: "spherical group size",
                        cap,
                    });
                }
                queue.push_back(elements.len() - 1);
            }
        }
    }
    Ok(elements)
}

/// Elements of word length at most some radius, in BFS order.
#[derive(Clone, Debug)]
pub struct Ball {
    elements: Vec<Isometry>,
    lengths: Vec<usize>,
    keys: HashMap<ElementKey, usize>,
    key_list: Vec<ElementKey>,
    decimals: u32,
}

impl Ball {
    fn new(dim: usize, decimals: u32) -> Self {
        let mut ball = Ball {
            elements: Vec::new(),
            lengths: Vec::new(),
            keys: HashMap::new(),
            key_list: Vec::new(),
            decimals,
        };
        ball.insert(Isometry::identity(dim), 0);
        ball
    }

    fn insert(&mut self, g: Isometry, length: usize) -> Option<usize> {
        let key = g.key(self.decimals);
        if self.keys.contains_key(&key) {
            return None;
        }
        let idx = self.elements.len();
        self.keys.insert(key.clone(), idx);
        self.key_list.push(key);
        self.elements.push(g);
        self.lengths.push(length);
        Some(idx)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn radius(&self) -> usize {
        self.lengths.last().copied().unwrap_or(0)
    }

    pub fn elements(&self) -> &[Isometry] {
        &self.elements
    }

    /// Word lengths, parallel to [`Ball::elements`] and nondecreasing.
    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Isometry, usize)> {
        self.elements.iter().zip(self.lengths.iter().copied())
    }

    pub fn keys(&self) -> &[ElementKey] {
        &self.key_list
    }

    pub fn position(&self, g: &Isometry) -> Option<usize> {
        self.keys.get(&g.key(self.decimals)).copied()
    }

    pub fn word_length(&self, g: &Isometry) -> Option<usize> {
        self.position(g).map(|i| self.lengths[i])
    }

    /// Number of elements of each word length `0..=radius`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.radius() + 1];
        for &l in &self.lengths {
            sizes[l] += 1;
        }
        sizes
    }

    /// Indices of elements `k` with `k h k^{-1} = h'`, in BFS order.
    pub fn conjugators(&self, h: &Isometry, h_prime: &Isometry, eps: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| {
                let k = &self.elements[i];
                k.compose_unchecked(h)
                    .compose_unchecked(&k.inverse())
                    .approx_eq(h_prime, eps)
            })
            .collect()
    }

    /// Shortest word length of a conjugator from `h` to `h'` inside the ball.
    pub fn conjugator_length(&self, h: &Isometry, h_prime: &Isometry, eps: f64) -> Option<usize> {
        self.elements.iter().zip(&self.lengths).find_map(|(k, &l)| {
            k.compose_unchecked(h)
                .compose_unchecked(&k.inverse())
                .approx_eq(h_prime, eps)
                .then_some(l)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot(theta: f64) -> Matrix {
        let (s, c) = theta.sin_cos();
        Matrix::from_rows(&[vec![c, -s], vec![s, c]]).unwrap()
    }

    fn p4() -> SplitGroup {
        let r = rot(std::f64::consts::FRAC_PI_2);
        let gens = vec![
            Isometry::linear(r.clone()),
            Isometry::translation(Vector(vec![1.0, 0.0])),
            Isometry::translation(Vector(vec![0.0, 1.0])),
        ];
        SplitGroup::new(2, vec![r], Lattice::standard(2), gens).unwrap()
    }

    #[test]
    fn compose_and_inverse() {
        let a = Isometry::translation(Vector(vec![1.0, 2.0]));
        let b = Isometry::translation(Vector(vec![-3.0, 0.5]));
        let ab = a.compose(&b).unwrap();
        assert!(ab.approx_eq(&Isometry::translation(Vector(vec![-2.0, 2.5])), 1e-12));

        let h = Isometry::new(Vector(vec![0.3, -1.0]), rot(0.4));
        assert!(h.compose(&h.inverse()).unwrap().approx_eq(&Isometry::identity(2), 1e-12));
        assert!(Isometry::identity(2).inverse().approx_eq(&Isometry::identity(2), 0.0));
        assert!(a.inverse().approx_eq(&Isometry::translation(Vector(vec![-1.0, -2.0])), 0.0));

        let three = Isometry::identity(3);
        assert!(matches!(h.compose(&three), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn conjugation_basics() {
        let h = Isometry::new(Vector(vec![0.3, -1.0]), rot(0.4));
        assert!(Isometry::identity(2).conjugate(&h).unwrap().approx_eq(&h, 1e-12));
        let t = Isometry::translation(Vector(vec![5.0, 1.0]));
        let s = Isometry::translation(Vector(vec![-2.0, 7.0]));
        assert!(t.conjugate(&s).unwrap().approx_eq(&s, 1e-12));
        let k = Isometry::new(Vector(vec![1.0, 1.0]), rot(1.1));
        let c = k.conjugate(&h).unwrap();
        let expected = &(&k.spherical * &h.spherical) * &k.spherical.transpose();
        assert!(c.spherical.approx_eq(&expected, 1e-12));
    }

    #[test]
    fn p4_is_valid_and_balls_grow() {
        let g = p4();
        assert_eq!(g.spherical_group().len(), 4);
        assert!(g.validate().is_empty(), "{:?}", g.validate());
        assert_eq!(g.generators().len(), 6);
        let ball = g.ball(0).unwrap();
        assert_eq!(ball.len(), 1);
        let ball = g.ball(1).unwrap();
        assert_eq!(ball.len(), 7);
        let sizes = g.ball(4).unwrap().sphere_sizes();
        assert_eq!(sizes[0], 1);
        assert_eq!(sizes[1], 6);
    }

    #[test]
    fn word_length_by_bfs() {
        let g = p4();
        assert_eq!(g.word_length(&Isometry::identity(2), 5).unwrap(), Some(0));
        let t = Isometry::translation(Vector(vec![3.0, 0.0]));
        assert_eq!(g.word_length(&t, 5).unwrap(), Some(3));
        let far = Isometry::translation(Vector(vec![30.0, 0.0]));
        assert_eq!(g.word_length(&far, 4).unwrap(), None);
    }

    #[test]
    fn non_discrete_groups_refuse_bfs() {
        let lattice = Lattice::new(1, vec![Vector(vec![1.0])], vec![]);
        let g = SplitGroup::new(1, vec![], lattice, vec![]).unwrap();
        assert!(matches!(g.ball(2), Err(Error::Unsupported(_))));
        assert!(matches!(g.word_length(&Isometry::identity(1), 2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn validate_catches_broken_data() {
        let g = p4();
        let mut h0 = g.spherical_group().to_vec();
        h0.pop();
        let broken = SplitGroup::from_parts(
            2,
            g.spherical_generators().to_vec(),
            h0,
            g.lattice().clone(),
            g.generators().to_vec(),
        )
        .unwrap();
        assert!(!broken.validate().is_empty());

        let skew = Lattice::standard(2);
        let mut skew = skew;
        skew.int_basis[0] = Vector(vec![1.0, 0.1]);
        let bad = SplitGroup::new(2, g.spherical_generators().to_vec(), skew, vec![]).unwrap();
        assert!(bad.validate().iter().any(|v| v.contains("not stable")));
    }

    #[test]
    fn saturation_cap() {
        // An irrational rotation never closes up.
        let r = rot(1.0);
        let err = saturate(2, &[r], 50, &Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }
}
