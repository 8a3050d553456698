//! SVG picture of the `Ã_2` alcove tiling around a conjugate pair.
//!
//! Every group element `w` is drawn as its alcove `w(A_0)`, where `A_0` is
//! the triangle with vertices `0`, `ω1∨`, `ω2∨`. Conjugator alcoves are
//! colored per coset.

use std::fmt::Write as _;

use conjlen_core::conjugacy::{self, CoconjugationSet, MinConjugatorResult};
use conjlen_core::coxeter::{build_affine_a, CoxeterDatum};
use conjlen_core::cvp::lattice_points_in_ball;
use conjlen_core::{Error, Isometry, Result, SplitGroup, Vector};

const SCALE: f64 = 40.0;
const MARGIN: f64 = 1.0;
const TILE: &str = "#f4f4f4";
const PURPLE: &str = "#8e44ad";
const CONJUGATOR_COLORS: [&str; 4] = ["#40e0d0", "#008b8b", "#20b2aa", "#5f9ea0"];

#[derive(Clone, Debug, PartialEq)]
pub struct Alcove {
    pub vertices: [Vector; 3],
    pub centroid: Vector,
}

impl Alcove {
    fn image(w: &Isometry, base: &[Vector; 3]) -> Self {
        let vertices = [w.apply(&base[0]), w.apply(&base[1]), w.apply(&base[2])];
        let centroid = (&(&vertices[0] + &vertices[1]) + &vertices[2]).scale(1.0 / 3.0);
        Alcove { vertices, centroid }
    }
}

/// Everything drawn, in plane coordinates.
#[derive(Clone, Debug)]
pub struct Figure {
    pub radius: f64,
    pub tiles: Vec<Alcove>,
    pub fundamental: Alcove,
    pub lattice_points: Vec<Vector>,
    pub h_alcove: Option<Alcove>,
    pub h_prime_alcove: Option<Alcove>,
    /// `(coset index, alcove)` for each conjugator in the window.
    pub conjugators: Vec<(usize, Alcove)>,
    pub min_conjugator: Option<Alcove>,
    /// `η_u` per coset.
    pub etas: Vec<Vector>,
    /// `(Id - h0')^+ (λ' - uλ)` for the witnessing coset.
    pub eta0: Option<Vector>,
}

fn fundamental_vertices(datum: &CoxeterDatum) -> [Vector; 3] {
    let (a1, a2) = (&datum.simple_coroots[0], &datum.simple_coroots[1]);
    let w1 = (&a1.scale(2.0) + a2).scale(1.0 / 3.0);
    let w2 = (a1 + &a2.scale(2.0)).scale(1.0 / 3.0);
    [Vector::zeros(2), w1, w2]
}

/// Word length large enough that every alcove with centroid norm at most
/// `radius` lies in the ball: each of the three root directions has walls
/// `1/sqrt 2` apart.
fn ball_radius_for(radius: f64) -> usize {
    (3.0 * (radius * 2f64.sqrt() + 1.0)).ceil() as usize + 1
}

/// The figure for the pair `(h, h')` in `Ã_2`, or just the tiling if no pair
/// is given.
pub fn build_figure(pair: Option<(&Isometry, &Isometry)>, radius: f64) -> Result<Figure> {
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::InvalidInput("radius must be a nonnegative number".into()));
    }
    let (g, datum) = build_affine_a(2)?;
    let base = fundamental_vertices(&datum);
    let fundamental = Alcove::image(&Isometry::identity(2), &base);
    let ball = g.ball(ball_radius_for(radius))?;
    let tiles: Vec<Alcove> = ball
        .elements()
        .iter()
        .map(|w| Alcove::image(w, &base))
        .filter(|a| a.centroid.norm() <= radius)
        .collect();
    let lattice_points = lattice_points_in_ball(&datum.simple_coroots, &Vector::zeros(2), radius)
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    let mut fig = Figure {
        radius,
        tiles,
        fundamental,
        lattice_points,
        h_alcove: None,
        h_prime_alcove: None,
        conjugators: Vec::new(),
        min_conjugator: None,
        etas: Vec::new(),
        eta0: None,
    };
    if let Some((h, hp)) = pair {
        add_pair(&mut fig, &g, &base, h, hp)?;
    }
    Ok(fig)
}

fn add_pair(fig: &mut Figure, g: &SplitGroup, base: &[Vector; 3], h: &Isometry, hp: &Isometry) -> Result<()> {
    let set = conjugacy::coconjugation_set(g, h, hp)?;
    fig.h_alcove = Some(Alcove::image(h, base));
    fig.h_prime_alcove = Some(Alcove::image(hp, base));
    fig.conjugators = conjugators_in_window(&set, base, fig.radius);
    fig.etas = set.cosets.iter().map(|c| c.eta.clone()).collect();
    if let Some(MinConjugatorResult {
        conjugator,
        witnessing_coset_index,
        ..
    }) = conjugacy::min_norm_in_set(&set, g)
    {
        fig.min_conjugator = Some(Alcove::image(&conjugator, base));
        let u = &set.cosets[witnessing_coset_index].u;
        fig.eta0 = Some(conjugacy::continuous_minimizer(
            g,
            u,
            &h.translation,
            &hp.translation,
            &hp.spherical,
        ));
    }
    Ok(())
}

fn conjugators_in_window(set: &CoconjugationSet, base: &[Vector; 3], radius: f64) -> Vec<(usize, Alcove)> {
    let c0 = (&(&base[0] + &base[1]) + &base[2]).scale(1.0 / 3.0);
    let mut out = Vec::new();
    for (i, c) in set.cosets.iter().enumerate() {
        // |η + f + u c0| <= radius forces |η + f| <= radius + |c0|
        let pts = lattice_points_in_ball(&c.fix_lattice.int_basis, &c.eta.scale(-1.0), radius + c0.norm());
        for (coeffs, _) in pts {
            let alcove = Alcove::image(&c.member(&[], &coeffs), base);
            if alcove.centroid.norm() <= radius {
                out.push((i, alcove));
            }
        }
    }
    out
}

fn px(v: &Vector) -> (f64, f64) {
    (v[0] * SCALE, -v[1] * SCALE)
}

fn polygon(out: &mut String, a: &Alcove, fill: &str, stroke: &str, width: f64) {
    let pts: Vec<String> = a
        .vertices
        .iter()
        .map(|v| {
            let (x, y) = px(v);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    let _ = writeln!(
        out,
        r#"  <polygon points="{}" fill="{fill}" stroke="{stroke}" stroke-width="{width}"/>"#,
        pts.join(" ")
    );
}

fn dot(out: &mut String, v: &Vector, r: f64, fill: &str, title: &str) {
    let (x, y) = px(v);
    let _ = writeln!(
        out,
        r#"  <circle cx="{x:.3}" cy="{y:.3}" r="{r}" fill="{fill}" stroke="black" stroke-width="0.5"><title>{title}</title></circle>"#
    );
}

/// SVG 1.1 document for the figure.
pub fn to_svg(fig: &Figure) -> String {
    let half = (fig.radius + MARGIN).max(1.5) * SCALE;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{:.1} {:.1} {:.1} {:.1}" width="{:.0}" height="{:.0}">"#,
        -half,
        -half,
        2.0 * half,
        2.0 * half,
        2.0 * half,
        2.0 * half
    );
    let _ = writeln!(s, r#"  <g id="tiles">"#);
    for a in &fig.tiles {
        polygon(&mut s, a, TILE, "#bbbbbb", 0.5);
    }
    polygon(&mut s, &fig.fundamental, "#dddddd", "#555555", 1.0);
    let _ = writeln!(s, r#"  </g>"#);
    let _ = writeln!(s, r#"  <g id="conjugators">"#);
    for (i, a) in &fig.conjugators {
        polygon(&mut s, a, CONJUGATOR_COLORS[i % CONJUGATOR_COLORS.len()], "#333333", 0.5);
    }
    let _ = writeln!(s, r#"  </g>"#);
    let _ = writeln!(s, r#"  <g id="pair">"#);
    for a in fig.h_alcove.iter().chain(&fig.h_prime_alcove) {
        polygon(&mut s, a, PURPLE, "#333333", 0.5);
    }
    if let Some(a) = &fig.min_conjugator {
        polygon(&mut s, a, "none", "#c0392b", 2.5);
    }
    let _ = writeln!(s, r#"  </g>"#);
    let _ = writeln!(s, r#"  <g id="points">"#);
    for p in &fig.lattice_points {
        dot(&mut s, p, 2.0, "#333333", "coroot lattice point");
    }
    for e in &fig.etas {
        dot(&mut s, e, 4.0, "black", "eta_u");
    }
    if let Some(e) = &fig.eta0 {
        dot(&mut s, e, 5.0, "#f1c40f", "eta_0");
    }
    dot(&mut s, &Vector::zeros(2), 3.0, "white", "origin");
    let _ = writeln!(s, r#"  </g>"#);
    let _ = writeln!(s, "</svg>");
    s
}
