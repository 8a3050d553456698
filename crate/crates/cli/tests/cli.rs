use std::fs;
use std::process::{Command, Output};

use conjlen::app::PinvReport;
use conjlen::render::{build_figure, to_svg};
use conjlen_core::conjugacy::{CoconjugationSet, MinConjugatorResult};
use conjlen_core::coxeter::{build_affine_a, fig1_data};
use conjlen_core::growth::GrowthReport;
use conjlen_core::{Matrix, Vector};

fn conjlen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conjlen")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const PAIR_NOT_CONJUGATE: &str = r#"{
    "h": { "lambda": [0, 0], "spherical": [[0, -1], [1, 0]] },
    "h_prime": { "lambda": [0, 0], "spherical": [[-1, 0], [0, -1]] }
}"#;

#[test]
fn conjugate_check_fig1() {
    let o = conjlen(&["conjugate-check", "--preset", "A~2", "--fig1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "conjugate: yes\n");
}

#[test]
fn conjugate_check_negative_and_min_conjugator_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let pair = dir.path().join("pair.json");
    fs::write(&pair, PAIR_NOT_CONJUGATE).unwrap();
    let p = pair.to_str().unwrap();
    let o = conjlen(&["conjugate-check", "--preset", "p4", "--pair", p]);
    assert_eq!(stdout(&o), "conjugate: no\n");
    let o = conjlen(&["min-conjugator", "--preset", "p4", "--pair", p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn min_conjugator_fig1_round_trips() {
    let o = conjlen(&["min-conjugator", "--preset", "A~2", "--fig1"]);
    assert_eq!(o.status.code(), Some(0));
    let r: MinConjugatorResult = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.conjugator.spherical.approx_eq(&fig1_data().expected_u, 1e-9));
    assert!((r.ctn - 6f64.sqrt()).abs() < 1e-9);
    let again: MinConjugatorResult = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(again, r);
}

#[test]
fn coconj_set_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("set.json");
    let o = conjlen(&["coconj-set", "--preset", "A~2", "--fig1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let set: CoconjugationSet = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(set.cosets.len(), 2);
    let again: CoconjugationSet = serde_json::from_str(&serde_json::to_string(&set).unwrap()).unwrap();
    assert_eq!(again, set);
}

#[test]
fn pinv_identity_and_flat_input() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    fs::write(&m, "[[1, 0, 0], [0, 1, 0], [0, 0, 1]]").unwrap();
    let o = conjlen(&["pinv", "--matrix", m.to_str().unwrap()]);
    let r: PinvReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(Matrix::from_rows(&r.pinv).unwrap().approx_eq(&Matrix::identity(3), 1e-12));
    assert!(r.residuals.iter().all(|&x| x < 1e-9));

    fs::write(&m, "[2, 0, 0, 0]").unwrap();
    let o = conjlen(&["pinv", "--matrix", m.to_str().unwrap()]);
    let r: PinvReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.pinv, vec![vec![0.5, 0.0], vec![0.0, 0.0]]);

    fs::write(&m, "[1, 2, 3]").unwrap();
    assert_eq!(conjlen(&["pinv", "--matrix", m.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn invalid_inputs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    // rotation by 1 radian generates an infinite point group
    let (c, s) = (1f64.cos(), 1f64.sin());
    fs::write(
        &g,
        format!(
            r#"{{"dim": 2, "spherical_generators": [[[{c}, {}], [{s}, {c}]]],
                "lattice": {{"int_basis": [[1, 0], [0, 1]]}}, "generators": []}}"#,
            -s
        ),
    )
    .unwrap();
    let o = conjlen(&["validate", "--group", g.to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));

    // a non-crystallographic quarter turn on a skew lattice
    fs::write(
        &g,
        r#"{"dim": 2, "spherical_generators": [[[0, -1], [1, 0]]],
            "lattice": {"int_basis": [[1, 0], [0.5, 1]]}, "generators": []}"#,
    )
    .unwrap();
    let o = conjlen(&["validate", "--group", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("\"valid\": false"));

    fs::write(&g, "not json").unwrap();
    assert_eq!(conjlen(&["validate", "--group", g.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(conjlen(&["validate", "--preset", "nope"]).status.code(), Some(1));
    assert_eq!(conjlen(&["growth", "--preset", "p1", "--count", "0"]).status.code(), Some(1));
    assert_eq!(conjlen(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(conjlen(&["render-a2", "--preset", "p2"]).status.code(), Some(1));
}

#[test]
fn cap_exceeded_exits_three() {
    let o = conjlen(&["validate", "--preset", "A~8"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn growth_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let csv = dir.path().join(format!("{tag}.csv"));
        let json = dir.path().join(format!("{tag}.json"));
        let o = conjlen(&[
            "growth", "--preset", "A~2", "--n-max", "6", "--count", "20", "--seed", "9", "--max-radius", "10",
            "--csv", csv.to_str().unwrap(), "--json", json.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        (fs::read_to_string(csv).unwrap(), fs::read_to_string(json).unwrap())
    };
    let (csv_a, json_a) = run("a");
    let (csv_b, json_b) = run("b");
    assert_eq!(csv_a, csv_b);
    assert_eq!(json_a, json_b);
    assert!(csv_a.starts_with("n,tnorm_emp,clf_emp,samples_used\n"));
    assert_eq!(csv_a.lines().count(), 8);
    let report: GrowthReport = serde_json::from_str(&json_a).unwrap();
    assert_eq!(report.records.len(), 7);
    assert!(report.records.iter().all(|r| r.clf_emp.is_some()));
    assert!((report.constants.k1 - 1.0 / 3f64.sqrt()).abs() < 1e-9);
    let again: GrowthReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(again, report);
}

fn parse_svg(svg: &str) -> usize {
    let doc = roxmltree::Document::parse(svg).expect("well-formed XML");
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.attribute("version"), Some("1.1"));
    doc.descendants().filter(|n| n.tag_name().name() == "polygon").count()
}

#[test]
fn render_radius_zero_is_one_alcove() {
    let o = conjlen(&["render-a2", "--radius", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(parse_svg(&stdout(&o)), 1);
}

#[test]
fn render_fig1_is_well_formed_and_deterministic() {
    let a = conjlen(&["render-a2", "--preset", "A~2", "--fig1", "--radius", "6"]);
    let b = conjlen(&["render-a2", "--fig1", "--radius", "6"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(parse_svg(&stdout(&a)) > 50);
}

/// Conjugator alcoves of one coset have centroids `η_u + f + u c0` with `f`
/// in `Fix(h0')`, so they line up parallel to `Fix(h0')`; each coset gives
/// its own line.
#[test]
fn fig1_conjugator_alcoves_line_up_per_coset() {
    let d = fig1_data();
    let fig = build_figure(Some((&d.h, &d.h_prime)), 6.0).unwrap();
    let (_, datum) = build_affine_a(2).unwrap();
    let theta = datum.highest_coroot.scale(1.0 / datum.highest_coroot.norm());
    // Fix(h0') = Fix(s_θ) is the line orthogonal to θ
    let dir = Vector(vec![-theta[1], theta[0]]);
    assert!((&d.h_prime.spherical.mul_vec(&dir) - &dir).norm() < 1e-9);
    let mut offsets: Vec<f64> = Vec::new();
    for coset in 0..2 {
        let cents: Vec<&Vector> = fig.conjugators.iter().filter(|(i, _)| *i == coset).map(|(_, a)| &a.centroid).collect();
        assert!(cents.len() >= 3, "coset {coset} has {} alcoves", cents.len());
        let off = cents[0].dot(&theta);
        for c in &cents {
            assert!((c.dot(&theta) - off).abs() < 1e-9);
        }
        offsets.push(off);
    }
    // two distinct parallel lines
    assert!((offsets[0] - offsets[1]).abs() > 0.1);
    assert!(fig.min_conjugator.is_some());
    let eta0 = fig.eta0.clone().unwrap();
    assert!((eta0.norm() - 1.5 * 2f64.sqrt()).abs() < 1e-9);
    assert!(to_svg(&fig).contains("#f1c40f"));
}
