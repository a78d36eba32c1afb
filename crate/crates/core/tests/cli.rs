use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use heisenberg_whitney::counterexample::build;
use heisenberg_whitney::{CompactSet, ComponentJet, Coord, JetFamily, JetTriple, Job, Modulus, Poly};
use serde_json::Value;

fn hwext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hwext")).args(args).output().expect("run hwext")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// The lifted circle as sampled jets on two intervals.
fn circle_job(m: usize) -> Job {
    let intervals = [(0.0, 0.5), (1.0, 1.5)];
    let set = CompactSet::from_intervals(&intervals).unwrap();
    let jet = |c: Coord, x: f64| -> Vec<f64> {
        (0..=m)
            .map(|k| match c {
                Coord::F => [x.cos(), -x.sin(), -x.cos(), x.sin()][k % 4],
                Coord::G => [x.sin(), x.cos(), -x.sin(), -x.cos()][k % 4],
                Coord::H => [-2.0 * x, -2.0, 0.0, 0.0][k.min(3)],
            })
            .collect()
    };
    let fam = |c: Coord| {
        JetFamily::new(
            intervals
                .iter()
                .map(|&(a, b)| {
                    let xs: Vec<f64> =
                        (0..=32).map(|i| if i == 32 { b } else { a + (b - a) * i as f64 / 32.0 }).collect();
                    let values = xs.iter().map(|&x| jet(c, x)).collect();
                    ComponentJet::Samples { xs, values }
                })
                .collect(),
        )
    };
    let triple = JetTriple::new(m, set, fam(Coord::F), fam(Coord::G), fam(Coord::H)).unwrap();
    Job { omega: Modulus::linear(), triple }
}

/// `(x + x³, x³, −x⁴)` on three components; horizontal everywhere.
fn poly_job() -> Job {
    let set = CompactSet::from_intervals(&[(0.0, 0.3), (0.5, 0.5), (0.8, 1.0)]).unwrap();
    let fam = |p: Poly| JetFamily::new((0..3).map(|_| ComponentJet::from_poly(&p, 2)).collect());
    let f = Poly::new(vec![0.0, 1.0, 0.0, 1.0]);
    let g = Poly::new(vec![0.0, 0.0, 0.0, 1.0]);
    let h = Poly::new(vec![0.0, 0.0, 0.0, 0.0, -1.0]);
    let triple = JetTriple::new(2, set, fam(f), fam(g), fam(h)).unwrap();
    Job { omega: Modulus::linear(), triple }
}

#[test]
fn counterexample_table_shows_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = hwext(&[
        "counterexample",
        "--out",
        s(dir.path()),
        "--m",
        "1",
        "--omega",
        "linear",
        "--nmax",
        "12",
        "--alpha",
        "1",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = csv_rows(&dir.path().join("rn.csv"));
    assert_eq!(header, ["n", "gap", "A", "V_omega_alpha", "r_n", "lower_bound"]);
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[0][4], 56.0);
    assert_eq!(rows[10][4] / rows[0][4], 1024.0);
    assert!(rows.iter().all(|r| r[4] >= r[5]));
    let bounds = json(&dir.path().join("bounds.json"));
    assert_eq!(bounds["passed"], true);
    assert!(bounds["whitney_constant"].as_f64().unwrap() <= 4.0);
    assert!(bounds["ratio_sup"].as_f64().unwrap() <= 16.0);
}

#[test]
fn counterexample_accepts_modulus_spellings() {
    let dir = tempfile::tempdir().unwrap();
    for omega in ["power:0.5", "log_lipschitz", r#"{"kind":"power","alpha":0.5}"#] {
        let out = hwext(&[
            "counterexample",
            "--out",
            s(dir.path()),
            "--m",
            "2",
            "--omega",
            omega,
            "--nmax",
            "8",
            "--alpha",
            "0.75",
        ]);
        assert_eq!(code(&out), 0, "{omega}: {}", stderr(&out));
    }
    let out = hwext(&["counterexample", "--out", s(dir.path()), "--omega", "cubic"]);
    assert_eq!(code(&out), 2);
    let out = hwext(&["counterexample", "--out", s(dir.path()), "--nmax", "60"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).starts_with("error: kind=domain detail="), "{}", stderr(&out));
}

#[test]
fn certify_dyadic_job() {
    let dir = tempfile::tempdir().unwrap();
    let job = dir.path().join("dyadic.json");
    build(1, &Modulus::linear(), 10).unwrap().job().save(&job).unwrap();
    let out_dir = dir.path().join("out");
    let out = hwext(&["certify", "--job", s(&job), "--out", s(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = json(&out_dir.join("cert_report.json"));
    assert_eq!(report["verdict"]["condition_1"], true);
    assert_eq!(report["verdict"]["condition_2"], true);
    assert!(report["whitney_constants"]["H"].as_f64().unwrap() <= 4.0);
    assert!(report["ratio_sup_one_scaled"].as_f64().unwrap() <= 16.0 * (1.0 + 1e-9));
    let (header, rows) = csv_rows_text(&out_dir.join("worst_pairs.csv"));
    assert_eq!(header, ["statistic", "a", "b", "value"]);
    assert!(!rows.is_empty());
}

fn csv_rows_text(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn certify_is_deterministic_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let job = dir.path().join("circle.json");
    circle_job(2).save(&job).unwrap();
    let run = |name: &str, seed: &str| {
        let out_dir = dir.path().join(name);
        let out = hwext(&["certify", "--job", s(&job), "--out", s(&out_dir), "--pairs", "500", "--seed", seed]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        fs::read_to_string(out_dir.join("cert_report.json")).unwrap()
    };
    assert_eq!(run("a", "7"), run("b", "7"));
}

#[test]
fn extend_single_component_dumps_the_jets() {
    let dir = tempfile::tempdir().unwrap();
    let job = dir.path().join("single.json");
    let p = Poly::new(vec![0.1, 0.0, 0.5]);
    let set = CompactSet::from_intervals(&[(0.0, 1.0)]).unwrap();
    let fam = |p: &Poly| JetFamily::new(vec![ComponentJet::from_poly(p, 1)]);
    let triple = JetTriple::new(1, set, fam(&p), fam(&Poly::zero()), fam(&Poly::new(vec![0.0, 0.0, -0.0]))).unwrap();
    // g ≡ 0 and f′ arbitrary: h′ = 2(f′g − fg′) = 0, so a constant height is horizontal.
    Job { omega: Modulus::linear(), triple }.save(&job).unwrap();
    let out_dir = dir.path().join("out");
    let out = hwext(&["extend", "--job", s(&job), "--out", s(&out_dir), "--samples", "11"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = csv_rows(&out_dir.join("curve.csv"));
    assert_eq!(header, ["x", "F", "G", "H", "D1F", "D1G", "D1H"]);
    assert_eq!(rows.len(), 11);
    for r in rows {
        assert_eq!(r[1], p.eval(r[0]));
        assert_eq!(r[4], p.derivative().eval(r[0]));
        assert_eq!((r[2], r[3]), (0.0, 0.0));
    }
    let v = json(&out_dir.join("verification.json"));
    assert_eq!(v["passed"], true);
    assert_eq!(json(&out_dir.join("gaps.json")), Value::Array(vec![]));
}

#[test]
fn extend_round_trip_recertifies() {
    let dir = tempfile::tempdir().unwrap();
    let job_path = dir.path().join("poly.json");
    let job = poly_job();
    job.save(&job_path).unwrap();
    let cert_dir = dir.path().join("cert");
    let out = hwext(&["certify", "--job", s(&job_path), "--out", s(&cert_dir)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let before = json(&cert_dir.join("cert_report.json"));

    let ext_dir = dir.path().join("ext");
    let out = hwext(&["extend", "--job", s(&job_path), "--out", s(&ext_dir), "--samples", "201"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&ext_dir.join("verification.json"));
    assert!(v["horizontality_max_residual"].as_f64().unwrap() <= 1e-8);
    assert_eq!(json(&ext_dir.join("gaps.json")).as_array().unwrap().len(), 2);

    // Re-sample the dumped curve on K and certify again.
    let (_, rows) = csv_rows(&ext_dir.join("curve.csv"));
    let set = job.triple.set().clone();
    let fam = |c: usize| {
        JetFamily::new(
            set.components()
                .iter()
                .map(|comp| {
                    let on: Vec<&Vec<f64>> = rows.iter().filter(|r| comp.contains(r[0])).collect();
                    if comp.is_point() {
                        return ComponentJet::Point(vec![
                            r_at(&rows, comp.a, c, 0),
                            r_at(&rows, comp.a, c, 1),
                            r_at(&rows, comp.a, c, 2),
                        ]);
                    }
                    ComponentJet::Samples {
                        xs: on.iter().map(|r| r[0]).collect(),
                        values: on.iter().map(|r| (0..3).map(|k| r[1 + 3 * k + c]).collect()).collect(),
                    }
                })
                .collect(),
        )
    };
    let triple = JetTriple::new(2, set.clone(), fam(0), fam(1), fam(2)).unwrap();
    let resampled = dir.path().join("resampled.json");
    Job { omega: Modulus::linear(), triple }.save(&resampled).unwrap();
    let again_dir = dir.path().join("again");
    let out = hwext(&["certify", "--job", s(&resampled), "--out", s(&again_dir)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let after = json(&again_dir.join("cert_report.json"));
    assert!(after["horizontality_max_residual"].as_f64().unwrap() <= 1e-8);
    for c in ["F", "G", "H"] {
        let (x, y) =
            (before["whitney_constants"][c].as_f64().unwrap(), after["whitney_constants"][c].as_f64().unwrap());
        assert!(y <= 2.0 * x && x <= 2.0 * y, "{c}: {x} vs {y}");
    }
}

/// Order-`k` value of coordinate `c` in the dumped row at `x`.
fn r_at(rows: &[Vec<f64>], x: f64, c: usize, k: usize) -> f64 {
    let r = rows.iter().find(|r| r[0] == x).expect("row at x");
    r[1 + 3 * k + c]
}

#[test]
fn sweep_writes_pair_table() {
    let dir = tempfile::tempdir().unwrap();
    let job = dir.path().join("circle.json");
    circle_job(1).save(&job).unwrap();
    let out = hwext(&["sweep", "--job", s(&job), "--out", s(dir.path()), "--pairs", "300"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = csv_rows(&dir.path().join("pairs.csv"));
    assert_eq!(header, ["a", "b", "A", "V_omega", "V_one", "ratio_omega", "ratio_one_scaled"]);
    assert_eq!(rows.len(), 300);
    for r in &rows {
        let (a, b, area, v_omega, v_one) = (r[0], r[1], r[2], r[3], r[4]);
        assert!(a < b && v_omega > 0.0 && v_one > 0.0);
        assert!((r[5] - area.abs() / v_omega).abs() <= 1e-12 * r[5].max(1.0), "{r:?}");
        assert!((r[6] - area.abs() / (v_one * (b - a))).abs() <= 1e-12 * r[6].max(1.0), "{r:?}");
    }
}

#[test]
fn failures_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");

    let out = hwext(&["certify", "--job", s(&dir.path().join("missing.json")), "--out", s(&out_dir)]);
    assert_eq!(code(&out), 6);
    assert!(stderr(&out).starts_with("error: kind=io detail="));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"m": 1, "omega": {"kind": "linear"}, "K": [{"a": 0, "b": 1}], "jets": {"F": [], "G": [], "H": []}, "extra": 1}"#)
        .unwrap();
    let out = hwext(&["certify", "--job", s(&bad), "--out", s(&out_dir)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).starts_with("error: kind=schema detail="));
    assert_eq!(stderr(&out).lines().count(), 1);

    // F = x, G = 0, H = 0 on two points: H′ ≠ 2(F′G − G′F) fails nowhere, but
    // a nonzero H′ does.
    let set = CompactSet::from_intervals(&[(0.0, 0.0), (1.0, 1.0)]).unwrap();
    let pt = |v: Vec<f64>| ComponentJet::Point(v);
    let triple = JetTriple::new(
        1,
        set,
        JetFamily::new(vec![pt(vec![0.0, 1.0]), pt(vec![1.0, 1.0])]),
        JetFamily::new(vec![pt(vec![0.0, 0.0]), pt(vec![0.0, 0.0])]),
        JetFamily::new(vec![pt(vec![0.0, 1.0]), pt(vec![0.0, 0.0])]),
    )
    .unwrap();
    let refused = dir.path().join("refused.json");
    Job { omega: Modulus::linear(), triple }.save(&refused).unwrap();
    let out = hwext(&["certify", "--job", s(&refused), "--out", s(&out_dir)]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("kind=certification"));
    assert!(out_dir.join("cert_report.json").exists());
    let out = hwext(&["extend", "--job", s(&refused), "--out", s(&out_dir)]);
    assert_eq!(code(&out), 3);
}
