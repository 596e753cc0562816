use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use signed_geomean_cli::{deterministic_columns, RunConfig};

fn sgm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "exit {:?}: {}",
        o.status.code(),
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows as maps from column name to value.
fn rows(csv: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let head: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .map(|l| {
            head.iter()
                .map(|h| h.to_string())
                .zip(l.split(',').map(str::to_string))
                .collect()
        })
        .collect()
}

#[test]
fn region_fraction_is_one_under_both_conditions() {
    let out = stdout(&sgm(&[
        "sbm-region",
        "--k",
        "2,3,4,5",
        "--steps",
        "10",
        "--conditioning",
        "e_plus_and_minus",
        "--target",
        "e_g",
    ]));
    let rows = rows(&out);
    assert_eq!(rows.len(), 4);
    for r in rows {
        assert_eq!(r["fraction"], "1.0");
        assert_ne!(r["denominator_count"], "0");
    }
}

/// Straight count over the 16 grid points, independent of the library.
#[test]
fn two_step_region_matches_hand_count() {
    let k = 3.0;
    let pts = [0.25, 0.75];
    let (mut all, mut g, mut bv) = (0, 0, 0);
    for &a in &pts {
        for &b in &pts {
            for &c in &pts {
                for &d in &pts {
                    let (pip, pop, pim, pom) = (a, b, c, d);
                    all += 1;
                    let eg = (k * pop / (pip + (k - 1.0) * pop))
                        * (1.0 + (pim - pom) / (pim + (k - 1.0) * pom))
                        < 1.0;
                    g += eg as usize;
                    let bal = pim + pop < pip + pom;
                    let vol = pim + (k - 1.0) * pom < pip + (k - 1.0) * pop;
                    bv += (bal && vol) as usize;
                }
            }
        }
    }
    let out = stdout(&sgm(&[
        "sbm-region",
        "--k",
        "3",
        "--steps",
        "2",
        "--conditioning",
        "all",
    ]));
    let rows = rows(&out);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["target"], "e_g");
    assert_eq!(
        rows[0]["fraction"].parse::<f64>().unwrap(),
        g as f64 / all as f64
    );
    assert_eq!(
        rows[1]["fraction"].parse::<f64>().unwrap(),
        bv as f64 / all as f64
    );
    assert_eq!(rows[0]["denominator_count"], "16");
}

#[test]
fn one_step_grid_is_a_usage_error() {
    let o = sgm(&["sbm-region", "--steps", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("steps"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(sgm(&["bench", "--bogus"]).status.code(), Some(2));
}

#[test]
fn perfectly_balanced_sbm_has_zero_error() {
    let out = stdout(&sgm(&[
        "sbm-cluster",
        "--k",
        "3",
        "--cluster-size",
        "20",
        "--p-plus-in",
        "1",
        "--p-plus-out",
        "0",
        "--p-minus-in",
        "0",
        "--p-minus-out",
        "1",
        "--methods",
        "GM",
        "--runs",
        "5",
    ]));
    let rows = rows(&out);
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert_eq!(r["error"].parse::<f64>().unwrap(), 0.0, "{r:?}");
        assert_eq!(r["status"], "ok");
    }
    assert_eq!(rows[5]["kind"], "median");
}

#[test]
fn two_cliques_from_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    let mut edges = String::from("# two positive cliques joined by negative edges\n");
    for i in 0..16 {
        for j in (i + 1)..16 {
            let w = if i / 8 == j / 8 { 1.0 } else { -1.0 };
            edges.push_str(&format!("{i} {j} {w}\n"));
        }
    }
    let e = dir.path().join("g.txt");
    let t = dir.path().join("truth.txt");
    fs::write(&e, edges).unwrap();
    fs::write(
        &t,
        (0..16).map(|i| format!("{}\n", i / 8)).collect::<String>(),
    )
    .unwrap();
    let out = dir.path().join("m.csv");
    for method in ["SN", "BN", "AM", "GM"] {
        stdout(&sgm(&[
            "cluster",
            "--edges",
            e.to_str().unwrap(),
            "--truth",
            t.to_str().unwrap(),
            "--k",
            "2",
            "--method",
            method,
            "--out",
            out.to_str().unwrap(),
        ]));
        let csv = fs::read_to_string(&out).unwrap();
        let err = rows(&csv)
            .into_iter()
            .find(|r| r["metric"] == "error")
            .unwrap();
        assert_eq!(err["value"], "0.0", "{method}");
        let labels: serde_json::Value = serde_json::from_str(
            &fs::read_to_string(dir.path().join("m.csv.labels.json")).unwrap(),
        )
        .unwrap();
        let l = labels["labels"].as_array().unwrap();
        assert_eq!(l.len(), 16);
        assert_eq!(labels["sizes"], serde_json::json!([8, 8]));
    }
}

fn write_blobs(path: &Path, truth: &Path) {
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let (mut pts, mut labels) = (String::new(), String::new());
    for (c, centre) in [[0.0, 0.0], [6.0, 0.0], [3.0, 5.0]].iter().enumerate() {
        for _ in 0..50 {
            let x = centre[0] + noise.sample(&mut rng);
            let y = centre[1] + noise.sample(&mut rng);
            pts.push_str(&format!("{x},{y}\n"));
            labels.push_str(&format!("{c}\n"));
        }
    }
    fs::write(path, pts).unwrap();
    fs::write(truth, labels).unwrap();
}

#[test]
fn three_blobs_from_points() {
    let dir = tempfile::tempdir().unwrap();
    let (p, t) = (dir.path().join("pts.csv"), dir.path().join("truth.txt"));
    write_blobs(&p, &t);
    let out = stdout(&sgm(&[
        "cluster",
        "--points",
        p.to_str().unwrap(),
        "--truth",
        t.to_str().unwrap(),
        "--k-plus",
        "10",
        "--k-minus",
        "10",
        "--k",
        "3",
    ]));
    let err: f64 = rows(&out)
        .into_iter()
        .find(|r| r["metric"] == "error")
        .unwrap()["value"]
        .parse()
        .unwrap();
    assert!(err <= 0.1, "error {err}");
    let labels = out.lines().find(|l| l.starts_with("# labels: ")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&labels["# labels: ".len()..]).unwrap();
    assert_eq!(v["labels"].as_array().unwrap().len(), 150);
}

#[test]
fn missing_input_file_exits_with_two() {
    let o = sgm(&["cluster", "--edges", "/definitely/not/here.txt", "--k", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/definitely/not/here.txt"));
}

#[test]
fn parse_error_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let e = dir.path().join("bad.txt");
    fs::write(&e, "0 1 1\n1 x 2\n").unwrap();
    let o = sgm(&["cluster", "--edges", e.to_str().unwrap(), "--k", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn too_many_clusters_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let e = dir.path().join("g.txt");
    fs::write(&e, "0 1 1\n1 2 -1\n").unwrap();
    let o = sgm(&["cluster", "--edges", e.to_str().unwrap(), "--k", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_rows_and_repetitions() {
    let out = stdout(&sgm(&[
        "bench",
        "--n",
        "1000",
        "--methods",
        "SN,GM",
        "--repetitions",
        "1",
    ]));
    let rows = rows(&out);
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(r["n"], "1000");
        assert_eq!(r["status"], "ok");
        assert!(r["median_seconds"].parse::<f64>().unwrap() > 0.0);
    }
    let single = stdout(&sgm(&[
        "bench",
        "--n",
        "200",
        "--methods",
        "SN",
        "--repetitions",
        "1",
    ]));
    assert_eq!(self::rows(&single).len(), 1);
    let o = sgm(&["bench", "--n", "2000,1000"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rerun_reproduces_numeric_columns() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    stdout(&sgm(&[
        "sbm-cluster",
        "--cluster-size",
        "30",
        "--runs",
        "3",
        "--seed",
        "7",
        "--out",
        first.to_str().unwrap(),
    ]));
    stdout(&sgm(&[
        "rerun",
        first.to_str().unwrap(),
        "--threads",
        "1",
        "--out",
        second.to_str().unwrap(),
    ]));
    let (a, b) = (
        fs::read_to_string(&first).unwrap(),
        fs::read_to_string(&second).unwrap(),
    );
    let ca = RunConfig::from_header(&a).unwrap();
    let cb = RunConfig::from_header(&b).unwrap();
    assert_eq!(ca.task, cb.task);
    assert_eq!(ca.common.seed, 7);
    assert_eq!(deterministic_columns(&a), deterministic_columns(&b));
    assert!(deterministic_columns(&a)[0].iter().all(|c| c != "seconds"));
}

#[test]
fn header_without_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("plain.csv");
    fs::write(&f, "a,b\n1,2\n").unwrap();
    assert_eq!(sgm(&["rerun", f.to_str().unwrap()]).status.code(), Some(2));
}
