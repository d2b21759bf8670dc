use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use qdeform::qcore::{q_log, EntropicIndex};

fn qdeform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdeform"))
        .args(args)
        .env_remove("QDEFORM_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn parse_rows(csv_text: &str) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    assert_eq!(
        r.headers().unwrap(),
        vec![
            "curve_id",
            "scale",
            "x_raw",
            "y_raw",
            "x_rescaled",
            "y_rescaled",
            "qlog_y"
        ]
    );
    r.records().map(|r| r.unwrap()).collect()
}

fn num(r: &csv::StringRecord, i: usize) -> f64 {
    r[i].parse().unwrap()
}

#[test]
fn fig_csv_round_trips_qlog_column() {
    for (fig, qv) in [("fig2", 1.3), ("fig3", 1.7)] {
        let o = qdeform(&["fig", fig]);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        assert!(!text.contains('\r'));
        let rows = parse_rows(&text);
        assert_eq!(rows.len(), 3 * 501);
        let q = EntropicIndex::new(qv).unwrap();
        for r in &rows {
            let (scale, y_rescaled, qlog_y) = (num(r, 1), num(r, 5), num(r, 6));
            // ln_q(c·ỹ) = ln_q c + c^(1-q) ln_q ỹ.
            let recomputed =
                q_log(q, scale).unwrap() + scale.powf(1.0 - qv) * q_log(q, y_rescaled).unwrap();
            assert!(
                (recomputed - qlog_y).abs() <= 1e-12 * qlog_y.abs().max(1.0),
                "{fig}: {recomputed} vs {qlog_y}"
            );
        }
    }
}

#[test]
fn fig_curve_ids_and_overrides() {
    let rows = parse_rows(&stdout(&qdeform(&["fig", "fig2"])));
    assert_eq!(&rows[0][0], "C=1");
    assert_eq!(&rows[501][0], "C=10");
    assert_eq!(&rows[1002][0], "C=20");

    let rows = parse_rows(&stdout(&qdeform(&["fig", "fig3", "--grid-points", "11"])));
    assert_eq!(rows.len(), 33);
    assert_eq!(&rows[32][0], "c=100");

    // Classical case: the x unit is 1 for every scale.
    let rows = parse_rows(&stdout(&qdeform(&["fig", "fig2", "--q", "1"])));
    assert!(rows.iter().all(|r| r[2] == r[4]));

    let rows = parse_rows(&stdout(&qdeform(&[
        "fig",
        "fig2",
        "--scales",
        "2,5",
        "--grid-min",
        "-0.5",
        "--grid-max",
        "1",
        "--grid-points",
        "4",
    ])));
    assert_eq!(rows.len(), 8);
    assert_eq!(num(&rows[0], 4), -0.5);
}

#[test]
fn fig_domain_violation_exits_one() {
    // q < 1 decay reaches zero at x̃ = 1/(1-q) = 2.
    let o = qdeform(&["fig", "fig2", "--q", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("domain violation"));
}

#[test]
fn fig_json_is_deterministic() {
    let a = qdeform(&["fig", "fig3", "--format", "json"]);
    let b = qdeform(&["fig", "fig3", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["figure"], "fig3");
    assert_eq!(v["scales"], serde_json::json!([1.0, 10.0, 100.0]));
}

#[test]
fn verify_report_shape_and_out_file() {
    let path = scratch("identities.json");
    let o = qdeform(&[
        "verify",
        "identities",
        "--seed",
        "42",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["suite"], "identities");
    assert_eq!(v["seed"], 42);
    assert_eq!(v["pass"], true);
    for case in v["cases"].as_array().unwrap() {
        assert!(case["max_rel_err"].as_f64().unwrap() < 1e-12);
        assert_eq!(case["pass"], true);
        let name = case["name"].as_str().unwrap();
        assert_eq!(v["tolerances"][name], 1e-12);
    }
}

#[test]
fn verify_seed_from_environment() {
    let flag = qdeform(&["verify", "canonical", "--seed", "7"]);
    let env = Command::new(env!("CARGO_BIN_EXE_qdeform"))
        .args(["verify", "canonical"])
        .env("QDEFORM_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(flag.stdout, env.stdout);
    let other = qdeform(&["verify", "canonical", "--seed", "8"]);
    assert_ne!(flag.stdout, other.stdout);

    let bad = Command::new(env!("CARGO_BIN_EXE_qdeform"))
        .args(["verify", "canonical"])
        .env("QDEFORM_SEED", "seven")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn verify_csv_and_bad_suite() {
    let o = qdeform(&["verify", "stirling", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("suite,seed,name,samples,max_rel_err,tolerance,pass\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));

    let o = qdeform(&["verify", "bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn eval_exit_codes() {
    let o = qdeform(&["eval", "qexp", "--q", "0.5", "--x", "6"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "16\n"));
    let o = qdeform(&["eval", "qexp", "--q", "1.3", "--x", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("constraint value"));
    let o = qdeform(&["eval", "qlog", "--q", "1", "--y", "-1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = qdeform(&["eval", "qratio", "--q", "2", "--x", "6", "--y", "2"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn canonicalize_hand_example() {
    let input = scratch("two.txt");
    fs::write(&input, "# data\n0\n\n1\n").unwrap();
    let o = qdeform(&[
        "canonicalize",
        input.to_str().unwrap(),
        "--q",
        "2",
        "--c",
        "0",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["slope"], -1.5);
    assert_eq!(v["intercept"], -0.5);
    assert_eq!(v["n"], 1.5);
    assert_eq!(v["c"], 0.0);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows[0]["line"], 2);
    assert_eq!(rows[1]["line"], 4);
    assert!((rows[0]["p"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-15);
    assert!((rows[1]["p"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn canonicalize_single_value_and_classical() {
    let one = scratch("one.txt");
    fs::write(&one, "3.5\n").unwrap();
    let o = qdeform(&[
        "canonicalize",
        one.to_str().unwrap(),
        "--q",
        "1.5",
        "--c",
        "0.2",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"][0]["p"], 1.0);
    let lnq_p = v["rows"][0]["lnq_p"].as_f64().unwrap();
    assert!(lnq_p.abs() < 1e-15);

    let data = scratch("table.csv");
    fs::write(&data, "id,x\na,0.3\nb,-1.2\nc,0.9\n").unwrap();
    let run = |c: &str| {
        let o = qdeform(&[
            "canonicalize",
            data.to_str().unwrap(),
            "--q",
            "1",
            "--c",
            c,
            "--column",
            "1",
            "--header",
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap()
    };
    let (a, b) = (run("0"), run("4"));
    assert_eq!(a["slope"], -1.0);
    for i in 0..3 {
        let (pa, pb) = (
            a["rows"][i]["p"].as_f64().unwrap(),
            b["rows"][i]["p"].as_f64().unwrap(),
        );
        assert!((pa - pb).abs() < 1e-15);
    }
}

#[test]
fn canonicalize_reports_line_numbers() {
    let bad = scratch("bad.txt");
    fs::write(&bad, "0\n# skip\nabc\n").unwrap();
    let o = qdeform(&[
        "canonicalize",
        bad.to_str().unwrap(),
        "--q",
        "2",
        "--c",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    // q = 2 needs 1 + x - c > 0; -2 on line 2 violates it.
    let dom = scratch("domain.txt");
    fs::write(&dom, "0\n-2\n").unwrap();
    let o = qdeform(&[
        "canonicalize",
        dom.to_str().unwrap(),
        "--q",
        "2",
        "--c",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let o = qdeform(&["canonicalize", "/nonexistent/file", "--q", "2", "--c", "0"]);
    assert_eq!(o.status.code(), Some(1));
}
