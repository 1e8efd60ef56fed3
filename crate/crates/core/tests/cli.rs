//! End-to-end runs of the command-line binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kissme-stream"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.display().to_string()
}

fn summary_value(dir: &Path, key: &str) -> String {
    let text = fs::read_to_string(dir.join("summary.txt")).unwrap();
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing from summary"))
        .to_string()
}

#[test]
fn paired_run_writes_series_summary_and_plots() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = run(&[
        "--stream",
        "sea",
        "--instances",
        "1050",
        "--seed",
        "3",
        "--stride",
        "100",
        "--k",
        "5",
        "--max-base",
        "50",
        "--plot",
        "--out",
        &out_arg(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("series.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "index,loss_a,loss_b,acc_a,acc_b,err_a,err_b,q,mcnemar,reject,drift_a,drift_b"
    );
    // ceil(1050 / 100) rows plus the header
    assert_eq!(lines.len(), 11 + 1);
    assert!(lines[1].starts_with("100,"));
    let last: Vec<&str> = lines.last().unwrap().split(',').collect();
    assert_eq!(last[0], "1050");
    assert_eq!(last.len(), 12);
    assert_eq!(summary_value(&out, "final_acc_a"), last[3]);
    assert_eq!(summary_value(&out, "final_acc_b"), last[4]);
    assert_eq!(summary_value(&out, "final_q"), last[7]);
    assert_eq!(summary_value(&out, "instances"), "1050");
    assert_eq!(summary_value(&out, "config.k"), "5");
    for field in &last[1..10] {
        if !field.is_empty() {
            let decimals = field.split('.').nth(1).map_or(0, str::len);
            assert!(decimals == 6 || *field == "0" || *field == "1", "{field}");
        }
    }
    assert!(out.join("accuracy.svg").exists());
    assert!(out.join("qstat.svg").exists());
}

#[test]
fn single_classifier_run_omits_comparison_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&[
        "--stream",
        "hyperplane",
        "--instances",
        "300",
        "--baseline",
        "none",
        "--max-base",
        "40",
        "--plot",
        "--out",
        &out_arg(tmp.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(tmp.path().join("series.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "index,loss_a,acc_a,err_a,drift_a");
    assert_eq!(csv.lines().count(), 3 + 1);
    assert!(tmp.path().join("accuracy.svg").exists());
    assert!(!tmp.path().join("qstat.svg").exists());
    let summary = fs::read_to_string(tmp.path().join("summary.txt")).unwrap();
    assert!(!summary.contains("final_q"));
}

#[test]
fn hundred_rows_give_hundred_point_polylines() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&[
        "--stream",
        "gaussian",
        "--instances",
        "100",
        "--full-resolution",
        "--max-base",
        "10",
        "--plot",
        "--out",
        &out_arg(tmp.path()),
    ]);
    assert!(o.status.success());
    assert_eq!(
        fs::read_to_string(tmp.path().join("series.csv"))
            .unwrap()
            .lines()
            .count(),
        101
    );
    let svg = fs::read_to_string(tmp.path().join("accuracy.svg")).unwrap();
    let polylines: Vec<usize> = svg
        .lines()
        .filter_map(|l| l.split("points=\"").nth(1))
        .map(|p| p.trim_end_matches("\"/>").split(' ').count())
        .collect();
    assert_eq!(polylines, vec![100, 100]);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let args = |dir: &Path| {
        vec![
            "--stream".to_string(),
            "rbf".into(),
            "--instances".into(),
            "2000".into(),
            "--seed".into(),
            "11".into(),
            "--max-base".into(),
            "100".into(),
            "--stride".into(),
            "10".into(),
            "--out".into(),
            out_arg(dir),
        ]
    };
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let args = args(dir);
        let o = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(o.status.success());
    }
    // threaded lockstep gives the same ordering
    let c = tmp.path().join("c");
    let mut threaded = args(&c);
    threaded.push("--parallel".into());
    assert!(run(&threaded.iter().map(String::as_str).collect::<Vec<_>>())
        .status
        .success());
    let series = fs::read(a.join("series.csv")).unwrap();
    assert_eq!(series, fs::read(b.join("series.csv")).unwrap());
    assert_eq!(series, fs::read(c.join("series.csv")).unwrap());
}

#[test]
fn config_file_with_flag_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("exp.conf");
    let out = tmp.path().join("out");
    fs::write(
        &config,
        format!(
            "# small SEA run\nstream=sea\ninstances=500\nk=3\nmax_base=30\nout={}\nalpha=0.95\n",
            out.display()
        ),
    )
    .unwrap();
    let o = run(&[
        "--config",
        &config.display().to_string(),
        "--k",
        "4",
        "--voting",
        "majority",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(summary_value(&out, "config.k"), "4");
    assert_eq!(summary_value(&out, "config.max_base"), "30");
    assert_eq!(summary_value(&out, "config.alpha"), "0.95");
    assert_eq!(summary_value(&out, "config.voting"), "majority");
}

#[test]
fn csv_stream_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data.csv");
    let schema = tmp.path().join("data.schema");
    let mut rows = String::from("duration,protocol,bytes,label\n");
    for i in 0..200 {
        let proto = ["tcp", "udp", "icmp"][i % 3];
        let label = if i % 4 == 0 { "smurf." } else { "normal." };
        rows.push_str(&format!("{},{proto},{},{label}\n", i % 7, (i * 37) % 101));
    }
    fs::write(&data, rows).unwrap();
    fs::write(
        &schema,
        "duration=numeric\nprotocol=nominal:tcp|udp|icmp\nbytes=numeric\nlabel=binary:normal.\n",
    )
    .unwrap();
    let out = tmp.path().join("out");
    let o = run(&[
        "--stream",
        &format!("csv:{}", data.display()),
        "--schema",
        &schema.display().to_string(),
        "--instances",
        "all",
        "--max-base",
        "20",
        "--stride",
        "50",
        "--out",
        &out_arg(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(summary_value(&out, "instances"), "200");
    assert_eq!(fs::read_to_string(out.join("series.csv")).unwrap().lines().count(), 5);

    // a budget beyond the file is an error and leaves nothing behind
    let short = tmp.path().join("short");
    let o = run(&[
        "--stream",
        &format!("csv:{}", data.display()),
        "--schema",
        &schema.display().to_string(),
        "--instances",
        "201",
        "--out",
        &out_arg(&short),
    ]);
    assert!(!o.status.success());
    assert!(!short.join("series.csv").exists());
}

#[test]
fn failures_exit_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [
        vec!["--stream", "nonsense"],
        vec!["--stream", "sea", "--alpha", "1.5"],
        vec!["--stream", "sea", "--k", "0"],
        vec!["--stream", "csv:missing.csv"],
        vec!["--stream", "csv:missing.csv", "--schema", "missing.schema"],
        vec!["--stream", "sea", "--baseline", "other"],
        vec!["--config", "no-such-file.conf"],
    ] {
        let out = tmp.path().join("x");
        let mut full = args.clone();
        let out_s = out_arg(&out);
        full.extend(["--instances", "50", "--out", &out_s]);
        let o = run(&full);
        assert!(!o.status.success(), "{args:?}");
        assert!(!out.join("series.csv").exists(), "{args:?}");
        assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
    }
}

#[test]
fn write_failure_removes_partial_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    // a directory where summary.txt should go makes the second write fail
    fs::create_dir_all(tmp.path().join("summary.txt")).unwrap();
    let o = run(&["--stream", "sea", "--instances", "100", "--out", &out_arg(tmp.path())]);
    assert!(!o.status.success());
    assert!(!tmp.path().join("series.csv").exists());
}
