use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use deblur_cli::experiment::{ExperimentReport, ExperimentSpec};
use deblur_core::{circulant_spectrum_oracle, make_kernel_5bin};

fn deblur(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deblur"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn specs_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/specs"))
}

#[test]
fn blur_then_deblur_restores_delta() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    let o = deblur(&[
        "blur",
        "--kernel",
        "5bin",
        "--n",
        "12",
        "--image",
        "delta:5",
        "--out",
        g.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{o:?}");
    let o = deblur(&[
        "deblur",
        "--kernel",
        "5bin",
        "--method",
        "rl",
        "--image",
        &format!("@{}", g.display()),
    ]);
    assert!(o.status.success(), "{o:?}");
    let f: Vec<f64> = serde_json::from_str(&stdout(&o)).unwrap();
    for (i, v) in f.iter().enumerate() {
        let want = if i == 5 { 1.0 } else { 0.0 };
        assert!((v - want).abs() < 1e-3, "pixel {i}: {v}");
    }
}

#[test]
fn csv_images_roundtrip_through_the_tool() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.csv");
    let f = dir.path().join("f.csv");
    assert!(deblur(&[
        "blur",
        "--n",
        "12",
        "--image",
        "ramp:5:4",
        "--out",
        g.to_str().unwrap()
    ])
    .status
    .success());
    let text = fs::read_to_string(&g).unwrap();
    assert!(text.starts_with("i,value\n0,0\n"));
    let o = deblur(&[
        "deblur",
        "--method",
        "tsvd",
        "--m",
        "9",
        "--image",
        &format!("@{}", g.display()),
        "--out",
        f.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{o:?}");
    let values: Vec<f64> = fs::read_to_string(&f)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 12);
    for (i, v) in values.iter().enumerate() {
        let want = if (5..9).contains(&i) { 1.0 } else { 0.0 };
        assert!((v - want).abs() < 5e-4);
    }
}

#[test]
fn deblur_method_flags() {
    let base = ["deblur", "--n", "12", "--image", "bgdelta:0.75:5:0.25"];
    let run = |extra: &[&str]| deblur(&[&base[..], extra].concat());
    assert!(
        run(&["--method", "rl-reg", "--lambda", "1e-4", "--iters", "100"])
            .status
            .success()
    );
    assert!(run(&[
        "--method",
        "lw",
        "--beta",
        "1.5",
        "--epsilon",
        "1e-3",
        "--iters",
        "50"
    ])
    .status
    .success());
    assert!(
        run(&["--method", "rl", "--init", "blurred", "--tol", "1e-8"])
            .status
            .success()
    );
    assert_eq!(run(&["--method", "rl-reg"]).status.code(), Some(2));
    assert_eq!(run(&["--method", "rl", "--m", "3"]).status.code(), Some(2));
    assert_eq!(
        run(&["--method", "tsvd", "--m", "10"]).status.code(),
        Some(3)
    );
    assert_eq!(
        run(&["--method", "lw", "--beta", "5"]).status.code(),
        Some(2)
    );
}

#[test]
fn svd_spectrum_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("spectrum.csv");
    let vecs = dir.path().join("vectors.csv");
    let o = deblur(&[
        "svd",
        "--kernel",
        "5bin",
        "--n",
        "12",
        "--out",
        out.to_str().unwrap(),
        "--vectors",
        vecs.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{o:?}");
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,sigma"));
    let sigma: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(sigma.len(), 12);
    let mut oracle: Vec<f64> = circulant_spectrum_oracle(&make_kernel_5bin(), 12)
        .unwrap()
        .into_iter()
        .map(f64::abs)
        .collect();
    oracle.sort_by(|a, b| b.total_cmp(a));
    for (s, o) in sigma.iter().zip(&oracle) {
        // 9 significant digits in the file
        assert!((s - o).abs() < 1e-10_f64.max(1e-8 * o), "{s} vs {o}");
    }
    assert_eq!(fs::read_to_string(&vecs).unwrap().lines().count(), 1 + 144);
}

#[test]
fn run_bundled_spec_and_reparse_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = specs_dir().join("table1_rl.json");
    let o = deblur(&[
        "run",
        spec.to_str().unwrap(),
        "--base-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{o:?}");
    let report: ExperimentReport = serde_json::from_str(
        &fs::read_to_string(dir.path().join("out/table1_rl_report.json")).unwrap(),
    )
    .unwrap();
    assert!(report.converged);
    assert!(report.quality.linf_error < 1e-3);
    let restored = fs::read_to_string(dir.path().join("out/table1_rl_restored.csv")).unwrap();
    assert!(restored.starts_with("i,F,g,f\n"));

    let first = fs::read(dir.path().join("out/table1_rl_coefficients.csv")).unwrap();
    assert!(deblur(&[
        "run",
        spec.to_str().unwrap(),
        "--base-dir",
        dir.path().to_str().unwrap()
    ])
    .status
    .success());
    assert_eq!(
        first,
        fs::read(dir.path().join("out/table1_rl_coefficients.csv")).unwrap()
    );
}

#[test]
fn bundled_specs_roundtrip() {
    for entry in fs::read_dir(specs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let spec = ExperimentSpec::load(&path).unwrap();
        let again = ExperimentSpec::from_json(&spec.to_json().unwrap(), "roundtrip").unwrap();
        assert_eq!(spec, again, "{}", path.display());
        spec.validate().unwrap();
    }
}

#[test]
fn rank_deficient_spec_fails() {
    let dir = tempfile::tempdir().unwrap();
    let spec = specs_dir().join("tsvd_rank_deficient.json");
    let o = deblur(&[
        "run",
        spec.to_str().unwrap(),
        "--base-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rank-deficient"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(deblur(&["blur", "--bogus"]).status.code(), Some(2));
    assert_eq!(deblur(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        deblur(&["run", "/nonexistent/spec.json"]).status.code(),
        Some(2)
    );
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let o = deblur(&["run", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed JSON"));
    let inconsistent = dir.path().join("inconsistent.json");
    fs::write(
        &inconsistent,
        r#"{"name":"x","n":12,"kernel":{"builtin":"5bin"},"original":{"kind":"delta","index":5,"height":1.0},
            "method":"rl","params":{"m":6}}"#,
    )
    .unwrap();
    let o = deblur(&["run", inconsistent.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("params.m"));
    assert_eq!(
        deblur(&["reproduce", "--case", "fig9"]).status.code(),
        Some(2)
    );
}

#[test]
fn reproduce_table1_prints_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = deblur(&[
        "reproduce",
        "--case",
        "table1",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("PASS table1/lw")));
    assert!(!out.contains("FAIL"));
    let csv = fs::read_to_string(dir.path().join("table1.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("i,F,g,f_RL,f_LW,f_SVD"));
}
