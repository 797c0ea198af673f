use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gwcache"))
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn scratch_config(name: &str, json: &str) -> PathBuf {
    let p = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, json).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn shipped_configs_pass() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut names: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    assert!(names.len() >= 8);
    for cfg in names {
        let o = run(&["--config", cfg.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}:\n{}", cfg.display(), stderr(&o));
        assert!(stderr(&o).lines().any(|l| l.starts_with("PASS")), "{}", cfg.display());
        assert!(!stderr(&o).lines().any(|l| l.starts_with("FAIL")), "{}", cfg.display());
    }
}

#[test]
fn csv_headers_per_kind() {
    let cases = [
        ("dsbs_k2_curves.json", "M,R_gwmr,R_corr_unaware,R_mr_lb,R_opt_lb"),
        ("dsbs_k2_bounds.json", "M,closed_form,searched,witness"),
        ("structured3_gaps.json", "M,R_ach,R_lb,gap,cap,pass"),
        ("two_request_simulate.json", "M,F,demand,bits,rate,decoded"),
    ];
    for (name, header) in cases {
        let o = run(&["--config", shipped(name).to_str().unwrap()]);
        assert_eq!(stdout(&o).lines().next(), Some(header), "{name}");
    }
}

#[test]
fn output_is_deterministic() {
    let cfg = shipped("structured2_simulate.json");
    let a = run(&["--config", cfg.to_str().unwrap()]);
    let b = run(&["--config", cfg.to_str().unwrap(), "--sequential"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);

    let cfg = shipped("triple_bsc_gaps.json");
    let a = run(&["--config", cfg.to_str().unwrap()]);
    let b = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn seed_and_out_flags() {
    let cfg = shipped("two_request_simulate.json");
    let out = Path::new(env!("CARGO_TARGET_TMPDIR")).join("two_request.csv");
    let _ = std::fs::remove_file(&out);
    let o = run(&["--config", cfg.to_str().unwrap(), "--seed", "42", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(&out).unwrap();
    // the rates do not depend on the realization
    let default_seed = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(written, stdout(&default_seed));
    // five anchors × nine demand pairs
    assert_eq!(written.lines().count(), 1 + 45);
    assert!(written.lines().any(|l| l == "1,2,(1+2 1+3),3,1.5,ok"), "{written}");
}

#[test]
fn config_out_field_is_used() {
    let out = Path::new(env!("CARGO_TARGET_TMPDIR")).join("from_config.csv");
    let _ = std::fs::remove_file(&out);
    let cfg = scratch_config(
        "with_out.json",
        &format!(
            r#"{{"source": {{"model": "dsbs", "p0": 0.2}}, "K": 2, "kind": "curves",
                "grid": {{"min": 0, "max": 1.7, "step": 0.1}}, "out": {:?}}}"#,
            out.to_str().unwrap()
        ),
    );
    let o = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 19);
}

#[test]
fn invalid_configs_exit_with_error() {
    let bad = [
        ("unknown_field.json", r#"{"source": {"model": "dsbs", "p0": 0.2}, "K": 2, "kind": "curves", "colour": 1}"#),
        ("bad_step.json", r#"{"source": {"model": "dsbs", "p0": 0.2}, "K": 2, "kind": "curves", "grid": {"min": 0, "max": 1, "step": 0}}"#),
        ("bad_p0.json", r#"{"source": {"model": "dsbs", "p0": 0.7}, "K": 2, "kind": "curves"}"#),
        ("too_many_receivers.json", r#"{"source": {"model": "dsbs", "p0": 0.2}, "K": 5, "kind": "bounds"}"#),
        ("not_json.json", "K = 2"),
    ];
    for (name, json) in bad {
        let cfg = scratch_config(name, json);
        let o = run(&["--config", cfg.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error:"), "{name}: {}", stderr(&o));
    }
    let o = run(&["--config", "/nonexistent/config.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn failed_check_exits_one() {
    // F = 7 cannot carry the 0.3 and 0.4 descriptions
    let cfg = scratch_config(
        "indivisible.json",
        r#"{"source": {"model": "structured2", "lV": 0.5, "l1": 0.3, "l2": 0.4}, "K": 2, "kind": "simulate", "F": 7}"#,
    );
    let o = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).lines().any(|l| l.starts_with("FAIL")));
}

#[test]
fn unstructured_simulation_falls_back_to_curves() {
    let cfg = scratch_config(
        "dsbs_simulate.json",
        r#"{"source": {"model": "dsbs", "p0": 0.2}, "K": 2, "kind": "simulate", "grid": {"min": 0, "max": 1.7, "step": 0.5}}"#,
    );
    let o = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).starts_with("note:"));
    assert_eq!(stdout(&o).lines().next(), Some("M,R_gwmr,R_corr_unaware,R_mr_lb,R_opt_lb"));
}
