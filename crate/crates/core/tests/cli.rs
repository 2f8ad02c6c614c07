use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_liouville-lab"))
}

#[test]
fn runs_a_scenario_to_stdout() {
    let out = bin().args(["annulus-volume", "i=8..16"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# schema=annulus-volume/1"));
    assert_eq!(text.lines().count(), 2 + 9);
}

#[test]
fn writes_config_driven_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "scenario=remark-collapse\nmu=4..256*2\n").unwrap();
    let out_dir = dir.path().join("out");
    let status = bin()
        .args(["remark-collapse", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .args(["--format", "text"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out_dir.join("remark-collapse-supinf.txt").exists());
    assert!(out_dir.join("remark-collapse-claims.txt").exists());
}

#[test]
fn violated_claim_exits_with_one() {
    // Too few indices for the limit to be reached.
    let out = bin().args(["annulus-volume", "i=1..2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stdout.is_empty(), "table is still emitted");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [vec!["no-such-scenario"], vec!["annulus-volume", "--format", "xml"], vec!["annulus-volume", "i=3,2"], vec![]] {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}
