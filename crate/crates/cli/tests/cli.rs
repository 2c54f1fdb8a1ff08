// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

fn npn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_npn")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(npn(&["--help"]).status.code(), Some(0));
    assert_eq!(npn(&["--version"]).status.code(), Some(0));
}

#[test]
fn bad_flags_exit_one() {
    assert_eq!(npn(&["canon", "--bogus"]).status.code(), Some(1));
    assert_eq!(npn(&["nosuch"]).status.code(), Some(1));
    assert_eq!(npn(&["classify", "-", "--jobs", "0"]).status.code(), Some(1));
    assert_eq!(npn(&["canon", "8", "--sers-base", "1"]).status.code(), Some(1));
}

#[test]
fn canon_prints_form_and_witness() {
    let o = npn(&["canon", "0x8", "--inputs", "2", "--method", "exhaustive"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "8 1 0 3 01\n");
}

#[test]
fn and_and_nor_share_a_form() {
    for m in ["inf", "inf-plus", "baseline", "exhaustive"] {
        let o = npn(&["canon", "8", "1", "--method", m]);
        assert_eq!(o.status.code(), Some(0));
        let forms: Vec<String> = stdout(&o).lines().map(|l| l.split(' ').nth(1).unwrap().to_string()).collect();
        assert_eq!(forms.len(), 2);
        assert_eq!(forms[0], forms[1], "{m}");
    }
}

#[test]
fn canon_stats_report_reduction() {
    let o = npn(&["canon", "0xFFFF3777C8880000", "--method", "inf", "--stats"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("remaining_after_sym=48"), "{out}");
    assert!(out.contains("perm_after_inf=1"), "{out}");
}

#[test]
fn malformed_literal_exits_one() {
    assert_eq!(npn(&["canon", "0xZZ"]).status.code(), Some(1));
}

#[test]
fn empty_file_classifies_to_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.txt");
    let out = dir.path().join("classes.csv");
    std::fs::write(&input, "").unwrap();
    let o = npn(&["classify", path(&input), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("#Classes 0"));
    let csv = std::fs::read_to_string(out).unwrap();
    assert_eq!(csv.lines().count(), 2, "{csv}");
    assert!(csv.starts_with("# npn-classes v1\ncanonical_hex,"));
}

#[test]
fn classify_counts_three_input_classes() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("all3.txt");
    let text: String = (0..256).map(|w| format!("{w:02X}\n")).collect();
    std::fs::write(&input, text).unwrap();
    let o = npn(&["classify", path(&input)]);
    assert_eq!(o.status.code(), Some(0));
    let rows = stdout(&o).lines().filter(|l| !l.starts_with('#') && !l.starts_with("canonical_hex")).count();
    assert_eq!(rows, 14);
}

#[test]
fn classify_skips_bad_lines() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("mixed.txt");
    std::fs::write(&input, "8\nxyz\n6\n").unwrap();
    let o = npn(&["classify", path(&input)]);
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains(":2:"), "{err}");
    assert!(err.contains("#Skipped 1"), "{err}");
}

#[test]
fn cuts_emits_sentinel_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("chain.aag");
    std::fs::write(&input, "aag 5 3 0 1 2\n2\n4\n6\n10\n8 2 4\n10 8 6\n").unwrap();
    let o = npn(&["cuts", path(&input), "--cut-size", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "# n=2\n8\n8\n# n=3\n80\n");
}

#[test]
fn cuts_output_feeds_classify() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("chain.aag");
    let tables = dir.path().join("cuts.txt");
    std::fs::write(&input, "aag 5 3 0 1 2\n2\n4\n6\n10\n8 2 4\n10 8 6\n").unwrap();
    assert!(npn(&["cuts", path(&input), "--out", path(&tables)]).status.success());
    let o = npn(&["classify", path(&tables)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("#Classes 2"));
}

#[test]
fn latches_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("latch.aag");
    std::fs::write(&input, "aag 2 1 1 1 0\n2\n4 2\n4\n").unwrap();
    let o = npn(&["cuts", path(&input)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sequential"));
}

#[test]
fn verify_small_inputs_pass() {
    let o = npn(&["verify", "--inputs", "3", "--samples", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS exhaustive n=3"));
}

#[test]
fn bench_agrees_across_methods() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("all3.txt");
    let text: String = (0..256).map(|w| format!("{w:02X}\n")).collect();
    std::fs::write(&input, text).unwrap();
    let o = npn(&["bench", path(&input)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("# npn-bench v1\n"));
    assert_eq!(out.lines().filter(|l| l.contains(",256,14,")).count(), 3, "{out}");
}
