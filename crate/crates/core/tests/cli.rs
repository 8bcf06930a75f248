mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::e2e::write_demo_corpus;

fn forge(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forge"))
        .args(["--log-level", "warn"])
        .args(args)
        .current_dir(cwd)
        .env_remove("FORGE_CACHE_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn stats_prints_the_grand_total() {
    let here = Path::new(env!("CARGO_MANIFEST_DIR"));
    let csv = tempfile::NamedTempFile::new().unwrap();
    let o = forge(&["stats", "fixtures/table1.jsonl", "--csv", csv.path().to_str().unwrap()], here);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("grand total: 180.43 h"), "{out}");
    assert!(out.contains("65.15") && out.contains("5.72"));
    let csv = std::fs::read_to_string(csv.path()).unwrap();
    assert!(csv.starts_with("dialect,source,n_utts,hours,chars,chars_per_sec\n"));
    assert!(csv.lines().any(|l| l.starts_with("Total,all,") && l.contains(",180.430000,")), "{csv}");
}

#[test]
fn retention_from_hours_and_from_manifests() {
    let here = Path::new(env!("CARGO_MANIFEST_DIR"));
    let o = forge(&["retention", "180.53", "140.31"], here);
    assert_eq!(stdout(&o).trim(), "180.53 h -> 140.31 h: 77.72%");
    let o = forge(&["retention", "fixtures/table1.jsonl", "fixtures/table2.jsonl"], here);
    assert_eq!(stdout(&o).trim(), "180.43 h -> 140.31 h: 77.76%");
    let o = forge(&["retention", "0", "1"], here);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    write_demo_corpus(dir.path());
    let o = forge(&["run", "--stages", "ingest,polish"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("polish"));
    let o = forge(&["run", "--stages", "g2p,align"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = forge(&["frobnicate"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = forge(&["run"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("forge.toml"), "{}", stderr(&o));

    write_demo_corpus(dir.path());
    std::fs::write(dir.path().join("lexicon.tsv"), "天\tSixian\n").unwrap();
    let o = forge(&["run", "--stages", "ingest,cleanup,align"], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("line 1"), "{}", stderr(&o));
}

#[test]
fn stage_without_its_input_is_an_order_error() {
    let dir = tempfile::tempdir().unwrap();
    write_demo_corpus(dir.path());
    let o = forge(&["run", "--stages", "ingest,cleanup,segment"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("aligned.jsonl"), "{}", stderr(&o));
    let o = forge(&["segment"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("aligned.jsonl"), "{}", stderr(&o));
}

#[test]
fn g2p_filters_standard_input() {
    use std::io::Write;
    let dir = tempfile::tempdir().unwrap();
    write_demo_corpus(dir.path());
    let run = |strict: bool, input: &str| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_forge"));
        cmd.args(["g2p", "--dialect", "Sixian", "--lexicon", "lexicon.tsv"]).current_dir(dir.path());
        if strict {
            cmd.arg("--strict");
        }
        let mut child = cmd
            .stdin(std::process::Stdio::piped())
            .stdout(std::process::Stdio::piped())
            .stderr(std::process::Stdio::piped())
            .spawn()
            .unwrap();
        child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
        child.wait_with_output().unwrap()
    };
    let o = run(false, "天光，好\n\n天x光\n");
    assert!(o.status.success(), "{}", stderr(&o));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1], "");
    assert!(lines[0].contains(" , "), "{}", lines[0]);
    assert_eq!(lines[2], lines[0].split(" , ").next().unwrap());
    let o = run(true, "天x光\n");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 1"), "{}", stderr(&o));
}

#[test]
fn cache_dir_follows_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    write_demo_corpus(dir.path());
    let cache = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_forge"))
        .args(["--log-level", "warn", "ingest"])
        .current_dir(dir.path())
        .env("FORGE_CACHE_DIR", cache.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(!dir.path().join("cache").exists());
    let pages = std::fs::read_dir(cache.path().join("pages")).unwrap().count();
    let audio = std::fs::read_dir(cache.path().join("audio")).unwrap().count();
    assert_eq!((pages, audio), (3, 20));
}
