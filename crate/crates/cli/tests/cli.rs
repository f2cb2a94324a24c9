use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn pfacap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfacap"))
        .args(args)
        .env_remove("PFACAP_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn value_of_baa_on_example1() {
    let out = pfacap(&["pfa", "value", "--pfa", "example1", "--word", "baa"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1/4\n");
    let from_file = pfacap(&["pfa", "value", "--pfa", &fixture("example1.toml"), "--word", "baa"]);
    assert_eq!(stdout(&from_file), "1/4\n");
}

#[test]
fn sigma_round_trip() {
    let out = pfacap(&["sigma", "encode", "1/2"]);
    assert_eq!(stdout(&out), "18\n");
    let back = pfacap(&["sigma", "decode", "18", "--arity", "1"]);
    assert_eq!(stdout(&back), "1/2\n");
}

#[test]
fn exit_codes() {
    assert_eq!(pfacap(&["--no-such-flag"]).status.code(), Some(2));
    assert_eq!(pfacap(&["pfa", "value", "--pfa", "example1"]).status.code(), Some(2));
    let bad = pfacap(&["pfa", "value", "--pfa", "example1", "--word", "z"]);
    assert_eq!(bad.status.code(), Some(1));
    let err = String::from_utf8(bad.stderr).unwrap();
    assert!(err.starts_with("error: "));
    assert_eq!(err.trim_end().lines().count(), 1);
    assert_eq!(pfacap(&["--help"]).status.code(), Some(0));
}

#[test]
fn invalid_automaton_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(fixture("example1.toml")).unwrap();
    let broken = text.replace(r#"initial = ["1", "0", "0"]"#, r#"initial = ["1/2", "0", "0"]"#);
    assert_ne!(broken, text);
    std::fs::write(&path, broken).unwrap();
    let out = pfacap(&["pfa", "validate", "--pfa", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dichotomy_bracket_on_d_2_5() {
    let out = pfacap(&[
        "capacity",
        "bracket",
        "--pfa",
        &fixture("d_2_5_half.toml"),
        "--certificate",
        "dxy:2/5,1/2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("upper = 0.5 (1/2), dichotomy"), "{text}");
    assert!(text.contains("block,m,n,word,method,word_value,lower,upper"));
}

#[test]
fn ba_on_bsc_fixture() {
    let out = pfacap(&["capacity", "ba", "--channel", &fixture("bsc_0_11.toml")]);
    assert!(stdout(&out).starts_with("capacity = 0.500084041835\n"));
}

fn run_into(dir: &Path, args: &[&str]) -> Output {
    let mut all = vec!["--out-dir", dir.to_str().unwrap()];
    all.extend_from_slice(args);
    pfacap(&all)
}

#[test]
fn manifest_replays_and_detects_changes() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("a.toml");
    std::fs::copy(fixture("d_2_5_half.toml"), &input).unwrap();
    let run = tmp.path().join("run");
    let out = run_into(
        &run,
        &["capacity", "converse", "--pfa", input.to_str().unwrap(), "--n", "3", "--trials", "10", "--seed", "7"],
    );
    assert!(out.status.success());
    for f in ["stdout.txt", "converse.csv", "manifest.json"] {
        assert!(run.join(f).is_file(), "{f}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "capacity converse");
    assert_eq!(manifest["seed"], 7);

    let replay = pfacap(&["replay", run.join("manifest.json").to_str().unwrap()]);
    assert!(replay.status.success(), "{}", String::from_utf8_lossy(&replay.stderr));

    std::fs::write(&input, std::fs::read_to_string(&input).unwrap() + "\n# edited\n").unwrap();
    let stale = pfacap(&["replay", run.join("manifest.json").to_str().unwrap()]);
    assert_eq!(stale.status.code(), Some(1));
}

#[test]
fn thread_count_does_not_change_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["capacity", "stability", "demo", "--samples", "500", "--etas", "2,8"];
    let mut threads = ["--threads", "1"].to_vec();
    threads.extend_from_slice(&args);
    let one = run_into(&tmp.path().join("one"), &threads);
    threads[1] = "4";
    let four = run_into(&tmp.path().join("four"), &threads);
    assert_eq!(stdout(&one), stdout(&four));
    let csv = |d: &str| std::fs::read(tmp.path().join(d).join("stability_demo.csv")).unwrap();
    assert_eq!(csv("one"), csv("four"));
}

#[test]
fn sampling_is_seeded() {
    let args = ["channel", "sample", "--pfa", "coin", "--inputs", "0:a 1:a 0:a 1:a 0:a 1:a", "--seed", "11"];
    assert_eq!(stdout(&pfacap(&args)), stdout(&pfacap(&args)));
}

#[test]
fn witness_sweep_lists_each_k() {
    let out = pfacap(&["witness", "--x", "3/4", "--eps", "1/10", "--k", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("--- witness.csv"));
    assert_eq!(text.lines().filter(|l| l.starts_with("k=")).count(), 2);
}

#[test]
fn gadget_output_parses_as_an_automaton() {
    let tmp = tempfile::tempdir().unwrap();
    let out = pfacap(&["gadget", "dxy", "--x", "3/4", "--y", "1/2"]);
    let path = tmp.path().join("d.toml");
    std::fs::write(&path, out.stdout).unwrap();
    let v = pfacap(&["pfa", "value", "--pfa", path.to_str().unwrap(), "--word", "b"]);
    assert_eq!(stdout(&v), "1/2\n");
}
