use std::path::Path;
use std::process::{Command, Output};

fn sapir(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sapir"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary should start")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn init_then_private_fetch() {
    let dir = tempfile::tempdir().unwrap();
    let init = sapir(
        dir.path(),
        &[
            "init", "--m", "32", "--h", "8", "--n", "8", "--M", "1024", "--seed", "7",
        ],
    );
    assert!(init.status.success(), "{init:?}");
    assert!(dir.path().join("cluster.sapr").exists());

    let fetch = sapir(
        dir.path(),
        &["pir-fetch", "--r", "5", "--groups", "2", "--session", "s.txt"],
    );
    assert_eq!(fetch.status.code(), Some(0), "{fetch:?}");
    let text = stdout(&fetch);
    assert!(text.contains("check: exact"), "{text}");
    assert!(text.contains("cPoP: 2"), "{text}");
    assert!(std::fs::read_to_string(dir.path().join("s.txt"))
        .unwrap()
        .contains("batches=2"));

    let strict = sapir(dir.path(), &["pir-fetch", "--r", "5", "--groups", "2", "--distinct"]);
    assert_eq!(strict.status.code(), Some(2));
}

#[test]
fn retrieve_and_wiretap() {
    let dir = tempfile::tempdir().unwrap();
    let init = sapir(
        dir.path(),
        &[
            "init", "--m", "24", "--h", "8", "--n", "12", "--M", "64", "--spare", "--seed", "3",
        ],
    );
    assert!(init.status.success());
    let plain = sapir(dir.path(), &["retrieve", "--r", "1"]);
    assert!(stdout(&plain).contains("check: exact"));
    let tapped = sapir(dir.path(), &["retrieve", "--r", "24", "--wiretap"]);
    assert_eq!(tapped.status.code(), Some(0), "{tapped:?}");
    assert!(stdout(&tapped).contains("ciphertext xor key == content: true"));
    assert_eq!(sapir(dir.path(), &["retrieve", "--r", "25"]).status.code(), Some(2));
}

#[test]
fn verify_rejects_a_damaged_cluster() {
    let dir = tempfile::tempdir().unwrap();
    assert!(
        sapir(dir.path(), &["init", "--m", "16", "--h", "4", "--n", "8", "--M", "64"])
            .status
            .success()
    );
    let ok = sapir(dir.path(), &["verify"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).starts_with("ok:"));

    let path = dir.path().join("cluster.sapr");
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
    assert_eq!(sapir(dir.path(), &["verify"]).status.code(), Some(1));
    assert_eq!(sapir(dir.path(), &["verify", "--bogus"]).status.code(), Some(2));
}

#[test]
fn experiment_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("span.cfg"),
        "experiment = span-prob\nm = 10\ntrials = 20\nseed = 4\noutput = span.csv\n",
    )
    .unwrap();
    let mut runs = Vec::new();
    for _ in 0..2 {
        let out = sapir(dir.path(), &["experiment", "--config", "span.cfg"]);
        assert!(out.status.success(), "{out:?}");
        runs.push(std::fs::read(dir.path().join("span.csv")).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
    assert!(String::from_utf8_lossy(&runs[0]).starts_with("delta,"));

    std::fs::write(dir.path().join("bad.cfg"), "experiment = span-prob\nwat = 1\n").unwrap();
    assert_eq!(
        sapir(dir.path(), &["experiment", "--config", "bad.cfg"]).status.code(),
        Some(2)
    );
}
