use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kleinsail::cli::{exit, SailReportDocument};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_kleinsail"));
    c.env_remove("KLEIN_WORKERS");
    c
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn verify_examples() {
    for n in ["1", "2"] {
        let o = run(&["verify-example", n, "--recheck"]);
        assert_eq!(code(&o), exit::OK, "{}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["match"], true);
    }
    let o = run(&["verify-example", "3"]);
    assert_eq!(code(&o), exit::MISMATCH);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["diff"][0]["path"], "faces.T31.volume");
    assert_eq!(code(&run(&["verify-example", "4"])), exit::USAGE);
}

#[test]
fn analyze_writes_a_rechecked_document() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("doc.json");
    let o = run(&["analyze", data("example1.toml").to_str().unwrap(), "--recheck", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), exit::OK);
    let doc = SailReportDocument::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let d: Vec<u64> = doc.classes.iter().map(|c| c.invariants.distance).collect();
    assert_eq!(d, vec![4, 3, 2, 4, 3, 2, 1]);
    assert_eq!(doc.det, -1);
    assert_eq!(doc.eigenvalues.len(), 4);
}

#[test]
fn analyze_rejects_the_identity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "id.toml",
        "[operator]\nmatrix = [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]\n[generators]\nwords = [\"A\", \"A\", \"A\"]\n[sail]\nseeds = [[0,0,0,1]]\n",
    );
    assert_eq!(code(&run(&["analyze", cfg.to_str().unwrap()])), exit::CLASSIFICATION);
}

#[test]
fn bad_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[operator]\ncompanion = [1, 2]\n");
    assert_eq!(code(&run(&["analyze", cfg.to_str().unwrap()])), exit::USAGE);
    assert_eq!(code(&run(&["frobnicate"])), exit::USAGE);
    assert_eq!(code(&run(&["analyze", dir.path().join("missing.toml").to_str().unwrap()])), exit::IO);
    assert_eq!(code(&run(&["--help"])), exit::OK);
    let o = bin().env("KLEIN_WORKERS", "many").args(["verify-example", "1"]).output().unwrap();
    assert_eq!(code(&o), exit::USAGE);
}

#[test]
fn symmetry_permutes_classes() {
    let o = run(&["symmetry", "--recheck"]);
    assert_eq!(code(&o), exit::OK, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = SailReportDocument::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    let pairs: BTreeSet<(String, String)> =
        doc.symmetry.unwrap().images.into_iter().map(|i| (i.from, i.to)).collect();
    for (a, b) in [("T11", "T14"), ("T12", "T15"), ("T13", "T16"), ("T17", "T17")] {
        assert!(pairs.contains(&(a.into(), b.into())));
        assert!(pairs.contains(&(b.into(), a.into())));
    }

    let base = std::fs::read_to_string(data("symmetry.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let perturbed = write(dir.path(), "p.toml", &base.replacen("[[4, -16, 17, -3]", "[[5, -16, 17, -3]", 1));
    assert_eq!(code(&run(&["symmetry", perturbed.to_str().unwrap()])), exit::SYMMETRY);

    let start = base.find("matrix = [[4").unwrap();
    let end = base[start..].find('\n').unwrap() + start;
    let cut = base.find("expected").unwrap();
    let ident = format!("{}matrix = [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]\n", &base[..start]);
    assert!(end <= cut);
    let p = write(dir.path(), "i.toml", &ident);
    let o = run(&["symmetry", p.to_str().unwrap()]);
    assert_eq!(code(&o), exit::OK);
    let doc = SailReportDocument::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert!(doc.symmetry.unwrap().images.iter().all(|i| i.from == i.to && i.word == "E"));

    let wrong = base.replace("[\"T17\", \"T17\"]", "[\"T17\", \"T11\"]");
    let p = write(dir.path(), "w.toml", &wrong);
    assert_eq!(code(&run(&["symmetry", p.to_str().unwrap()])), exit::MISMATCH);
    assert_eq!(code(&run(&["symmetry", data("example1.toml").to_str().unwrap()])), exit::USAGE);
}

#[test]
fn exports() {
    let dir = tempfile::tempdir().unwrap();
    let doc1 = dir.path().join("doc1.json");
    assert_eq!(code(&run(&["analyze", data("example1.toml").to_str().unwrap(), "--out", doc1.to_str().unwrap()])), 0);
    let d1 = doc1.to_str().unwrap();

    let o = run(&["export", d1, "--format", "json", "--recheck"]);
    assert_eq!(code(&o), exit::OK);
    assert_eq!(o.stdout, std::fs::read(&doc1).unwrap());

    let o = run(&["export", d1, "--format", "gluing"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut seen = BTreeSet::new();
    for line in text.lines() {
        let parts: Vec<&str> = line.split(' ').collect();
        assert_eq!(parts.len(), 3, "{line}");
        for side in [parts[0], parts[2]] {
            let key = side.split(':').next().unwrap().to_string();
            assert!(seen.insert(key), "2-face {side} listed twice");
        }
    }
    // 7 tetrahedra, 4 triangles each
    assert_eq!(seen.len(), 28);
    assert_eq!(text.lines().count(), 14);

    let doc3 = dir.path().join("doc3.json");
    run(&["analyze", data("example3.toml").to_str().unwrap(), "--out", doc3.to_str().unwrap()]);
    let o = run(&["export", doc3.to_str().unwrap(), "--format", "off"]);
    let off = String::from_utf8(o.stdout).unwrap();
    let mut body = off.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(body.next(), Some("OFF"));
    let counts: Vec<usize> = body.next().unwrap().split(' ').map(|x| x.parse().unwrap()).collect();
    assert_eq!(counts[0], 8);
    // Euler: V - E + F = 2 with 16 edges
    assert_eq!(counts[0] + counts[1], 18);

    assert_eq!(code(&run(&["export", d1, "--format", "stl"])), exit::USAGE);
    let broken = write(dir.path(), "broken.json", "{}");
    assert_eq!(code(&run(&["export", broken.to_str().unwrap()])), exit::USAGE);
}

#[test]
fn tampered_document_fails_recheck() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("doc.json");
    run(&["analyze", data("example2.toml").to_str().unwrap(), "--out", doc.to_str().unwrap()]);
    let mut d = SailReportDocument::from_json(&std::fs::read_to_string(&doc).unwrap()).unwrap();
    d.classes[0].invariants.volume += 1;
    let bad = write(dir.path(), "bad.json", &d.to_json().unwrap());
    assert_eq!(code(&run(&["export", bad.to_str().unwrap(), "--recheck"])), exit::INVARIANT);
}

#[test]
fn small_surveys() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s5.json");
    let cp = dir.path().join("s5.checkpoint");
    let o = run(&["survey", "5", "--out", out.to_str().unwrap(), "--checkpoint", cp.to_str().unwrap()]);
    assert_eq!(code(&o), exit::OK);
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["counts"]["candidate"], 0);
    assert_eq!(r["unresolved"], 0);
    assert!(cp.exists());
    // resuming from a finished checkpoint gives the same report
    let again = dir.path().join("again.json");
    run(&["survey", "5", "--out", again.to_str().unwrap(), "--checkpoint", cp.to_str().unwrap()]);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());

    let o = run(&["survey", "1"]);
    assert_eq!(code(&o), exit::OK);
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["enumerated"], 1);
    assert_eq!(r["counts"]["not_unimodular"], 1);
    assert_eq!(code(&run(&["survey", "9"])), exit::RESOURCE);
}

#[test]
fn worker_count_does_not_change_output() {
    let a = bin().env("KLEIN_WORKERS", "1").args(["verify-example", "2"]).output().unwrap();
    let b = bin().env("KLEIN_WORKERS", "3").args(["verify-example", "2"]).output().unwrap();
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}
