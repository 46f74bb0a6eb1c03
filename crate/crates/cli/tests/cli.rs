use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use r443::canonical::canonical_form;
use r443::catalogue::parse_catalogue;
use r443::probes::build_isbell;
use tempfile::TempDir;

const LEFT: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../core/tests/fixtures/minus_two_left.txt"
);
const RIGHT: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../core/tests/fixtures/minus_two_right.txt"
);

fn r443(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_r443"))
        .args(args)
        .env_remove("R443_JOBS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn enumerate(dir: &Path, n: usize) -> (Output, String) {
    let out = dir.join(format!("n{n}.txt"));
    let o = r443(&[
        "enumerate",
        "--n",
        &n.to_string(),
        "--out",
        out.to_str().unwrap(),
    ]);
    (o, out.to_str().unwrap().to_owned())
}

#[test]
fn enumerate_prints_counts_and_writes_catalogue() {
    let dir = TempDir::new().unwrap();
    let (o, path) = enumerate(dir.path(), 3);
    assert!(o.status.success());
    assert!(stdout(&o).contains("3\ttotal\t2\t(1 listed + 1 complements)"));
    assert_eq!(fs::read_to_string(path).unwrap(), "3 0 0\n3 1 1\n");

    let (o, path) = enumerate(dir.path(), 6);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("6\t10\t70\n"), "{text}");
    assert!(text.contains("6\ttotal\t226\t"), "{text}");
    assert_eq!(
        parse_catalogue(&fs::read_to_string(&path).unwrap())
            .unwrap()
            .len(),
        226
    );

    let v = r443(&["verify", &path]);
    assert!(v.status.success());
    assert_eq!(stdout(&v), "226 passed, 0 failed\n");
}

#[test]
fn zero_jobs_is_an_error() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.txt");
    let o = r443(&[
        "enumerate",
        "--n",
        "5",
        "--jobs",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn verify_flags_a_bad_line() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "4 0 0\n").unwrap();
    let o = r443(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.starts_with("FAIL "), "{text}");
    assert!(text.ends_with("0 passed, 1 failed\n"));
}

#[test]
fn isbell_line_is_the_canonical_construction() {
    let o = r443(&["isbell"]);
    assert!(o.status.success());
    let graphs = parse_catalogue(&stdout(&o)).unwrap();
    assert_eq!(graphs.len(), 1);
    let g = graphs[0];
    assert_eq!((g.n(), g.edge_count()), (12, 110));
    assert!(g.is_good());
    assert_eq!(g, *canonical_form(&build_isbell()).graph());
    assert_eq!(canonical_form(&g.complement()).graph(), &g);

    let dir = TempDir::new().unwrap();
    let path = dir.path().join("isbell.txt");
    fs::write(&path, stdout(&o)).unwrap();
    let s = stdout(&r443(&["stats", path.to_str().unwrap()]));
    assert!(
        s.lines().any(|l| l.split_whitespace().eq(["60", "2", "1"])),
        "{s}"
    );
}

#[test]
fn probe_verifies_fixtures() {
    for (fixture, omit) in [(LEFT, "abc,ade"), (RIGHT, "abc,abd")] {
        let o = r443(&[
            "probe",
            "--omit",
            omit,
            "--mode",
            "verify",
            "--fixture",
            fixture,
        ]);
        assert!(o.status.success());
        assert_eq!(stdout(&o), "good\n");
        let v = r443(&["verify", fixture]);
        assert!(v.status.success());
    }
    let o = r443(&[
        "probe",
        "--omit",
        "abc,abd",
        "--mode",
        "verify",
        "--fixture",
        LEFT,
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn probe_rejects_empty_omission_and_unseeded_search() {
    let o = r443(&["probe", "--omit", "", "--mode", "search"]);
    assert_eq!(o.status.code(), Some(2));
    let o = r443(&["probe", "--omit", "abc", "--mode", "search"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--long-running"));
}

#[test]
fn seeded_probe_search_prints_a_colouring() {
    let o = r443(&[
        "probe",
        "--omit",
        "abc,ade",
        "--mode",
        "search",
        "--fixture",
        LEFT,
        "--seed-points",
        "11",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let pc = r443::probes::parse_colouring(&text).unwrap();
    assert!(r443::probes::verify_partial_colouring(&pc));
}
