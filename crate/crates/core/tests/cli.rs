use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_compilance"))
        .args(args)
        .env("COMPILANCE_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const PATH5: &str = "p edge 5 4\ne 1 2\ne 2 3\ne 3 4\ne 4 5\n";
// K_{1,4}: every spanning path would need the centre twice
const STAR5: &str = "p edge 5 4\ne 1 2\ne 1 3\ne 1 4\ne 1 5\n";

#[test]
fn hampath_compile_query_bench() {
    let dir = tempfile::tempdir().unwrap();
    let (path, star, art) = (dir.path().join("path.txt"), dir.path().join("star.txt"), dir.path().join("h5.cplc"));
    fs::write(&path, PATH5).unwrap();
    fs::write(&star, STAR5).unwrap();

    let out = cli(&[
        "compile", "--problem", "hampath", "--scheme", "hampath.gamma.identity",
        "--param-of", s(&path), "--mode", "sparse", "--out", s(&art),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(&fs::read(&art).unwrap()[..4], b"CPLC");

    let yes = cli(&["query", "--artifact", s(&art), "--instance", s(&path)]);
    assert_eq!(yes.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&yes.stdout).trim(), "YES");
    let no = cli(&["query", "--artifact", s(&art), "--instance", s(&star)]);
    assert_eq!(no.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&no.stdout).trim(), "NO");

    let report = dir.path().join("bench.json");
    let bench = cli(&["bench", "--artifact", s(&art), "--random", "30", "--report", s(&report)]);
    assert_eq!(bench.status.code(), Some(0), "{}", String::from_utf8_lossy(&bench.stderr));
    let t: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(t["queries"], 30);
    assert!(t["speedup"].as_f64().unwrap() > 0.0);

    let too_few = cli(&["bench", "--artifact", s(&art), "--random", "10"]);
    assert_eq!(too_few.status.code(), Some(3));
}

#[test]
fn damaged_artifact_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (x, art) = (dir.path().join("x.txt"), dir.path().join("p.cplc"));
    fs::write(&x, "0110\n").unwrap();
    let out = cli(&[
        "compile", "--problem", "parity", "--scheme", "parity.len.identity",
        "--param-of", s(&x), "--out", s(&art),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut bytes = fs::read(&art).unwrap();
    let last = bytes.len() - 6;
    bytes[last] ^= 0xff;
    fs::write(&art, bytes).unwrap();
    let q = cli(&["query", "--artifact", s(&art), "--instance", s(&x)]);
    assert_eq!(q.status.code(), Some(3));
}

#[test]
fn reduce_with_check() {
    let dir = tempfile::tempdir().unwrap();
    let (f, y) = (dir.path().join("f.cnf"), dir.path().join("y.txt"));
    // (x1 | x2) & (!x1 | x2) & (!x2 | x1): satisfied only by x1 = x2 = 1
    fs::write(&f, "p cnf 2 3\n1 2 0\n-1 2 0\n-2 1 0\n").unwrap();
    let out = cli(&["reduce", "--id", "3sat.nu-to-2hs", "--instance", s(&f), "--out", s(&y), "--check"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["source_member"], true);
    assert_eq!(v["target_member"], true);
    assert_eq!(v["contract_b"], true);
    let image = fs::read_to_string(&y).unwrap();
    assert!(image.trim().chars().all(|c| c == '0' || c == '1'));

    let unknown = cli(&["reduce", "--id", "nope", "--instance", s(&f), "--out", s(&y)]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn verify_suite_reports() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("mixed.json");
    let out = cli(&["verify", "--suite", "mixed", "--budget", "small", "--report", s(&report)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let reports = v.as_array().unwrap();
    assert!(!reports.is_empty());
    for r in reports {
        assert_eq!(r["status"], "PASS", "{r}");
        assert!(r["checked"].as_u64().unwrap() > 0);
    }
}
