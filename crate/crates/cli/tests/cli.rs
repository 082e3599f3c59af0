use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn mme(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mme")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

fn eval(dir: &Path, algo: &str, poly: &str, points: &str, extra: &[&str]) -> (i32, Option<Value>) {
    let out_path = dir.join(format!("out-{algo}.json"));
    let out = out_path.to_str().unwrap();
    let mut args = vec!["eval", "--algo", algo, "--poly", poly, "--points", points, "--out", out];
    args.extend_from_slice(extra);
    let res = mme(&args);
    let values = std::fs::read_to_string(&out_path).ok().map(|s| serde_json::from_str(&s).unwrap());
    (code(&res), values)
}

#[test]
fn constant_polynomial_everywhere() {
    let dir = TempDir::new().unwrap();
    let poly = write(dir.path(), "p.json", &json!({"schema_version": "1", "r": "13", "m": 2, "d": 1, "coeffs": ["5"]}));
    let pts = write(dir.path(), "x.json", &json!({"points": [["0", "0"], ["12", "3"], ["7", "7"]]}));
    for algo in ["naive", "mme-a", "mme-b"] {
        let (c, v) = eval(dir.path(), algo, &poly, &pts, &["--check"]);
        assert_eq!(c, 0, "{algo}");
        assert_eq!(v.unwrap()["values"], json!(["5", "5", "5"]), "{algo}");
    }
}

#[test]
fn product_over_f4() {
    let dir = TempDir::new().unwrap();
    let zero = json!(["0", "0"]);
    let poly = write(
        dir.path(),
        "p.json",
        &json!({"schema_version": "1", "r": "2", "ext": {"e": 2, "E": ["1", "1", "1"]}, "m": 2, "d": 2,
                "coeffs": [zero, zero, zero, ["1", "0"]]}),
    );
    // x1 * x2 at (z, 1) is z.
    let pts = write(dir.path(), "x.json", &json!({"points": [[["0", "1"], ["1", "0"]], [["0", "1"], ["0", "1"]]]}));
    for algo in ["naive", "mme-a", "mme-b"] {
        let (c, v) = eval(dir.path(), algo, &poly, &pts, &["--check"]);
        assert_eq!(c, 0, "{algo}");
        // z * z = z + 1
        assert_eq!(v.unwrap()["values"], json!([["0", "1"], ["1", "1"]]), "{algo}");
    }
}

#[test]
fn generated_instances_agree() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("p.json");
    let x = dir.path().join("x.json");
    let (p, x) = (p.to_str().unwrap(), x.to_str().unwrap());
    let gen = mme(&["gen", "--seed", "4", "--r", "6", "--s", "2", "--m", "2", "--d", "3", "--n", "12", "--poly", p, "--points", x]);
    assert_eq!(code(&gen), 0);
    let (_, naive) = eval(dir.path(), "naive", p, x, &[]);
    let (c, b) = eval(dir.path(), "mme-b", p, x, &["--depth", "1", "--check"]);
    assert_eq!(c, 0);
    assert_eq!(naive, b);
}

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let run = |tag: &str, seed: &str| {
        let p = dir.path().join(format!("p{tag}.json"));
        let x = dir.path().join(format!("x{tag}.json"));
        let out = mme(&[
            "gen", "--seed", seed, "--r", "97", "--m", "3", "--d", "4", "--n", "5",
            "--poly", p.to_str().unwrap(), "--points", x.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        (std::fs::read(p).unwrap(), std::fs::read(x).unwrap())
    };
    assert_eq!(run("a", "11"), run("b", "11"));
    assert_ne!(run("c", "11"), run("d", "12"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&mme(&["eval", "--algo", "fastest"])), 1);
    assert_eq!(code(&mme(&["--help"])), 0);
    let missing = dir.path().join("none.json");
    let missing = missing.to_str().unwrap();
    assert_eq!(eval(dir.path(), "naive", missing, missing, &[]).0, 1);

    let junk = write(dir.path(), "junk.json", &json!({"r": "13", "colour": "red"}));
    let pts = write(dir.path(), "x.json", &json!({"points": [["1"]]}));
    assert_eq!(eval(dir.path(), "naive", &junk, &pts, &[]).0, 1);

    // s > m falls back to Z/9 with s = 1.
    let poly = write(dir.path(), "p.json", &json!({"schema_version": "1", "r": "3", "s": 2, "m": 1, "d": 2, "coeffs": ["1", "1"]}));
    let pts = write(dir.path(), "y.json", &json!({"points": [["8"]]}));
    let (c, v) = eval(dir.path(), "mme-b", &poly, &pts, &["--check"]);
    assert_eq!(c, 0);
    assert_eq!(v.unwrap()["values"], json!(["0"]));

    assert_eq!(code(&mme(&["selftest"])), 0);
}

#[test]
fn empty_suite_writes_header_only() {
    let dir = TempDir::new().unwrap();
    let suite = write(dir.path(), "suite.json", &json!({"schema_version": "1", "entries": []}));
    let out = dir.path().join("bench.csv");
    let res = mme(&["bench", "--suite", &suite, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 0);
    assert_eq!(std::fs::read_to_string(out).unwrap().trim_end(), "algo,r,s,e,m,d,N,wall_time_ns,per_point_ns,checked");
}

#[test]
fn small_suite_rows() {
    let dir = TempDir::new().unwrap();
    let suite = write(
        dir.path(),
        "suite.json",
        &json!({"entries": [{"algos": ["naive", "mme-a", "mme-b"], "r": "13", "m": 2, "d": 4, "N": [5, 10], "check": true, "seed": 1}]}),
    );
    let out = dir.path().join("bench.csv");
    assert_eq!(code(&mme(&["bench", "--suite", &suite, "--out", out.to_str().unwrap()])), 0);
    let text = std::fs::read_to_string(out).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
    assert_eq!(text.lines().filter(|l| l.starts_with("# crossover")).count(), 2);
}
