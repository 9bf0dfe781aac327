use std::path::PathBuf;
use std::process::Command;

use binmeasure::cli::main_with;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("binmeasure").chain(args.iter().copied());
    let code = main_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn machine(args: &[&str]) -> String {
    let mut full = vec!["--format", "machine"];
    full.extend_from_slice(args);
    let (code, out, err) = run(&full);
    assert_eq!(code, 0, "{args:?}: {err}");
    out.trim().to_string()
}

fn temp_file(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("binmeasure-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn b2_table_rows() {
    let (code, out, _) = run(&["b2", "table"]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "a b | not or and xor xnor");
    assert_eq!(rows[1], "0 0 |   1  0   0   0    1");
    assert_eq!(rows[2], "0 1 |   1  1   0   1    0");
    assert_eq!(rows[3], "1 0 |   0  1   0   1    0");
    assert_eq!(rows[4], "1 1 |   0  1   1   0    1");
}

#[test]
fn interval_ops() {
    assert_eq!(machine(&["interval", "op", "--op", "cup", "--a", "[-inf,3/2)", "--b", "[2,5)"]), "[-inf,3/2) [2,5)");
    assert_eq!(machine(&["interval", "op", "--op", "delta", "--a", "[0,2)", "--b", "[1,3)"]), "[0,1) [2,3)");
    assert_eq!(machine(&["interval", "op", "--op", "cap", "--a", "[0,1)", "--b", "[1,2)"]), "{}");
}

#[test]
fn step_and_ls() {
    let f = "init=0; toggles=0,1";
    assert_eq!(machine(&["stepfn", "eval", "--f", f, "--t", "1/2"]), "1");
    assert_eq!(machine(&["stepfn", "eval", "--f", f, "--t", "1"]), "1");
    assert_eq!(machine(&["stepfn", "eval", "--f", f, "--t", "0"]), "0");
    assert_eq!(machine(&["ls", "eval", "--f", f, "--set", "[1/2,2)"]), "1");
    assert_eq!(machine(&["ls", "eval", "--f", f, "--set", "[-1,2)"]), "0");
    assert_eq!(machine(&["ls", "cdf", "--f", f, "--origin", "-inf", "--emit"]), "init=0; toggles=0,1");
    assert_eq!(machine(&["ls", "cdf", "--f", f, "--origin", "1/2", "--emit"]), "init=1; toggles=0,1");
}

#[test]
fn riemann_primitive_dual() {
    assert_eq!(machine(&["riemann", "--f", "points=0,1/2,3", "--from", "0", "--to", "2"]), "0");
    assert_eq!(machine(&["riemann", "--f", "points=1", "--from", "-inf", "--to", "inf"]), "1");
    assert_eq!(machine(&["primitive", "--f", "points=1,2", "--origin", "0", "--emit"]), "init=0; toggles=1,2");
    assert_eq!(machine(&["dual-riemann", "--zeros", "points=1", "--from", "0", "--to", "2"]), "0");
    assert_eq!(machine(&["dual-riemann", "--zeros", "points=", "--from", "0", "--to", "2"]), "1");
}

#[test]
fn parity_and_derivative() {
    assert_eq!(machine(&["parity", "--H", "points=(0,0),(1,1)", "--set", "[0,2)x[0,2)"]), "0");
    assert_eq!(machine(&["parity", "--H", "points=(0,0),(1,1)", "--set", "[0,1)x[0,1)"]), "1");
    assert_eq!(machine(&["parity", "--H", "lattice scale=1 offset=(0)", "--set", "[0,3)"]), "1");
    assert_eq!(machine(&["deriv", "--H", "lattice scale=1/2 offset=(0,0)", "--x", "(1/2,1)"]), "1");
    assert_eq!(machine(&["deriv", "--H", "points=(0,0)", "--x", "(1/3,0)"]), "0");
}

#[test]
fn catalog_commands() {
    let (code, out, _) = run(&["catalog", "list"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l.starts_with("limit")));
    let (code, out, _) = run(&["catalog", "run", "--case", "seq-3-6"]);
    assert_eq!(code, 0);
    assert!(out.contains("union_value=1 xor_sum=0 countably_additive=0"), "{out}");
    let (code, out, _) = run(&["--depth", "1", "catalog", "run", "--case", "interval-3-13"]);
    assert_eq!(code, 0);
    assert!(out.contains("countably_additive=0"), "{out}");
    assert_eq!(machine(&["catalog", "eval", "--spec", "dirac(1/2)", "--arg", "points=0,1/2"]), "1");
    assert_eq!(machine(&["catalog", "eval", "--spec", "sym_sup()", "--arg", "[0,inf)"]), "1");
    assert_eq!(machine(&["catalog", "eval", "--spec", "limit()", "--arg", "seq tail=1 flips=0"]), "1");
}

#[test]
fn countable_families() {
    let (code, out, _) = run(&["--format", "machine", "setfn", "check-countable", "--measure", "limit()", "--family", "basis"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("1 0"), "{out}");
    let (code, out, _) = run(&["setfn", "check-countable", "--measure", "coord(3)", "--family", "basis"]);
    assert_eq!(code, 0, "{out}");
    // the union of the basis does not converge to 0
    let (code, _, _) = run(&["setfn", "check-countable", "--measure", "seq_xor()", "--family", "basis"]);
    assert_eq!(code, 2);
    let (code, _, err) = run(&["setfn", "check-countable", "--measure", "limit()", "--family", "nope"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown family"));
}

#[test]
fn ring_and_setfn_files() {
    let ring = temp_file("ring.txt", "universe: a b c\n{}\na\nb\na b\n");
    let (code, out, _) = run(&["ring", "check", "--file", ring.to_str().unwrap(), "--laws", "delta-cap"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("= 1"));
    let broken = temp_file("broken.txt", "universe: a b c\n{}\na\nb\n");
    let (code, out, _) = run(&["ring", "check", "--file", broken.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("witness"));
    let tab = temp_file("tab.txt", "universe: a b\n{} = 0\na = 1\nb = 1\na b = 0\n");
    assert_eq!(machine(&["setfn", "check-additive", "--file", tab.to_str().unwrap()]), "1");
    let bad = temp_file("bad.txt", "universe: a b\n{} = 0\na = 1\nb = 1\na b = 1\n");
    let (code, _, _) = run(&["setfn", "check-additive", "--file", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn integrate_spaces() {
    let m = |a: &[&str]| machine(&[&["integrate"][..], a].concat());
    assert_eq!(m(&["--space", "finite", "--measure", "finite_boolean()", "--f", "points=0,1,2"]), "1");
    assert_eq!(m(&["--space", "finite", "--measure", "dirac(1)", "--f", "points=1,3"]), "1");
    assert_eq!(m(&["--space", "finite", "--measure", "finite_boolean()", "--f", "points=0,1/2,3", "--on", "[0,2)"]), "0");
    assert_eq!(m(&["--space", "interval", "--measure", "ls(init=0; toggles=0,1)", "--f", "[1/2,2)"]), "1");
    assert_eq!(m(&["--space", "interval", "--measure", "indefinite(points=0,1)", "--f", "[0,2)"]), "0");
    assert_eq!(m(&["--space", "box", "--measure", "parity(points=(0,0))", "--f", "[0,1)x[0,1)"]), "1");
    let (code, _, err) = run(&["integrate", "--space", "finite", "--measure", "finite_boolean()", "--f", "init=0; toggles=0,1"]);
    assert_eq!(code, 2);
    assert!(err.contains("not measurable"), "{err}");
}

#[test]
fn parse_errors_are_usage_errors() {
    let (code, _, err) = run(&["riemann", "--f", "points=1, 1", "--from", "0", "--to", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("duplicate support point"), "{err}");
    let (code, _, err) = run(&["interval", "op", "--op", "cup", "--a", "[0,1) [2,x)", "--b", "{}"]);
    assert_eq!(code, 2);
    assert!(err.contains("column 10"), "{err}");
    let (code, _, _) = run(&["no-such-command"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["--depth", "0", "verify", "all"]);
    assert_eq!(code, 2);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_binmeasure");
    let ok = Command::new(bin).args(["b2", "table"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let usage = Command::new(bin).args(["stepfn", "eval", "--f", "init=2; toggles=", "--t", "0"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    let fail = Command::new(bin)
        .args(["setfn", "check-countable", "--measure", "limit()", "--family", "basis"])
        .output()
        .unwrap();
    assert_eq!(fail.status.code(), Some(1));
}

#[test]
fn verify_all_small_is_deterministic() {
    let args = ["--format", "machine", "--depth", "8", "--samples", "20", "--seed", "9", "verify", "all"];
    let (c1, a, _) = run(&args);
    let (c2, b, _) = run(&args);
    assert_eq!((c1, c2), (0, 0), "{a}");
    assert_eq!(a, b);
    assert!(a.lines().all(|l| l.starts_with("CHECK ")));
    assert!(a.contains("CHECK AC13 PASS"));
}
