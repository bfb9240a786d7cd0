use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cyclic-shuffle"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("spawn");
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn brute_golden_files() {
    for kind in ["card", "pos", "insertion"] {
        let (code, stdout, _) = run(&["brute", "--kind", kind, "--n", "3"]);
        assert_eq!(code, 0);
        let golden = std::fs::read_to_string(format!("{}/tests/golden/brute_{kind}_3.txt", env!("CARGO_MANIFEST_DIR"))).unwrap();
        assert_eq!(stdout, golden, "{kind}");
        let (_, evolved, _) = run(&["evolve", "--kind", kind, "--n", "3"]);
        assert_eq!(evolved, golden, "{kind}");
    }
}

#[test]
fn resource_guard_exit_code() {
    let (code, stdout, stderr) = run(&["brute", "--kind", "card", "--n", "9"]);
    assert_eq!(code, 3);
    assert!(stdout.is_empty());
    assert!(stderr.contains("resource limit"), "{stderr}");
    let (code, _, _) = run(&["evolve", "--kind", "pos", "--n", "12"]);
    assert_eq!(code, 3);
}

#[test]
fn invalid_arguments_exit_code() {
    assert_eq!(run(&["brute", "--kind", "shuffle", "--n", "3"]).0, 2);
    assert_eq!(run(&["marginal", "--kind", "card"]).0, 2);
    assert_eq!(run(&["marginal", "--kind", "card", "--n", "3", "--j", "4", "--a", "1"]).0, 2);
    assert_eq!(run(&["density", "--which", "f_card", "--b", "1.5"]).0, 2);
    assert_eq!(run(&["converge", "--kind", "card", "--b", "0.5", "--x", "0.5"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
}

#[test]
fn density_csv_contract() {
    let (code, stdout, _) = run(&["density", "--which", "f_card", "--b", "0.25", "--grid", "1000"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.split('\n').collect();
    assert_eq!(lines[0], "t,density");
    // header + 1001 rows + trailing empty after the final LF
    assert_eq!(lines.len(), 1003);
    assert!(!stdout.contains('\r'));
}

#[test]
fn tvbound_prints_value_and_argmax() {
    let (code, stdout, _) = run(&["tvbound"]);
    assert_eq!(code, 0);
    let row = stdout.lines().nth(1).unwrap();
    let fields: Vec<f64> = row.split(',').map(|s| s.parse().unwrap()).collect();
    assert!((fields[0] - 0.08).abs() <= 5e-3);
    assert!(fields[1] >= 0.0 && fields[1] <= 1.0);
}

#[test]
fn outputs_are_byte_identical_and_thread_independent() {
    let cases: [&[&str]; 4] = [
        &["sample", "--kind", "pos", "--n", "50", "--samples", "20000", "--seed", "3"],
        &["sample", "--kind", "card", "--n", "30", "--j", "7", "--samples", "20000"],
        &["converge", "--kind", "card", "--b", "0.25", "--x", "0.75", "--mode", "mc", "--n-list", "20,40", "--samples", "5000"],
        &["stats", "--kind", "pos", "--n", "6"],
    ];
    for args in cases {
        let first = run(args).1;
        assert!(!first.is_empty());
        for threads in ["1", "4", "16"] {
            let mut a = vec!["--threads", threads];
            a.extend_from_slice(args);
            assert_eq!(run(&a).1, first, "{args:?} threads={threads}");
        }
        let out = bin().args(args).env("CYCLIC_SHUFFLE_THREADS", "2").output().unwrap();
        assert_eq!(String::from_utf8(out.stdout).unwrap(), first);
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    let (code, stdout, _) = run(&["marginal", "--kind", "pos", "--n", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("j\\a,1,2,3,4\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn sample_outputs_carry_provenance() {
    let (_, stdout, _) = run(&["--format", "json", "sample", "--kind", "insertion", "--n", "5", "--samples", "1000", "--seed", "17"]);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["kind"], "insertion");
    assert_eq!(v["seed"], 17);
    assert_eq!(v["samples"], 1000);
    let (_, csv, _) = run(&["sample", "--uniform", "--n", "5", "--samples", "1000"]);
    assert!(csv.starts_with("# kind=uniform n=5 samples=1000 seed="));
}
