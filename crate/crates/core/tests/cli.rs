use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn wpbdd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wpbdd"))
        .args(args)
        .output()
        .expect("run wpbdd")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn encode_matches_golden() {
    let ex = data("example.json");
    let o = wpbdd(&["encode", path(&ex)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("example.encode.golden"));
}

#[test]
fn query_example() {
    let ex = data("example.json");
    let o = wpbdd(&["query", path(&ex), "--target", "b=3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "P(b=3) = 0.4\n");
    let o = wpbdd(&["query", path(&ex), "--target", "a=2", "--evidence", "b=1"]);
    assert_eq!(stdout(&o), "P(a=2 | b=1) = 0.5\n");
}

#[test]
fn query_all_matches_golden_and_oracle() {
    let csi = data("csi.json");
    let o = wpbdd(&["query", path(&csi), "--all", "--evidence", "grass=wet"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text, golden("csi.query.golden"));

    let net = wpbdd::load_network(&std::fs::read(&csi).unwrap()).unwrap();
    let grass = net.var_index("grass").unwrap();
    let wet = net.value_index(grass, "wet").unwrap();
    let mut lines = text.lines();
    for (v, var) in net.variables().iter().enumerate() {
        for x in 0..var.domain_size() {
            let p = wpbdd::infer::brute_force_query(&net, (v, x), &[(grass, wet)]).unwrap();
            let line = lines.next().unwrap();
            let shown: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
            assert!((shown - p).abs() < 1e-11, "{line} vs {p}");
        }
    }
}

#[test]
fn compare_matches_golden() {
    let o = wpbdd(&[
        "compare",
        path(&data("example.json")),
        path(&data("csi.json")),
        path(&data("deterministic.json")),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("compare.golden"));
}

#[test]
fn compile_dumps_canonical_diagram() {
    let dir = tempfile::tempdir().unwrap();
    let ex = data("example.json");
    for mode in ["full", "hybrid"] {
        let out = dir.path().join(format!("{mode}.txt"));
        let o = wpbdd(&["compile", path(&ex), "--mode", mode, "--dump-diagram", path(&out)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).contains("nodes: 3\n"));
        assert_eq!(std::fs::read_to_string(&out).unwrap(), golden("example.diagram.golden"));
    }
    let o = wpbdd(&["compile", path(&ex), "--no-collapse"]);
    assert!(stdout(&o).contains("nodes: 5\n"));
}

#[test]
fn compile_with_order_file() {
    let dir = tempfile::tempdir().unwrap();
    let order = dir.path().join("order.txt");
    std::fs::write(&order, "b\na\n").unwrap();
    let order_arg = format!("file:{}", path(&order));
    let o = wpbdd(&["compile", path(&data("example.json")), "--order", &order_arg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("order: b a\n"));

    std::fs::write(&order, "b\nz\n").unwrap();
    let o = wpbdd(&["compile", path(&data("example.json")), "--order", &order_arg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("UnknownVariable"));
}

#[test]
fn output_is_deterministic() {
    let net = data("csi.json");
    let args = ["anneal", path(&net), "--seed", "9", "--budget", "30"];
    let a = wpbdd(&args);
    let b = wpbdd(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let args = ["compile", path(&net), "--order", "anneal", "--seed", "4", "--budget", "20", "--stats"];
    assert_eq!(wpbdd(&args).stdout, wpbdd(&args).stdout);
}

#[test]
fn timings_go_to_stderr_only() {
    let ex = data("example.json");
    let plain = wpbdd(&["query", path(&ex), "--target", "b=3"]);
    let timed = wpbdd(&["--timings", "query", path(&ex), "--target", "b=3"]);
    assert_eq!(plain.stdout, timed.stdout);
    assert!(stderr(&timed).contains("time compile:"));
    assert!(stderr(&plain).is_empty());
}

#[test]
fn exit_codes() {
    let ex = data("example.json");
    assert_eq!(wpbdd(&["--version"]).status.code(), Some(0));
    assert_eq!(wpbdd(&[]).status.code(), Some(1));
    assert_eq!(wpbdd(&["query", path(&ex)]).status.code(), Some(1));
    assert_eq!(wpbdd(&["query", path(&ex), "--target", "b"]).status.code(), Some(1));
    assert_eq!(wpbdd(&["compile", path(&ex), "--order", "random"]).status.code(), Some(1));
    assert_eq!(wpbdd(&["anneal", path(&ex), "--seed", "1", "--budget", "0"]).status.code(), Some(1));

    let o = wpbdd(&["query", path(&ex), "--target", "b=7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("UnknownAtom"));

    let dir = tempfile::tempdir().unwrap();
    let cyclic = dir.path().join("cyclic.json");
    std::fs::write(
        &cyclic,
        r#"{"variables":[{"name":"a","values":["t","f"]},{"name":"b","values":["t","f"]}],
           "cpts":[{"child":"a","parents":["b"],"table":[0.5,0.5,0.5,0.5]},
                   {"child":"b","parents":["a"],"table":[0.5,0.5,0.5,0.5]}]}"#,
    )
    .unwrap();
    let o = wpbdd(&["encode", path(&cyclic)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("CycleError"));

    let det = data("deterministic.json");
    let o = wpbdd(&["query", path(&det), "--target", "sensor=low", "--evidence", "switch=off,lamp=dim"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ZeroEvidence"));
}
