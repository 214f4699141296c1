use std::path::PathBuf;
use std::process::{Command, Output};

fn spec(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "specs", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_delone")).args(args).output().expect("spawn delone")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_exit_codes() {
    let o = run(&["classify", "x^2-x-1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Pisot"));
    let o = run(&["classify", "x^4-x^3-x^2-x+1"]);
    assert!(stdout(&o).starts_with("Salem"));
    assert_eq!(run(&["classify", "x^2-2x"]).status.code(), Some(1));
    assert_eq!(run(&["classify", "x^^2"]).status.code(), Some(1));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_ne!(run(&["frobnicate"]).status.code(), Some(0));
    assert_eq!(run(&["subst", "validate", "/nonexistent.spec"]).status.code(), Some(1));
}

#[test]
fn validate_flags_overlap() {
    let o = run(&["subst", "validate", &spec("fibonacci.spec")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("disjoint: true"));
    let o = run(&["subst", "validate", &spec("overlap.spec")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("disjoint: false"));
    let o = run(&["--mode", "lenient", "subst", "validate", &spec("overlap.spec")]);
    assert_ne!(o.status.code(), Some(1));
}

#[test]
fn report_written_to_out_on_data_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.txt");
    let o = run(&["--out", out.to_str().unwrap(), "subst", "validate", &spec("overlap.spec")]);
    assert_eq!(o.status.code(), Some(2));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("pf_gap"));
}

#[test]
fn every_spec_renders_or_generates() {
    for (name, w) in [("fibonacci.spec", "0,30"), ("binary.spec", "0,30"), ("square.spec", "0,6")] {
        let o = run(&["--window", w, "subst", "generate", &spec(name)]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        assert!(stdout(&o).starts_with("color,"));
        let o = run(&["--window", w, "render", &spec(name)]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        assert!(stdout(&o).starts_with("<svg"));
    }
    let o = run(&["cutproject", "generate", &spec("fibonacci_cp.spec")]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn beta_orbit_from_polynomial() {
    let o = run(&["beta", "orbit", "x^2-2x-1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("orbit: (1,0) (-2,1) (0,0)"));
}

#[test]
fn salem_gate() {
    assert_eq!(run(&["cutproject", "salem", &spec("salem.spec")]).status.code(), Some(0));
    assert_ne!(run(&["cutproject", "salem", "x^2-x-1"]).status.code(), Some(0));
}

#[test]
fn repeated_runs_are_identical() {
    for args in [
        vec!["render", "fibonacci.spec"],
        vec!["subst", "tile", "fibonacci.spec"],
        vec!["dyn", "freq", "fibonacci.spec"],
    ] {
        let mut a: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let last = a.pop().unwrap();
        a.push(spec(&last));
        let a: Vec<&str> = a.iter().map(String::as_str).collect();
        let (x, y) = (run(&a), run(&a));
        assert_eq!(x.stdout, y.stdout, "{args:?}");
        assert_eq!(x.status.code(), y.status.code());
    }
}
