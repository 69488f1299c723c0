use std::process::Command;

fn run(args: &[&str]) -> (Option<i32>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_multiconn")).args(args).output().unwrap();
    (out.status.code(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn success_is_zero() {
    let (code, _) = run(&["outage", "--combiner", "jd", "--combiner", "sc", "--snr-db-range", "0:10:3"]);
    assert_eq!(code, Some(0));
}

#[test]
fn validation_errors_exit_two() {
    assert_eq!(run(&["outage", "--combiner", "bogus"]).0, Some(2));
    assert_eq!(run(&["gain", "--rate-range", "-1:2:3"]).0, Some(2));
    assert_eq!(run(&["outage", "--preset", "fig3a"]).0, Some(2));
}

#[test]
fn missing_trace_exits_four_and_names_the_file() {
    let (code, err) = run(&["cdf", "--trace", "/nonexistent/trace.csv"]);
    assert_eq!(code, Some(4));
    assert!(err.contains("/nonexistent/trace.csv"), "{err}");
}

#[test]
fn perturbed_selftest_exits_three() {
    assert_eq!(run(&["selftest"]).0, Some(0));
    assert_eq!(run(&["selftest", "--perturb-asymptote", "1.1"]).0, Some(3));
}
