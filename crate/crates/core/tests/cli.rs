use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopmag"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn expand_examples() {
    assert_eq!(
        stdout(&["expand", "x\\1", "--degree", "4"]),
        "1 - x + (x*x) - (x*(x*x)) + (x*(x*(x*x)))\n"
    );
    assert_eq!(stdout(&["expand", "1", "--degree", "3"]), "1\n");
    assert_eq!(
        stdout(&["expand", "(y*x)\\(x*y)", "--degree", "2"]),
        "1 + (x*y) - (y*x)\n"
    );
    assert_eq!(
        stdout(&["expand", "x*y", "--degree", "2", "--vars", "y,x"]),
        "1 + y + x + (x*y)\n"
    );
    assert_eq!(
        stdout(&["expand", "x*x", "--degree", "2", "--prune", "on"]),
        "1 + 2*x\n"
    );
}

#[test]
fn records_dump() {
    assert_eq!(
        stdout(&["expand", "1/x", "--degree", "2", "--format", "records"]),
        "1\t1\t1\nx\t-1\t1\n(x*x)\t1\t1\n"
    );
}

#[test]
fn pop_deviation_taylor() {
    assert_eq!(
        stdout(&["pop", "--r", "1", "--s", "1"]),
        "((x1*y1)*z) - (x1*(y1*z))\n"
    );
    assert_eq!(
        stdout(&["deviation", "--args", "a,b,c", "--idx", ""]),
        "(a*(b*c)) \\ ((a*b)*c)\n"
    );
    assert_eq!(
        stdout(&["deviation", "--args", "a,b,c", "--expand", "--degree", "3"]),
        "1 + ((a*b)*c) - (a*(b*c))\n"
    );
    assert_eq!(
        stdout(&["taylor", "x*y", "--order", "2"]),
        "{x:1, y:1, (x*y):1}\n"
    );
    assert_eq!(
        stdout(&["P", "--m", "1", "--n", "1"]),
        "(x1*(y1*z)) \\ ((x1*y1)*z)\n"
    );
}

#[test]
fn exit_codes() {
    let out = run(&["expand", "x*(y"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("position 4"));
    assert_eq!(run(&["expand", "x", "--vars", "y"]).status.code(), Some(2));
    assert_eq!(
        run(&["expand", "x", "--degree", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["deviation", "--args", "a,b", "--idx", ""])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["verify", "nonsense"]).status.code(), Some(2));
    let refused = run(&["verify", "grancosa", "--m", "9", "--n", "9"]);
    assert_eq!(refused.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&refused.stderr).contains("resource bound"));
}

#[test]
fn verify_suites_exit_zero() {
    let out = stdout(&["verify", "grancosa", "--max-total", "4"]);
    assert!(out
        .lines()
        .last()
        .unwrap()
        .starts_with("grancosa: 6 cases, 6 passed"));
    stdout(&[
        "verify", "axioms", "--degree", "8", "--cases", "100", "--seed", "7",
    ]);
}

#[test]
fn records_repeat_byte_for_byte() {
    let args = [
        "verify",
        "primitive",
        "--cases",
        "12",
        "--format",
        "records",
        "--jobs",
        "2",
    ];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    assert_eq!(a.lines().count(), 12 + 10);
    assert!(a.lines().all(|l| l.contains("\"verdict\":\"pass\"")));
}
