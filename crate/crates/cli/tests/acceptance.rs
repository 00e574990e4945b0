//! Acceptance criterion 8: every report-producing command behind criteria
//! 1 through 7 emits byte-identical reports across repeated runs and
//! across thread counts one and four.

use std::process::Command;
use std::time::Instant;

fn run_report(args: &[&str], threads: &str) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_cpa"))
        .args(args)
        .args(["--threads", threads])
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

#[test]
fn criterion_8_determinism() {
    let started = Instant::now();
    // One representative report per criterion, including the heavy
    // stability case; each runs twice on one thread and once on four.
    let commands: Vec<(&str, Vec<&str>)> = vec![
        (
            "dim (criterion 1)",
            vec!["dim", "--n", "3", "--group", "trivial"],
        ),
        (
            "verify algebra (criterion 2)",
            vec![
                "verify", "--suite", "algebra", "--n", "2", "--group", "C:2", "--delta", "2",
                "--coeff", "Z", "--seed", "42",
            ],
        ),
        (
            "verify lemmas (criterion 3)",
            vec![
                "verify", "--suite", "lemmas", "--n", "2", "--group", "C:2", "--delta", "2",
                "--coeff", "F:3",
            ],
        ),
        (
            "verify cover (criterion 4)",
            vec![
                "verify", "--suite", "cover", "--n", "3", "--group", "C:2", "--height", "2",
                "--coeff", "Z",
            ],
        ),
        (
            "wreath homology (criterion 5)",
            vec![
                "homology", "--side", "wreath", "--n", "2", "--group", "trivial", "--coeff", "Z",
                "--max-q", "3",
            ],
        ),
        (
            "stability n=2 (criterion 6)",
            vec![
                "stability",
                "--n",
                "2",
                "--group",
                "C:2",
                "--delta",
                "1",
                "--coeff",
                "Z",
                "--max-q",
                "1",
            ],
        ),
        (
            "stability n=3 F2 (criterion 6)",
            vec![
                "stability",
                "--n",
                "3",
                "--group",
                "trivial",
                "--delta",
                "1",
                "--coeff",
                "F:2",
                "--max-q",
                "2",
            ],
        ),
        (
            "stability n=3 F3 (criterion 6)",
            vec![
                "stability",
                "--n",
                "3",
                "--group",
                "trivial",
                "--delta",
                "1",
                "--coeff",
                "F:3",
                "--max-q",
                "2",
            ],
        ),
        (
            "corollary inclusion map (criterion 7)",
            vec![
                "stability",
                "--n",
                "3",
                "--group",
                "trivial",
                "--delta",
                "1",
                "--coeff",
                "F:2",
                "--max-q",
                "1",
                "--corollary",
            ],
        ),
    ];

    let mut pass = true;
    for (label, args) in &commands {
        let first = run_report(args, "1");
        let second = run_report(args, "1");
        let threaded = run_report(args, "4");
        if first != second {
            eprintln!("{label}: two single-thread runs differ");
            pass = false;
        }
        if first != threaded {
            eprintln!("{label}: one vs four threads differ");
            pass = false;
        }
    }

    println!(
        "acceptance criterion 8 (byte-identical reports): {} ({:?})",
        if pass { "PASS" } else { "FAIL" },
        started.elapsed()
    );
    assert!(pass);
}
