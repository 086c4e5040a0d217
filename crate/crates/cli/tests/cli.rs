use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ambc-noma"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn empty_config_matches_no_config() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.cfg", "# nothing set\n\n");
    let a = run(&["point", "--engines", "riemann,gc"]);
    let b = run(&["point", "--engines", "riemann,gc", "--config", &empty]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).starts_with("gamma_db,engine,scheme,bler_near,bler_far,"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            "unknown.cfg",
            "speed_kmh = 70\nwarp = 9\n",
            "line 2, column 1",
        ),
        ("syntax.cfg", "beta =   abc\n", "line 1, column 10"),
        ("power.cfg", "a_N = 0.6\n", "a_F > a_N violated"),
        ("short.cfg", "L_sC = 50\n", "blocklength must exceed 100"),
    ];
    for (name, text, needle) in cases {
        let path = write(dir.path(), name, text);
        let o = run(&["point", "--engines", "riemann", "--config", &path]);
        assert_eq!(o.status.code(), Some(2), "{name}");
        assert!(stderr(&o).contains(needle), "{name}: {}", stderr(&o));
    }
    let missing = run(&["point", "--config", "/nonexistent/x.cfg"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["sweep", "--axis", "colour", "--values", "1"][..],
        &["sweep", "--axis", "beta", "--values", "0.5,0.2"],
        &[
            "sweep",
            "--axis",
            "gamma_db",
            "--values",
            "1",
            "--engines",
            "abacus",
        ],
        &["point", "--trials", "10"],
        &["point", "--workers", "0"],
        &["frobnicate"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn sweep_writes_ordered_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = run(&[
        "sweep",
        "--axis",
        "gamma_db",
        "--values",
        "0:10:20",
        "--engines",
        "gc,riemann",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    let keys: Vec<(&str, &str)> = rows.iter().map(|r| (r[0], r[1])).collect();
    assert_eq!(
        keys,
        [
            ("0.00000000e0", "riemann"),
            ("0.00000000e0", "gauss-chebyshev"),
            ("1.00000000e1", "riemann"),
            ("1.00000000e1", "gauss-chebyshev"),
            ("2.00000000e1", "riemann"),
            ("2.00000000e1", "gauss-chebyshev"),
        ]
    );
    for r in &rows {
        for v in &r[3..8] {
            let p: f64 = v.parse().unwrap();
            assert!((0.0..=1.0).contains(&p));
        }
    }
    let again = run(&[
        "sweep",
        "--axis",
        "gamma_db",
        "--values",
        "0:10:20",
        "--engines",
        "gc,riemann",
    ]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn monte_carlo_rows_repeat_for_fixed_seed() {
    let args = [
        "point",
        "--engines",
        "mc",
        "--trials",
        "20000",
        "--seed",
        "9",
    ];
    let a = run(&args);
    let b = run(&[&args[..], &["--workers", "3"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains(",monte-carlo,noma,"));
    let oma = run(&[&args[..], &["--scheme", "oma"]].concat());
    assert!(stdout(&oma).contains(",monte-carlo,oma,"));
}

#[test]
fn validate_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "printed.cfg",
        "d_term_mode = as-printed\nomega_e_BN = 0.5\nomega_eps_BN = 0.5\nomega_BN = 1.5\n",
    );
    let out = dir.path().join("v.csv");
    let o = run(&[
        "validate",
        "--config",
        &cfg,
        "--values",
        "20",
        "--trials",
        "200000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let csv = fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("gamma_db,quantity,riemann,gauss_chebyshev,monte_carlo,"));
    assert!(csv
        .lines()
        .any(|l| l.starts_with("2.00000000e1,cdf_") && l.ends_with(",FAIL")));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn validate_far_user_only_grid_passes() {
    let o = run(&["validate", "--values", "10,15", "--trials", "200000"]);
    let text = stdout(&o);
    assert!(text.starts_with("gamma_db,quantity,"));
    for line in text.lines().filter(|l| l.contains(",bler_far,")) {
        assert!(line.ends_with(",PASS"), "{line}");
    }
}
