//! End-to-end tests of the `qdiscord` binary: exit codes, file formats,
//! determinism, and the machine-readable report surface.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qdiscord_cli::format::MatrixFile;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qdiscord"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn machine_map(out: &Output) -> BTreeMap<String, String> {
    stdout(out)
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn tmpfile(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_check_pointer_pipeline_for_zero_discord_families() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<(&str, Vec<String>)> = vec![
        ("xstate", vec!["--x".into(), "0.25".into()]),
        (
            "photon",
            vec!["--theta".into(), format!("{}", std::f64::consts::FRAC_PI_4)],
        ),
        ("pointer", vec!["--seed".into(), "11".into()]),
        ("product", vec!["--seed".into(), "12".into()]),
    ];
    for (family, extra) in cases {
        let file = tmpfile(&dir, &format!("{family}.json"));
        let mut args: Vec<String> = vec!["gen".into(), family.into()];
        args.extend(extra);
        args.extend(["--out".into(), path_str(&file).into()]);
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "gen {family}: {out:?}");

        let check = run(&["check", path_str(&file)]);
        assert_eq!(check.status.code(), Some(0), "check {family}: {check:?}");
        assert!(stdout(&check).contains("ZERO quantum discord"));

        let pointer = run(&["pointer", path_str(&file)]);
        assert_eq!(
            pointer.status.code(),
            Some(0),
            "pointer {family}: {pointer:?}"
        );
    }
}

#[test]
fn check_flags_nonzero_discord_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = tmpfile(&dir, "x10.json");
    run(&["gen", "xstate", "--x", "0.1", "--out", path_str(&file)]);

    let check = run(&["check", path_str(&file), "--machine"]);
    assert_eq!(check.status.code(), Some(1));
    let kv = machine_map(&check);
    assert_eq!(kv["is_zero"], "false");
    assert_eq!(kv["step2_pass"], "true");
    assert_eq!(kv["step3_pass"], "false");
    assert_eq!(kv["worst_pair"], "(1,1)x(1,2)");
    let defect: f64 = kv["step3_commutation_defect"].parse().unwrap();
    assert!((defect - 0.7276068751089989).abs() < 1e-9);

    let pointer = run(&["pointer", path_str(&file)]);
    assert_eq!(pointer.status.code(), Some(1));
    assert!(stdout(&pointer).contains("NONZERO"));
}

#[test]
fn malformed_and_invalid_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = tmpfile(&dir, "garbage.json");
    std::fs::write(&garbage, "this is not json").unwrap();
    for cmd in ["check", "pointer"] {
        let out = run(&[cmd, path_str(&garbage)]);
        assert_eq!(out.status.code(), Some(2), "{cmd} on garbage: {out:?}");
    }

    // well-formed JSON, invalid density matrix (negative eigenvalue)
    let invalid = tmpfile(&dir, "invalid.json");
    let mf = MatrixFile {
        dims: (2, 2),
        entries: vec![
            vec![[0.6, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
            vec![[0.0, 0.0], [0.6, 0.0], [0.0, 0.0], [0.0, 0.0]],
            vec![[0.0, 0.0], [0.0, 0.0], [-0.1, 0.0], [0.0, 0.0]],
            vec![[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [-0.1, 0.0]],
        ],
        metadata: BTreeMap::new(),
    };
    mf.save(&invalid).unwrap();
    let out = run(&["check", path_str(&invalid)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("min eigenvalue"), "stderr was: {err}");

    let out = run(&["ancilla", path_str(&garbage), "--ancilla-dim", "2"]);
    assert_eq!(out.status.code(), Some(2));

    let missing = tmpfile(&dir, "missing.json");
    let out = run(&["discord", path_str(&missing), "--method", "grid"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = tmpfile(&dir, "a.json");
    let b = tmpfile(&dir, "b.json");
    for out in [&a, &b] {
        let r = run(&[
            "gen",
            "random",
            "--dim-a",
            "2",
            "--dim-b",
            "3",
            "--seed",
            "7",
            "--out",
            path_str(out),
        ]);
        assert_eq!(r.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let c = tmpfile(&dir, "c.json");
    run(&[
        "gen",
        "random",
        "--dim-a",
        "2",
        "--dim-b",
        "3",
        "--seed",
        "8",
        "--out",
        path_str(&c),
    ]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn photon_at_quarter_pi_matches_xstate_quarter() {
    let dir = tempfile::tempdir().unwrap();
    let photon = tmpfile(&dir, "photon.json");
    let xs = tmpfile(&dir, "xs.json");
    run(&[
        "gen",
        "photon",
        "--theta",
        "0.7853981633974483",
        "--out",
        path_str(&photon),
    ]);
    run(&["gen", "xstate", "--x", "0.25", "--out", path_str(&xs)]);
    let mp = MatrixFile::load(&photon).unwrap().to_matrix().unwrap();
    let mx = MatrixFile::load(&xs).unwrap().to_matrix().unwrap();
    assert!(mp.max_abs_diff(&mx) <= 1e-12);
}

#[test]
fn discord_methods_agree_on_the_x_family() {
    let dir = tempfile::tempdir().unwrap();
    let file = tmpfile(&dir, "x10.json");
    run(&["gen", "xstate", "--x", "0.1", "--out", path_str(&file)]);

    let closed = run(&[
        "discord",
        path_str(&file),
        "--method",
        "closed",
        "--machine",
    ]);
    assert_eq!(closed.status.code(), Some(0));
    let closed_val: f64 = machine_map(&closed)["discord"].parse().unwrap();
    assert!((closed_val - 0.190924).abs() < 1e-6);

    let grid = run(&[
        "discord",
        path_str(&file),
        "--method",
        "grid",
        "--grid-theta",
        "16",
        "--grid-phi",
        "32",
        "--machine",
    ]);
    assert_eq!(grid.status.code(), Some(0));
    let grid_val: f64 = machine_map(&grid)["discord"].parse().unwrap();
    assert!((grid_val - closed_val).abs() < 1e-4);

    // the pointer basis of the x = 0.25 state gives zero in basis mode
    let quarter = tmpfile(&dir, "x25.json");
    run(&["gen", "xstate", "--x", "0.25", "--out", path_str(&quarter)]);
    let basis = run(&[
        "discord",
        path_str(&quarter),
        "--method",
        "basis",
        "--theta",
        "1.5707963267948966",
        "--phi",
        "0",
        "--machine",
    ]);
    assert_eq!(basis.status.code(), Some(0));
    let basis_val: f64 = machine_map(&basis)["discord"].parse().unwrap();
    assert!(basis_val.abs() <= 1e-9);
}

#[test]
fn discord_grid_on_bell_state_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = tmpfile(&dir, "bell.json");
    run(&["gen", "bell", "--out", path_str(&file)]);
    let out = run(&[
        "discord",
        path_str(&file),
        "--method",
        "grid",
        "--grid-theta",
        "16",
        "--grid-phi",
        "32",
        "--machine",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let value: f64 = machine_map(&out)["discord"].parse().unwrap();
    assert!((value - 1.0).abs() <= 1e-6, "bell discord {value}");
}

#[test]
fn gen_rejects_bad_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let file = tmpfile(&dir, "bad.json");
    let out = run(&["gen", "xstate", "--x", "0.7", "--out", path_str(&file)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!file.exists());

    let out = run(&[
        "gen",
        "random",
        "--dim-a",
        "2",
        "--dim-b",
        "2",
        "--rank",
        "9",
        "--out",
        path_str(&file),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pointer_of_x_zero_prints_the_computational_basis() {
    let dir = tempfile::tempdir().unwrap();
    let file = tmpfile(&dir, "x0.json");
    run(&["gen", "xstate", "--x", "0", "--out", path_str(&file)]);
    let out = run(&["pointer", path_str(&file)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(
        text.contains("+1.000000+0.000000i"),
        "expected computational-basis kets, got:\n{text}"
    );
}

#[test]
fn discord_closed_rejects_foreign_families() {
    let dir = tempfile::tempdir().unwrap();
    let file = tmpfile(&dir, "bell.json");
    run(&["gen", "bell", "--out", path_str(&file)]);
    let out = run(&["discord", path_str(&file), "--method", "closed"]);
    assert_eq!(out.status.code(), Some(2));

    let basis_missing_args = run(&["discord", path_str(&file), "--method", "basis"]);
    assert_eq!(basis_missing_args.status.code(), Some(2));
}

#[test]
fn sweep_reproduces_the_x_family_structure() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = tmpfile(&dir, "sweep.csv");
    let out = run(&[
        "sweep",
        "--points",
        "101",
        "--out",
        path_str(&csv_path),
        "--grid-theta",
        "16",
        "--grid-phi",
        "32",
        "--refine",
        "30",
        "--machine",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let kv = machine_map(&out);
    assert_eq!(kv["rows"], "101");
    assert_eq!(kv["zero_rows"], "3");

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "x,closed_form_discord,grid_discord,criterion_is_zero,normality_defect,commutation_defect,disturbance_min"
    );
    let mut zero_xs = Vec::new();
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 7, "bad row: {line}");
        let x: f64 = cols[0].parse().unwrap();
        let closed: f64 = cols[1].parse().unwrap();
        let grid: f64 = cols[2].parse().unwrap();
        let is_zero: bool = cols[3].parse().unwrap();
        let disturbance: f64 = cols[6].parse().unwrap();
        assert!(
            (closed - grid).abs() <= 1e-4,
            "x = {x}: closed {closed} vs grid {grid}"
        );
        assert_eq!(
            disturbance <= 1e-6,
            is_zero,
            "x = {x}: disturbance {disturbance:.3e} vs criterion {is_zero}"
        );
        if is_zero {
            zero_xs.push(x);
        }
    }
    assert_eq!(zero_xs.len(), 3);
    assert!((zero_xs[0] - 0.0).abs() < 1e-15);
    assert!((zero_xs[1] - 0.25).abs() < 1e-15);
    assert!((zero_xs[2] - 0.5).abs() < 1e-15);
}

#[test]
fn sweep_rejects_too_few_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "sweep",
        "--points",
        "2",
        "--out",
        path_str(&tmpfile(&dir, "s.csv")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ancilla_agrees_for_both_verdict_classes() {
    let dir = tempfile::tempdir().unwrap();
    for (x, expect_zero) in [("0.1", false), ("0.25", true)] {
        let file = tmpfile(&dir, &format!("x{x}.json"));
        run(&["gen", "xstate", "--x", x, "--out", path_str(&file)]);
        for dim in ["2", "3"] {
            let out = run(&[
                "ancilla",
                path_str(&file),
                "--ancilla-dim",
                dim,
                "--seed",
                "5",
                "--machine",
            ]);
            assert_eq!(out.status.code(), Some(0), "x={x} dim={dim}: {out:?}");
            let kv = machine_map(&out);
            assert_eq!(kv["agree"], "true");
            assert_eq!(kv["base_is_zero"], format!("{expect_zero}"));
            assert_eq!(kv["extended_is_zero"], format!("{expect_zero}"));
        }
    }
}

#[test]
fn pointer_machine_output_carries_the_unitary() {
    let dir = tempfile::tempdir().unwrap();
    let file = tmpfile(&dir, "x25.json");
    run(&["gen", "xstate", "--x", "0.25", "--out", path_str(&file)]);
    let out = run(&["pointer", path_str(&file), "--machine"]);
    assert_eq!(out.status.code(), Some(0));
    let kv = machine_map(&out);
    assert_eq!(kv["is_zero"], "true");
    let r = 1.0 / 2.0_f64.sqrt();
    for key in ["U[0][0]", "U[0][1]", "U[1][0]", "U[1][1]"] {
        let parts: Vec<f64> = kv[key]
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        let modulus = (parts[0].powi(2) + parts[1].powi(2)).sqrt();
        assert!((modulus - r).abs() < 1e-12, "{key} = {}", kv[key]);
    }
    let residual: f64 = kv["residual"].parse().unwrap();
    assert!(residual <= 1e-12);
    // coefficient table rows are present with 1-based labels
    assert!(kv.contains_key("C[1][1][1]"));
    assert!(kv.contains_key("C[2][2][2]"));
}

#[test]
fn check_report_is_also_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let state = tmpfile(&dir, "x.json");
    let report = tmpfile(&dir, "report.txt");
    run(&["gen", "xstate", "--x", "0.25", "--out", path_str(&state)]);
    let out = run(&["check", path_str(&state), "--out", path_str(&report)]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("ZERO quantum discord"));
}
