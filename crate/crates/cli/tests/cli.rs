//! End-to-end tests of the command-line interface: output schema, exit
//! codes, determinism, and the environment thread override.

use std::process::{Command, Output};

fn polygpt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polygpt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn info_describes_system() {
    let out = polygpt(&["info", "--n", "8"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("family:        selfdual"));
    assert!(text.contains("scheme:        unit-radius"));
    assert!(text.contains("n mod 8:       0"));
    assert!(text.contains("states (8):"));
}

#[test]
fn chsh_max_gbit_reaches_one() {
    let out = polygpt(&["chsh-max", "--n", "4", "--family", "unrestricted"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "family,scheme,n,n_mod_8,tensor,marginal_constraints,p_win,gap_to_quantum,\
         certificate_gap,argmax_effect_indices,wall_time_ms"
    );
    let row = lines.next().unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[0], "unrestricted");
    assert_eq!(fields[2], "4");
    assert_eq!(fields[6], "1");
    assert!(lines.next().is_none());
}

#[test]
fn sweep_csv_has_expected_rows_and_anchor() {
    let out = polygpt(&["sweep", "--n-min", "3", "--n-max", "10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 9, "header plus 8 rows");
    let n8: Vec<&str> = lines[6].split(',').collect();
    assert_eq!(n8[2], "8");
    assert_eq!(n8[3], "0");
    assert_eq!(n8[6], "0.853553390593");
    // Certificate gaps are always emitted and tiny.
    for row in &lines[1..] {
        let gap: f64 = row.split(',').nth(8).unwrap().parse().unwrap();
        assert!(gap <= 1e-8);
    }
}

#[test]
fn sweep_output_is_deterministic_modulo_walltime() {
    let strip = |text: &str| -> Vec<String> {
        text.lines()
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                let last = f.len() - 1;
                f[last] = "-"; // wall_time_ms is a diagnostic, not a result
                f.join(",")
            })
            .collect()
    };
    let a = polygpt(&["sweep", "--n-min", "3", "--n-max", "8"]);
    let b = polygpt(&["sweep", "--n-min", "3", "--n-max", "8"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(strip(&stdout(&a)), strip(&stdout(&b)));
}

#[test]
fn json_carries_full_state_matrix() {
    let out = polygpt(&["chsh-max", "--n", "5", "--format", "json"]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let row = &rows.as_array().unwrap()[0];
    assert_eq!(row["n"], 5);
    assert_eq!(row["scheme"], "unit-radius");
    let w = row["argmax_state_w"].as_array().unwrap();
    assert_eq!(w.len(), 3);
    assert_eq!(w[0].as_array().unwrap().len(), 3);
    assert!((row["p_win"].as_f64().unwrap() - 0.8354101966).abs() < 1e-9);
    assert_eq!(row["argmax_effect_indices"].as_array().unwrap().len(), 4);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let to_file = polygpt(&[
        "chsh-max",
        "--n",
        "6",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(to_file.status.success());
    assert!(stdout(&to_file).is_empty());
    let direct = polygpt(&["chsh-max", "--n", "6"]);
    let written = std::fs::read_to_string(&path).unwrap();
    // Identical up to the wall-time column.
    let chop = |s: &str| {
        s.lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect::<Vec<_>>()
    };
    assert_eq!(chop(&written), chop(&stdout(&direct)));
}

#[test]
fn adaptive_classical_prints_three_quarters() {
    let out = polygpt(&["adaptive", "--theory", "classical"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("value:   0.75"));
    assert!(text.contains("optimal strategy"));
}

#[test]
fn adaptive_quantum_prints_target() {
    let out = polygpt(&["adaptive", "--theory", "quantum"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("value:   0.853553390593"));
    assert!(text.contains("Bell outcome"));
}

#[test]
fn adaptive_boxworld_is_classical() {
    let out = polygpt(&["adaptive", "--theory", "boxworld"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("value:   0.75"));
}

#[test]
fn usage_errors_exit_two() {
    let bad_flag = polygpt(&["sweep", "--bogus"]);
    assert_eq!(bad_flag.status.code(), Some(2));
    let bad_range = polygpt(&["sweep", "--n-min", "9", "--n-max", "4"]);
    assert_eq!(bad_range.status.code(), Some(2));
    let bad_subcommand = polygpt(&["frobnicate"]);
    assert_eq!(bad_subcommand.status.code(), Some(2));
}

#[test]
fn computation_errors_exit_three() {
    let out = polygpt(&["chsh-max", "--n", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("computation error"));
}

#[test]
fn thread_env_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_polygpt"))
        .env("POLYGPT_THREADS", "1")
        .args(["chsh-max", "--n", "5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let bad = Command::new(env!("CARGO_BIN_EXE_polygpt"))
        .env("POLYGPT_THREADS", "zero")
        .args(["chsh-max", "--n", "5"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
