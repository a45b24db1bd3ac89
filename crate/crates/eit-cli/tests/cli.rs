//! End-to-end tests of the eitpol binary: determinism, preset/sweep
//! consistency, exit codes, and non-finite token handling.

use std::process::{Command, Output};

fn eitpol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eitpol"))
        .args(args)
        .output()
        .expect("eitpol runs")
}

/// Parse CSV payload rows (skipping '#' comments and the header row).
fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .map(|l| {
            l.split(',')
                .map(|c| match c {
                    "NaN" => f64::NAN,
                    "inf" => f64::INFINITY,
                    "-inf" => f64::NEG_INFINITY,
                    _ => c.parse().expect("numeric cell"),
                })
                .collect()
        })
        .collect()
}

#[test]
fn output_is_byte_deterministic() {
    for args in [
        vec!["preset", "fig3b"],
        vec!["chi", "--sweep", "d_k:-0.01:0.01:21", "--format", "json"],
        vec!["kinematics"],
    ] {
        let a = eitpol(&args);
        let b = eitpol(&args);
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "non-deterministic output for {args:?}");
    }
}

#[test]
fn fig2_preset_matches_equivalent_sweep() {
    let preset = eitpol(&["preset", "fig2"]);
    assert!(preset.status.success());
    let preset_rows = csv_rows(&String::from_utf8_lossy(&preset.stdout));
    assert_eq!(preset_rows.len(), 401);

    let cfg = std::env::temp_dir().join("eitpol_fig2_equiv.cfg");
    std::fs::write(&cfg, "density_ratio = 1.5\n").unwrap();
    let sweep = eitpol(&[
        "groupvel",
        "--sweep",
        "delta_d:0:-400:401",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert!(sweep.status.success(), "{}", String::from_utf8_lossy(&sweep.stderr));
    let sweep_rows = csv_rows(&String::from_utf8_lossy(&sweep.stdout));
    assert_eq!(sweep_rows.len(), 401);

    // preset columns: delta_d, v_d, vg(N=0.6), vg(N=1.0), vg(N=1.5)
    // sweep columns: delta_d (axis), delta_d, v_d, vg(N=1.5)
    for (p, s) in preset_rows.iter().zip(&sweep_rows) {
        assert!((p[0] - s[0]).abs() <= 1e-12 * p[0].abs().max(1.0));
        assert!(
            (p[4] - s[3]).abs() <= 1e-12 * p[4].abs().max(1.0),
            "vg mismatch at delta_d = {}: {} vs {}",
            p[0],
            p[4],
            s[3]
        );
    }
}

#[test]
fn exit_codes_follow_error_classes() {
    // unknown config key -> 2
    let cfg = std::env::temp_dir().join("eitpol_bad_key.cfg");
    std::fs::write(&cfg, "no_such_key = 1\n").unwrap();
    let r = eitpol(&["chi", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2), "{}", String::from_utf8_lossy(&r.stderr));

    // malformed sweep spec -> 2
    let r = eitpol(&["chi", "--sweep", "d_k:0:1"]);
    assert_eq!(r.status.code(), Some(2));

    // more than two sweep axes -> 2
    let r = eitpol(&[
        "chi", "--sweep", "d_k:0:1:3", "--sweep", "d_omega:0:1:3", "--sweep", "delta_d:0:1:3",
    ]);
    assert_eq!(r.status.code(), Some(2));

    // model incompatible with the medium -> 2
    let cfg = std::env::temp_dir().join("eitpol_beam.cfg");
    std::fs::write(&cfg, "medium = beam\nbeam_velocity = 1\n").unwrap();
    let r = eitpol(&["chi", "--model", "residue", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2), "{}", String::from_utf8_lossy(&r.stderr));

    // unreadable config file -> 4
    let r = eitpol(&["chi", "--config", "/no/such/file.cfg"]);
    assert_eq!(r.status.code(), Some(4));
}

#[test]
fn non_finite_values_render_as_tokens_without_aborting() {
    // density_ratio = 0 is an empty medium: the resonance group velocity is
    // infinite. The run must succeed, emit a token, and warn on stderr.
    let r = eitpol(&["groupvel", "--sweep", "density_ratio:0:1:3"]);
    assert!(r.status.success());
    let text = String::from_utf8_lossy(&r.stdout);
    assert!(text.lines().any(|l| !l.starts_with('#') && l.contains("inf")));
    assert!(String::from_utf8_lossy(&r.stderr).contains("non-finite"));

    let rj = eitpol(&["groupvel", "--sweep", "density_ratio:0:1:3", "--format", "json"]);
    assert!(rj.status.success());
    assert!(String::from_utf8_lossy(&rj.stdout).contains("\"inf\""));
}

#[test]
fn kinematics_writes_one_file_per_section() {
    let dir = std::env::temp_dir().join("eitpol_kin_out");
    std::fs::create_dir_all(&dir).unwrap();
    let base = dir.join("run.csv");
    let r = eitpol(&["kinematics", "--out", base.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    for suffix in ["omega", "vg", "trajectory", "snapshots"] {
        let path = dir.join(format!("run_{suffix}.csv"));
        let text = std::fs::read_to_string(&path).expect("section file exists");
        assert!(!csv_rows(&text).is_empty(), "{suffix} has rows");
    }
}
