use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"
seed = 5
sim.duration = 6.0
sim.transient = 2.0
reservoir.M = 60
reservoir.washout = 500
control.sync = 1.0
control.tau = 0.2
"#;

fn resdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resdist")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, experiment: &str, extra: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, format!("experiment = \"{experiment}\"\n{SMALL}\n{extra}")).unwrap();
    path.to_str().unwrap().to_string()
}

fn nrmse(dir: &Path) -> Vec<f64> {
    let text = fs::read_to_string(dir.join("summary.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["nrmse"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn identify_then_rerun_manifest_is_bit_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "id.toml", "identify", "");
    let first = tmp.path().join("first");
    let o = resdist(&["identify", "--config", &cfg, "--out", first.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let second = tmp.path().join("second");
    let manifest = first.join("manifest.toml");
    let o = resdist(&[
        "identify",
        "--config",
        manifest.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    for entry in fs::read_dir(&first).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(
            fs::read(first.join(&name)).unwrap(),
            fs::read(second.join(&name)).unwrap(),
            "{name:?}"
        );
    }
}

#[test]
fn seed_override_changes_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "id.toml", "identify", "");
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(
        code(&resdist(&["identify", "--config", &cfg, "--out", a.to_str().unwrap()])),
        0
    );
    assert_eq!(
        code(&resdist(&[
            "identify",
            "--config",
            &cfg,
            "--out",
            b.to_str().unwrap(),
            "--seed",
            "6"
        ])),
        0
    );
    assert_ne!(
        fs::read(a.join("estimate.csv")).unwrap(),
        fs::read(b.join("estimate.csv")).unwrap()
    );
    assert!(fs::read_to_string(b.join("manifest.toml"))
        .unwrap()
        .contains("seed = 6"));
}

#[test]
fn external_round_trip_reproduces_in_process_nrmse() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "id.toml", "identify", "");
    let run = tmp.path().join("run");
    assert_eq!(
        code(&resdist(&[
            "identify",
            "--config",
            &cfg,
            "--out",
            run.to_str().unwrap()
        ])),
        0
    );

    let ext = write_config(
        tmp.path(),
        "ext.toml",
        "identify-external",
        r#"
        [external]
        training_observations = "run/training_observations.csv"
        training_forcing = "run/training_forcing.csv"
        observations = "run/observations.csv"
        disturbance = "run/disturbance.csv"
        "#,
    );
    let out = tmp.path().join("ext");
    let o = resdist(&["identify-external", "--config", &ext, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let direct = nrmse(&run);
    let replay = nrmse(&out);
    assert_eq!(direct.len(), 2);
    for (a, b) in direct.iter().zip(&replay) {
        assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
    }
    assert!(out.join("estimate_filtered.csv").exists());
}

#[test]
fn shuffled_rows_are_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "id.toml", "identify", "");
    let run = tmp.path().join("run");
    assert_eq!(
        code(&resdist(&[
            "identify",
            "--config",
            &cfg,
            "--out",
            run.to_str().unwrap()
        ])),
        0
    );
    let text = fs::read_to_string(run.join("observations.csv")).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.swap(10, 20);
    fs::write(tmp.path().join("shuffled.csv"), lines.join("\n")).unwrap();

    let ext = write_config(
        tmp.path(),
        "ext.toml",
        "identify-external",
        r#"
        [external]
        training_observations = "run/training_observations.csv"
        training_forcing = "run/training_forcing.csv"
        observations = "shuffled.csv"
        "#,
    );
    let o = resdist(&[
        "identify-external",
        "--config",
        &ext,
        "--out",
        tmp.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid"));
}

#[test]
fn config_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let out = out.to_str().unwrap();
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "experiment = \"identify\"\nreservoir.lambda = -1.0\n").unwrap();
    assert_eq!(
        code(&resdist(&["identify", "--config", bad.to_str().unwrap(), "--out", out])),
        2
    );

    let cfg = write_config(tmp.path(), "sweep.toml", "sweep", "");
    assert_eq!(code(&resdist(&["identify", "--config", &cfg, "--out", out])), 2);
    assert_eq!(
        code(&resdist(&["identify", "--config", "/nonexistent.toml", "--out", out])),
        2
    );
}

#[test]
fn divergent_suppression_exits_with_three() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "sup.toml",
        "suppress",
        "control.scheme = \"simple\"\ncontrol.alpha = 10000.0\n",
    );
    let out = tmp.path().join("o");
    let o = resdist(&["suppress", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("loop.csv").exists());
    assert!(out.join("manifest.toml").exists());
}

#[test]
fn stable_suppression_exits_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "sup.toml", "suppress", "control.alpha = 2.0\n");
    let out = tmp.path().join("o");
    let o = resdist(&["suppress", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let header = fs::read_to_string(out.join("loop.csv")).unwrap();
    assert!(header.starts_with("t,x,y,z,u_x,u_y,v_x,v_y,g_x,g_y\n"));
}
