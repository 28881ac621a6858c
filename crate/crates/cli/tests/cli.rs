use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use backflow_cli::config::{Format, RunConfig, Scenario, Values};
use backflow_cli::presets::{builtin_presets, find_preset};
use backflow_cli::resolve;

const SMALL: &str = r#"
time_axis = { start = 0.0, stop = 2.0, points = 5 }
theta_axis = { points = 4 }
alpha_phi = [1.0, 3.5]
t_max = 2.0
"#;

fn backflow(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_backflow"))
        .current_dir(dir)
        .env_remove("BACKFLOW_THREADS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
        .lines()
        .next()
        .unwrap()
        .to_string()
}

#[test]
fn preset_names_are_stable() {
    let names: Vec<_> = builtin_presets().iter().map(|p| p.name).collect();
    assert_eq!(names, ["fig1", "fig2", "fig3", "fig4", "fig5"]);
}

#[test]
fn presets_carry_the_figure_parameters() {
    let fig2 = find_preset("fig2").unwrap().config;
    assert_eq!(fig2.scenario, Scenario::LeftProb);
    assert_eq!(fig2.etas, [0.0, 0.5, 1.0, 2.0]);
    assert_eq!(fig2.gammas, [0.0, 0.3]);
    let fig3 = find_preset("fig3").unwrap().config;
    assert_eq!(fig3.theta_phi, 1.01 * PI);
    assert_eq!(fig3.state.theta, PI);
    assert_eq!(fig3.gammas, [0.0, 0.1, 0.2]);
    let fig4 = find_preset("fig4").unwrap().config;
    assert_eq!(fig4.alpha_phi.values().len(), 501);
    assert_eq!(find_preset("fig5").unwrap().config.alpha_phi, Values::List(vec![1.0, 1.9, 3.5]));
    for p in builtin_presets() {
        p.config.validate().unwrap();
    }
}

#[test]
fn config_round_trips_through_toml() {
    for p in builtin_presets() {
        let text = p.config.to_toml().unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), p.config, "{}", p.name);
    }
}

#[test]
fn flags_override_config_which_overrides_preset() {
    let c = resolve("fig2", Some("etas = [0.25]\noutput = { format = \"csv\", raw = false }"), Some(Format::Ndjson), true)
        .unwrap();
    assert_eq!(c.etas, [0.25]);
    assert_eq!(c.gammas, [0.0, 0.3]);
    assert_eq!(c.output.format, Format::Ndjson);
    assert!(c.output.raw);
    assert_eq!(resolve("left-prob", None, None, false).unwrap().scenario, Scenario::LeftProb);
}

#[test]
fn bad_configs_are_diagnosed() {
    let unknown = resolve("fig1", Some("gamma = [0.1]"), None, false).unwrap_err();
    assert!(format!("{unknown:#}").contains("gamma"), "{unknown:#}");
    let negative = resolve("fig1", Some("gammas = [-0.1]"), None, false).unwrap_err();
    assert!(format!("{negative:#}").contains("gammas"), "{negative:#}");
    assert!(resolve("fig1", Some("tol = 0.0"), None, false).is_err());
    assert!(resolve("fig1", Some("not toml ["), None, false).is_err());
    assert!(resolve("fig9", None, None, false).is_err());

    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "etas = \"x\"\n").unwrap();
    let out = backflow(dir.path(), &["fig2", "--config", "bad.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bad.toml") && stderr.contains("etas"), "{stderr}");
    let out = backflow(dir.path(), &["nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn every_scenario_writes_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.toml"), SMALL).unwrap();
    let cases: [(&str, &[(&str, &str)]); 5] = [
        ("fig1", &[("fig1.gamma-0.1.csv", "theta,t,j_times_1000")]),
        (
            "fig2",
            &[
                ("fig2.gamma-0.3.csv", "eta,t,P"),
                ("fig2.gamma-0.3.intervals.csv", "eta,t_start,t_end,probability_gain,t_peak"),
            ],
        ),
        (
            "fig3",
            &[
                ("fig3.gamma-0.2.csv", "t,P_plus,P_minus"),
                ("fig3.gamma-0.intervals.csv", "symmetry,t_start,t_end,probability_gain,t_peak"),
            ],
        ),
        ("fig4", &[("fig4.csv", "alpha_phi,fidelity")]),
        (
            "fig5",
            &[
                ("fig5.csv", "alpha_phi,fidelity,backflow_amount,max_interval_gain,interval_count"),
                ("fig5.curves.csv", "alpha_phi,t,P_plus"),
            ],
        ),
    ];
    for (preset, files) in cases {
        let out = backflow(dir.path(), &[preset, "--config", "small.toml"]);
        assert!(out.status.success(), "{preset}: {}", String::from_utf8_lossy(&out.stderr));
        for (file, columns) in files {
            assert_eq!(header(&dir.path().join(file)), *columns, "{file}");
        }
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join(format!("{preset}.manifest.json"))).unwrap())
                .unwrap();
        assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
        assert_eq!(manifest["label"], preset);
        assert!(manifest["files"].as_array().unwrap().len() >= files.len());
    }
    let out = backflow(dir.path(), &["fig1", "--config", "small.toml", "--raw", "--out", "raw/map"]);
    assert!(out.status.success());
    assert_eq!(header(&dir.path().join("raw/map.gamma-0.csv")), "theta,t,j");
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.toml"), SMALL).unwrap();
    for (out, threads) in [("a", "1"), ("b", "3")] {
        let status = backflow(dir.path(), &["fig3", "--config", "small.toml", "--out", out, "--threads", threads]);
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    }
    for suffix in [".gamma-0.csv", ".gamma-0.1.intervals.csv", ".gamma-0.2.csv"] {
        let a = std::fs::read(dir.path().join(format!("a{suffix}"))).unwrap();
        let b = std::fs::read(dir.path().join(format!("b{suffix}"))).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{suffix}");
    }
}

#[test]
fn ndjson_rows_parse() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.toml"), SMALL).unwrap();
    let out = backflow(dir.path(), &["fig4", "--config", "small.toml", "--format", "ndjson"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("fig4.ndjson")).unwrap();
    let rows: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["alpha_phi"], 1.0);
    let f = rows[0]["fidelity"].as_f64().unwrap();
    assert!(f > 0.0 && f < 1.0);
}
