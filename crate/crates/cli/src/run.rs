//! Scenario drivers: evaluate a resolved [`RunConfig`] and write its tables.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use ck_backflow::analysis::{
    current_sign_map, fidelity_backflow_scan, one_particle_intervals, two_particle_intervals, BackflowInterval,
    FidelityScanBase,
};
use ck_backflow::dynamics::{left_probability, CkParams, Method};
use ck_backflow::oracle::{run_validation_suite, ValidationCheck};
use ck_backflow::two_particle::{
    at_least_one_negative_probability, boson_fermion_initial_slope, fidelity, Symmetry, TwoParticleState,
};

use crate::config::{RunConfig, Scenario};
use crate::table::{Cell, Table};

/// Files written by a run, plus human-readable remarks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
    /// False when a validation check failed.
    pub passed: bool,
}

struct Writer<'a> {
    config: &'a RunConfig,
    outcome: RunOutcome,
}

impl Writer<'_> {
    fn emit(&mut self, stem: &Path, suffix: &str, table: &Table) -> Result<()> {
        let format = self.config.output.format;
        let path = with_suffix(stem, &format!("{suffix}.{}", format.extension()));
        table.write(&path, format)?;
        self.outcome.files.push(path);
        Ok(())
    }

    fn note(&mut self, line: String) {
        self.outcome.notes.push(line);
    }
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut name = stem.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

/// `stem` itself for a single damping rate, `stem.gamma-<γ>` otherwise.
fn gamma_stem(stem: &Path, config: &RunConfig, gamma: f64) -> PathBuf {
    if config.gammas.len() == 1 {
        stem.to_path_buf()
    } else {
        with_suffix(stem, &format!(".gamma-{gamma}"))
    }
}

fn interval_row(leading: Vec<Cell>, iv: &BackflowInterval) -> Vec<Cell> {
    let mut row = leading;
    row.extend([
        Cell::Num(iv.t_start),
        Cell::Num(iv.t_end),
        Cell::Num(iv.probability_gain),
        Cell::Num(iv.t_peak),
    ]);
    row
}

fn symmetry_name(s: Symmetry) -> &'static str {
    match s {
        Symmetry::Boson => "boson",
        Symmetry::Fermion => "fermion",
    }
}

/// Evaluates `config` and writes its tables next to `stem` (a path without
/// extension).
pub fn execute(config: &RunConfig, stem: &Path) -> Result<RunOutcome> {
    config.validate()?;
    if let Some(dir) = stem.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let mut w = Writer {
        config,
        outcome: RunOutcome {
            passed: true,
            ..RunOutcome::default()
        },
    };
    match config.scenario {
        Scenario::CurrentMap => current_map(&mut w, stem)?,
        Scenario::LeftProb => left_prob(&mut w, stem)?,
        Scenario::TwoParticle => two_particle(&mut w, stem)?,
        Scenario::FidelityScan => fidelity_scan(&mut w, stem)?,
        Scenario::FidelityBackflow => fidelity_backflow(&mut w, stem)?,
        Scenario::Validate => {
            let checks = run_validation_suite();
            w.outcome.passed = checks.iter().all(|c| c.passed);
            w.outcome.notes.extend(checks.iter().map(describe_check));
            w.emit(stem, "", &validation_table(&checks))?;
        }
    }
    Ok(w.outcome)
}

fn current_map(w: &mut Writer, stem: &Path) -> Result<()> {
    let config = w.config;
    let (eta, s) = (config.eta(), config.state);
    let thetas = config.theta_axis.values();
    let times = config.time_axis.values();
    let (scale, column) = if config.output.raw {
        (1.0, "j")
    } else {
        (1000.0, "j_times_1000")
    };
    for &gamma in &config.gammas {
        let params = config.params(gamma)?;
        let grid = current_sign_map(|theta| s.build_with(eta, s.alpha, theta), &params, &thetas, &times)
            .with_context(|| format!("current map at gamma = {gamma}"))?;
        let mut table = Table::new(vec!["theta", "t", column]);
        for (i, &theta) in thetas.iter().enumerate() {
            for (k, &t) in times.iter().enumerate() {
                table.push(vec![Cell::Num(theta), Cell::Num(t), Cell::Num(scale * grid.get(i, k))]);
            }
        }
        w.emit(&gamma_stem(stem, config, gamma), "", &table)?;
    }
    Ok(())
}

fn left_prob(w: &mut Writer, stem: &Path) -> Result<()> {
    let config = w.config;
    let times = config.time_axis.values();
    for &gamma in &config.gammas {
        let params = config.params(gamma)?;
        let mut curves = Table::new(vec!["eta", "t", "P"]);
        let mut intervals = Table::new(vec!["eta", "t_start", "t_end", "probability_gain", "t_peak"]);
        for &eta in &config.etas {
            let state = config.state.build(eta)?;
            let values = times
                .par_iter()
                .map(|&t| left_probability(&state, &params, t, Method::Analytic))
                .collect::<ck_backflow::Result<Vec<_>>>()
                .with_context(|| format!("left probability at gamma = {gamma}, eta = {eta}"))?;
            for (&t, p) in times.iter().zip(values) {
                curves.push(vec![Cell::Num(eta), Cell::Num(t), Cell::Num(p)]);
            }
            let found = one_particle_intervals(&state, &params, config.t_max, config.tol)
                .with_context(|| format!("backflow intervals at gamma = {gamma}, eta = {eta}"))?;
            for iv in &found {
                intervals.push(interval_row(vec![Cell::Num(eta)], iv));
            }
            w.note(format!("gamma = {gamma}, eta = {eta}: {} backflow interval(s)", found.len()));
        }
        let gstem = gamma_stem(stem, config, gamma);
        w.emit(&gstem, "", &curves)?;
        w.emit(&gstem, ".intervals", &intervals)?;
    }
    Ok(())
}

fn two_particle_states(config: &RunConfig) -> Result<[TwoParticleState; 2]> {
    let (eta, s) = (config.eta(), config.state);
    let chi = s.build(eta)?;
    let phi = s.build_with(eta, s.alpha, config.theta_phi)?;
    Ok([
        TwoParticleState::new(chi, phi, Symmetry::Boson)?,
        TwoParticleState::new(chi, phi, Symmetry::Fermion)?,
    ])
}

fn two_particle(w: &mut Writer, stem: &Path) -> Result<()> {
    let config = w.config;
    let times = config.time_axis.values();
    let states = two_particle_states(config)?;
    for &gamma in &config.gammas {
        let params = config.params(gamma)?;
        let rows = times
            .par_iter()
            .map(|&t| -> ck_backflow::Result<[f64; 2]> {
                Ok([
                    at_least_one_negative_probability(&states[0], &params, t)?,
                    at_least_one_negative_probability(&states[1], &params, t)?,
                ])
            })
            .collect::<ck_backflow::Result<Vec<_>>>()
            .with_context(|| format!("two-particle probabilities at gamma = {gamma}"))?;
        let mut curves = Table::new(vec!["t", "P_plus", "P_minus"]);
        for (&t, [plus, minus]) in times.iter().zip(rows) {
            curves.push(vec![Cell::Num(t), Cell::Num(plus), Cell::Num(minus)]);
        }
        let mut intervals = Table::new(vec!["symmetry", "t_start", "t_end", "probability_gain", "t_peak"]);
        for state in &states {
            let name = symmetry_name(state.symmetry());
            let found = two_particle_intervals(state, &params, config.t_max, config.tol)
                .with_context(|| format!("{name} intervals at gamma = {gamma}"))?;
            for iv in &found {
                intervals.push(interval_row(vec![Cell::Text(name.into())], iv));
            }
            let slope = boson_fermion_initial_slope(state, &params)?;
            w.note(format!(
                "gamma = {gamma}, {name}: initial slope {slope:.6e}, {} backflow interval(s)",
                found.len()
            ));
        }
        let gstem = gamma_stem(stem, config, gamma);
        w.emit(&gstem, "", &curves)?;
        w.emit(&gstem, ".intervals", &intervals)?;
    }
    Ok(())
}

fn fidelity_scan(w: &mut Writer, stem: &Path) -> Result<()> {
    let config = w.config;
    let chi = config.state.build(config.eta())?;
    let alphas = config.alpha_phi.values();
    let values = alphas
        .par_iter()
        .map(|&a| fidelity(&chi, &chi.with_alpha(a)?))
        .collect::<ck_backflow::Result<Vec<_>>>()
        .context("fidelity scan")?;
    let mut table = Table::new(vec!["alpha_phi", "fidelity"]);
    for (&a, f) in alphas.iter().zip(values) {
        table.push(vec![Cell::Num(a), Cell::Num(f)]);
    }
    w.emit(stem, "", &table)
}

fn fidelity_backflow(w: &mut Writer, stem: &Path) -> Result<()> {
    let config = w.config;
    let chi = config.state.build(config.eta())?;
    let alphas = config.alpha_phi.values();
    let times = config.time_axis.values();
    for &gamma in &config.gammas {
        let params: CkParams = config.params(gamma)?;
        let base = FidelityScanBase {
            chi,
            params,
            symmetry: Symmetry::Boson,
            t_max: config.t_max,
            tol: config.tol,
        };
        let records = fidelity_backflow_scan(&alphas, &base).with_context(|| format!("scan at gamma = {gamma}"))?;
        let mut summary = Table::new(vec![
            "alpha_phi",
            "fidelity",
            "backflow_amount",
            "max_interval_gain",
            "interval_count",
        ]);
        for r in &records {
            summary.push(vec![
                Cell::Num(r.alpha_phi),
                Cell::Num(r.fidelity),
                Cell::Num(r.backflow_amount),
                Cell::Num(r.max_interval_gain),
                Cell::Int(r.interval_count as u64),
            ]);
        }
        let mut curves = Table::new(vec!["alpha_phi", "t", "P_plus"]);
        for &a in &alphas {
            let state = TwoParticleState::new(chi, chi.with_alpha(a)?, Symmetry::Boson)?;
            let values = times
                .par_iter()
                .map(|&t| at_least_one_negative_probability(&state, &params, t))
                .collect::<ck_backflow::Result<Vec<_>>>()
                .with_context(|| format!("P+ curve at alpha_phi = {a}"))?;
            for (&t, p) in times.iter().zip(values) {
                curves.push(vec![Cell::Num(a), Cell::Num(t), Cell::Num(p)]);
            }
        }
        let gstem = gamma_stem(stem, config, gamma);
        w.emit(&gstem, "", &summary)?;
        w.emit(&gstem, ".curves", &curves)?;
    }
    Ok(())
}

fn validation_table(checks: &[ValidationCheck]) -> Table {
    let mut table = Table::new(vec!["name", "value", "threshold", "passed", "seconds"]);
    for c in checks {
        table.push(vec![
            Cell::Text(c.name.clone()),
            Cell::Num(c.value),
            Cell::Num(c.threshold),
            Cell::Bool(c.passed),
            Cell::Num(c.seconds),
        ]);
    }
    table
}

pub fn describe_check(c: &ValidationCheck) -> String {
    format!(
        "{:<4} {:<48} {:>10.3e} <= {:>8.1e}  ({:.2} s)",
        if c.passed { "ok" } else { "FAIL" },
        c.name,
        c.value,
        c.threshold,
        c.seconds
    )
}

/// Runs the validation suite alone; returns the report lines and whether
/// every check passed.
pub fn self_check() -> (Vec<String>, bool) {
    let checks = run_validation_suite();
    (checks.iter().map(describe_check).collect(), checks.iter().all(|c| c.passed))
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    label: &'a str,
    config: &'a RunConfig,
    files: Vec<String>,
    notes: &'a [String],
    threads: usize,
    wall_seconds: f64,
    finished_unix_seconds: u64,
}

/// Writes `<stem>.manifest.json` describing a finished run.
pub fn write_manifest(stem: &Path, label: &str, config: &RunConfig, outcome: &RunOutcome, started: Instant) -> Result<PathBuf> {
    let manifest = Manifest {
        tool: "backflow",
        version: env!("CARGO_PKG_VERSION"),
        label,
        config,
        files: outcome.files.iter().map(|p| p.display().to_string()).collect(),
        notes: &outcome.notes,
        threads: rayon::current_num_threads(),
        wall_seconds: started.elapsed().as_secs_f64(),
        finished_unix_seconds: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    };
    let path = with_suffix(stem, ".manifest.json");
    let text = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(&path, text + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}
