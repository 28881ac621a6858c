//! Library side of the `backflow` command: configuration, presets, scenario
//! drivers and table output.

pub mod config;
pub mod presets;
pub mod run;
pub mod table;

use anyhow::Result;

use config::{parse_scenario, Format, RunConfig};

/// Resolves a preset or scenario name, an optional TOML overlay and the
/// command-line overrides (highest precedence) into one config.
pub fn resolve(target: &str, config_text: Option<&str>, format: Option<Format>, raw: bool) -> Result<RunConfig> {
    let base = match presets::find_preset(target) {
        Some(p) => p.config,
        None => presets::scenario_defaults(parse_scenario(target)?),
    };
    let mut config = match config_text {
        Some(text) => base.overlay(text)?,
        None => base,
    };
    if let Some(f) = format {
        config.output.format = f;
    }
    config.output.raw |= raw;
    config.validate()?;
    Ok(config)
}
