//! Built-in parameter sets (atomic units).

use std::f64::consts::PI;

use crate::config::{Axis, Format, OutputSpec, RunConfig, Scenario, StateSpec, Units, Values};

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub config: RunConfig,
}

fn base(scenario: Scenario) -> RunConfig {
    RunConfig {
        scenario,
        units: Units::default(),
        g: 0.0,
        gammas: vec![0.0],
        state: StateSpec::default(),
        etas: vec![0.0],
        theta_phi: 1.01 * PI,
        alpha_phi: Values::List(vec![1.0, 1.9, 3.5]),
        theta_axis: Axis::new(0.0, 2.0 * PI, 512),
        time_axis: Axis::new(0.0, 10.0, 1001),
        t_max: 10.0,
        tol: 1e-9,
        output: OutputSpec {
            format: Format::Csv,
            raw: false,
        },
    }
}

pub fn builtin_presets() -> Vec<Preset> {
    vec![
        Preset {
            name: "fig1",
            description: "current at the origin over (θ, t), γ = 0, 0.1, 0.2, 0.3",
            config: RunConfig {
                gammas: vec![0.0, 0.1, 0.2, 0.3],
                time_axis: Axis::new(0.0, 10.0, 512),
                ..base(Scenario::CurrentMap)
            },
        },
        Preset {
            name: "fig2",
            description: "left-half-space probability for η = 0, 0.5, 1, 2 at γ = 0 and 0.3",
            config: RunConfig {
                gammas: vec![0.0, 0.3],
                etas: vec![0.0, 0.5, 1.0, 2.0],
                ..base(Scenario::LeftProb)
            },
        },
        Preset {
            name: "fig3",
            description: "boson and fermion P±(t), θχ = π, θφ = 1.01π, γ = 0, 0.1, 0.2",
            config: RunConfig {
                gammas: vec![0.0, 0.1, 0.2],
                ..base(Scenario::TwoParticle)
            },
        },
        Preset {
            name: "fig4",
            description: "fidelity against α_φ ∈ [0, 5] for α_χ = 1.9, θ = π",
            config: RunConfig {
                alpha_phi: Values::Range(Axis::new(0.0, 5.0, 501)),
                ..base(Scenario::FidelityScan)
            },
        },
        Preset {
            name: "fig5",
            description: "boson P+(t) and backflow amount for α_φ = 1, 1.9, 3.5, γ = 0",
            config: base(Scenario::FidelityBackflow),
        },
    ]
}

pub fn find_preset(name: &str) -> Option<Preset> {
    builtin_presets().into_iter().find(|p| p.name == name)
}

/// Starting point for a bare scenario name.
pub fn scenario_defaults(scenario: Scenario) -> RunConfig {
    let preset = match scenario {
        Scenario::CurrentMap => "fig1",
        Scenario::LeftProb => "fig2",
        Scenario::TwoParticle => "fig3",
        Scenario::FidelityScan => "fig4",
        Scenario::FidelityBackflow => "fig5",
        Scenario::Validate => return base(Scenario::Validate),
    };
    find_preset(preset).expect("builtin preset").config
}
