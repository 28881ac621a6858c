//! Backflow detection and the parameter scans built on it.

mod intervals;
mod scans;

pub use intervals::{
    backflow_amount, find_backflow_intervals, find_backflow_intervals_with, find_backflow_intervals_with_rate,
    initial_backflow_amount, BackflowInterval, DetectorSettings, DEFAULT_TOL,
};
pub use scans::{
    current_sign_map, fidelity_backflow_scan, one_particle_intervals, two_particle_intervals, FidelityBackflowRecord,
    FidelityScanBase, ScanGrid,
};
