//! KMS states on finite higher-rank graphs: structure of the vertex matrices,
//! Perron–Frobenius data, explicit extremal states and their phase diagram.

pub mod cli_io;
pub mod components;
pub mod dumbbell_lab;
pub mod graph_core;
pub mod kms_engine;
pub mod spectral;

use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every module.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative band inside which two radii are considered indistinguishable.
    pub radius_compare: f64,
    /// `|r_j − ln ρ| ≤ criticality · max(1, r_j)` marks a critical colour.
    pub criticality: f64,
    pub linear_residual: f64,
    pub eigen_residual: f64,
    /// Allowed disagreement between extension vectors obtained from different colours.
    pub cross_color: f64,
    /// Used when verifying candidate states.
    pub state: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            radius_compare: 1e-9,
            criticality: 1e-9,
            linear_residual: 1e-10,
            eigen_residual: 1e-9,
            cross_color: 1e-8,
            state: 1e-9,
        }
    }
}

impl Tolerances {
    /// Same thresholds with the state-verification tolerance replaced.
    pub fn with_state(self, state: f64) -> Self {
        Tolerances { state, ..self }
    }
}
