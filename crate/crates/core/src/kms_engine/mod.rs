//! Dynamics, the KMS₁ procedure, explicit extremal states and the sweep over
//! inverse temperatures.
//!
//! A state is stored as its inverse temperature and its vertex vector `m`;
//! the full state is `φ(t_μ t_ν*) = δ_{μν} e^{−βr·d(μ)} m_{s(μ)}`.

mod dynamics;
mod phase;
mod procedure;
mod verify;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::components::{AssumptionReport, ComponentsError};
use crate::spectral::SpectralError;
use crate::Tolerances;

pub use dynamics::{normalize_dynamics, normalize_from_log_radii, Dynamics, DynamicsSpec};
pub use phase::{phase_diagram, PhaseDiagram, PhaseNode, Regime, RegimeKind};
pub use procedure::{
    critical_components, kms1_extremes, psi_extension, psi_state, removal_set,
    supercritical_extremes, CriticalComponent, Kms1Result, PsiExtension, RemovalSet,
};
pub use verify::{factors_through, gap_vector, verify_state, StateCheck};

#[derive(Debug, Error)]
pub enum KmsError {
    #[error("rate vector has length {got}, expected {k}")]
    RateLength { got: usize, k: usize },
    #[error("rate r[{index}] = {value} is not strictly positive")]
    NonPositiveRate { index: usize, value: f64 },
    #[error("no colour has spectral radius above 1, so no normalization exists")]
    NoExpandingColor,
    #[error("dynamics not normalized: max_i ln ρ(A_i)/r_i = {max_ratio}")]
    NotNormalized { max_ratio: f64 },
    #[error("inverse temperature must be positive, got {0}")]
    NonPositiveBeta(f64),
    #[error("standing assumptions violated")]
    Assumptions(Box<AssumptionReport>),
    #[error("β = {beta} is not strictly above the critical value {critical}")]
    NotSupercritical { beta: f64, critical: f64 },
    #[error("vertex set {0:?} is not a hereditary critical component")]
    NotCriticalComponent(Vec<usize>),
    #[error("component {component:?} is not strictly dominant in its critical colour {color}")]
    NotDominant { component: Vec<usize>, color: usize },
    #[error("no critical component at recursion depth {depth}")]
    NoCriticalComponent { depth: usize },
    #[error("supercritical vector for vertex {vertex} has a negative entry {value:e}")]
    NegativeResolvent { vertex: usize, value: f64 },
    #[error("state vector has length {got}, expected {n}")]
    StateLength { got: usize, n: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Components(#[from] ComponentsError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum StateKind {
    /// Built from the Perron vector of a hereditary critical component
    /// (vertex ids in the original frame).
    PsiD { component: Vec<usize>, depth: usize },
    /// Supercritical extreme point concentrated at `vertex`, zero-padded
    /// outside its quotient.
    LiftedPointMass { vertex: usize, depth: usize },
}

impl StateKind {
    pub fn depth(&self) -> usize {
        match self {
            StateKind::PsiD { depth, .. } | StateKind::LiftedPointMass { depth, .. } => *depth,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremeState {
    /// Inverse temperature in the scale of the normalized dynamics.
    pub beta: f64,
    /// Vertex vector over the full vertex set.
    pub m: Vec<f64>,
    pub kind: StateKind,
    /// Whether the state factors through the Cuntz–Krieger algebra of the
    /// graph it was built on.
    pub factors_through_ck: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KmsOptions {
    pub tol: Tolerances,
    /// Proceed even when the standing assumptions fail at the top level.
    pub allow_violations: bool,
}

impl Default for KmsOptions {
    fn default() -> Self {
        KmsOptions {
            tol: Tolerances::default(),
            allow_violations: false,
        }
    }
}

/// `|a − b| ≤ rel · max(1, |a|, |b|)`.
pub(crate) fn approx_eq(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Scatters a vector over `verts` into a zero vector of length `n`.
pub(crate) fn lift(local: &[f64], verts: &[usize], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (a, &v) in verts.iter().enumerate() {
        out[v] = local[a];
    }
    out
}

pub(crate) fn normalize_l1(v: &[f64]) -> Vec<f64> {
    let s: f64 = v.iter().map(|x| x.abs()).sum();
    v.iter().map(|x| x / s).collect()
}
