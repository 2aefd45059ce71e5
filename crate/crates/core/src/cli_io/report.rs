use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::components::{AssumptionReport, ComponentDecomposition};
use crate::dumbbell_lab::{Dumbbell, FuzzReport};
use crate::graph_core::{Skeleton, ValidationReport};
use crate::kms_engine::{
    verify_state, Dynamics, ExtremeState, Kms1Result, KmsError, PhaseDiagram, PhaseNode, Regime,
    StateCheck,
};
use crate::spectral::{ExtensionResult, OrderingVerdict};
use crate::Tolerances;

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpectrum {
    pub vertices: Vec<usize>,
    pub radii: Vec<f64>,
    /// Common Perron vector when the component is coordinatewise irreducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perron_vector: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionEntry {
    pub component: Vec<usize>,
    /// Colours in which the component dominates everything feeding it.
    pub colors: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<ExtensionResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderingEntry {
    pub component: Vec<usize>,
    pub color: usize,
    pub verdict: OrderingVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectraSection {
    /// `ρ(A_i)` per colour.
    pub color_radii: Vec<f64>,
    pub components: Vec<ComponentSpectrum>,
    pub extensions: Vec<ExtensionEntry>,
    pub orderings: Vec<OrderingEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KmsSection {
    pub beta: f64,
    pub extreme_count: usize,
    pub states: Vec<ExtremeState>,
    pub checks: Vec<StateCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kms1: Option<Kms1Result>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalValue {
    pub value: f64,
    /// `ln(a)/ln(b)` when both radii are integers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbolic: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSection {
    pub critical_betas: Vec<CriticalValue>,
    pub terminal_beta: Option<f64>,
    pub regimes: Vec<Regime>,
    /// States at user-requested inverse temperatures.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub evaluations: Vec<KmsSection>,
    pub tree: PhaseNode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vertices: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationally_independent: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assumptions: Option<AssumptionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<ComponentDecomposition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectra: Option<SpectraSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<Dynamics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kms: Option<KmsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<PhaseSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dumbbell: Option<Dumbbell>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fuzz: Option<FuzzReport>,
    /// Every state vector in the report passed the subinvariance checks.
    pub states_verified: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("state at β = {beta} failed verification: {check:?}")]
    StateFailed { beta: f64, check: Box<StateCheck> },
    #[error(transparent)]
    Kms(#[from] KmsError),
}

impl ReportDocument {
    pub fn new(command: &str, tolerances: Tolerances) -> Self {
        ReportDocument {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            tolerances,
            vertices: Vec::new(),
            rationally_independent: None,
            validation: None,
            assumptions: None,
            components: None,
            spectra: None,
            dynamics: None,
            kms: None,
            phase: None,
            dumbbell: None,
            fuzz: None,
            states_verified: true,
            warnings: Vec::new(),
        }
    }

    /// All states carried by the report.
    pub fn states(&self) -> Vec<&ExtremeState> {
        let mut out: Vec<&ExtremeState> = Vec::new();
        if let Some(kms) = &self.kms {
            out.extend(&kms.states);
        }
        if let Some(phase) = &self.phase {
            for r in &phase.regimes {
                out.extend(&r.states);
            }
            for e in &phase.evaluations {
                out.extend(&e.states);
            }
        }
        out
    }

    /// Re-runs the subinvariance checks on every state in the report.
    pub fn verify_states(
        &mut self,
        skel: &Skeleton,
        dynamics: &Dynamics,
    ) -> Result<(), ReportError> {
        let tol = self.tolerances.state;
        let mut failure = None;
        for st in self.states() {
            let check = verify_state(skel, dynamics, st.beta, &st.m, tol)?;
            if !check.passed {
                failure = Some(ReportError::StateFailed {
                    beta: st.beta,
                    check: Box::new(check),
                });
                break;
            }
        }
        self.states_verified = failure.is_none();
        match failure {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

fn near_integer(x: f64) -> Option<u64> {
    let r = x.round();
    (r >= 1.0 && (x - r).abs() <= 1e-9 * x.abs().max(1.0)).then_some(r as u64)
}

/// Symbolic form `ln(a)/ln(b)` of a node's critical value, when the
/// limiting radius `a` and `e^{r_j}` are integers.
pub fn symbolic_beta(node: &PhaseNode, dynamics: &Dynamics) -> Option<String> {
    let j = node.limiting_color?;
    let a = near_integer(node.limiting_radius)?;
    let b = near_integer(dynamics.r[j].exp())?;
    if a == b {
        Some("1".to_string())
    } else {
        Some(format!("ln({a})/ln({b})"))
    }
}

/// Critical values with their symbolic forms.
pub fn critical_values(diagram: &PhaseDiagram, dynamics: &Dynamics) -> Vec<CriticalValue> {
    let nodes = diagram.nodes();
    diagram
        .critical_betas
        .iter()
        .map(|&value| {
            let symbolic = nodes
                .iter()
                .filter(|n| {
                    n.beta_c
                        .is_some_and(|b| (b - value).abs() <= 1e-12 * value.max(1.0))
                })
                .find_map(|n| symbolic_beta(n, dynamics));
            CriticalValue { value, symbolic }
        })
        .collect()
}
