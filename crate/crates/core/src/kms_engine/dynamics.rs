use serde::{Deserialize, Serialize};

use super::{approx_eq, KmsError};
use crate::graph_core::Skeleton;
use crate::spectral::spectral_radius;
use crate::Tolerances;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum DynamicsSpec {
    /// `r_i = ln ρ(A_i)`.
    Preferred,
    Explicit {
        r: Vec<f64>,
        #[serde(default = "default_true")]
        normalize: bool,
    },
}

fn default_true() -> bool {
    true
}

/// A normalized rate vector: `max_i ln ρ(A_i) / r_i = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dynamics {
    pub r: Vec<f64>,
    /// Scalar the raw rates were multiplied by.
    pub normalization_factor: f64,
    /// Caller's claim that the rates are rationally independent; never checked.
    pub rationally_independent: bool,
    /// `r_i = ln ρ(A_i)` for every colour.
    pub preferred: bool,
    pub log_radii: Vec<f64>,
    /// Colours attaining the maximum ratio.
    pub saturated_colors: Vec<usize>,
}

impl Dynamics {
    pub fn k(&self) -> usize {
        self.r.len()
    }
}

pub fn normalize_dynamics(
    skel: &Skeleton,
    spec: &DynamicsSpec,
    rationally_independent: bool,
    tol: &Tolerances,
) -> Result<Dynamics, KmsError> {
    let log_radii: Vec<f64> = skel
        .matrices()
        .iter()
        .map(|m| spectral_radius(&m.to_f64()).ln())
        .collect();
    let (raw, normalize) = match spec {
        DynamicsSpec::Preferred => {
            if let Some(index) = log_radii.iter().position(|&l| !(l > 0.0)) {
                return Err(KmsError::NonPositiveRate {
                    index,
                    value: log_radii[index],
                });
            }
            (log_radii.clone(), true)
        }
        DynamicsSpec::Explicit { r, normalize } => (r.clone(), *normalize),
    };
    normalize_from_log_radii(&log_radii, &raw, normalize, rationally_independent, tol)
}

/// Normalization from the logarithms of the spectral radii directly, for
/// radii that no integer matrix realizes.
pub fn normalize_from_log_radii(
    log_radii: &[f64],
    raw: &[f64],
    normalize: bool,
    rationally_independent: bool,
    tol: &Tolerances,
) -> Result<Dynamics, KmsError> {
    if raw.len() != log_radii.len() {
        return Err(KmsError::RateLength {
            got: raw.len(),
            k: log_radii.len(),
        });
    }
    if let Some(index) = raw.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(KmsError::NonPositiveRate {
            index,
            value: raw[index],
        });
    }
    let max_ratio = log_radii
        .iter()
        .zip(raw)
        .map(|(l, r)| l / r)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(max_ratio > 0.0) {
        return Err(KmsError::NoExpandingColor);
    }
    let factor = if normalize {
        max_ratio
    } else {
        if !approx_eq(max_ratio, 1.0, 1e-12) {
            return Err(KmsError::NotNormalized { max_ratio });
        }
        1.0
    };
    let r: Vec<f64> = raw.iter().map(|x| x * factor).collect();
    let saturated_colors = (0..r.len())
        .filter(|&i| approx_eq(log_radii[i], r[i], tol.criticality))
        .collect();
    let preferred = (0..r.len()).all(|i| approx_eq(log_radii[i], r[i], tol.criticality));
    Ok(Dynamics {
        r,
        normalization_factor: factor,
        rationally_independent,
        preferred,
        log_radii: log_radii.to_vec(),
        saturated_colors,
    })
}
