use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{Dynamics, KmsError};
use crate::graph_core::Skeleton;

/// Outcome of the subinvariance checks on a candidate vertex vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateCheck {
    pub passed: bool,
    /// `|Σ m − 1|`.
    pub sum_error: f64,
    pub min_entry: f64,
    /// Largest `e^{−βr_i}(A_i m)_v − m_v` over colours and vertices.
    pub worst_subinvariance: f64,
    /// `(colour, vertex)` where it occurs.
    pub worst_subinvariance_at: Option<(usize, usize)>,
    /// `∏_i (1 − e^{−βr_i}A_i) m`.
    pub product: Vec<f64>,
    pub min_product: f64,
    pub min_product_at: Option<usize>,
}

pub(crate) fn product_vector(skel: &Skeleton, r: &[f64], beta: f64, m: &[f64]) -> Vec<f64> {
    let mut x = DVector::from_column_slice(m);
    for (i, a) in skel.matrices().iter().enumerate() {
        let scale = (-beta * r[i]).exp();
        x = &x - a.to_f64() * &x * scale;
    }
    x.iter().copied().collect()
}

fn check_len(skel: &Skeleton, m: &[f64]) -> Result<(), KmsError> {
    if m.len() != skel.vertex_count() {
        return Err(KmsError::StateLength {
            got: m.len(),
            n: skel.vertex_count(),
        });
    }
    Ok(())
}

pub fn verify_state(
    skel: &Skeleton,
    dynamics: &Dynamics,
    beta: f64,
    m: &[f64],
    tol: f64,
) -> Result<StateCheck, KmsError> {
    check_len(skel, m)?;
    let sum_error = (m.iter().sum::<f64>() - 1.0).abs();
    let min_entry = m.iter().copied().fold(f64::INFINITY, f64::min);
    let mv = DVector::from_column_slice(m);

    let mut worst_subinvariance = f64::NEG_INFINITY;
    let mut worst_subinvariance_at = None;
    for (i, a) in skel.matrices().iter().enumerate() {
        let am = a.to_f64() * &mv * (-beta * dynamics.r[i]).exp();
        for v in 0..m.len() {
            let excess = am[v] - m[v];
            if excess > worst_subinvariance {
                worst_subinvariance = excess;
                worst_subinvariance_at = Some((i, v));
            }
        }
    }

    let product = product_vector(skel, &dynamics.r, beta, m);
    let (min_product_at, min_product) =
        product
            .iter()
            .copied()
            .enumerate()
            .fold((None, f64::INFINITY), |(at, best), (v, x)| {
                if x < best {
                    (Some(v), x)
                } else {
                    (at, best)
                }
            });

    let passed =
        sum_error <= tol && min_entry >= -tol && worst_subinvariance <= tol && min_product >= -tol;
    Ok(StateCheck {
        passed,
        sum_error,
        min_entry,
        worst_subinvariance,
        worst_subinvariance_at,
        product,
        min_product,
        min_product_at,
    })
}

/// The gap vector `∏_i (1 − e^{−βr_i}A_i) m`.
pub fn gap_vector(
    skel: &Skeleton,
    dynamics: &Dynamics,
    beta: f64,
    m: &[f64],
) -> Result<Vec<f64>, KmsError> {
    check_len(skel, m)?;
    Ok(product_vector(skel, &dynamics.r, beta, m))
}

/// True when every factor `(1 − e^{−βr_i}A_i) m` vanishes, i.e. the state
/// factors through the Cuntz–Krieger relations in each colour.
pub fn factors_through(
    skel: &Skeleton,
    dynamics: &Dynamics,
    beta: f64,
    m: &[f64],
    tol: f64,
) -> Result<bool, KmsError> {
    check_len(skel, m)?;
    let mv = DVector::from_column_slice(m);
    Ok(skel.matrices().iter().enumerate().all(|(i, a)| {
        let gap = &mv - a.to_f64() * &mv * (-beta * dynamics.r[i]).exp();
        gap.amax() <= tol
    }))
}
