#![allow(dead_code)]

use std::path::PathBuf;

use kgraph_kms::cli_io::{parse_input, InputDocument};
use kgraph_kms::graph_core::Skeleton;
use kgraph_kms::kms_engine::{normalize_dynamics, Dynamics, DynamicsSpec};
use kgraph_kms::Tolerances;

pub const FIXTURES: [&str; 6] = [
    "example1",
    "example2",
    "figure2_c_critical",
    "figure2_d_critical",
    "appendix_counterexample",
    "figure2_isolated",
];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"))
}

pub fn fixture(name: &str) -> InputDocument {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    parse_input(&text).expect("fixture parses")
}

pub fn load(name: &str) -> (Skeleton, Dynamics) {
    let doc = fixture(name);
    let skel = doc.skeleton().expect("fixture is a valid skeleton");
    let dynamics = normalize_dynamics(
        &skel,
        &doc.dynamics,
        doc.attestation(),
        &Tolerances::default(),
    )
    .expect("preferred dynamics");
    (skel, dynamics)
}

pub fn preferred(skel: &Skeleton) -> Dynamics {
    normalize_dynamics(skel, &DynamicsSpec::Preferred, true, &Tolerances::default())
        .expect("preferred dynamics")
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Order-insensitive match of two sets of vectors within `tol`.
pub fn same_vectors(got: &[Vec<f64>], want: &[Vec<f64>], tol: f64) -> bool {
    if got.len() != want.len() {
        return false;
    }
    let mut used = vec![false; got.len()];
    want.iter().all(|w| {
        match (0..got.len()).find(|&i| !used[i] && max_abs_diff(&got[i], w) <= tol) {
            Some(i) => {
                used[i] = true;
                true
            }
            None => false,
        }
    })
}

/// Integer matrix product, used as a brute-force commutation oracle.
pub fn int_product(a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|l| a[i][l] * b[l][j]).sum())
                .collect()
        })
        .collect()
}
