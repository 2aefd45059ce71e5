//! Perron–Frobenius data for nonnegative matrices and the extension of a
//! hereditary component's eigenvector to everything that feeds into it.
//!
//! Perron roots come from power iteration on `M + I` restricted to each
//! strongly connected block (the shift makes an irreducible block
//! primitive). Linear systems are solved by LU with partial pivoting and a
//! residual check.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::components::{self, ComponentDecomposition};
use crate::graph_core::Skeleton;
use crate::Tolerances;

/// Successive normalized iterates must agree to this in max norm.
pub const POWER_ITERATION_TOL: f64 = 1e-14;
pub const POWER_ITERATION_MAX: usize = 100_000;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error(
        "power iteration did not converge after {iterations} steps (last change {last_change:e})"
    )]
    NotConverged { iterations: usize, last_change: f64 },
    #[error("family not simultaneously diagonalizable at Perron root: colour {color} residual {residual:e}")]
    NotSimultaneous { color: usize, residual: f64 },
    #[error("empty matrix family")]
    EmptyFamily,
    #[error("component is not hereditary")]
    NotHereditary,
    #[error("component is empty")]
    EmptyComponent,
    #[error("no colour available for the extension")]
    EmptyColorSet,
    #[error(
        "singular extension system in colour {color}: ρ(A_D) = {rho_d} does not exceed ρ(E) = {rho_e}"
    )]
    Singular {
        color: usize,
        rho_d: f64,
        rho_e: f64,
    },
    #[error("linear solve residual {residual:e} exceeds {limit:e}")]
    ResidualTooLarge { residual: f64, limit: f64 },
    #[error("internal consistency check failed: {what} = {value:e} (limit {limit:e})")]
    Inconsistent {
        what: &'static str,
        value: f64,
        limit: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PfResult {
    pub radius: f64,
    /// Strictly positive, entries sum to 1.
    pub vector: Vec<f64>,
    /// `‖M x − ρ x‖∞`.
    pub residual: f64,
    pub iterations: usize,
}

/// Perron root and unimodular Perron vector of an irreducible nonnegative matrix.
pub fn perron_vector(m: &DMatrix<f64>) -> Result<PfResult, SpectralError> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    if n == 0 {
        return Err(SpectralError::EmptyFamily);
    }
    if n == 1 {
        return Ok(PfResult {
            radius: m[(0, 0)],
            vector: vec![1.0],
            residual: 0.0,
            iterations: 0,
        });
    }
    let shifted = m + DMatrix::<f64>::identity(n, n);
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut change = f64::INFINITY;
    let mut iterations = 0;
    while iterations < POWER_ITERATION_MAX {
        iterations += 1;
        let mut y = &shifted * &x;
        let s = y.sum();
        y /= s;
        change = (&y - &x).amax();
        x = y;
        if change < POWER_ITERATION_TOL {
            break;
        }
    }
    let mx = m * &x;
    let radius = mx.sum();
    let residual = (&mx - &x * radius).amax();
    if change >= POWER_ITERATION_TOL && residual > 1e-10 * radius.max(1.0) {
        return Err(SpectralError::NotConverged {
            iterations,
            last_change: change,
        });
    }
    Ok(PfResult {
        radius,
        vector: x.iter().copied().collect(),
        residual,
        iterations,
    })
}

/// Spectral radius of a square nonnegative matrix, reducible or not: the
/// maximum of the Perron roots of its strongly connected diagonal blocks.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|r| (0..n).filter(|&c| m[(r, c)] > 0.0).collect())
        .collect();
    let mut best: f64 = 0.0;
    for block in components::strongly_connected(&adj) {
        let rho = if block.len() == 1 {
            m[(block[0], block[0])]
        } else {
            let sub = DMatrix::from_fn(block.len(), block.len(), |a, b| m[(block[a], block[b])]);
            match perron_vector(&sub) {
                Ok(pf) => pf.radius,
                // Best available estimate; only reachable on pathological input.
                Err(_) => {
                    (&sub * DVector::from_element(block.len(), 1.0 / block.len() as f64)).sum()
                }
            }
        };
        best = best.max(rho);
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommonPf {
    pub vector: Vec<f64>,
    pub radii: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl CommonPf {
    /// Per-member view of the shared vector.
    pub fn member(&self, i: usize) -> PfResult {
        PfResult {
            radius: self.radii[i],
            vector: self.vector.clone(),
            residual: self.residuals[i],
            iterations: 0,
        }
    }
}

/// Common unimodular Perron–Frobenius eigenvector of a commuting family of
/// irreducible matrices, taken from `Σ_i A_i` and checked against each member.
pub fn common_pf_eigenvector(family: &[DMatrix<f64>], tol: f64) -> Result<CommonPf, SpectralError> {
    let first = family.first().ok_or(SpectralError::EmptyFamily)?;
    let mut sum = DMatrix::zeros(first.nrows(), first.ncols());
    for m in family {
        sum += m;
    }
    let pf = perron_vector(&sum)?;
    let x = DVector::from_vec(pf.vector.clone());
    let mut radii = Vec::with_capacity(family.len());
    let mut residuals = Vec::with_capacity(family.len());
    for (color, m) in family.iter().enumerate() {
        let mx = m * &x;
        let rho = mx.sum();
        let residual = (&mx - &x * rho).amax();
        if residual > tol * rho.max(1.0) {
            return Err(SpectralError::NotSimultaneous { color, residual });
        }
        radii.push(rho);
        residuals.push(residual);
    }
    Ok(CommonPf {
        vector: pf.vector,
        radii,
        residuals,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusOrdering {
    Less,
    Equal,
    Greater,
    /// Distinct but inside the tolerance band: cannot be classified.
    Degenerate,
}

pub fn compare_radii(a: f64, b: f64, rel_tol: f64) -> RadiusOrdering {
    let diff = a - b;
    if diff == 0.0 {
        RadiusOrdering::Equal
    } else if diff.abs() <= rel_tol * a.abs().max(b.abs()).max(1.0) {
        RadiusOrdering::Degenerate
    } else if diff < 0.0 {
        RadiusOrdering::Less
    } else {
        RadiusOrdering::Greater
    }
}

/// Dense solve with partial pivoting followed by a normwise residual check
/// `‖Ax − b‖∞ ≤ tol · (‖A‖∞‖x‖∞ + ‖b‖∞)`, floored at `tol`.
pub(crate) fn solve_checked(
    a: DMatrix<f64>,
    b: &DVector<f64>,
    tol: f64,
) -> Result<DVector<f64>, SpectralError> {
    let lu = a.clone().lu();
    let x = lu.solve(b).ok_or(SpectralError::ResidualTooLarge {
        residual: f64::INFINITY,
        limit: tol,
    })?;
    let norm_a = a
        .row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let limit = tol * (norm_a * x.amax() + b.amax()).max(1.0);
    let residual = (&a * &x - b).amax();
    if !(residual <= limit) {
        return Err(SpectralError::ResidualTooLarge { residual, limit });
    }
    Ok(x)
}

/// The vertices feeding a hereditary set `D` (`F`) and those that do not (`H`).
pub fn extension_split(skel: &Skeleton, d: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let n = skel.vertex_count();
    let mut in_d = vec![false; n];
    for &v in d {
        in_d[v] = true;
    }
    let mut f = Vec::new();
    let mut h = Vec::new();
    for v in 0..n {
        if in_d[v] {
            continue;
        }
        if d.iter().any(|&w| components::reaches(skel, v, w)) {
            f.push(v);
        } else {
            h.push(v);
        }
    }
    (f, h)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionResult {
    pub d: Vec<usize>,
    /// Vertices outside `D` with a path into `D`.
    pub f: Vec<usize>,
    /// Vertices with no path into `D`.
    pub h: Vec<usize>,
    /// Common Perron vector of the `A_{D,i}`.
    pub x: Vec<f64>,
    /// `ρ(A_{D,i})` per colour.
    pub radii: Vec<f64>,
    /// Colour used for the primary solve.
    pub solve_color: usize,
    /// Nonnegative extension over `F` (ordered as `f`).
    pub y: Vec<f64>,
    /// `y` recomputed from each colour of the supplied set.
    pub y_by_color: Vec<(usize, Vec<f64>)>,
    /// `(y, x, 0)` over the full vertex set.
    pub z: Vec<f64>,
    pub per_color_residuals: Vec<f64>,
    pub cross_color_discrepancy: f64,
    /// Largest violation of `(ρ_i − E_i) B_j x = (ρ_j − E_j) B_i x` over all colour pairs.
    pub easyeq_discrepancy: f64,
}

struct Blocks {
    f: Vec<usize>,
    h: Vec<usize>,
    x: DVector<f64>,
    pf: CommonPf,
    e: Vec<DMatrix<f64>>,
    b: Vec<DMatrix<f64>>,
}

fn extension_blocks(
    skel: &Skeleton,
    d: &[usize],
    tol: &Tolerances,
) -> Result<Blocks, SpectralError> {
    if d.is_empty() {
        return Err(SpectralError::EmptyComponent);
    }
    if !components::is_hereditary(skel, d) {
        return Err(SpectralError::NotHereditary);
    }
    let family: Vec<DMatrix<f64>> = skel.matrices().iter().map(|m| m.block_f64(d, d)).collect();
    let pf = common_pf_eigenvector(&family, tol.eigen_residual)?;
    let (f, h) = extension_split(skel, d);
    let e = skel
        .matrices()
        .iter()
        .map(|m| m.block_f64(&f, &f))
        .collect();
    let b = skel.matrices().iter().map(|m| m.block_f64(&f, d)).collect();
    Ok(Blocks {
        f,
        h,
        x: DVector::from_vec(pf.vector.clone()),
        pf,
        e,
        b,
    })
}

fn solve_extension(
    blocks: &Blocks,
    color: usize,
    tol: &Tolerances,
) -> Result<DVector<f64>, SpectralError> {
    let nf = blocks.f.len();
    if nf == 0 {
        return Ok(DVector::zeros(0));
    }
    let rho_d = blocks.pf.radii[color];
    let rho_e = spectral_radius(&blocks.e[color]);
    if compare_radii(rho_e, rho_d, tol.radius_compare) != RadiusOrdering::Less {
        return Err(SpectralError::Singular {
            color,
            rho_d,
            rho_e,
        });
    }
    let system = DMatrix::<f64>::identity(nf, nf) * rho_d - &blocks.e[color];
    let rhs = &blocks.b[color] * &blocks.x;
    solve_checked(system, &rhs, tol.linear_residual)
}

/// Extends the Perron vector of the hereditary component `d` to a common
/// eigenvector `z = (y, x, 0)` of every vertex matrix.
///
/// `colors` must be a nonempty subset of the colours `i` with
/// `ρ(A_{C,i}) < ρ(A_{D,i})` for every component `C` feeding `D`; the first one
/// drives the solve and the rest cross-check it.
pub fn extend_eigenvector(
    skel: &Skeleton,
    d: &[usize],
    colors: &[usize],
    tol: &Tolerances,
) -> Result<ExtensionResult, SpectralError> {
    let (&solve_color, others) = colors.split_first().ok_or(SpectralError::EmptyColorSet)?;
    let blocks = extension_blocks(skel, d, tol)?;
    let y = solve_extension(&blocks, solve_color, tol)?;

    let mut y_by_color = vec![(solve_color, y.iter().copied().collect::<Vec<_>>())];
    let mut cross: f64 = 0.0;
    for &j in others {
        let yj = solve_extension(&blocks, j, tol)?;
        cross = cross.max((&yj - &y).amax());
        y_by_color.push((j, yj.iter().copied().collect()));
    }
    let scale = y.amax().max(1.0);
    if cross > tol.cross_color * scale {
        return Err(SpectralError::Inconsistent {
            what: "cross-colour discrepancy",
            value: cross,
            limit: tol.cross_color * scale,
        });
    }
    if let Some(&neg) = y.iter().find(|&&v| v < -tol.state) {
        return Err(SpectralError::Inconsistent {
            what: "negative extension entry",
            value: neg,
            limit: tol.state,
        });
    }

    let nf = blocks.f.len();
    let k = skel.k();
    let mut easyeq: f64 = 0.0;
    if nf > 0 {
        let eye = DMatrix::<f64>::identity(nf, nf);
        for i in 0..k {
            for j in (i + 1)..k {
                let lhs = (&eye * blocks.pf.radii[i] - &blocks.e[i]) * (&blocks.b[j] * &blocks.x);
                let rhs = (&eye * blocks.pf.radii[j] - &blocks.e[j]) * (&blocks.b[i] * &blocks.x);
                easyeq = easyeq.max((lhs - rhs).amax());
            }
        }
    }

    let n = skel.vertex_count();
    let mut z = DVector::zeros(n);
    for (a, &v) in blocks.f.iter().enumerate() {
        z[v] = y[a];
    }
    for (a, &v) in d.iter().enumerate() {
        z[v] = blocks.x[a];
    }
    let mut per_color_residuals = Vec::with_capacity(k);
    for i in 0..k {
        let rho = blocks.pf.radii[i];
        let res = (skel.matrix(i).to_f64() * &z - &z * rho).amax();
        let limit = tol.eigen_residual * rho.max(1.0) * z.amax().max(1.0);
        if res > limit {
            return Err(SpectralError::Inconsistent {
                what: "extended eigenvector residual",
                value: res,
                limit,
            });
        }
        per_color_residuals.push(res);
    }

    Ok(ExtensionResult {
        d: d.to_vec(),
        f: blocks.f,
        h: blocks.h,
        x: blocks.x.iter().copied().collect(),
        radii: blocks.pf.radii,
        solve_color,
        y: y.iter().copied().collect(),
        y_by_color,
        z: z.iter().copied().collect(),
        per_color_residuals,
        cross_color_discrepancy: cross,
        easyeq_discrepancy: easyeq,
    })
}

/// Colours in which component `d` strictly out-radiates every component
/// that reaches it. Pairs inside the tolerance band disqualify the colour.
pub fn dominant_colors(decomp: &ComponentDecomposition, d: usize, tol: &Tolerances) -> Vec<usize> {
    let k = decomp.radii.get(d).map_or(0, Vec::len);
    (0..k)
        .filter(|&i| {
            (0..decomp.len())
                .filter(|&c| c != d && decomp.leq(c, d))
                .all(|c| {
                    compare_radii(decomp.radii[c][i], decomp.radii[d][i], tol.radius_compare)
                        == RadiusOrdering::Less
                })
        })
        .collect()
}

/// Truncated quick-exit series `Σ_{n=0}^{N} ρ(A_{D,j})^{−(n+1)} E_j^n B_j x`
/// over `F`, which converges to the extension vector `y`.
pub fn quick_exit_weight(
    skel: &Skeleton,
    d: &[usize],
    color: usize,
    terms: usize,
    tol: &Tolerances,
) -> Result<Vec<f64>, SpectralError> {
    let blocks = extension_blocks(skel, d, tol)?;
    if blocks.f.is_empty() {
        return Ok(Vec::new());
    }
    let rho = blocks.pf.radii[color];
    let mut term = &blocks.b[color] * &blocks.x / rho;
    let mut acc = term.clone();
    for _ in 0..terms {
        term = &blocks.e[color] * term / rho;
        acc += &term;
    }
    Ok(acc.iter().copied().collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HypothesisGap {
    NotCoordinatewiseIrreducible {
        component: usize,
    },
    NotHereditary,
    /// No single-colour path from `component` into `D` in `color`.
    MissingBridge {
        component: usize,
        color: usize,
    },
    NotDominant {
        component: usize,
        rho_c: f64,
        rho_d: f64,
    },
}

/// `ρ(A_{C,i}) ≥ ρ(A_{D,i})` observed for a component other than `D`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reversal {
    pub component: usize,
    pub color: usize,
    pub rho_c: f64,
    pub rho_d: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum OrderingVerdict {
    HypothesisNotMet {
        gaps: Vec<HypothesisGap>,
        reversals: Vec<Reversal>,
    },
    ConclusionHolds,
    /// Hypotheses hold but some `ρ(A_{C,i}) < ρ(A_{D,i})` fails.
    Contradiction {
        reversals: Vec<Reversal>,
    },
    /// Some comparison fell inside the tolerance band.
    Degenerate {
        pairs: Vec<(usize, usize)>,
    },
}

impl OrderingVerdict {
    pub fn is_contradiction(&self) -> bool {
        matches!(self, OrderingVerdict::Contradiction { .. })
    }
}

/// Tests the spectral-ordering property for a hereditary component `d`:
/// if every other component reaches `D` by single-colour paths in every
/// colour and `D` strictly dominates in colour `j`, then `D` strictly
/// dominates in every colour.
pub fn check_spectral_ordering(
    skel: &Skeleton,
    decomp: &ComponentDecomposition,
    d: usize,
    j: usize,
    tol: &Tolerances,
) -> OrderingVerdict {
    let k = skel.k();
    let others: Vec<usize> = decomp.nontrivial().filter(|&c| c != d).collect();
    let mut gaps = Vec::new();
    let mut degenerate = Vec::new();

    for c in decomp.nontrivial() {
        if !decomp.coordinatewise_irreducible[c] {
            gaps.push(HypothesisGap::NotCoordinatewiseIrreducible { component: c });
        }
    }
    if !decomp.is_hereditary(d) {
        gaps.push(HypothesisGap::NotHereditary);
    }
    let target = &decomp.components[d];
    for i in 0..k {
        let reach = components::color_reachability(skel, i);
        for &c in &others {
            let bridged = decomp.components[c]
                .iter()
                .any(|&v| target.iter().any(|&w| reach[v][w]));
            if !bridged {
                gaps.push(HypothesisGap::MissingBridge {
                    component: c,
                    color: i,
                });
            }
        }
    }
    for &c in &others {
        let (rho_c, rho_d) = (decomp.radii[c][j], decomp.radii[d][j]);
        match compare_radii(rho_c, rho_d, tol.radius_compare) {
            RadiusOrdering::Less => {}
            RadiusOrdering::Degenerate => degenerate.push((c, j)),
            _ => gaps.push(HypothesisGap::NotDominant {
                component: c,
                rho_c,
                rho_d,
            }),
        }
    }

    let mut reversals = Vec::new();
    for i in 0..k {
        for &c in &others {
            let (rho_c, rho_d) = (decomp.radii[c][i], decomp.radii[d][i]);
            match compare_radii(rho_c, rho_d, tol.radius_compare) {
                RadiusOrdering::Less => {}
                RadiusOrdering::Degenerate => {
                    if i != j {
                        degenerate.push((c, i));
                    }
                }
                _ => reversals.push(Reversal {
                    component: c,
                    color: i,
                    rho_c,
                    rho_d,
                }),
            }
        }
    }

    if !gaps.is_empty() {
        OrderingVerdict::HypothesisNotMet { gaps, reversals }
    } else if !reversals.is_empty() {
        OrderingVerdict::Contradiction { reversals }
    } else if !degenerate.is_empty() {
        OrderingVerdict::Degenerate { pairs: degenerate }
    } else {
        OrderingVerdict::ConclusionHolds
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::decompose;

    fn mat(rows: &[&[f64]]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), rows.len(), |r, c| rows[r][c])
    }

    fn example1() -> Skeleton {
        Skeleton::from_rows(&[
            vec![vec![2, 2, 3], vec![0, 4, 0], vec![0, 0, 5]],
            vec![vec![2, 1, 2], vec![0, 3, 0], vec![0, 0, 4]],
        ])
        .unwrap()
    }

    fn example2() -> Skeleton {
        Skeleton::from_rows(&[
            vec![vec![5, 1, 1], vec![0, 10, 0], vec![0, 0, 11]],
            vec![vec![3, 2, 1], vec![0, 13, 0], vec![0, 0, 9]],
        ])
        .unwrap()
    }

    /// Roots of `t² − (a+d)t + (ad − bc)`; the larger one is the Perron root of
    /// a 2×2 nonnegative matrix.
    fn char_poly_root_2x2(a: f64, b: f64, c: f64, d: f64) -> f64 {
        let tr = a + d;
        let det = a * d - b * c;
        (tr + (tr * tr - 4.0 * det).sqrt()) / 2.0
    }

    #[test]
    fn radii_of_small_matrices() {
        assert_eq!(spectral_radius(&mat(&[&[5.0]])), 5.0);
        let s = example1();
        assert!((spectral_radius(&s.matrix(0).to_f64()) - 5.0).abs() < 1e-12);
        assert!((spectral_radius(&s.matrix(1).to_f64()) - 4.0).abs() < 1e-12);
        let ones = mat(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let oracle = char_poly_root_2x2(1.0, 1.0, 1.0, 1.0);
        assert!((spectral_radius(&ones) - oracle).abs() < 1e-12);
        assert!((oracle - 2.0).abs() < 1e-15);
    }

    #[test]
    fn radius_of_non_symmetric_irreducible() {
        let m = mat(&[&[1.0, 3.0], &[2.0, 0.0]]);
        let oracle = char_poly_root_2x2(1.0, 3.0, 2.0, 0.0);
        let pf = perron_vector(&m).unwrap();
        assert!((pf.radius - oracle).abs() < 1e-12);
        assert!(pf.residual < 1e-12);
        assert!((pf.vector.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(pf.vector.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn periodic_matrix_converges_with_shift() {
        let m = mat(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let pf = perron_vector(&m).unwrap();
        assert!((pf.radius - 1.0).abs() < 1e-12);
    }

    #[test]
    fn common_vectors() {
        let fam = vec![mat(&[&[5.0]]), mat(&[&[4.0]])];
        let pf = common_pf_eigenvector(&fam, 1e-9).unwrap();
        assert_eq!(pf.vector, vec![1.0]);
        assert_eq!(pf.radii, vec![5.0, 4.0]);

        let fam = vec![
            mat(&[&[0.0, 1.0], &[1.0, 0.0]]),
            mat(&[&[1.0, 1.0], &[1.0, 1.0]]),
        ];
        let pf = common_pf_eigenvector(&fam, 1e-9).unwrap();
        assert!((pf.vector[0] - 0.5).abs() < 1e-12);
        assert!((pf.radii[1] - 2.0).abs() < 1e-12);

        let pf = common_pf_eigenvector(&[mat(&[&[1.0, 2.0], &[2.0, 1.0]])], 1e-9).unwrap();
        assert!((pf.vector[0] - 0.5).abs() < 1e-12);
        assert!((pf.member(0).radius - 3.0).abs() < 1e-12);
    }

    #[test]
    fn non_commuting_family_is_rejected() {
        let fam = vec![
            mat(&[&[1.0, 2.0], &[1.0, 1.0]]),
            mat(&[&[1.0, 1.0], &[1.0, 1.0]]),
        ];
        assert!(matches!(
            common_pf_eigenvector(&fam, 1e-9),
            Err(SpectralError::NotSimultaneous { .. })
        ));
    }

    #[test]
    fn extension_example_one() {
        let s = example1();
        let tol = Tolerances::default();
        let ext = extend_eigenvector(&s, &[2], &[0, 1], &tol).unwrap();
        assert_eq!(ext.f, vec![0]);
        assert_eq!(ext.h, vec![1]);
        assert!((ext.y[0] - 1.0).abs() < 1e-12);
        assert!((ext.y_by_color[1].1[0] - 1.0).abs() < 1e-12);
        assert_eq!(ext.z, vec![ext.y[0], 0.0, 1.0]);
        assert!(ext.easyeq_discrepancy < 1e-12);
    }

    #[test]
    fn extension_example_two() {
        let s = example2();
        let tol = Tolerances::default();
        let b = extend_eigenvector(&s, &[1], &[1, 0], &tol).unwrap();
        assert!((b.y[0] - 0.2).abs() < 1e-12);
        assert!((b.y_by_color[1].1[0] - 0.2).abs() < 1e-12);
        let d = extend_eigenvector(&s, &[2], &[0, 1], &tol).unwrap();
        assert!((d.y[0] - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(d.h, vec![1]);
    }

    #[test]
    fn extension_preconditions() {
        let s = example1();
        let tol = Tolerances::default();
        assert_eq!(
            extend_eigenvector(&s, &[0], &[0], &tol).unwrap_err(),
            SpectralError::NotHereditary
        );
        assert_eq!(
            extend_eigenvector(&s, &[2], &[], &tol).unwrap_err(),
            SpectralError::EmptyColorSet
        );
        // {v} has radius 4 in colour 1 while u feeds it with radius 2: fine.
        // With a feeder radius above D's the system is singular.
        let t = Skeleton::from_rows(&[vec![vec![6, 1], vec![0, 5]], vec![vec![6, 1], vec![0, 5]]])
            .unwrap();
        assert!(matches!(
            extend_eigenvector(&t, &[1], &[0], &tol),
            Err(SpectralError::Singular { color: 0, .. })
        ));
    }

    #[test]
    fn quick_exit_series() {
        let s = example1();
        let tol = Tolerances::default();
        let q0 = quick_exit_weight(&s, &[2], 0, 0, &tol).unwrap();
        assert!((q0[0] - 0.6).abs() < 1e-15);
        // Geometric series 3/5 Σ (2/5)^n → 1.
        let q = quick_exit_weight(&s, &[2], 0, 60, &tol).unwrap();
        assert!((q[0] - 1.0).abs() < 1e-10);
        let single = Skeleton::from_rows(&[vec![vec![3]]]).unwrap();
        assert!(quick_exit_weight(&single, &[0], 0, 10, &tol)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn ordering_example_one() {
        let s = example1();
        let d = decompose(&s);
        let v = check_spectral_ordering(&s, &d, 2, 0, &Tolerances::default());
        // {v} does not reach {w}, so the bridge hypothesis fails there, yet
        // every radius still sits below D's.
        match v {
            OrderingVerdict::HypothesisNotMet { gaps, reversals } => {
                assert_eq!(
                    gaps,
                    vec![
                        HypothesisGap::MissingBridge {
                            component: 1,
                            color: 0
                        },
                        HypothesisGap::MissingBridge {
                            component: 1,
                            color: 1
                        },
                    ]
                );
                assert!(reversals.is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ordering_two_component_dumbbell() {
        // (n2 - m2) p1 = 2·1 = (n1 - m1) p2 = 1·2
        let s = Skeleton::from_rows(&[vec![vec![2, 1], vec![0, 3]], vec![vec![2, 2], vec![0, 4]]])
            .unwrap();
        let d = decompose(&s);
        assert_eq!(
            check_spectral_ordering(&s, &d, 1, 0, &Tolerances::default()),
            OrderingVerdict::ConclusionHolds
        );
    }

    #[test]
    fn ordering_appendix_counterexample() {
        let s = Skeleton::from_rows(&[
            vec![vec![1, 2, 2], vec![0, 3, 0], vec![0, 0, 5]],
            vec![vec![1, 3, 1], vec![0, 4, 0], vec![0, 0, 3]],
        ])
        .unwrap();
        let d = decompose(&s);
        match check_spectral_ordering(&s, &d, 2, 0, &Tolerances::default()) {
            OrderingVerdict::HypothesisNotMet { gaps, reversals } => {
                assert!(gaps.contains(&HypothesisGap::MissingBridge {
                    component: 1,
                    color: 0
                }));
                assert!(reversals.contains(&Reversal {
                    component: 1,
                    color: 1,
                    rho_c: 4.0,
                    rho_d: 3.0
                }));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn comparisons() {
        assert_eq!(compare_radii(2.0, 3.0, 1e-9), RadiusOrdering::Less);
        assert_eq!(compare_radii(3.0, 3.0, 1e-9), RadiusOrdering::Equal);
        assert_eq!(
            compare_radii(3.0 + 1e-12, 3.0, 1e-9),
            RadiusOrdering::Degenerate
        );
        assert_eq!(compare_radii(4.0, 3.0, 1e-9), RadiusOrdering::Greater);
    }
}
