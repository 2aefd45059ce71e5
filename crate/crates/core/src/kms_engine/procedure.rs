use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{
    approx_eq, lift, normalize_l1, Dynamics, ExtremeState, KmsError, KmsOptions, StateKind,
};
use crate::components::{
    check_assumptions, complement, decompose, hereditary_closure, is_irreducible_block, restrict,
    AssumptionReport, ComponentDecomposition,
};
use crate::graph_core::Skeleton;
use crate::spectral::{self, dominant_colors, extend_eigenvector, ExtensionResult};
use crate::Tolerances;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalComponent {
    pub vertices: Vec<usize>,
    /// Colours `j` with `r_j = ln ρ(A_{C,j})`, `j` saturated and `A_{C,j}`
    /// irreducible. Empty for non-critical components.
    pub colors: Vec<usize>,
    /// Critical and not reached by any other critical component.
    pub minimal: bool,
    pub hereditary: bool,
}

impl CriticalComponent {
    pub fn is_critical(&self) -> bool {
        !self.colors.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalSet {
    /// Hereditary closure of `g` with `g` taken out.
    pub h: Vec<usize>,
    /// Union of the minimal critical components.
    pub g: Vec<usize>,
    pub minimal_components: Vec<Vec<usize>>,
}

impl RemovalSet {
    pub fn union(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.h.iter().chain(&self.g).copied().collect();
        all.sort_unstable();
        all
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiExtension {
    pub state: ExtremeState,
    /// Extension data in the frame of the graph `ψ_D` was built on.
    pub extension: ExtensionResult,
    /// Colours used for the solve, critical colour first.
    pub colors: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kms1Result {
    pub states: Vec<ExtremeState>,
    pub components: Vec<CriticalComponent>,
    pub removal: RemovalSet,
    /// Vertices left after removing `H ∪ G`.
    pub rest: Vec<usize>,
    /// `|Λ⁰ \ (H ∪ G)| + |minimal critical components|`.
    pub expected_count: usize,
    pub all_critical_hereditary: bool,
    pub assumptions: AssumptionReport,
    pub sources_present: bool,
    pub rationally_independent: bool,
    pub warnings: Vec<String>,
}

fn critical_in(
    sub: &Skeleton,
    decomp: &ComponentDecomposition,
    r: &[f64],
    tol: &Tolerances,
    warnings: &mut Vec<String>,
) -> Vec<CriticalComponent> {
    let k = sub.k();
    let total: Vec<f64> = (0..k)
        .map(|i| decomp.radii.iter().map(|row| row[i]).fold(0.0, f64::max))
        .collect();
    let saturated: Vec<usize> = (0..k)
        .filter(|&i| approx_eq(total[i].ln(), r[i], tol.criticality))
        .collect();
    let mut colors: Vec<Vec<usize>> = Vec::with_capacity(decomp.len());
    for c in 0..decomp.len() {
        let comp = &decomp.components[c];
        let mut cs = Vec::new();
        for i in 0..k {
            let log_rho = decomp.radii[c][i].ln();
            let hit = approx_eq(log_rho, r[i], tol.criticality);
            if hit && saturated.contains(&i) && is_irreducible_block(sub, i, comp) {
                cs.push(i);
            } else if !hit && approx_eq(log_rho, r[i], 1e-6) {
                warnings.push(format!(
                    "component {comp:?} is within 1e-6 of critical in colour {i} (ln ρ = {log_rho}, r = {})",
                    r[i]
                ));
            }
        }
        colors.push(cs);
    }
    (0..decomp.len())
        .map(|c| {
            let critical = !colors[c].is_empty();
            let minimal = critical
                && (0..decomp.len()).all(|d| d == c || colors[d].is_empty() || !decomp.leq(d, c));
            CriticalComponent {
                vertices: decomp.components[c].clone(),
                colors: colors[c].clone(),
                minimal,
                hereditary: decomp.is_hereditary(c),
            }
        })
        .collect()
}

fn removal_in(sub: &Skeleton, crit: &[CriticalComponent]) -> RemovalSet {
    let minimal_components: Vec<Vec<usize>> = crit
        .iter()
        .filter(|c| c.minimal)
        .map(|c| c.vertices.clone())
        .collect();
    let mut g: Vec<usize> = minimal_components.iter().flatten().copied().collect();
    g.sort_unstable();
    let h = hereditary_closure(sub, &g)
        .into_iter()
        .filter(|v| g.binary_search(v).is_err())
        .collect();
    RemovalSet {
        h,
        g,
        minimal_components,
    }
}

/// `ψ_D` on `sub \ h`, returned as a vector over `sub`.
fn psi_in(
    sub: &Skeleton,
    h: &[usize],
    d: &[usize],
    color: usize,
    r: &[f64],
    tol: &Tolerances,
) -> Result<(Vec<f64>, bool, ExtensionResult, Vec<usize>), KmsError> {
    let keep = complement(sub.vertex_count(), h);
    let reduced = restrict(sub, h)?;
    let local_d: Vec<usize> = d
        .iter()
        .map(|v| {
            keep.binary_search(v)
                .expect("D lies outside the removed set")
        })
        .collect();
    let decomp = decompose(&reduced);
    let c = decomp.component_of(local_d[0]);
    if decomp.components[c] != local_d || !decomp.is_hereditary(c) {
        return Err(KmsError::NotCriticalComponent(d.to_vec()));
    }
    let dominant = dominant_colors(&decomp, c, tol);
    if !dominant.contains(&color) {
        return Err(KmsError::NotDominant {
            component: d.to_vec(),
            color,
        });
    }
    let mut colors = vec![color];
    colors.extend(dominant.into_iter().filter(|&i| i != color));
    let ext = extend_eigenvector(&reduced, &local_d, &colors, tol)?;
    let m = lift(&normalize_l1(&ext.z), &keep, sub.vertex_count());
    let factors = (0..r.len()).all(|i| approx_eq(r[i], ext.radii[i].ln(), tol.criticality));
    Ok((m, factors, ext, colors))
}

/// Supercritical extreme points on `sub`, whose vertices sit at `verts` in a
/// graph with `n` vertices.
pub(crate) fn supercritical_in(
    n: usize,
    sub: &Skeleton,
    verts: &[usize],
    r: &[f64],
    beta: f64,
    depth: usize,
    tol: &Tolerances,
) -> Result<Vec<ExtremeState>, KmsError> {
    let size = sub.vertex_count();
    if size == 0 {
        return Ok(Vec::new());
    }
    let mut critical = f64::NEG_INFINITY;
    let mut strict = true;
    for (i, a) in sub.matrices().iter().enumerate() {
        let log_rho = spectral::spectral_radius(&a.to_f64()).ln();
        critical = critical.max(log_rho / r[i]);
        let margin = beta * r[i] - log_rho;
        if !(margin > tol.criticality * (beta * r[i]).max(1.0)) {
            strict = false;
        }
    }
    if !strict {
        return Err(KmsError::NotSupercritical { beta, critical });
    }
    let factors: Vec<DMatrix<f64>> = sub
        .matrices()
        .iter()
        .enumerate()
        .map(|(i, a)| DMatrix::identity(size, size) - a.to_f64() * (-beta * r[i]).exp())
        .collect();
    let product = factors
        .iter()
        .fold(DMatrix::identity(size, size), |acc, f| acc * f);
    let mut out = Vec::with_capacity(size);
    for v in 0..size {
        let mut e = DVector::zeros(size);
        e[v] = 1.0;
        let x = spectral::solve_checked(product.clone(), &e, tol.linear_residual)?;
        let scale = x.amax();
        if let Some(&value) = x.iter().find(|&&t| t < -tol.state * scale) {
            return Err(KmsError::NegativeResolvent {
                vertex: verts[v],
                value,
            });
        }
        let local = normalize_l1(&x.iter().map(|t| t.max(0.0)).collect::<Vec<_>>());
        let mv = DVector::from_column_slice(&local);
        let through = factors.iter().all(|f| (f * &mv).amax() <= tol.state);
        out.push(ExtremeState {
            beta,
            m: lift(&local, verts, n),
            kind: StateKind::LiftedPointMass {
                vertex: verts[v],
                depth,
            },
            factors_through_ck: through,
        });
    }
    Ok(out)
}

pub(crate) struct FrameKms1 {
    pub components: Vec<CriticalComponent>,
    pub removal: RemovalSet,
    pub states: Vec<ExtremeState>,
    pub rest: Vec<usize>,
    pub sources_present: bool,
    pub assumptions: AssumptionReport,
    pub warnings: Vec<String>,
}

fn map_ids(local: &[usize], verts: &[usize]) -> Vec<usize> {
    local.iter().map(|&v| verts[v]).collect()
}

/// The KMS₁ procedure on the subgraph `verts` of `full`, run for the
/// dynamics `beta_c · r`; states are reported at inverse temperature `beta_c`
/// in the frame of `full`.
pub(crate) fn kms1_frame(
    full: &Skeleton,
    verts: &[usize],
    r: &[f64],
    beta_c: f64,
    depth: usize,
    tol: &Tolerances,
) -> Result<FrameKms1, KmsError> {
    let n = full.vertex_count();
    let sub = full.induced(verts);
    let r_level: Vec<f64> = r.iter().map(|x| x * beta_c).collect();
    let decomp = decompose(&sub);
    let assumptions = check_assumptions(&sub, &decomp);
    let mut warnings = Vec::new();
    let local_components = critical_in(&sub, &decomp, &r_level, tol, &mut warnings);
    if !local_components.iter().any(CriticalComponent::is_critical) {
        return Err(KmsError::NoCriticalComponent { depth });
    }
    let removal = removal_in(&sub, &local_components);

    let mut states = Vec::new();
    for comp in local_components.iter().filter(|c| c.minimal) {
        let (m, factors, _, _) = psi_in(
            &sub,
            &removal.h,
            &comp.vertices,
            comp.colors[0],
            &r_level,
            tol,
        )?;
        states.push(ExtremeState {
            beta: beta_c,
            m: lift(&m, verts, n),
            kind: StateKind::PsiD {
                component: map_ids(&comp.vertices, verts),
                depth,
            },
            factors_through_ck: factors,
        });
    }

    let rest_local = complement(sub.vertex_count(), &removal.union());
    let rest_skel = sub.induced(&rest_local);
    let rest = map_ids(&rest_local, verts);
    let sources_present = !rest_skel.source_vertices().is_empty();
    if sources_present {
        warnings.push(format!("quotient on {rest:?} has sources"));
    }
    states.extend(supercritical_in(
        n, &rest_skel, &rest, r, beta_c, depth, tol,
    )?);

    let components = local_components
        .into_iter()
        .map(|c| CriticalComponent {
            vertices: map_ids(&c.vertices, verts),
            ..c
        })
        .collect();
    let removal = RemovalSet {
        h: map_ids(&removal.h, verts),
        g: map_ids(&removal.g, verts),
        minimal_components: removal
            .minimal_components
            .iter()
            .map(|c| map_ids(c, verts))
            .collect(),
    };
    Ok(FrameKms1 {
        components,
        removal,
        states,
        rest,
        sources_present,
        assumptions,
        warnings,
    })
}

/// Every component with its critical colours (possibly none).
pub fn critical_components(
    skel: &Skeleton,
    dynamics: &Dynamics,
    tol: &Tolerances,
) -> Vec<CriticalComponent> {
    let decomp = decompose(skel);
    critical_in(skel, &decomp, &dynamics.r, tol, &mut Vec::new())
}

pub fn removal_set(
    skel: &Skeleton,
    dynamics: &Dynamics,
    opts: &KmsOptions,
) -> Result<RemovalSet, KmsError> {
    let decomp = decompose(skel);
    let report = check_assumptions(skel, &decomp);
    if !report.all_pass && !opts.allow_violations {
        return Err(KmsError::Assumptions(Box::new(report)));
    }
    let crit = critical_in(skel, &decomp, &dynamics.r, &opts.tol, &mut Vec::new());
    Ok(removal_in(skel, &crit))
}

/// `ψ_D` together with the extension data behind it. `d` must be a
/// hereditary critical component of `skel`.
pub fn psi_extension(
    skel: &Skeleton,
    dynamics: &Dynamics,
    d: &[usize],
    tol: &Tolerances,
) -> Result<PsiExtension, KmsError> {
    let mut d = d.to_vec();
    d.sort_unstable();
    let comp = critical_components(skel, dynamics, tol)
        .into_iter()
        .find(|c| c.vertices == d && c.is_critical() && c.hereditary)
        .ok_or_else(|| KmsError::NotCriticalComponent(d.clone()))?;
    let (m, factors, extension, colors) = psi_in(skel, &[], &d, comp.colors[0], &dynamics.r, tol)?;
    Ok(PsiExtension {
        state: ExtremeState {
            beta: 1.0,
            m,
            kind: StateKind::PsiD {
                component: d,
                depth: 0,
            },
            factors_through_ck: factors,
        },
        extension,
        colors,
    })
}

pub fn psi_state(
    skel: &Skeleton,
    dynamics: &Dynamics,
    d: &[usize],
    tol: &Tolerances,
) -> Result<ExtremeState, KmsError> {
    psi_extension(skel, dynamics, d, tol).map(|p| p.state)
}

/// The `|Λ⁰|` extreme KMS_β states for `β` strictly above criticality.
pub fn supercritical_extremes(
    skel: &Skeleton,
    dynamics: &Dynamics,
    beta: f64,
    tol: &Tolerances,
) -> Result<Vec<ExtremeState>, KmsError> {
    if !(beta > 0.0) {
        return Err(KmsError::NonPositiveBeta(beta));
    }
    let verts: Vec<usize> = (0..skel.vertex_count()).collect();
    supercritical_in(skel.vertex_count(), skel, &verts, &dynamics.r, beta, 0, tol)
}

/// Extreme KMS₁ states: one `ψ_D` per minimal critical component and the
/// supercritical extreme points of the quotient by `H ∪ G`.
pub fn kms1_extremes(
    skel: &Skeleton,
    dynamics: &Dynamics,
    opts: &KmsOptions,
) -> Result<Kms1Result, KmsError> {
    let verts: Vec<usize> = (0..skel.vertex_count()).collect();
    let frame = kms1_frame(skel, &verts, &dynamics.r, 1.0, 0, &opts.tol)?;
    if !frame.assumptions.all_pass && !opts.allow_violations {
        return Err(KmsError::Assumptions(Box::new(frame.assumptions)));
    }
    let mut warnings = frame.warnings;
    if !dynamics.rationally_independent {
        warnings.push("rates are not attested rationally independent: no uniqueness claim".into());
    }
    let all_critical_hereditary = frame
        .components
        .iter()
        .filter(|c| c.is_critical())
        .all(|c| c.hereditary);
    Ok(Kms1Result {
        expected_count: frame.rest.len() + frame.removal.minimal_components.len(),
        states: frame.states,
        components: frame.components,
        removal: frame.removal,
        rest: frame.rest,
        all_critical_hereditary,
        assumptions: frame.assumptions,
        sources_present: frame.sources_present,
        rationally_independent: dynamics.rationally_independent,
        warnings,
    })
}
