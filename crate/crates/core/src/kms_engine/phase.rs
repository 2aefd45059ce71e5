use serde::{Deserialize, Serialize};

use super::procedure::{kms1_frame, supercritical_in, CriticalComponent};
use super::{approx_eq, Dynamics, ExtremeState, KmsError, KmsOptions};
use crate::components::{check_assumptions, decompose, weak_pieces};
use crate::graph_core::Skeleton;
use crate::spectral::spectral_radius;
use crate::Tolerances;

/// Relative tolerance for matching an inverse temperature to a critical value.
const BETA_MATCH: f64 = 1e-9;
/// Critical values closer than this (relative) are merged.
const BETA_DEDUP: f64 = 1e-12;

/// One quotient in the recursive sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseNode {
    pub depth: usize,
    pub vertices: Vec<usize>,
    /// `max_i ln ρ(A_{·,i}) / r_i` on this quotient; `None` when it is not
    /// positive, in which case the quotient is supercritical for every β > 0.
    pub beta_c: Option<f64>,
    /// Colour attaining `beta_c` and its spectral radius on this quotient.
    pub limiting_color: Option<usize>,
    pub limiting_radius: f64,
    pub components: Vec<CriticalComponent>,
    /// `H ∪ G` removed before recursing.
    pub removed: Vec<usize>,
    /// Extreme KMS states at `beta_c`.
    pub states: Vec<ExtremeState>,
    pub sources_present: bool,
    pub children: Vec<PhaseNode>,
}

enum Position {
    Above,
    At,
    Below,
}

impl PhaseNode {
    fn position(&self, beta: f64) -> Position {
        match self.beta_c {
            None => Position::Above,
            Some(b) if approx_eq(beta, b, BETA_MATCH) => Position::At,
            Some(b) if beta > b => Position::Above,
            Some(_) => Position::Below,
        }
    }

    fn count_at(&self, beta: f64) -> usize {
        match self.position(beta) {
            Position::Above => self.vertices.len(),
            Position::At => self.states.len(),
            Position::Below => self.children.iter().map(|c| c.count_at(beta)).sum(),
        }
    }

    fn supercritical_pieces(&self, beta: f64, out: &mut Vec<Vec<usize>>) {
        match self.position(beta) {
            Position::Above => out.push(self.vertices.clone()),
            Position::At => {}
            Position::Below => self
                .children
                .iter()
                .for_each(|c| c.supercritical_pieces(beta, out)),
        }
    }

    fn collect(
        &self,
        full: &Skeleton,
        r: &[f64],
        beta: f64,
        tol: &Tolerances,
        out: &mut Vec<ExtremeState>,
    ) -> Result<(), KmsError> {
        match self.position(beta) {
            Position::Above => {
                let sub = full.induced(&self.vertices);
                out.extend(supercritical_in(
                    full.vertex_count(),
                    &sub,
                    &self.vertices,
                    r,
                    beta,
                    self.depth,
                    tol,
                )?);
            }
            Position::At => out.extend(self.states.iter().cloned()),
            Position::Below => {
                for child in &self.children {
                    child.collect(full, r, beta, tol, out)?;
                }
            }
        }
        Ok(())
    }

    fn walk<'a>(&'a self, out: &mut Vec<&'a PhaseNode>) {
        out.push(self);
        for c in &self.children {
            c.walk(out);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeKind {
    /// Open interval of supercritical behaviour (including `β > 1`).
    Interval,
    /// A single critical value.
    Point,
}

/// A stretch of the β axis on which the simplex of KMS_β states has a fixed
/// description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub kind: RegimeKind,
    /// `None` means unbounded (0 below, ∞ above).
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub extreme_count: usize,
    /// On intervals, each vertex `v` of each piece generates the extreme point
    /// `m ∝ [∏_i (1 − e^{−βr_i}A_{piece,i})]⁻¹ δ_v`.
    pub supercritical_pieces: Vec<Vec<usize>>,
    /// Explicit extreme states at a critical value.
    pub states: Vec<ExtremeState>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram {
    /// Strictly decreasing, starting at 1.
    pub critical_betas: Vec<f64>,
    pub regimes: Vec<Regime>,
    /// Below this there are no KMS states; `None` if some quotient stays
    /// supercritical for all β.
    pub terminal_beta: Option<f64>,
    pub r: Vec<f64>,
    pub root: PhaseNode,
    pub warnings: Vec<String>,
}

impl PhaseDiagram {
    /// Number of extreme KMS_β states.
    pub fn count_at(&self, beta: f64) -> usize {
        self.root.count_at(beta)
    }

    /// Extreme KMS_β states for any `β > 0`.
    pub fn extremes_at(
        &self,
        full: &Skeleton,
        beta: f64,
        tol: &Tolerances,
    ) -> Result<Vec<ExtremeState>, KmsError> {
        if !(beta > 0.0) {
            return Err(KmsError::NonPositiveBeta(beta));
        }
        let mut out = Vec::new();
        self.root.collect(full, &self.r, beta, tol, &mut out)?;
        Ok(out)
    }

    /// Every quotient visited by the recursion, depth first.
    pub fn nodes(&self) -> Vec<&PhaseNode> {
        let mut out = Vec::new();
        self.root.walk(&mut out);
        out
    }

    /// Explicit states at each critical value.
    pub fn critical_points(&self) -> impl Iterator<Item = &Regime> {
        self.regimes.iter().filter(|r| r.kind == RegimeKind::Point)
    }
}

fn build_node(
    full: &Skeleton,
    verts: Vec<usize>,
    r: &[f64],
    depth: usize,
    tol: &Tolerances,
    warnings: &mut Vec<String>,
) -> Result<PhaseNode, KmsError> {
    let sub = full.induced(&verts);
    let mut beta_c = f64::NEG_INFINITY;
    let mut limiting_color = None;
    let mut limiting_radius = 0.0;
    for (i, a) in sub.matrices().iter().enumerate() {
        let rho = spectral_radius(&a.to_f64());
        let ratio = rho.ln() / r[i];
        if ratio > beta_c {
            beta_c = ratio;
            limiting_color = Some(i);
            limiting_radius = rho;
        }
    }
    if depth == 0 && approx_eq(beta_c, 1.0, BETA_DEDUP) {
        beta_c = 1.0;
    }
    if !(beta_c > 0.0) {
        warnings.push(format!(
            "quotient on {verts:?} has no colour with radius above 1: supercritical for every β"
        ));
        return Ok(PhaseNode {
            depth,
            vertices: verts,
            beta_c: None,
            limiting_color,
            limiting_radius,
            components: Vec::new(),
            removed: Vec::new(),
            states: Vec::new(),
            sources_present: false,
            children: Vec::new(),
        });
    }

    let frame = kms1_frame(full, &verts, r, beta_c, depth, tol)?;
    if depth > 0 && !frame.assumptions.all_pass {
        warnings.push(format!(
            "standing assumptions fail on quotient {verts:?} at depth {depth}"
        ));
    }
    warnings.extend(frame.warnings.iter().map(|w| format!("depth {depth}: {w}")));

    let rest_skel = full.induced(&frame.rest);
    let mut children = Vec::new();
    for piece in weak_pieces(&rest_skel) {
        let piece_verts = piece.iter().map(|&v| frame.rest[v]).collect();
        children.push(build_node(full, piece_verts, r, depth + 1, tol, warnings)?);
    }
    Ok(PhaseNode {
        depth,
        vertices: verts,
        beta_c: Some(beta_c),
        limiting_color,
        limiting_radius,
        components: frame.components,
        removed: frame.removal.union(),
        states: frame.states,
        sources_present: frame.sources_present,
        children,
    })
}

/// Recursive sweep over β: supercritical above each critical value, explicit
/// extreme states at it, then the quotient by the removed hereditary set is
/// split into pieces and each piece is treated the same way with its own
/// critical value on the original β axis.
pub fn phase_diagram(
    skel: &Skeleton,
    dynamics: &Dynamics,
    opts: &KmsOptions,
) -> Result<PhaseDiagram, KmsError> {
    let report = check_assumptions(skel, &decompose(skel));
    if !report.all_pass && !opts.allow_violations {
        return Err(KmsError::Assumptions(Box::new(report)));
    }
    let tol = &opts.tol;
    let mut warnings = Vec::new();
    if !dynamics.rationally_independent {
        warnings.push("rates are not attested rationally independent: no uniqueness claim".into());
    }
    let root = build_node(
        skel,
        (0..skel.vertex_count()).collect(),
        &dynamics.r,
        0,
        tol,
        &mut warnings,
    )?;

    let mut betas: Vec<f64> = Vec::new();
    let mut stack = vec![&root];
    let mut forever_supercritical = false;
    while let Some(node) = stack.pop() {
        match node.beta_c {
            Some(b) => betas.push(b),
            None => forever_supercritical = true,
        }
        stack.extend(node.children.iter());
    }
    betas.sort_by(|a, b| b.total_cmp(a));
    betas.dedup_by(|a, b| approx_eq(*a, *b, BETA_DEDUP));

    let diagram = PhaseDiagram {
        critical_betas: betas.clone(),
        regimes: Vec::new(),
        terminal_beta: if forever_supercritical {
            None
        } else {
            betas.last().copied()
        },
        r: dynamics.r.clone(),
        root,
        warnings,
    };

    let interval = |lower: Option<f64>, upper: Option<f64>| {
        let sample = match (lower, upper) {
            (Some(l), Some(u)) => 0.5 * (l + u),
            (Some(l), None) => 2.0 * l,
            (None, Some(u)) => 0.5 * u,
            (None, None) => 1.0,
        };
        let mut pieces = Vec::new();
        diagram.root.supercritical_pieces(sample, &mut pieces);
        Regime {
            kind: RegimeKind::Interval,
            lower,
            upper,
            extreme_count: diagram.count_at(sample),
            supercritical_pieces: pieces,
            states: Vec::new(),
        }
    };

    let mut regimes = Vec::new();
    let mut upper = None;
    for &b in &betas {
        regimes.push(interval(Some(b), upper));
        let states = diagram.extremes_at(skel, b, tol)?;
        regimes.push(Regime {
            kind: RegimeKind::Point,
            lower: Some(b),
            upper: Some(b),
            extreme_count: states.len(),
            supercritical_pieces: Vec::new(),
            states,
        });
        upper = Some(b);
    }
    regimes.push(interval(None, upper));

    Ok(PhaseDiagram { regimes, ..diagram })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kms_engine::{normalize_dynamics, verify_state, DynamicsSpec};

    fn preferred(rows: &[Vec<Vec<u64>>]) -> (Skeleton, Dynamics) {
        let s = Skeleton::from_rows(rows).unwrap();
        let d =
            normalize_dynamics(&s, &DynamicsSpec::Preferred, true, &Tolerances::default()).unwrap();
        (s, d)
    }

    #[test]
    fn example_one_sweep() {
        let (s, d) = preferred(&[
            vec![vec![2, 2, 3], vec![0, 4, 0], vec![0, 0, 5]],
            vec![vec![2, 1, 2], vec![0, 3, 0], vec![0, 0, 4]],
        ]);
        let pd = phase_diagram(&s, &d, &KmsOptions::default()).unwrap();
        let b1 = 4f64.ln() / 5f64.ln();
        let b2 = 2f64.ln() / 4f64.ln();
        assert_eq!(pd.critical_betas.len(), 3);
        assert_eq!(pd.critical_betas[0], 1.0);
        assert!((pd.critical_betas[1] - b1).abs() < 1e-12);
        assert!((pd.critical_betas[2] - b2).abs() < 1e-12);
        let counts: Vec<usize> = pd.regimes.iter().map(|r| r.extreme_count).collect();
        assert_eq!(counts, vec![3, 3, 2, 2, 1, 1, 0]);
        assert_eq!(pd.terminal_beta, Some(pd.critical_betas[2]));

        let at_b1 = pd.extremes_at(&s, b1, &Tolerances::default()).unwrap();
        let ms: Vec<&Vec<f64>> = at_b1.iter().map(|st| &st.m).collect();
        assert!((ms[0][0] - 0.5).abs() < 1e-9 && (ms[0][1] - 0.5).abs() < 1e-9);
        assert_eq!(ms[1], &vec![1.0, 0.0, 0.0]);
        for beta in [5.0, 1.0, 0.95, b1, 0.7, b2, 0.3] {
            for st in pd.extremes_at(&s, beta, &Tolerances::default()).unwrap() {
                assert!(
                    verify_state(&s, &d, beta, &st.m, 1e-9).unwrap().passed,
                    "β={beta}"
                );
            }
        }
    }

    #[test]
    fn single_vertex() {
        let (s, d) = preferred(&[vec![vec![2]], vec![vec![3]]]);
        let pd = phase_diagram(&s, &d, &KmsOptions::default()).unwrap();
        assert_eq!(pd.critical_betas, vec![1.0]);
        assert_eq!(pd.count_at(1.0), 1);
        assert_eq!(pd.count_at(0.5), 0);
        assert_eq!(pd.regimes[1].states[0].m, vec![1.0]);
    }
}
