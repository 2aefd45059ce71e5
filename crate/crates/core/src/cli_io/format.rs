use std::fmt::Write as _;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use super::report::{KmsSection, ReportDocument};
use crate::kms_engine::{ExtremeState, RegimeKind, StateKind};
use crate::spectral::OrderingVerdict;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Text,
}

pub const MAX_DENOMINATOR: i64 = 1_000_000;
/// Relative distance at which a float is printed as a rational.
pub const SNAP_TOLERANCE: f64 = 1e-14;

/// Best rational approximation with denominator at most `max_den` that is
/// within `tol` of `x`, found from the continued-fraction convergents.
pub fn snap_rational(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i64;
        let h = a.checked_mul(h1)?.checked_add(h0)?;
        let k = a.checked_mul(k1)?.checked_add(k0)?;
        if k > max_den {
            return None;
        }
        if (x - h as f64 / k as f64).abs() <= tol {
            return Some((h, k));
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        let frac = y - a as f64;
        if frac <= 0.0 {
            return None;
        }
        y = 1.0 / frac;
    }
    None
}

/// Exact-looking rendering: `p/q` when `x` is a small rational, otherwise
/// `≈` and the float.
pub fn format_number(x: f64) -> String {
    match snap_rational(x, MAX_DENOMINATOR, SNAP_TOLERANCE * x.abs().max(1.0)) {
        Some((p, 1)) => p.to_string(),
        Some((p, q)) => format!("{p}/{q}"),
        None => format!("≈{x:.12}"),
    }
}

fn vector(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|&x| format_number(x)).collect();
    format!("({})", parts.join(", "))
}

fn labels(ids: &[usize], names: &[String]) -> String {
    let parts: Vec<&str> = ids
        .iter()
        .map(|&v| names.get(v).map_or("?", String::as_str))
        .collect();
    format!("{{{}}}", parts.join(","))
}

fn describe_state(st: &ExtremeState, names: &[String]) -> String {
    let kind = match &st.kind {
        StateKind::PsiD { component, depth } => {
            format!("psi_D D={} depth {depth}", labels(component, names))
        }
        StateKind::LiftedPointMass { vertex, depth } => {
            format!("point mass at {} depth {depth}", labels(&[*vertex], names))
        }
    };
    let factors = if st.factors_through_ck { "yes" } else { "no" };
    format!(
        "m = {}  [{kind}; factors through CK: {factors}]",
        vector(&st.m)
    )
}

fn kms_block(out: &mut String, kms: &KmsSection, names: &[String]) {
    let _ = writeln!(
        out,
        "KMS states at β = {} ({} extreme):",
        kms.beta, kms.extreme_count
    );
    for st in &kms.states {
        let _ = writeln!(out, "  {}", describe_state(st, names));
    }
}

fn text(report: &ReportDocument) -> String {
    let names = &report.vertices;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {} ({})",
        report.tool, report.version, report.command
    );
    if !names.is_empty() {
        let _ = writeln!(out, "vertices: {}", names.join(" "));
    }
    if let Some(v) = &report.validation {
        if v.passed {
            let _ = writeln!(out, "validation: passed");
        } else {
            let _ = writeln!(out, "validation: FAILED");
            for viol in &v.violations {
                let _ = writeln!(out, "  [{}] {}", viol.rule, viol.message);
            }
        }
    }
    if let Some(a) = &report.assumptions {
        let flag = |b: bool| if b { "ok" } else { "VIOLATED" };
        let _ = writeln!(
            out,
            "assumptions: no trivial components {}, no isolated pieces {}, irreducible with radius > 1 {}, colour-uniform bridges {}",
            flag(a.a1_no_trivial),
            flag(a.a1_no_isolated),
            flag(a.a2_irreducible_and_rho_gt_1),
            flag(a.a3_color_uniform_bridges)
        );
    }
    if let Some(c) = &report.components {
        let _ = writeln!(out, "components (block upper triangular order):");
        for (idx, comp) in c.components.iter().enumerate() {
            let radii: Vec<String> = c.radii[idx].iter().map(|&x| format_number(x)).collect();
            let mut notes = Vec::new();
            if c.trivial[idx] {
                notes.push("trivial");
            }
            if c.is_hereditary(idx) {
                notes.push("hereditary");
            }
            if !c.coordinatewise_irreducible[idx] {
                notes.push("not coordinatewise irreducible");
            }
            let _ = writeln!(
                out,
                "  C{idx} {}  radii ({})  {}",
                labels(comp, names),
                radii.join(", "),
                notes.join(", ")
            );
        }
    }
    if let Some(s) = &report.spectra {
        let radii: Vec<String> = s.color_radii.iter().map(|&x| format_number(x)).collect();
        let _ = writeln!(out, "spectral radii per colour: ({})", radii.join(", "));
        for e in &s.extensions {
            match (&e.result, &e.error) {
                (Some(r), _) => {
                    let _ = writeln!(
                        out,
                        "  extension from {} via colours {:?}: z = {}, cross-colour discrepancy {:e}",
                        labels(&e.component, names),
                        e.colors,
                        vector(&r.z),
                        r.cross_color_discrepancy
                    );
                }
                (None, Some(err)) => {
                    let _ = writeln!(
                        out,
                        "  extension from {}: {err}",
                        labels(&e.component, names)
                    );
                }
                _ => {}
            }
        }
        for o in &s.orderings {
            let verdict = match &o.verdict {
                OrderingVerdict::HypothesisNotMet { gaps, reversals } => {
                    format!(
                        "hypothesis not met ({} gaps, {} reversals)",
                        gaps.len(),
                        reversals.len()
                    )
                }
                OrderingVerdict::ConclusionHolds => "conclusion holds".to_string(),
                OrderingVerdict::Contradiction { .. } => "CONTRADICTION".to_string(),
                OrderingVerdict::Degenerate { .. } => "degenerate (tighten input)".to_string(),
            };
            let _ = writeln!(
                out,
                "  ordering for D={} dominant in colour {}: {verdict}",
                labels(&o.component, names),
                o.color
            );
        }
    }
    if let Some(d) = &report.dynamics {
        let r: Vec<String> = d.r.iter().map(|x| format!("{x:.12}")).collect();
        let _ = writeln!(
            out,
            "dynamics: r = ({}), preferred {}, rationally independent (attested) {}",
            r.join(", "),
            d.preferred,
            d.rationally_independent
        );
    }
    if let Some(k) = &report.kms {
        kms_block(&mut out, k, names);
    }
    if let Some(p) = &report.phase {
        let betas: Vec<String> = p
            .critical_betas
            .iter()
            .map(|c| match &c.symbolic {
                Some(s) => format!("{s} = {}", c.value),
                None => c.value.to_string(),
            })
            .collect();
        let _ = writeln!(out, "critical values: {}", betas.join("; "));
        for r in &p.regimes {
            let range = match (r.kind, r.lower, r.upper) {
                (RegimeKind::Point, Some(b), _) => format!("β = {b}"),
                (_, Some(l), Some(u)) => format!("{l} < β < {u}"),
                (_, Some(l), None) => format!("β > {l}"),
                (_, None, Some(u)) => format!("0 < β < {u}"),
                (_, None, None) => "β > 0".to_string(),
            };
            let _ = writeln!(out, "  {range}: {} extreme states", r.extreme_count);
            for piece in &r.supercritical_pieces {
                let _ = writeln!(
                    out,
                    "    one per vertex of supercritical piece {}",
                    labels(piece, names)
                );
            }
            for st in &r.states {
                let _ = writeln!(out, "    {}", describe_state(st, names));
            }
        }
        match p.terminal_beta {
            Some(b) => {
                let _ = writeln!(out, "no KMS states below β = {b}");
            }
            None => {
                let _ = writeln!(out, "KMS states exist for every β > 0");
            }
        }
        for e in &p.evaluations {
            kms_block(&mut out, e, names);
        }
    }
    if let Some(d) = &report.dumbbell {
        let _ = writeln!(out, "dumbbell {:?}", d.params);
        for (i, m) in d.matrices.iter().enumerate() {
            let _ = writeln!(out, "  A{} = {:?}", i + 1, m);
        }
        for rel in &d.relations {
            let _ = writeln!(out, "  {}: {} = {}", rel.relation, rel.lhs, rel.rhs);
        }
    }
    if let Some(f) = &report.fuzz {
        let s = &f.stats;
        let _ = writeln!(
            out,
            "fuzz seed {} bound {}: {} dumbbells ({} draws), {} checks, hypothesis met {} ({:.3}), contradictions {}",
            f.config.seed,
            f.config.bound,
            s.generated,
            s.attempts,
            s.checks,
            s.hypothesis_met,
            s.hypothesis_met_rate,
            s.contradictions
        );
        for c in &f.counterexamples {
            let _ = writeln!(out, "  COUNTEREXAMPLE {:?} colour {}", c.params, c.color);
        }
    }
    let _ = writeln!(out, "states verified: {}", report.states_verified);
    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

pub fn emit_report(report: &ReportDocument, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => text(report),
    }
}
