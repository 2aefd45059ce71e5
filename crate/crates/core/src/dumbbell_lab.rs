//! Dumbbell skeletons: single-vertex components joined by bridge bundles.
//!
//! Three families are supported, all with two colours:
//!
//! * two vertices `v, w` with `A_i = [[m_i, p_i], [0, n_i]]`;
//! * three vertices `u, v, w` with bridges into `u` only,
//!   `A_i = [[l_i, p_i, q_i], [0, m_i, 0], [0, 0, n_i]]`;
//! * three vertices with every upper bridge,
//!   `A_i = [[m_i, q_i, r_i], [0, n_i, s_i], [0, 0, p_i]]`.
//!
//! Commutation is decided by exact integer relations and cross-checked by
//! the generic validator.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::components::{check_assumptions, decompose};
use crate::graph_core::{validate_skeleton, GraphError, RawSkeleton, Skeleton, ValidationReport};
use crate::spectral::{check_spectral_ordering, OrderingVerdict};
use crate::Tolerances;

type Pair = [u64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dumbbell2Params {
    /// Loops at `v`.
    pub m: Pair,
    /// Loops at `w`.
    pub n: Pair,
    /// Bridges from `w` to `v`.
    pub p: Pair,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Figure3Params {
    pub l: Pair,
    pub m: Pair,
    pub n: Pair,
    /// Bridges from `v` into `u`.
    pub p: Pair,
    /// Bridges from `w` into `u`.
    pub q: Pair,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AppendixParams {
    /// Loops at `u`, `v`, `w`.
    pub m: Pair,
    pub n: Pair,
    pub p: Pair,
    /// Bridges `v → u`, `w → u`, `w → v` (source to range).
    pub q: Pair,
    pub r: Pair,
    pub s: Pair,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum DumbbellParams {
    Two(Dumbbell2Params),
    Figure3(Figure3Params),
    Appendix(AppendixParams),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `(n₂ − m₂)p₁ = (n₁ − m₁)p₂`
    TwoVertex,
    /// `l₁p₂ + p₁m₂ = l₂p₁ + p₂m₁`
    Figure3First,
    /// `l₁q₂ + q₁n₂ = l₂q₁ + q₂n₁`
    Figure3Second,
    /// `q₂(n₁ − m₁) = q₁(n₂ − m₂)`
    D1,
    /// `s₂(p₁ − n₁) = s₁(p₂ − n₂)`
    D2,
    /// `r₂(p₁ − m₁) + q₂s₁ = r₁(p₂ − m₂) + q₁s₂`
    D3,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Relation::TwoVertex => "(n2-m2)p1 = (n1-m1)p2",
            Relation::Figure3First => "l1p2+p1m2 = l2p1+p2m1",
            Relation::Figure3Second => "l1q2+q1n2 = l2q1+q2n1",
            Relation::D1 => "D1: q2(n1-m1) = q1(n2-m2)",
            Relation::D2 => "D2: s2(p1-n1) = s1(p2-n2)",
            Relation::D3 => "D3: r2(p1-m1)+q2s1 = r1(p2-m2)+q1s2",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub relation: Relation,
    pub lhs: i128,
    pub rhs: i128,
}

impl RelationCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DumbbellError {
    #[error("matrices do not commute: {}", describe(.failed))]
    Rejected { failed: Vec<RelationCheck> },
}

fn describe(failed: &[RelationCheck]) -> String {
    failed
        .iter()
        .map(|c| format!("{} fails ({} != {})", c.relation, c.lhs, c.rhs))
        .collect::<Vec<_>>()
        .join("; ")
}

fn i(x: u64) -> i128 {
    x as i128
}

fn check(relation: Relation, lhs: i128, rhs: i128) -> RelationCheck {
    RelationCheck { relation, lhs, rhs }
}

impl DumbbellParams {
    pub fn vertex_count(&self) -> usize {
        match self {
            DumbbellParams::Two(_) => 2,
            _ => 3,
        }
    }

    /// The two vertex matrices.
    pub fn matrices(&self) -> [Vec<Vec<u64>>; 2] {
        let build = |c: usize| match self {
            DumbbellParams::Two(t) => vec![vec![t.m[c], t.p[c]], vec![0, t.n[c]]],
            DumbbellParams::Figure3(t) => vec![
                vec![t.l[c], t.p[c], t.q[c]],
                vec![0, t.m[c], 0],
                vec![0, 0, t.n[c]],
            ],
            DumbbellParams::Appendix(t) => vec![
                vec![t.m[c], t.q[c], t.r[c]],
                vec![0, t.n[c], t.s[c]],
                vec![0, 0, t.p[c]],
            ],
        };
        [build(0), build(1)]
    }

    /// Every commutation relation of the family, evaluated exactly.
    pub fn relations(&self) -> Vec<RelationCheck> {
        match *self {
            DumbbellParams::Two(Dumbbell2Params { m, n, p }) => vec![check(
                Relation::TwoVertex,
                (i(n[1]) - i(m[1])) * i(p[0]),
                (i(n[0]) - i(m[0])) * i(p[1]),
            )],
            DumbbellParams::Figure3(Figure3Params { l, m, n, p, q }) => vec![
                check(
                    Relation::Figure3First,
                    i(l[0]) * i(p[1]) + i(p[0]) * i(m[1]),
                    i(l[1]) * i(p[0]) + i(p[1]) * i(m[0]),
                ),
                check(
                    Relation::Figure3Second,
                    i(l[0]) * i(q[1]) + i(q[0]) * i(n[1]),
                    i(l[1]) * i(q[0]) + i(q[1]) * i(n[0]),
                ),
            ],
            DumbbellParams::Appendix(AppendixParams { m, n, p, q, r, s }) => vec![
                check(
                    Relation::D1,
                    i(q[1]) * (i(n[0]) - i(m[0])),
                    i(q[0]) * (i(n[1]) - i(m[1])),
                ),
                check(
                    Relation::D2,
                    i(s[1]) * (i(p[0]) - i(n[0])),
                    i(s[0]) * (i(p[1]) - i(n[1])),
                ),
                check(
                    Relation::D3,
                    i(r[1]) * (i(p[0]) - i(m[0])) + i(q[1]) * i(s[0]),
                    i(r[0]) * (i(p[1]) - i(m[1])) + i(q[0]) * i(s[1]),
                ),
            ],
        }
    }

    pub fn commutes(&self) -> bool {
        self.relations().iter().all(RelationCheck::holds)
    }
}

/// A dumbbell whose matrices commute. The validation report still records
/// sources or sinks created by zero loop counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dumbbell {
    pub params: DumbbellParams,
    pub matrices: [Vec<Vec<u64>>; 2],
    pub relations: Vec<RelationCheck>,
    pub validation: ValidationReport,
}

impl Dumbbell {
    pub fn skeleton(&self) -> Result<Skeleton, GraphError> {
        Skeleton::from_raw(&self.raw())
    }

    pub fn raw(&self) -> RawSkeleton {
        let labels = match self.params {
            DumbbellParams::Two(_) => vec!["v", "w"],
            _ => vec!["u", "v", "w"],
        };
        RawSkeleton {
            vertex_labels: labels.into_iter().map(String::from).collect(),
            matrices: self
                .matrices
                .iter()
                .map(|m| {
                    m.iter()
                        .map(|row| row.iter().map(|&x| x as i64).collect())
                        .collect()
                })
                .collect(),
        }
    }
}

/// Accepts exactly the parameters whose matrices commute, naming every
/// violated relation otherwise.
pub fn make_dumbbell(params: &DumbbellParams) -> Result<Dumbbell, DumbbellError> {
    let relations = params.relations();
    let failed: Vec<RelationCheck> = relations.iter().filter(|c| !c.holds()).copied().collect();
    if !failed.is_empty() {
        return Err(DumbbellError::Rejected { failed });
    }
    let mut dumbbell = Dumbbell {
        params: *params,
        matrices: params.matrices(),
        relations,
        validation: ValidationReport {
            passed: true,
            violations: Vec::new(),
        },
    };
    dumbbell.validation = validate_skeleton(&dumbbell.raw());
    Ok(dumbbell)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Two,
    Figure3,
    Appendix,
}

/// Inclusive ranges for loop counts and bridge counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub loops: (u64, u64),
    pub bridges: (u64, u64),
}

impl Bounds {
    pub fn uniform(max: u64) -> Self {
        Bounds {
            loops: (0, max),
            bridges: (0, max),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enumerated {
    pub params: DumbbellParams,
    pub a1_no_trivial: bool,
    pub a1_no_isolated: bool,
    pub a2: bool,
    pub a3: bool,
}

impl Enumerated {
    pub fn assumptions_pass(&self) -> bool {
        self.a1_no_trivial && self.a1_no_isolated && self.a2 && self.a3
    }
}

/// Visits every assignment of `slots` values, first slot varying slowest.
fn for_each_tuple(ranges: &[(u64, u64)], mut f: impl FnMut(&[u64])) {
    if ranges.iter().any(|&(lo, hi)| lo > hi) {
        return;
    }
    let mut cur: Vec<u64> = ranges.iter().map(|r| r.0).collect();
    loop {
        f(&cur);
        let mut pos = ranges.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if cur[pos] < ranges[pos].1 {
                cur[pos] += 1;
                for later in pos + 1..ranges.len() {
                    cur[later] = ranges[later].0;
                }
                break;
            }
        }
    }
}

fn params_from(family: Family, t: &[u64]) -> DumbbellParams {
    let pair = |a: usize| [t[a], t[a + 1]];
    match family {
        Family::Two => DumbbellParams::Two(Dumbbell2Params {
            m: pair(0),
            n: pair(2),
            p: pair(4),
        }),
        Family::Figure3 => DumbbellParams::Figure3(Figure3Params {
            l: pair(0),
            m: pair(2),
            n: pair(4),
            p: pair(6),
            q: pair(8),
        }),
        Family::Appendix => DumbbellParams::Appendix(AppendixParams {
            m: pair(0),
            n: pair(2),
            p: pair(4),
            q: pair(6),
            r: pair(8),
            s: pair(10),
        }),
    }
}

/// Calls `f` on every parameter tuple of `family` within `bounds`, in
/// lexicographic order.
pub fn for_each_params(family: Family, bounds: &Bounds, mut f: impl FnMut(DumbbellParams)) {
    let (diag, bridges) = match family {
        Family::Two => (2, 1),
        Family::Figure3 => (3, 2),
        Family::Appendix => (3, 3),
    };
    let ranges: Vec<(u64, u64)> = std::iter::repeat(bounds.loops)
        .take(2 * diag)
        .chain(std::iter::repeat(bounds.bridges).take(2 * bridges))
        .collect();
    for_each_tuple(&ranges, |t| f(params_from(family, t)));
}

/// Parameter tuples whose matrices commute and form a valid skeleton (no
/// sources or sinks), with the standing assumptions flagged.
pub fn enumerate_commuting(family: Family, bounds: &Bounds) -> Vec<Enumerated> {
    let mut out = Vec::new();
    for_each_params(family, bounds, |params| {
        let Ok(dumbbell) = make_dumbbell(&params) else {
            return;
        };
        let Ok(skel) = dumbbell.skeleton() else {
            return;
        };
        let report = check_assumptions(&skel, &decompose(&skel));
        out.push(Enumerated {
            params,
            a1_no_trivial: report.a1_no_trivial,
            a1_no_isolated: report.a1_no_isolated,
            a2: report.a2_irreducible_and_rho_gt_1,
            a3: report.a3_color_uniform_bridges,
        });
    });
    out
}

/// Which bridge bundles the generator forces to zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BridgeMode {
    #[default]
    AllNonzero,
    /// `s = (0, 0)`: `v` has no path into `w`.
    ZeroS,
    /// `r = (0, 0)`: `u` reaches `w` only through `v`.
    ZeroR,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    /// Largest sampled loop or bridge count; loops are at least 2.
    pub bound: u64,
    pub mode: BridgeMode,
}

impl FuzzConfig {
    pub fn new(seed: u64, count: usize, bound: u64) -> Self {
        FuzzConfig {
            seed,
            count,
            bound,
            mode: BridgeMode::AllNonzero,
        }
    }
}

/// Maximum rejected draws per requested sample.
const MAX_ATTEMPTS_PER_SAMPLE: usize = 1_000_000;

/// Solves `den · x = num` for a positive integer `x`; when `den = 0`, requires
/// `num = 0` and draws `x` freely.
fn solve_positive(num: i128, den: i128, free: impl FnOnce() -> u64) -> Option<u64> {
    if den == 0 {
        return (num == 0).then(free);
    }
    if num % den != 0 {
        return None;
    }
    let x = num / den;
    (x >= 1).then_some(x as u64)
}

fn sample_once(rng: &mut ChaCha8Rng, bound: u64, mode: BridgeMode) -> Option<AppendixParams> {
    let mut pair = |lo: u64| [rng.gen_range(lo..=bound), rng.gen_range(lo..=bound)];
    let (m, n, p) = (pair(2), pair(2), pair(2));
    let first = |rng: &mut ChaCha8Rng, zero: bool| if zero { 0 } else { rng.gen_range(1..=bound) };
    let q1 = rng.gen_range(1..=bound);
    let r1 = first(rng, mode == BridgeMode::ZeroR);
    let s1 = first(rng, mode == BridgeMode::ZeroS);

    let q2 = solve_positive(i(q1) * (i(n[1]) - i(m[1])), i(n[0]) - i(m[0]), || {
        rng.gen_range(1..=bound)
    })?;
    let s2 = if mode == BridgeMode::ZeroS {
        0
    } else {
        solve_positive(i(s1) * (i(p[1]) - i(n[1])), i(p[0]) - i(n[0]), || {
            rng.gen_range(1..=bound)
        })?
    };
    let rhs = i(r1) * (i(p[1]) - i(m[1])) + i(q1) * i(s2) - i(q2) * i(s1);
    let r2 = if mode == BridgeMode::ZeroR {
        if rhs != 0 {
            return None;
        }
        0
    } else {
        solve_positive(rhs, i(p[0]) - i(m[0]), || rng.gen_range(1..=bound))?
    };
    Some(AppendixParams {
        m,
        n,
        p,
        q: [q1, q2],
        r: [r1, r2],
        s: [s1, s2],
    })
}

/// Seeded random commuting three-vertex dumbbells. Loops and first-colour
/// bridges are drawn uniformly; second-colour bridges are solved from the
/// commutation relations, rejecting draws without a positive integer solution.
/// Returns the samples and the number of draws.
pub fn generate_dumbbells(config: &FuzzConfig) -> (Vec<AppendixParams>, usize) {
    assert!(
        config.bound >= 2,
        "bound must allow loop counts of at least 2"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::with_capacity(config.count);
    let mut attempts = 0;
    let cap = MAX_ATTEMPTS_PER_SAMPLE.saturating_mul(config.count.max(1));
    while out.len() < config.count && attempts < cap {
        attempts += 1;
        if let Some(params) = sample_once(&mut rng, config.bound, config.mode) {
            out.push(params);
        }
    }
    (out, attempts)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FuzzStats {
    pub generated: usize,
    pub attempts: usize,
    /// One ordering check per sample and colour.
    pub checks: usize,
    pub hypothesis_met: usize,
    pub hypothesis_not_met: usize,
    pub conclusion_holds: usize,
    pub degenerate: usize,
    pub contradictions: usize,
    pub hypothesis_met_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzCase {
    pub params: AppendixParams,
    /// Dominance colour tried.
    pub color: usize,
    pub verdict: OrderingVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub config: FuzzConfig,
    pub stats: FuzzStats,
    pub counterexamples: Vec<FuzzCase>,
}

/// Runs the spectral-ordering check on random commuting dumbbells with the
/// hereditary component `{w}` as target, once per colour.
pub fn fuzz_ordering(config: &FuzzConfig, tol: &Tolerances) -> FuzzReport {
    let (samples, attempts) = generate_dumbbells(config);
    let mut stats = FuzzStats {
        generated: samples.len(),
        attempts,
        ..FuzzStats::default()
    };
    let mut counterexamples = Vec::new();
    for params in samples {
        let skel = make_dumbbell(&DumbbellParams::Appendix(params))
            .expect("generator produced non-commuting parameters")
            .skeleton()
            .expect("generator produced an invalid skeleton");
        let decomp = decompose(&skel);
        let d = decomp.component_of(2);
        for color in 0..skel.k() {
            let verdict = check_spectral_ordering(&skel, &decomp, d, color, tol);
            stats.checks += 1;
            match &verdict {
                OrderingVerdict::HypothesisNotMet { .. } => stats.hypothesis_not_met += 1,
                OrderingVerdict::ConclusionHolds => {
                    stats.hypothesis_met += 1;
                    stats.conclusion_holds += 1;
                }
                OrderingVerdict::Degenerate { .. } => {
                    stats.hypothesis_met += 1;
                    stats.degenerate += 1;
                }
                OrderingVerdict::Contradiction { .. } => {
                    stats.hypothesis_met += 1;
                    stats.contradictions += 1;
                }
            }
            if verdict.is_contradiction() {
                counterexamples.push(FuzzCase {
                    params,
                    color,
                    verdict,
                });
            }
        }
    }
    if stats.checks > 0 {
        stats.hypothesis_met_rate = stats.hypothesis_met as f64 / stats.checks as f64;
    }
    FuzzReport {
        config: *config,
        stats,
        counterexamples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_core::Rule;
    use crate::spectral::HypothesisGap;

    fn figure3_example() -> DumbbellParams {
        DumbbellParams::Figure3(Figure3Params {
            l: [5, 3],
            m: [10, 13],
            n: [11, 9],
            p: [1, 2],
            q: [1, 1],
        })
    }

    fn appendix_counterexample() -> DumbbellParams {
        DumbbellParams::Appendix(AppendixParams {
            m: [1, 1],
            n: [3, 4],
            p: [5, 3],
            q: [2, 3],
            r: [2, 1],
            s: [0, 0],
        })
    }

    #[test]
    fn figure3_example_accepted() {
        let p = figure3_example();
        let rel = p.relations();
        assert_eq!((rel[0].lhs, rel[0].rhs), (23, 23));
        assert_eq!((rel[1].lhs, rel[1].rhs), (14, 14));
        let d = make_dumbbell(&p).unwrap();
        assert!(d.validation.passed);
        assert_eq!(
            d.matrices[1],
            vec![vec![3, 2, 1], vec![0, 13, 0], vec![0, 0, 9]]
        );
    }

    #[test]
    fn equal_loops_always_commute() {
        for p in [[0, 0], [1, 7], [3, 2]] {
            let params = DumbbellParams::Two(Dumbbell2Params {
                m: [4, 6],
                n: [4, 6],
                p,
            });
            assert!(make_dumbbell(&params).is_ok());
        }
    }

    #[test]
    fn appendix_counterexample_matrices() {
        let d = make_dumbbell(&appendix_counterexample()).unwrap();
        assert!(d.validation.passed);
        assert_eq!(
            d.matrices[0],
            vec![vec![1, 2, 2], vec![0, 3, 0], vec![0, 0, 5]]
        );
        assert_eq!(
            d.matrices[1],
            vec![vec![1, 3, 1], vec![0, 4, 0], vec![0, 0, 3]]
        );
    }

    #[test]
    fn rejection_names_relation() {
        let params = DumbbellParams::Two(Dumbbell2Params {
            m: [2, 2],
            n: [3, 5],
            p: [1, 2],
        });
        let err = make_dumbbell(&params).unwrap_err();
        let DumbbellError::Rejected { failed } = &err;
        assert_eq!(failed[0].relation, Relation::TwoVertex);
        assert!(err.to_string().contains("(n2-m2)p1"));
    }

    #[test]
    fn enumeration_with_fixed_bridges() {
        let bounds = Bounds {
            loops: (0, 2),
            bridges: (1, 1),
        };
        let found = enumerate_commuting(Family::Two, &bounds);
        assert!(!found.is_empty());
        for e in &found {
            let DumbbellParams::Two(t) = e.params else {
                unreachable!()
            };
            assert_eq!(t.n[1] as i64 - t.m[1] as i64, t.n[0] as i64 - t.m[0] as i64);
        }
        // Every commuting tuple without zero rows or columns is listed.
        let mut expected = 0;
        for_each_params(Family::Two, &bounds, |p| {
            let DumbbellParams::Two(t) = p else {
                unreachable!()
            };
            if t.n[1] as i64 - t.m[1] as i64 == t.n[0] as i64 - t.m[0] as i64
                && t.m.iter().chain(&t.n).all(|&x| x > 0)
            {
                expected += 1;
            }
        });
        assert_eq!(found.len(), expected);
    }

    #[test]
    fn enumeration_zero_bounds_is_empty() {
        assert!(enumerate_commuting(Family::Two, &Bounds::uniform(0)).is_empty());
        assert!(enumerate_commuting(Family::Appendix, &Bounds::uniform(0)).is_empty());
    }

    #[test]
    fn zero_bridges_are_flagged() {
        let bounds = Bounds {
            loops: (1, 3),
            bridges: (0, 0),
        };
        let found = enumerate_commuting(Family::Two, &bounds);
        assert_eq!(found.len(), 81);
        assert!(found
            .iter()
            .all(|e| !e.a1_no_isolated && !e.assumptions_pass()));
    }

    #[test]
    fn zero_source_validation_recorded() {
        let params = DumbbellParams::Two(Dumbbell2Params {
            m: [0, 0],
            n: [1, 1],
            p: [0, 0],
        });
        let d = make_dumbbell(&params).unwrap();
        assert!(d.validation.has(Rule::Source));
        assert!(d.skeleton().is_err());
    }

    #[test]
    fn generator_is_deterministic_and_commuting() {
        let cfg = FuzzConfig::new(7, 50, 6);
        let (a, _) = generate_dumbbells(&cfg);
        let (b, _) = generate_dumbbells(&cfg);
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
        for p in &a {
            let params = DumbbellParams::Appendix(*p);
            assert!(params.commutes());
            assert!(p.q.iter().chain(&p.r).chain(&p.s).all(|&x| x > 0));
            assert!(p.m.iter().chain(&p.n).chain(&p.p).all(|&x| x >= 2));
            assert!(make_dumbbell(&params).unwrap().validation.passed);
        }
    }

    #[test]
    fn fuzz_small_run() {
        let report = fuzz_ordering(&FuzzConfig::new(1, 40, 6), &Tolerances::default());
        assert_eq!(report.stats.generated, 40);
        assert_eq!(report.stats.checks, 80);
        assert!(report.counterexamples.is_empty());
        assert!(report.stats.hypothesis_met > 0);
    }

    #[test]
    fn fuzz_empty() {
        let report = fuzz_ordering(&FuzzConfig::new(1, 0, 6), &Tolerances::default());
        assert_eq!(report.stats, FuzzStats::default());
    }

    #[test]
    fn zero_s_never_meets_hypothesis() {
        let cfg = FuzzConfig {
            mode: BridgeMode::ZeroS,
            ..FuzzConfig::new(3, 30, 6)
        };
        let report = fuzz_ordering(&cfg, &Tolerances::default());
        assert_eq!(report.stats.hypothesis_not_met, report.stats.checks);
        assert_eq!(report.stats.contradictions, 0);
        let (samples, _) = generate_dumbbells(&cfg);
        for p in samples {
            let skel = make_dumbbell(&DumbbellParams::Appendix(p))
                .unwrap()
                .skeleton()
                .unwrap();
            let decomp = decompose(&skel);
            match check_spectral_ordering(&skel, &decomp, 2, 0, &Tolerances::default()) {
                OrderingVerdict::HypothesisNotMet { gaps, .. } => {
                    assert!(gaps.contains(&HypothesisGap::MissingBridge {
                        component: 1,
                        color: 0
                    }));
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn zero_r_satisfies_reduced_relation() {
        let cfg = FuzzConfig {
            mode: BridgeMode::ZeroR,
            ..FuzzConfig::new(11, 30, 6)
        };
        let (samples, _) = generate_dumbbells(&cfg);
        assert_eq!(samples.len(), 30);
        for p in &samples {
            assert_eq!(p.r, [0, 0]);
            if p.n[0] != p.m[0] {
                assert_eq!(p.q[1] * p.s[0], p.q[0] * p.s[1]);
            }
        }
        assert_eq!(
            fuzz_ordering(&cfg, &Tolerances::default())
                .stats
                .contradictions,
            0
        );
    }
}
