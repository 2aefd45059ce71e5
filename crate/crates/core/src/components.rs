//! Strongly connected components, hereditary sets and the connectivity
//! assumptions the KMS procedure relies on.
//!
//! Direction convention: `reaches(v, w)` means `vΛw ≠ ∅`, i.e. some path has
//! range `v` and source `w`. In matrix terms `v → w` is an edge of the union
//! digraph whenever `Σ_i A_i(v, w) > 0`. A set `H` is hereditary when it is
//! closed under `v ∈ H, reaches(v, w) ⇒ w ∈ H`.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph_core::Skeleton;
use crate::spectral;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComponentsError {
    #[error("vertex set is not hereditary: {from} reaches {to} outside the set")]
    NotHereditary { from: usize, to: usize },
    #[error("vertex index {0} out of range")]
    VertexOutOfRange(usize),
}

/// Tarjan's algorithm, iterative. Components come out in reverse
/// topological order of the edge relation (sinks of the condensation first).
pub(crate) fn strongly_connected(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0usize;
    // (vertex, position in its adjacency list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                comps.push(comp);
            }
        }
    }
    comps
}

fn union_adjacency(skel: &Skeleton) -> Vec<Vec<usize>> {
    let n = skel.vertex_count();
    (0..n)
        .map(|v| (0..n).filter(|&w| skel.has_edge(v, w)).collect())
        .collect()
}

fn color_adjacency(skel: &Skeleton, color: usize) -> Vec<Vec<usize>> {
    let m = skel.matrix(color);
    let n = skel.vertex_count();
    (0..n)
        .map(|v| (0..n).filter(|&w| m.get(v, w) > 0).collect())
        .collect()
}

fn bfs_from(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Reflexive reachability matrix of one digraph.
fn reach_matrix(adj: &[Vec<usize>]) -> Vec<Vec<bool>> {
    (0..adj.len()).map(|v| bfs_from(adj, v)).collect()
}

/// `vΛw ≠ ∅`. Always true for `v == w` (the vertex itself is a path).
pub fn reaches(skel: &Skeleton, v: usize, w: usize) -> bool {
    if v == w {
        return true;
    }
    bfs_from(&union_adjacency(skel), v)[w]
}

/// Per-colour reflexive reachability: `out[v][w]` iff `vΛ^{ℕe_i}w ≠ ∅`.
pub fn color_reachability(skel: &Skeleton, color: usize) -> Vec<Vec<bool>> {
    reach_matrix(&color_adjacency(skel, color))
}

/// Smallest hereditary superset of `set`, sorted.
pub fn hereditary_closure(skel: &Skeleton, set: &[usize]) -> Vec<usize> {
    let adj = union_adjacency(skel);
    let mut seen = vec![false; skel.vertex_count()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &v in set {
        if !seen[v] {
            seen[v] = true;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    (0..seen.len()).filter(|&v| seen[v]).collect()
}

pub fn is_hereditary(skel: &Skeleton, set: &[usize]) -> bool {
    hereditary_violation(skel, set).is_none()
}

fn hereditary_violation(skel: &Skeleton, set: &[usize]) -> Option<(usize, usize)> {
    let n = skel.vertex_count();
    let mut inside = vec![false; n];
    for &v in set {
        inside[v] = true;
    }
    for &v in set {
        for w in 0..n {
            if !inside[w] && skel.has_edge(v, w) {
                return Some((v, w));
            }
        }
    }
    None
}

/// Strongly connected components in condensation order, with per-colour
/// spectral data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentDecomposition {
    /// Vertex sets (sorted), ordered so every `A_i` is block upper triangular.
    pub components: Vec<Vec<usize>>,
    /// Single vertex with no loop of any colour.
    pub trivial: Vec<bool>,
    pub coordinatewise_irreducible: Vec<bool>,
    /// `radii[c][i] = ρ(A_{C,i})`.
    pub radii: Vec<Vec<f64>>,
    /// `leq[c][d]` iff `CΛD ≠ ∅`.
    pub leq: Vec<Vec<bool>>,
    component_of: Vec<usize>,
}

impl ComponentDecomposition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.component_of[v]
    }

    /// `C ≤ D` in the component partial order.
    pub fn leq(&self, c: usize, d: usize) -> bool {
        self.leq[c][d]
    }

    /// A component is hereditary when it reaches no other component.
    pub fn is_hereditary(&self, c: usize) -> bool {
        (0..self.len()).all(|d| d == c || !self.leq[c][d])
    }

    /// Forwards hereditary: no other component reaches it.
    pub fn is_forwards_hereditary(&self, c: usize) -> bool {
        (0..self.len()).all(|d| d == c || !self.leq[d][c])
    }

    /// Vertex order obtained by concatenating the components.
    pub fn vertex_order(&self) -> Vec<usize> {
        self.components.iter().flatten().copied().collect()
    }

    pub fn nontrivial(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&c| !self.trivial[c])
    }
}

pub(crate) fn is_irreducible_block(skel: &Skeleton, color: usize, verts: &[usize]) -> bool {
    let m = skel.matrix(color);
    if verts.len() == 1 {
        return m.get(verts[0], verts[0]) > 0;
    }
    let adj: Vec<Vec<usize>> = verts
        .iter()
        .map(|&v| {
            (0..verts.len())
                .filter(|&b| m.get(v, verts[b]) > 0)
                .collect()
        })
        .collect();
    strongly_connected(&adj).len() == 1
}

pub fn decompose(skel: &Skeleton) -> ComponentDecomposition {
    let n = skel.vertex_count();
    let adj = union_adjacency(skel);
    let sccs = strongly_connected(&adj);

    let mut scc_of = vec![0usize; n];
    for (i, comp) in sccs.iter().enumerate() {
        for &v in comp {
            scc_of[v] = i;
        }
    }
    // Kahn on the condensation; ties go to the smallest vertex index.
    let m = sccs.len();
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
    let mut indeg = vec![0usize; m];
    for v in 0..n {
        for &w in &adj[v] {
            let (a, b) = (scc_of[v], scc_of[w]);
            if a != b && succ[a].insert(b) {
                indeg[b] += 1;
            }
        }
    }
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..m)
        .filter(|&c| indeg[c] == 0)
        .map(|c| Reverse((sccs[c][0], c)))
        .collect();
    let mut order = Vec::with_capacity(m);
    while let Some(Reverse((_, c))) = heap.pop() {
        order.push(c);
        for &d in &succ[c] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                heap.push(Reverse((sccs[d][0], d)));
            }
        }
    }

    let components: Vec<Vec<usize>> = order.iter().map(|&c| sccs[c].clone()).collect();
    let mut position = vec![0usize; m];
    for (pos, &c) in order.iter().enumerate() {
        position[c] = pos;
    }
    let mut component_of = vec![0usize; n];
    for v in 0..n {
        component_of[v] = position[scc_of[v]];
    }

    // Reverse topological sweep for the transitive closure.
    let mut leq = vec![vec![false; m]; m];
    for pos in (0..m).rev() {
        leq[pos][pos] = true;
        let c = order[pos];
        for &d in &succ[c] {
            let dp = position[d];
            for t in 0..m {
                if leq[dp][t] {
                    leq[pos][t] = true;
                }
            }
        }
    }

    let k = skel.k();
    let trivial = components
        .iter()
        .map(|c| c.len() == 1 && (0..k).all(|i| skel.matrix(i).get(c[0], c[0]) == 0))
        .collect();
    let coordinatewise_irreducible = components
        .iter()
        .map(|c| (0..k).all(|i| is_irreducible_block(skel, i, c)))
        .collect();
    let radii = components
        .iter()
        .map(|c| {
            (0..k)
                .map(|i| spectral::spectral_radius(&skel.matrix(i).block_f64(c, c)))
                .collect()
        })
        .collect();

    ComponentDecomposition {
        components,
        trivial,
        coordinatewise_irreducible,
        radii,
        leq,
        component_of,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct A2Offense {
    pub component: usize,
    pub color: usize,
    pub irreducible: bool,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeOffense {
    /// Component on the range side of the bridge.
    pub from: usize,
    /// Component on the source side.
    pub to: usize,
    pub present_colors: Vec<usize>,
    pub missing_colors: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub a1_no_trivial: bool,
    pub trivial_components: Vec<usize>,
    pub a1_no_isolated: bool,
    /// Weakly connected pieces when there is more than one.
    pub isolated_pieces: Vec<Vec<usize>>,
    pub a2_irreducible_and_rho_gt_1: bool,
    pub a2_offenders: Vec<A2Offense>,
    pub a3_color_uniform_bridges: bool,
    pub a3_offenders: Vec<BridgeOffense>,
    /// Whether `v ≤ w` implies `vΛ^{ℕe_i}w ≠ ∅` for every colour. Implied by
    /// (A1)–(A3); reported separately and not part of `all_pass`.
    pub per_color_reachability_uniform: bool,
    pub all_pass: bool,
}

/// Checks (A1) no trivial components and no isolated pieces, (A2)
/// coordinatewise irreducibility with `ρ(A_{C,i}) > 1`, and (A3) single-edge
/// bridges between components present in every colour or none.
pub fn check_assumptions(skel: &Skeleton, decomp: &ComponentDecomposition) -> AssumptionReport {
    let k = skel.k();
    let trivial_components: Vec<usize> = (0..decomp.len()).filter(|&c| decomp.trivial[c]).collect();

    let pieces = weak_pieces(skel);
    let isolated_pieces = if pieces.len() > 1 { pieces } else { Vec::new() };

    let mut a2_offenders = Vec::new();
    for c in decomp.nontrivial() {
        for i in 0..k {
            let irreducible = is_irreducible_block(skel, i, &decomp.components[c]);
            let radius = decomp.radii[c][i];
            if !irreducible || radius <= 1.0 + 1e-9 {
                a2_offenders.push(A2Offense {
                    component: c,
                    color: i,
                    irreducible,
                    radius,
                });
            }
        }
    }

    let mut a3_offenders = Vec::new();
    for c in decomp.nontrivial() {
        for d in decomp.nontrivial() {
            if c == d {
                continue;
            }
            let (present, missing): (Vec<usize>, Vec<usize>) = (0..k).partition(|&i| {
                let m = skel.matrix(i);
                decomp.components[c]
                    .iter()
                    .any(|&v| decomp.components[d].iter().any(|&w| m.get(v, w) > 0))
            });
            if !present.is_empty() && !missing.is_empty() {
                a3_offenders.push(BridgeOffense {
                    from: c,
                    to: d,
                    present_colors: present,
                    missing_colors: missing,
                });
            }
        }
    }

    let per_color: Vec<Vec<Vec<bool>>> = (0..k).map(|i| color_reachability(skel, i)).collect();
    let union = reach_matrix(&union_adjacency(skel));
    let n = skel.vertex_count();
    let per_color_reachability_uniform =
        (0..n).all(|v| (0..n).all(|w| !union[v][w] || per_color.iter().all(|r| r[v][w])));

    let a1_no_trivial = trivial_components.is_empty();
    let a1_no_isolated = isolated_pieces.is_empty();
    let a2 = a2_offenders.is_empty();
    let a3 = a3_offenders.is_empty();
    AssumptionReport {
        a1_no_trivial,
        trivial_components,
        a1_no_isolated,
        isolated_pieces,
        a2_irreducible_and_rho_gt_1: a2,
        a2_offenders,
        a3_color_uniform_bridges: a3,
        a3_offenders,
        per_color_reachability_uniform,
        all_pass: a1_no_trivial && a1_no_isolated && a2 && a3,
    }
}

/// Sorted complement of `set` in the vertex range.
pub fn complement(n: usize, set: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; n];
    for &v in set {
        inside[v] = true;
    }
    (0..n).filter(|&v| !inside[v]).collect()
}

/// The skeleton of `Λ \ H` on the vertices outside the hereditary set `H`,
/// in their original relative order.
pub fn restrict(skel: &Skeleton, hereditary: &[usize]) -> Result<Skeleton, ComponentsError> {
    if let Some(&v) = hereditary.iter().find(|&&v| v >= skel.vertex_count()) {
        return Err(ComponentsError::VertexOutOfRange(v));
    }
    if let Some((from, to)) = hereditary_violation(skel, hereditary) {
        return Err(ComponentsError::NotHereditary { from, to });
    }
    Ok(skel.induced(&complement(skel.vertex_count(), hereditary)))
}

/// Weakly connected pieces of the union digraph, each sorted, ordered by
/// smallest vertex.
pub fn weak_pieces(skel: &Skeleton) -> Vec<Vec<usize>> {
    let n = skel.vertex_count();
    let mut undirected = vec![Vec::new(); n];
    for v in 0..n {
        for w in 0..n {
            if v != w && skel.has_edge(v, w) {
                undirected[v].push(w);
                undirected[w].push(v);
            }
        }
    }
    let mut assigned = vec![false; n];
    let mut pieces = Vec::new();
    for v in 0..n {
        if assigned[v] {
            continue;
        }
        let seen = bfs_from(&undirected, v);
        let piece: Vec<usize> = (0..n).filter(|&w| seen[w]).collect();
        for &w in &piece {
            assigned[w] = true;
        }
        pieces.push(piece);
    }
    pieces
}

/// Splits a skeleton into pieces that do not talk to each other.
pub fn split_isolated(skel: &Skeleton) -> Vec<Skeleton> {
    let pieces = weak_pieces(skel);
    if pieces.len() <= 1 {
        return vec![skel.clone()];
    }
    pieces.iter().map(|p| skel.induced(p)).collect()
}
