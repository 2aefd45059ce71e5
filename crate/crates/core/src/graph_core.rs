//! Skeleton data model: the `k` commuting vertex matrices of a finite
//! higher-rank graph over a labelled vertex set.
//!
//! Entry `A_i(v, w)` counts the colour-`i` edges with range `v` and source
//! `w`. Vertices are identified by position; labels are only used when
//! presenting results. All arithmetic here is exact: commutation is checked
//! with arbitrary-precision integers so that large entries never overflow.

use std::collections::HashSet;
use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Square matrix of nonnegative integers stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    n: usize,
    data: Vec<u64>,
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0; n * n],
        }
    }

    /// Builds a matrix from rows; panics if the rows are not square.
    pub fn from_rows(rows: &[Vec<u64>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "IntMatrix::from_rows needs a square grid");
            data.extend_from_slice(row);
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.data[row * self.n + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u64) {
        self.data[row * self.n + col] = value;
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.data
            .chunks(self.n.max(1))
            .take(self.n)
            .map(<[u64]>::to_vec)
            .collect()
    }

    /// Principal submatrix on the given (ordered) index set.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        assert_eq!(rows.len(), cols.len());
        let mut out = IntMatrix::zeros(rows.len());
        for (a, &r) in rows.iter().enumerate() {
            for (b, &c) in cols.iter().enumerate() {
                out.set(a, b, self.get(r, c));
            }
        }
        out
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |r, c| self.get(r, c) as f64)
    }

    /// Rectangular float block `rows × cols`.
    pub fn block_f64(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), cols.len(), |a, b| {
            self.get(rows[a], cols[b]) as f64
        })
    }

    pub fn to_big(&self) -> BigMatrix {
        BigMatrix {
            n: self.n,
            data: self.data.iter().map(|&x| BigUint::from(x)).collect(),
        }
    }
}

/// Exact square matrix over arbitrary-precision naturals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigMatrix {
    n: usize,
    data: Vec<BigUint>,
}

impl BigMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![BigUint::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = BigUint::one();
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> &BigUint {
        &self.data[row * self.n + col]
    }

    pub fn mul(&self, other: &BigMatrix) -> BigMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut data = vec![BigUint::zero(); n * n];
        for i in 0..n {
            for l in 0..n {
                let a = &self.data[i * n + l];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.data[l * n + j];
                    if !b.is_zero() {
                        data[i * n + j] += a * b;
                    }
                }
            }
        }
        BigMatrix { n, data }
    }

    pub fn pow(&self, mut exp: u64) -> BigMatrix {
        let mut base = self.clone();
        let mut acc = BigMatrix::identity(self.n);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Returns the matrix as `u64` entries when every entry fits.
    pub fn to_u64(&self) -> Option<IntMatrix> {
        let mut out = IntMatrix::zeros(self.n);
        for (slot, value) in out.data.iter_mut().zip(&self.data) {
            *slot = u64::try_from(value).ok()?;
        }
        Some(out)
    }
}

/// Candidate input before validation: labels plus signed integer grids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawSkeleton {
    pub vertex_labels: Vec<String>,
    pub matrices: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    NoColors,
    DuplicateLabel,
    NonSquare,
    DimensionMismatch,
    NegativeEntry,
    NonCommuting,
    /// A vertex receiving no edge of some colour (zero row).
    Source,
    /// A vertex emitting no edge of some colour (zero column).
    Sink,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::NoColors => "no-colors",
            Rule::DuplicateLabel => "duplicate-label",
            Rule::NonSquare => "non-square",
            Rule::DimensionMismatch => "dimension-mismatch",
            Rule::NegativeEntry => "negative-entry",
            Rule::NonCommuting => "non-commuting",
            Rule::Source => "source",
            Rule::Sink => "sink",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub message: String,
    /// Offending indices; meaning depends on the rule (colours, rows, columns).
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        Self {
            passed: violations.is_empty(),
            violations,
        }
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid skeleton: {}", summarize(.0))]
    Invalid(ValidationReport),
    #[error("degree vector has {got} entries but the skeleton has {k} colours")]
    DegreeLength { got: usize, k: usize },
    #[error("vertex index {0} out of range")]
    VertexOutOfRange(usize),
}

fn summarize(report: &ValidationReport) -> String {
    report
        .violations
        .iter()
        .map(|v| format!("[{}] {}", v.rule, v.message))
        .collect::<Vec<_>>()
        .join("; ")
}

/// The skeleton of a finite `k`-graph.
///
/// Values built through [`Skeleton::new`] are validated: square matrices of
/// one dimension, pairwise commuting, no zero rows or columns. Restrictions to
/// the complement of a hereditary set keep commutation but may create
/// vertices that receive nothing; see [`Skeleton::source_vertices`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skeleton {
    labels: Vec<String>,
    matrices: Vec<IntMatrix>,
}

impl Skeleton {
    pub fn new(labels: Vec<String>, matrices: Vec<IntMatrix>) -> Result<Self, GraphError> {
        let raw = RawSkeleton {
            vertex_labels: labels,
            matrices: matrices
                .iter()
                .map(|m| {
                    m.rows()
                        .into_iter()
                        .map(|r| r.into_iter().map(|x| x as i64).collect())
                        .collect()
                })
                .collect(),
        };
        Self::from_raw(&raw)
    }

    /// Convenience constructor with labels `v0, v1, ...`.
    pub fn from_rows(matrices: &[Vec<Vec<u64>>]) -> Result<Self, GraphError> {
        let n = matrices.first().map_or(0, Vec::len);
        let labels = (0..n).map(|i| format!("v{i}")).collect();
        let mats = matrices.iter().map(|m| IntMatrix::from_rows(m)).collect();
        Self::new(labels, mats)
    }

    pub fn from_raw(raw: &RawSkeleton) -> Result<Self, GraphError> {
        let report = validate_skeleton(raw);
        if !report.passed {
            return Err(GraphError::Invalid(report));
        }
        let matrices = raw
            .matrices
            .iter()
            .map(|grid| {
                let rows: Vec<Vec<u64>> = grid
                    .iter()
                    .map(|r| r.iter().map(|&x| x as u64).collect())
                    .collect();
                IntMatrix::from_rows(&rows)
            })
            .collect();
        Ok(Self {
            labels: raw.vertex_labels.clone(),
            matrices,
        })
    }

    /// Empty skeleton with `k` colours; terminates the temperature recursion.
    pub fn empty(k: usize) -> Self {
        Self {
            labels: Vec::new(),
            matrices: vec![IntMatrix::zeros(0); k],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of colours `k`.
    pub fn k(&self) -> usize {
        self.matrices.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self, color: usize) -> &IntMatrix {
        &self.matrices[color]
    }

    pub fn matrices(&self) -> &[IntMatrix] {
        &self.matrices
    }

    /// `Σ_i A_i(v, w) > 0`: some edge has range `v` and source `w`.
    pub fn has_edge(&self, v: usize, w: usize) -> bool {
        self.matrices.iter().any(|m| m.get(v, w) > 0)
    }

    /// Induced sub-skeleton on an ordered vertex subset.
    ///
    /// Only meaningful when the subset is the complement of a hereditary set
    /// or a union of pieces with no edges to the rest; callers guarantee it.
    pub(crate) fn induced(&self, vertices: &[usize]) -> Skeleton {
        Skeleton {
            labels: vertices.iter().map(|&v| self.labels[v].clone()).collect(),
            matrices: self
                .matrices
                .iter()
                .map(|m| m.submatrix(vertices, vertices))
                .collect(),
        }
    }

    /// Vertices with a zero row in some colour (they receive no edge of it).
    pub fn source_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count())
            .filter(|&v| {
                self.matrices
                    .iter()
                    .any(|m| (0..m.dim()).all(|w| m.get(v, w) == 0))
            })
            .collect()
    }

    pub fn to_raw(&self) -> RawSkeleton {
        RawSkeleton {
            vertex_labels: self.labels.clone(),
            matrices: self
                .matrices
                .iter()
                .map(|m| {
                    m.rows()
                        .into_iter()
                        .map(|r| r.into_iter().map(|x| x as i64).collect())
                        .collect()
                })
                .collect(),
        }
    }
}

/// Checks every skeleton invariant and reports all violations found.
pub fn validate_skeleton(raw: &RawSkeleton) -> ValidationReport {
    let mut violations = Vec::new();
    let n = raw.vertex_labels.len();

    if raw.matrices.is_empty() {
        violations.push(Violation {
            rule: Rule::NoColors,
            message: "at least one vertex matrix is required".into(),
            indices: vec![],
        });
    }

    let mut seen = HashSet::new();
    for (i, label) in raw.vertex_labels.iter().enumerate() {
        if !seen.insert(label.as_str()) {
            violations.push(Violation {
                rule: Rule::DuplicateLabel,
                message: format!("vertex label {label:?} appears more than once"),
                indices: vec![i],
            });
        }
    }

    let mut shape_ok = true;
    for (color, grid) in raw.matrices.iter().enumerate() {
        let rows = grid.len();
        if let Some(bad) = grid.iter().position(|r| r.len() != rows) {
            shape_ok = false;
            violations.push(Violation {
                rule: Rule::NonSquare,
                message: format!(
                    "matrix {color} has {rows} rows but row {bad} has {} entries",
                    grid[bad].len()
                ),
                indices: vec![color, bad],
            });
            continue;
        }
        if rows != n {
            shape_ok = false;
            violations.push(Violation {
                rule: Rule::DimensionMismatch,
                message: format!("matrix {color} is {rows}x{rows} but there are {n} vertices"),
                indices: vec![color],
            });
        }
    }

    let mut sign_ok = true;
    for (color, grid) in raw.matrices.iter().enumerate() {
        for (r, row) in grid.iter().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                if x < 0 {
                    sign_ok = false;
                    violations.push(Violation {
                        rule: Rule::NegativeEntry,
                        message: format!("matrix {color} has negative entry {x} at ({r}, {c})"),
                        indices: vec![color, r, c],
                    });
                }
            }
        }
    }

    if shape_ok && sign_ok {
        let mats: Vec<IntMatrix> = raw
            .matrices
            .iter()
            .map(|grid| {
                let rows: Vec<Vec<u64>> = grid
                    .iter()
                    .map(|r| r.iter().map(|&x| x as u64).collect())
                    .collect();
                IntMatrix::from_rows(&rows)
            })
            .collect();
        let big: Vec<BigMatrix> = mats.iter().map(IntMatrix::to_big).collect();
        for i in 0..big.len() {
            for j in (i + 1)..big.len() {
                if big[i].mul(&big[j]) != big[j].mul(&big[i]) {
                    violations.push(Violation {
                        rule: Rule::NonCommuting,
                        message: format!("A_{} A_{} != A_{} A_{}", i + 1, j + 1, j + 1, i + 1),
                        indices: vec![i, j],
                    });
                }
            }
        }
        for (color, m) in mats.iter().enumerate() {
            for v in 0..n {
                if (0..n).all(|w| m.get(v, w) == 0) {
                    violations.push(Violation {
                        rule: Rule::Source,
                        message: format!(
                            "vertex {:?} receives no edge of colour {}",
                            raw.vertex_labels[v],
                            color + 1
                        ),
                        indices: vec![color, v],
                    });
                }
                if (0..n).all(|w| m.get(w, v) == 0) {
                    violations.push(Violation {
                        rule: Rule::Sink,
                        message: format!(
                            "vertex {:?} emits no edge of colour {}",
                            raw.vertex_labels[v],
                            color + 1
                        ),
                        indices: vec![color, v],
                    });
                }
            }
        }
    }

    ValidationReport::from_violations(violations)
}

/// `A^n = ∏_i A_i^{n_i}`, computed exactly.
pub fn degree_power(skel: &Skeleton, degree: &[u64]) -> Result<BigMatrix, GraphError> {
    if degree.len() != skel.k() {
        return Err(GraphError::DegreeLength {
            got: degree.len(),
            k: skel.k(),
        });
    }
    let mut acc = BigMatrix::identity(skel.vertex_count());
    for (m, &e) in skel.matrices.iter().zip(degree) {
        if e > 0 {
            acc = acc.mul(&m.to_big().pow(e));
        }
    }
    Ok(acc)
}
