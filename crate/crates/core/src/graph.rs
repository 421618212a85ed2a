//! Graphs whose edge multiset changes over discrete time.
//!
//! A [`StageGraph`] is one snapshot: a loopless undirected multigraph on the
//! vertices `0..n`, optionally with a sink. A [`Schedule`] is a periodic list of
//! stages sharing the same vertex set and sink; the graph at time `t` is
//! `stages[t mod period]`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense vertex index, stable across every stage of a schedule.
pub type VertexId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph with {n_vertices} vertices")]
    VertexOutOfRange { vertex: VertexId, n_vertices: usize },
    #[error("invalid stage {stage}: {violations:?}")]
    InvalidStage { stage: usize, violations: Vec<Violation> },
    #[error("schedule needs at least one stage")]
    EmptySchedule,
    #[error("stage {stage} has {found} vertices, expected {expected}")]
    VertexCountMismatch { stage: usize, expected: usize, found: usize },
    #[error("stage {stage} has sink {found:?}, expected {expected:?}")]
    SinkMismatch { stage: usize, expected: Option<VertexId>, found: Option<VertexId> },
    #[error("schedule declares period {declared} but lists {listed} stages")]
    PeriodMismatch { declared: usize, listed: usize },
    #[error("malformed schedule document: {0}")]
    Parse(String),
}

/// One broken invariant found by [`StageGraph::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `multiplicity(u, v) != multiplicity(v, u)`.
    Asymmetric { u: VertexId, v: VertexId, forward: u32, backward: u32 },
    Loop { vertex: VertexId, multiplicity: u32 },
    SinkOutOfRange { sink: VertexId, n_vertices: usize },
    EndpointOutOfRange { u: VertexId, v: VertexId, n_vertices: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Asymmetric { u, v, forward, backward } => {
                write!(f, "multiplicity({u},{v})={forward} but multiplicity({v},{u})={backward}")
            }
            Violation::Loop { vertex, multiplicity } => {
                write!(f, "loop at {vertex} with multiplicity {multiplicity}")
            }
            Violation::SinkOutOfRange { sink, n_vertices } => {
                write!(f, "sink {sink} outside 0..{n_vertices}")
            }
            Violation::EndpointOutOfRange { u, v, n_vertices } => {
                write!(f, "entry ({u},{v}) outside 0..{n_vertices}")
            }
        }
    }
}

/// A multigraph snapshot stored as per-vertex sorted `(neighbor, multiplicity)`
/// lists in CSR form.
///
/// The lists are directed entries of the multiplicity function, so a stage
/// built with [`StageGraph::from_multiplicities`] may violate symmetry; the
/// engine only accepts stages that pass [`StageGraph::validate`] (enforced
/// by [`Schedule::new`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageGraph {
    n_vertices: usize,
    sink: Option<VertexId>,
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    mults: Vec<u32>,
    degrees: Vec<u64>,
    // entries that referenced vertices outside 0..n; kept for `validate`
    stray: Vec<(VertexId, VertexId)>,
}

impl StageGraph {
    /// Builds a stage from undirected edges `(u, v, multiplicity)`. Each edge
    /// is listed once; repeated edges accumulate.
    pub fn from_edges(
        n_vertices: usize,
        sink: Option<VertexId>,
        edges: &[(VertexId, VertexId, u32)],
    ) -> Self {
        let mut entries = Vec::with_capacity(edges.len() * 2);
        for &(u, v, m) in edges {
            entries.push((u, v, m));
            if u != v {
                entries.push((v, u, m));
            }
        }
        Self::from_multiplicities(n_vertices, sink, &entries)
    }

    /// Builds a stage from raw directed entries `multiplicity(u, v) = m`,
    /// without symmetrizing.
    pub fn from_multiplicities(
        n_vertices: usize,
        sink: Option<VertexId>,
        entries: &[(VertexId, VertexId, u32)],
    ) -> Self {
        let mut stray = Vec::new();
        let mut rows: Vec<Vec<(VertexId, u32)>> = vec![Vec::new(); n_vertices];
        for &(u, v, m) in entries {
            if u >= n_vertices || v >= n_vertices {
                stray.push((u, v));
                continue;
            }
            if m > 0 {
                rows[u].push((v, m));
            }
        }
        let mut offsets = Vec::with_capacity(n_vertices + 1);
        let mut targets = Vec::new();
        let mut mults = Vec::new();
        let mut degrees = Vec::with_capacity(n_vertices);
        offsets.push(0);
        for row in &mut rows {
            row.sort_unstable_by_key(|&(v, _)| v);
            let mut degree = 0u64;
            for &(v, m) in row.iter() {
                degree += u64::from(m);
                match targets.last() {
                    Some(&last) if targets.len() > *offsets.last().unwrap() && last == v => {
                        *mults.last_mut().unwrap() += m;
                    }
                    _ => {
                        targets.push(v);
                        mults.push(m);
                    }
                }
            }
            degrees.push(degree);
            offsets.push(targets.len());
        }
        StageGraph { n_vertices, sink, offsets, targets, mults, degrees, stray }
    }

    /// Reads the multiplicities off a Laplacian matrix (negated off-diagonal
    /// entries). Positive off-diagonal entries are clamped to zero and will
    /// show up as a degree mismatch against the diagonal.
    pub fn from_laplacian(matrix: &[Vec<i64>], sink: Option<VertexId>) -> Self {
        let n = matrix.len();
        let mut entries = Vec::new();
        for (u, row) in matrix.iter().enumerate() {
            for (v, &x) in row.iter().enumerate() {
                if u != v && x < 0 {
                    entries.push((u, v, u32::try_from(-x).unwrap_or(u32::MAX)));
                }
            }
        }
        Self::from_multiplicities(n, sink, &entries)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn sink(&self) -> Option<VertexId> {
        self.sink
    }

    pub fn is_sink(&self, v: VertexId) -> bool {
        self.sink == Some(v)
    }

    /// `Σ_u multiplicity(v, u)`.
    pub fn degree(&self, v: VertexId) -> Result<u64, GraphError> {
        self.degrees
            .get(v)
            .copied()
            .ok_or(GraphError::VertexOutOfRange { vertex: v, n_vertices: self.n_vertices })
    }

    /// Degrees of all vertices, indexed by vertex.
    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn max_degree(&self) -> u64 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// `(neighbor, multiplicity)` pairs of `v`, sorted by neighbor.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, u32)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.targets[range.clone()].iter().copied().zip(self.mults[range].iter().copied())
    }

    pub fn multiplicity(&self, u: VertexId, v: VertexId) -> u32 {
        if u >= self.n_vertices {
            return 0;
        }
        let range = self.offsets[u]..self.offsets[u + 1];
        match self.targets[range.clone()].binary_search(&v) {
            Ok(i) => self.mults[range.start + i],
            Err(_) => 0,
        }
    }

    /// Undirected edge list `(u, v, m)` with `u <= v`, read from the `u` side.
    pub fn edges(&self) -> Vec<(VertexId, VertexId, u32)> {
        (0..self.n_vertices)
            .flat_map(|u| self.neighbors(u).filter(move |&(v, _)| u <= v).map(move |(v, m)| (u, v, m)))
            .collect()
    }

    /// Dense Laplacian: degree on the diagonal, `-multiplicity` elsewhere.
    pub fn laplacian(&self) -> Vec<Vec<i64>> {
        let n = self.n_vertices;
        let mut l = vec![vec![0i64; n]; n];
        for (u, row) in l.iter_mut().enumerate() {
            row[u] = self.degrees[u] as i64;
            for (v, m) in self.neighbors(u) {
                row[v] -= i64::from(m);
            }
        }
        l
    }

    /// Checks symmetry, looplessness and index ranges, collecting every
    /// violation rather than stopping at the first.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut violations = Vec::new();
        if let Some(sink) = self.sink {
            if sink >= self.n_vertices {
                violations.push(Violation::SinkOutOfRange { sink, n_vertices: self.n_vertices });
            }
        }
        for &(u, v) in &self.stray {
            violations.push(Violation::EndpointOutOfRange { u, v, n_vertices: self.n_vertices });
        }
        for u in 0..self.n_vertices {
            for (v, m) in self.neighbors(u) {
                if u == v {
                    violations.push(Violation::Loop { vertex: u, multiplicity: m });
                } else {
                    let back = self.multiplicity(v, u);
                    // report each asymmetric pair once
                    if back != m && (u < v || back == 0) {
                        violations.push(Violation::Asymmetric { u, v, forward: m, backward: back });
                    }
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }
}

/// A periodic sequence of validated stages over a fixed vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    n_vertices: usize,
    sink: Option<VertexId>,
    stages: Vec<StageGraph>,
}

impl Schedule {
    /// Validates every stage and checks they agree on vertex count and sink.
    pub fn new(stages: Vec<StageGraph>) -> Result<Self, GraphError> {
        let first = stages.first().ok_or(GraphError::EmptySchedule)?;
        let (n_vertices, sink) = (first.n_vertices, first.sink);
        for (i, stage) in stages.iter().enumerate() {
            if stage.n_vertices != n_vertices {
                return Err(GraphError::VertexCountMismatch {
                    stage: i,
                    expected: n_vertices,
                    found: stage.n_vertices,
                });
            }
            if stage.sink != sink {
                return Err(GraphError::SinkMismatch { stage: i, expected: sink, found: stage.sink });
            }
            stage
                .validate()
                .map_err(|violations| GraphError::InvalidStage { stage: i, violations })?;
        }
        Ok(Schedule { n_vertices, sink, stages })
    }

    /// A schedule with a single stage repeated forever.
    pub fn constant(stage: StageGraph) -> Result<Self, GraphError> {
        Self::new(vec![stage])
    }

    pub fn period(&self) -> usize {
        self.stages.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn sink(&self) -> Option<VertexId> {
        self.sink
    }

    pub fn stages(&self) -> &[StageGraph] {
        &self.stages
    }

    /// The graph in force at time `t`.
    pub fn stage_at(&self, t: u64) -> &StageGraph {
        &self.stages[(t % self.stages.len() as u64) as usize]
    }

    /// Non-sink vertices in index order.
    pub fn non_sink_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.n_vertices).filter(move |&v| Some(v) != self.sink)
    }

    /// Whether every vertex keeps the same degree in every stage.
    pub fn has_uniform_degrees(&self) -> bool {
        let first = self.stages[0].degrees();
        self.stages.iter().all(|s| s.degrees() == first)
    }

    /// Parses the JSON schedule document.
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let doc: ScheduleDoc =
            serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        doc.into_schedule()
    }

    pub fn to_json(&self) -> String {
        let doc = ScheduleDoc {
            period: self.period(),
            n_vertices: self.n_vertices,
            sink: self.sink,
            stages: self.stages.iter().map(StageGraph::edges).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("schedule document serializes")
    }
}

/// On-disk form of a [`Schedule`]: `stages[k]` lists the undirected edges
/// `[u, v, multiplicity]` of stage `k`, each edge once.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleDoc {
    pub period: usize,
    pub n_vertices: usize,
    pub sink: Option<VertexId>,
    pub stages: Vec<Vec<(VertexId, VertexId, u32)>>,
}

impl ScheduleDoc {
    pub fn into_schedule(self) -> Result<Schedule, GraphError> {
        if self.period != self.stages.len() {
            return Err(GraphError::PeriodMismatch {
                declared: self.period,
                listed: self.stages.len(),
            });
        }
        let stages = self
            .stages
            .iter()
            .map(|edges| StageGraph::from_edges(self.n_vertices, self.sink, edges))
            .collect();
        Schedule::new(stages)
    }
}
