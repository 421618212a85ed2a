//! Small hand-built schedules used in tests, examples and the CLI.

use crate::graph::{Schedule, StageGraph, VertexId};

// Edges of the four-stage triangle, with vertices named 1, 2, 3.
const TRIANGLE: [&[(usize, usize, u32)]; 4] = [
    &[(1, 2, 1), (1, 3, 2), (3, 2, 1)],
    &[(1, 2, 2), (1, 3, 1)],
    &[(2, 1, 1), (2, 3, 1)],
    &[(1, 3, 1), (2, 3, 2)],
];

fn triangle(index_of: [VertexId; 3], sink: Option<VertexId>) -> Schedule {
    let stages = TRIANGLE
        .iter()
        .map(|edges| {
            let edges: Vec<_> =
                edges.iter().map(|&(a, b, m)| (index_of[a - 1], index_of[b - 1], m)).collect();
            StageGraph::from_edges(3, sink, &edges)
        })
        .collect();
    Schedule::new(stages).expect("triangle stages are valid")
}

/// Sinkless triangle whose Laplacian cycles with period 4; vertices 1, 2, 3
/// are indices 0, 1, 2.
pub fn evolving_triangle() -> Schedule {
    triangle([0, 1, 2], None)
}

/// The same triangle with vertex 3 acting as sink at index 0, so vertices
/// 1 and 2 are indices 1 and 2.
pub fn evolving_triangle_with_sink() -> Schedule {
    triangle([1, 2, 0], Some(0))
}

/// Vertices `{s, u, v}` = indices `{0, 1, 2}`: edges `uv, vs` at even times
/// and `uv, us` at odd times. Starting from one grain on `u` it never
/// stabilizes.
pub fn two_stage_oscillator() -> Schedule {
    let even = StageGraph::from_edges(3, Some(0), &[(1, 2, 1), (2, 0, 1)]);
    let odd = StageGraph::from_edges(3, Some(0), &[(1, 2, 1), (1, 0, 1)]);
    Schedule::new(vec![even, odd]).expect("oscillator stages are valid")
}
