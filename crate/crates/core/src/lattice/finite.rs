//! Finite pieces of the lattice wired to a single sink.
//!
//! Cell `(x, y)` with `0 <= x < width`, `0 <= y < height` is vertex
//! `1 + y * width + x`; vertex 0 is the sink. Every cell keeps the full
//! degree of the rule: neighbor slots that fall off the lattice become edges
//! to the sink.

use crate::engine::Configuration;
use crate::graph::{Schedule, StageGraph, VertexId};

use super::grid::DenseGrid;
use super::rule::{LatticeRule, LatticeSchedule};

pub const SINK: VertexId = 0;

pub fn cell_vertex(width: usize, x: usize, y: usize) -> VertexId {
    1 + y * width + x
}

/// Inverse of [`cell_vertex`]; `None` for the sink.
pub fn vertex_cell(width: usize, v: VertexId) -> Option<(usize, usize)> {
    (v != SINK).then(|| ((v - 1) % width, (v - 1) / width))
}

pub fn finite_stage(width: usize, height: usize, rule: LatticeRule) -> StageGraph {
    let n = width * height + 1;
    let mut entries = Vec::with_capacity(n * 8);
    for y in 0..height {
        for x in 0..width {
            let v = cell_vertex(width, x, y);
            for &((dx, dy), m) in rule.offsets() {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if (0..width as i64).contains(&nx) && (0..height as i64).contains(&ny) {
                    entries.push((v, cell_vertex(width, nx as usize, ny as usize), m));
                } else {
                    entries.push((v, SINK, m));
                    entries.push((SINK, v, m));
                }
            }
        }
    }
    StageGraph::from_multiplicities(n, Some(SINK), &entries)
}

/// One finite stage per rule of `schedule`.
pub fn finite_lattice(width: usize, height: usize, schedule: &LatticeSchedule) -> Schedule {
    let stages = schedule.rules().iter().map(|&r| finite_stage(width, height, r)).collect();
    Schedule::new(stages).expect("finite lattice stages are valid")
}

/// The square window `|i|, |j| <= radius` as a finite lattice; cell `(i, j)`
/// sits at `(x, y) = (i + radius, j + radius)`.
pub fn window_lattice(radius: usize, schedule: &LatticeSchedule) -> Schedule {
    let side = 2 * radius + 1;
    finite_lattice(side, side, schedule)
}

/// Restricts a grid to a window and lays it out as a configuration.
pub fn window_config(grid: &DenseGrid, radius: usize) -> Configuration {
    let side = 2 * radius + 1;
    let r = radius as i64;
    let mut values = vec![0; side * side + 1];
    for y in 0..side {
        for x in 0..side {
            values[cell_vertex(side, x, y)] = grid.get((x as i64 - r, y as i64 - r));
        }
    }
    Configuration::from_dense(values, Some(SINK))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trips() {
        assert_eq!(cell_vertex(5, 0, 0), 1);
        assert_eq!(cell_vertex(5, 4, 2), 15);
        assert_eq!(vertex_cell(5, 15), Some((4, 2)));
        assert_eq!(vertex_cell(5, SINK), None);
    }

    #[test]
    fn boundary_slots_go_to_the_sink() {
        let s = finite_stage(3, 3, LatticeRule::VerticalOnly);
        assert!(s.validate().is_ok());
        // top-row cell: one neighbor below, one sink edge
        let top = cell_vertex(3, 1, 2);
        assert_eq!(s.degree(top).unwrap(), 2);
        assert_eq!(s.multiplicity(top, SINK), 1);
        assert_eq!(s.multiplicity(top, cell_vertex(3, 1, 1)), 1);
        // middle row has no sink edge
        assert_eq!(s.multiplicity(cell_vertex(3, 1, 1), SINK), 0);
    }

    #[test]
    fn every_cell_keeps_full_degree() {
        for rule in LatticeRule::ALL {
            let s = finite_stage(4, 3, rule);
            assert!(s.validate().is_ok(), "{rule}");
            for v in 1..s.n_vertices() {
                assert_eq!(s.degree(v).unwrap(), rule.degree(), "{rule} vertex {v}");
            }
        }
    }

    #[test]
    fn doubled_corner_sends_three_to_sink() {
        let s = finite_stage(2, 2, LatticeRule::GridVerticalDoubled);
        let corner = cell_vertex(2, 0, 0);
        // one horizontal slot and one doubled vertical slot fall off
        assert_eq!(s.multiplicity(corner, SINK), 3);
        assert_eq!(s.multiplicity(corner, cell_vertex(2, 0, 1)), 2);
    }

    #[test]
    fn window_config_layout() {
        let mut g = DenseGrid::with_center(7);
        g.set((1, -1), 2);
        g.set((9, 9), 5);
        let c = window_config(&g, 1);
        assert_eq!(c.get(cell_vertex(3, 1, 1)), 7);
        assert_eq!(c.get(cell_vertex(3, 2, 0)), 2);
        assert_eq!(c.total(), 9);
    }
}
