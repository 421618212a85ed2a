//! Origin-centred square grid of grain counts.

use super::rule::{Cell, LatticeRule};

/// Cells `(i, j)` with `|i|, |j| <= radius`, row-major from `j = -radius`.
/// Everything outside the box is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseGrid {
    radius: usize,
    cells: Vec<u64>,
}

impl DenseGrid {
    pub fn new(radius: usize) -> Self {
        let side = 2 * radius + 1;
        DenseGrid { radius, cells: vec![0; side * side] }
    }

    /// `grains` at the origin and nothing else.
    pub fn with_center(grains: u64) -> Self {
        let mut g = DenseGrid::new(2);
        g.set((0, 0), grains);
        g
    }

    pub(crate) fn from_cells(radius: usize, cells: Vec<u64>) -> Self {
        debug_assert_eq!(cells.len(), (2 * radius + 1).pow(2));
        DenseGrid { radius, cells }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub(crate) fn cells(&self) -> &[u64] {
        &self.cells
    }

    pub(crate) fn cells_mut(&mut self) -> &mut [u64] {
        &mut self.cells
    }

    pub fn contains(&self, (i, j): Cell) -> bool {
        let r = self.radius as i64;
        i.abs() <= r && j.abs() <= r
    }

    pub(crate) fn index(&self, (i, j): Cell) -> usize {
        let r = self.radius as i64;
        ((j + r) as usize) * self.side() + (i + r) as usize
    }

    pub fn get(&self, cell: Cell) -> u64 {
        if self.contains(cell) {
            self.cells[self.index(cell)]
        } else {
            0
        }
    }

    /// Sets a cell, growing the box so the cell stays strictly inside.
    pub fn set(&mut self, cell: Cell, value: u64) {
        let need = cell.0.unsigned_abs().max(cell.1.unsigned_abs()) as usize + 1;
        if need > self.radius {
            self.grow_to(need);
        }
        let k = self.index(cell);
        self.cells[k] = value;
    }

    /// Re-centres the contents in a box of at least `radius`, at least
    /// doubling the current one.
    pub fn grow_to(&mut self, radius: usize) {
        if radius <= self.radius {
            return;
        }
        let new_r = radius.max(2 * self.radius);
        let (old_r, old_side) = (self.radius, self.side());
        let new_side = 2 * new_r + 1;
        let mut cells = vec![0; new_side * new_side];
        let shift = new_r - old_r;
        for (row, chunk) in self.cells.chunks_exact(old_side).enumerate() {
            let start = (row + shift) * new_side + shift;
            cells[start..start + old_side].copy_from_slice(chunk);
        }
        self.radius = new_r;
        self.cells = cells;
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().sum()
    }

    pub fn max_value(&self) -> u64 {
        self.cells.iter().copied().max().unwrap_or(0)
    }

    /// Nonzero cells in row-major order from the bottom row.
    pub fn nonzero(&self) -> impl Iterator<Item = (Cell, u64)> + '_ {
        let r = self.radius as i64;
        let side = self.side();
        self.cells.iter().enumerate().filter(|&(_, &v)| v != 0).map(move |(k, &v)| {
            (((k % side) as i64 - r, (k / side) as i64 - r), v)
        })
    }

    /// Tight box `(i_min, i_max, j_min, j_max)` around the nonzero cells.
    pub fn nonzero_bounds(&self) -> Option<(i64, i64, i64, i64)> {
        self.nonzero().fold(None, |acc, ((i, j), _)| {
            Some(match acc {
                None => (i, i, j, j),
                Some((a, b, c, d)) => (a.min(i), b.max(i), c.min(j), d.max(j)),
            })
        })
    }

    /// Largest `max(|i|, |j|)` over nonzero cells.
    pub fn extent(&self) -> Option<usize> {
        self.nonzero_bounds()
            .map(|(a, b, c, d)| [a, b, c, d].iter().map(|x| x.unsigned_abs()).max().unwrap() as usize)
    }

    /// Every cell holds fewer grains than the rule's degree.
    pub fn is_stable_under(&self, rule: LatticeRule) -> bool {
        let d = rule.degree();
        self.cells.iter().all(|&v| v < d)
    }

    /// Applies a map of the plane to every nonzero cell.
    pub fn transformed(&self, f: impl Fn(Cell) -> Cell) -> DenseGrid {
        let mut out = DenseGrid::new(self.radius);
        for (c, v) in self.nonzero() {
            out.set(f(c), v);
        }
        out
    }

    /// Equality of contents regardless of box size.
    pub fn same_cells(&self, other: &DenseGrid) -> bool {
        self.nonzero().all(|(c, v)| other.get(c) == v)
            && other.nonzero().all(|(c, v)| self.get(c) == v)
    }
}

/// The 8 symmetries of the square, identity first.
pub const DIHEDRAL: [fn(Cell) -> Cell; 8] = [
    |(i, j)| (i, j),
    |(i, j)| (-j, i),
    |(i, j)| (-i, -j),
    |(i, j)| (j, -i),
    |(i, j)| (-i, j),
    |(i, j)| (i, -j),
    |(i, j)| (j, i),
    |(i, j)| (-j, -i),
];

/// Identity and the reflections in both axes.
pub const AXES: [fn(Cell) -> Cell; 4] =
    [|(i, j)| (i, j), |(i, j)| (-i, j), |(i, j)| (i, -j), |(i, j)| (-i, -j)];
