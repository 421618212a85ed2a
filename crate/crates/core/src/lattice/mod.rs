//! Central piles on infinite lattices whose adjacency rule changes with time.

pub mod finite;
pub mod grid;
pub mod odometer;
pub mod pattern;
pub mod render;
pub mod rule;

pub use grid::{DenseGrid, AXES, DIHEDRAL};
pub use pattern::{
    run_central_pile, run_central_pile_with, run_lattice, trace_line, Backend, LatticeRound, LatticeState,
    PatternOutcome, PatternResult,
};
pub use render::{encode_pgm, encode_png, write_grid_csv, Palette, Raster, RenderError};
pub use rule::{Cell, LatticeRule, LatticeSchedule, ScheduleParseError, Symmetry};
