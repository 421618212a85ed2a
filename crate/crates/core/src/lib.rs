//! Abelian sandpiles on graphs whose edges change with time.
//!
//! * [`graph`]: stages, periodic schedules and Laplacians.
//! * [`engine`]: synchronous toppling rounds and stabilization.
//! * [`lattice`]: central piles on infinite lattices and their images.
//! * [`stats`]: avalanche dynamics and power-law fitting.

pub mod catalog;
pub mod engine;
pub mod graph;
pub mod lattice;
pub mod stats;

pub use engine::{
    parallel_round, sequential_topple_check, stabilize, stabilize_observed, topple_round,
    trace_line, unstable_set, Configuration, EngineError, EngineState, Limits, RoundEvent,
    RoundReport, StabilizationOutcome, TerminationMode,
};
pub use graph::{GraphError, Schedule, ScheduleDoc, StageGraph, VertexId, Violation};
pub use lattice::{DenseGrid, LatticeRule, LatticeSchedule, PatternOutcome, PatternResult};
pub use stats::{AvalancheRecord, DynamicsConfig, FitReport, LrtResult, PowerLawFit};
