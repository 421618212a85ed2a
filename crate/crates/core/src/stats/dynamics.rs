//! Driven dynamics on a finite evolving lattice: add one grain at a random
//! cell, stabilize, record the avalanche size, repeat.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{
    stabilize_observed, Configuration, EngineState, Limits, RoundEvent, StabilizationOutcome,
    TerminationMode,
};
use crate::graph::{Schedule, StageGraph};
use crate::lattice::finite::finite_lattice;
use crate::lattice::LatticeSchedule;

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsConfig {
    pub width: usize,
    pub height: usize,
    pub schedule: LatticeSchedule,
    pub iterations: usize,
    pub seed: u64,
    pub mode: TerminationMode,
    pub limits: Limits,
}

impl DynamicsConfig {
    pub fn new(schedule: LatticeSchedule, width: usize, height: usize, iterations: usize, seed: u64) -> Self {
        DynamicsConfig {
            width,
            height,
            schedule,
            iterations,
            seed,
            mode: TerminationMode::FirstQuiet,
            limits: Limits::AVALANCHE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvalancheRecord {
    pub index: usize,
    pub size: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynamicsError {
    #[error("lattice must be at least 2x2, got {width}x{height}")]
    TooSmall { width: usize, height: usize },
    #[error("need at least one iteration")]
    NoIterations,
    #[error("the graph has no non-sink vertex")]
    NoVertices,
    #[error("avalanche {iteration} hit the round limit after {topplings} topplings")]
    LimitExceeded { iteration: usize, topplings: u64 },
    #[error("avalanche {iteration} never stabilizes (cycle of length {cycle_length})")]
    NonTerminating { iteration: usize, cycle_length: u64 },
}

impl DynamicsError {
    /// Iteration at which the run stopped, if it stopped inside one.
    pub fn iteration(&self) -> Option<usize> {
        match *self {
            DynamicsError::LimitExceeded { iteration, .. }
            | DynamicsError::NonTerminating { iteration, .. } => Some(iteration),
            _ => None,
        }
    }
}

/// Independent uniform values in `0..=max_degree - 1` on non-sink vertices,
/// where the maximum degree is taken over non-sink vertices.
pub fn random_initial_config<R: Rng + ?Sized>(stage0: &StageGraph, rng: &mut R) -> Configuration {
    let delta = (0..stage0.n_vertices())
        .filter(|&v| !stage0.is_sink(v))
        .map(|v| stage0.degrees()[v])
        .max()
        .unwrap_or(0);
    let mut c = Configuration::zeros(stage0.n_vertices(), stage0.sink());
    if delta <= 1 {
        return c;
    }
    for v in 0..stage0.n_vertices() {
        if !stage0.is_sink(v) {
            c.add(v, rng.random_range(0..delta));
        }
    }
    c
}

/// Runs the dynamics on any schedule with a sink. Time carries over from one
/// avalanche to the next.
pub fn run_on_schedule(
    schedule: &Schedule,
    iterations: usize,
    seed: u64,
    mode: TerminationMode,
    limits: Limits,
) -> Result<Vec<AvalancheRecord>, DynamicsError> {
    run_on_schedule_observed(schedule, iterations, seed, mode, limits, |_, _| {})
}

/// [`run_on_schedule`] with a callback for every round of every avalanche;
/// the first argument is the iteration index.
pub fn run_on_schedule_observed(
    schedule: &Schedule,
    iterations: usize,
    seed: u64,
    mode: TerminationMode,
    limits: Limits,
    mut observe: impl FnMut(usize, &RoundEvent<'_>),
) -> Result<Vec<AvalancheRecord>, DynamicsError> {
    let vertices: Vec<usize> = schedule.non_sink_vertices().collect();
    if vertices.is_empty() {
        return Err(DynamicsError::NoVertices);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = random_initial_config(schedule.stage_at(0), &mut rng);
    let mut state = EngineState::new(config);
    let mut records = Vec::with_capacity(iterations);
    for index in 0..iterations {
        let v = vertices[rng.random_range(0..vertices.len())];
        state.config.add(v, 1);
        match stabilize_observed(state, schedule, mode, limits, |e| observe(index, e)) {
            StabilizationOutcome::Stabilized { state: next, topplings, .. } => {
                records.push(AvalancheRecord { index, size: topplings });
                state = next;
            }
            StabilizationOutcome::LimitExceeded { topplings, .. } => {
                return Err(DynamicsError::LimitExceeded { iteration: index, topplings });
            }
            StabilizationOutcome::NonTerminating { cycle_length, .. } => {
                return Err(DynamicsError::NonTerminating { iteration: index, cycle_length });
            }
        }
    }
    Ok(records)
}

/// Builds the finite lattice for `cfg` and runs the dynamics on it.
pub fn run_dynamics(cfg: &DynamicsConfig) -> Result<Vec<AvalancheRecord>, DynamicsError> {
    if cfg.width < 2 || cfg.height < 2 {
        return Err(DynamicsError::TooSmall { width: cfg.width, height: cfg.height });
    }
    if cfg.iterations == 0 {
        return Err(DynamicsError::NoIterations);
    }
    let schedule = finite_lattice(cfg.width, cfg.height, &cfg.schedule);
    run_on_schedule(&schedule, cfg.iterations, cfg.seed, cfg.mode, cfg.limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::StageGraph;

    fn single_edge() -> Schedule {
        Schedule::constant(StageGraph::from_edges(2, Some(0), &[(0, 1, 1)])).unwrap()
    }

    #[test]
    fn degree_one_means_zero_start() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = random_initial_config(single_edge().stage_at(0), &mut rng);
        assert_eq!(c.total(), 0);
    }

    #[test]
    fn model_g_start_is_binary() {
        let s = finite_lattice(6, 5, &LatticeSchedule::model_g());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = random_initial_config(s.stage_at(0), &mut rng);
        assert!(c.non_sink_values().iter().all(|&x| x <= 1));
        assert!(c.total() > 0);
    }

    #[test]
    fn one_grain_one_toppling() {
        let recs = run_on_schedule(&single_edge(), 3, 7, TerminationMode::FirstQuiet, Limits::AVALANCHE)
            .unwrap();
        assert!(recs.iter().all(|r| r.size == 1));
        assert_eq!(recs.iter().map(|r| r.index).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn quiet_addition_has_size_zero() {
        let s = Schedule::constant(StageGraph::from_edges(2, Some(0), &[(0, 1, 2)])).unwrap();
        let recs = run_on_schedule(&s, 1, 0, TerminationMode::FirstQuiet, Limits::AVALANCHE).unwrap();
        // start is 0 or 1, so after one grain it is 1 (size 0) or 2 (size 1)
        assert!(recs[0].size <= 1);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let cfg = DynamicsConfig::new(LatticeSchedule::model_d(), 8, 8, 300, 42);
        assert_eq!(run_dynamics(&cfg).unwrap(), run_dynamics(&cfg).unwrap());
        let other = DynamicsConfig { seed: 43, ..cfg.clone() };
        assert_ne!(run_dynamics(&cfg).unwrap(), run_dynamics(&other).unwrap());
    }

    #[test]
    fn validates_config() {
        let cfg = DynamicsConfig::new(LatticeSchedule::model_g(), 1, 5, 10, 0);
        assert_eq!(run_dynamics(&cfg), Err(DynamicsError::TooSmall { width: 1, height: 5 }));
        let cfg = DynamicsConfig::new(LatticeSchedule::model_g(), 5, 5, 0, 0);
        assert_eq!(run_dynamics(&cfg), Err(DynamicsError::NoIterations));
    }

    #[test]
    fn oscillator_is_reported() {
        use crate::catalog;
        // start at (1, 0): u topples forever
        let s = catalog::two_stage_oscillator();
        let limits = Limits { max_rounds: 100, ..Limits::AVALANCHE };
        let err = run_on_schedule(&s, 50, 0, TerminationMode::FirstQuiet, limits).unwrap_err();
        assert!(matches!(err, DynamicsError::LimitExceeded { topplings: 100, .. }), "{err:?}");
        let watched = Limits { detect_cycles: true, ..limits };
        let err = run_on_schedule(&s, 50, 0, TerminationMode::FirstQuiet, watched).unwrap_err();
        assert!(matches!(err, DynamicsError::NonTerminating { cycle_length: 2, .. }), "{err:?}");
        assert!(err.iteration().is_some());
    }
}
