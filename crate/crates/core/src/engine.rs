//! Synchronous toppling over an evolving schedule.
//!
//! One round at time `t` freezes the set of non-sink vertices holding at
//! least their degree in `stage_at(t)`, topples each of them exactly once,
//! and advances time to `t + 1`. Grains sent to the sink leave the system.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Schedule, StageGraph, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("configuration has {found} entries but the graph has {expected} vertices")]
    SizeMismatch { expected: usize, found: usize },
    #[error("expected {expected} non-sink values, got {found}")]
    NonSinkCountMismatch { expected: usize, found: usize },
    #[error("toppling order is not a permutation of the unstable set {unstable:?}")]
    NotAPermutation { unstable: Vec<VertexId> },
}

/// Grain counts per vertex. The sink entry, if any, is always zero, so
/// derived equality compares non-sink entries only.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    grains: Vec<u64>,
    sink: Option<VertexId>,
}

impl Configuration {
    pub fn zeros(n_vertices: usize, sink: Option<VertexId>) -> Self {
        Configuration { grains: vec![0; n_vertices], sink }
    }

    /// Zero configuration shaped for `schedule`.
    pub fn empty_for(schedule: &Schedule) -> Self {
        Self::zeros(schedule.n_vertices(), schedule.sink())
    }

    /// Builds a configuration from one value per vertex; whatever sits on the
    /// sink is discarded.
    pub fn from_dense(mut grains: Vec<u64>, sink: Option<VertexId>) -> Self {
        if let Some(s) = sink {
            if let Some(x) = grains.get_mut(s) {
                *x = 0;
            }
        }
        Configuration { grains, sink }
    }

    /// Builds a configuration from the non-sink values in vertex order.
    pub fn from_non_sink(schedule: &Schedule, values: &[u64]) -> Result<Self, EngineError> {
        let expected = schedule.n_vertices() - usize::from(schedule.sink().is_some());
        if values.len() != expected {
            return Err(EngineError::NonSinkCountMismatch { expected, found: values.len() });
        }
        let mut c = Self::empty_for(schedule);
        for (v, &x) in schedule.non_sink_vertices().zip(values) {
            c.grains[v] = x;
        }
        Ok(c)
    }

    pub fn n_vertices(&self) -> usize {
        self.grains.len()
    }

    pub fn sink(&self) -> Option<VertexId> {
        self.sink
    }

    pub fn get(&self, v: VertexId) -> u64 {
        self.grains[v]
    }

    /// Adds grains to `v`; additions to the sink vanish.
    pub fn add(&mut self, v: VertexId, amount: u64) {
        if Some(v) != self.sink {
            self.grains[v] += amount;
        }
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.grains
    }

    pub fn total(&self) -> u64 {
        self.grains.iter().sum()
    }

    /// Non-sink values in vertex order.
    pub fn non_sink_values(&self) -> Vec<u64> {
        self.grains
            .iter()
            .enumerate()
            .filter(|&(v, _)| Some(v) != self.sink)
            .map(|(_, &x)| x)
            .collect()
    }

    /// True when every non-sink vertex holds fewer grains than its degree.
    pub fn is_stable_on(&self, stage: &StageGraph) -> bool {
        self.grains
            .iter()
            .zip(stage.degrees())
            .enumerate()
            .all(|(v, (&c, &d))| stage.is_sink(v) || c < d)
    }

    fn check_shape(&self, stage: &StageGraph) -> Result<(), EngineError> {
        if self.grains.len() != stage.n_vertices() {
            return Err(EngineError::SizeMismatch {
                expected: stage.n_vertices(),
                found: self.grains.len(),
            });
        }
        Ok(())
    }
}

/// Non-sink vertices with `grains >= degree`, in index order.
pub fn unstable_set(config: &Configuration, stage: &StageGraph) -> Vec<VertexId> {
    let mut out = Vec::new();
    collect_unstable(config, stage, &mut out);
    out
}

fn collect_unstable(config: &Configuration, stage: &StageGraph, out: &mut Vec<VertexId>) {
    out.clear();
    let sink = stage.sink();
    out.extend(
        config
            .grains
            .iter()
            .zip(stage.degrees())
            .enumerate()
            .filter(|&(v, (&c, &d))| c >= d && Some(v) != sink)
            .map(|(v, _)| v),
    );
}

/// Outcome of one synchronous round.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RoundReport {
    pub toppled: u64,
    pub to_sink: u64,
}

fn topple_vertex(grains: &mut [u64], stage: &StageGraph, v: VertexId) -> u64 {
    grains[v] -= stage.degrees()[v];
    let mut to_sink = 0;
    for (w, m) in stage.neighbors(v) {
        if stage.is_sink(w) {
            to_sink += u64::from(m);
        } else {
            grains[w] += u64::from(m);
        }
    }
    to_sink
}

fn apply_round(config: &mut Configuration, stage: &StageGraph, unstable: &[VertexId]) -> RoundReport {
    let mut to_sink = 0;
    for &v in unstable {
        to_sink += topple_vertex(&mut config.grains, stage, v);
    }
    RoundReport { toppled: unstable.len() as u64, to_sink }
}

/// Topples every currently unstable vertex once, in place.
pub fn topple_round(config: &mut Configuration, stage: &StageGraph) -> RoundReport {
    let unstable = unstable_set(config, stage);
    apply_round(config, stage, &unstable)
}

/// Pure form of [`topple_round`]: returns the next configuration and the
/// number of vertices toppled.
pub fn parallel_round(config: &Configuration, stage: &StageGraph) -> (Configuration, u64) {
    let mut next = config.clone();
    let report = topple_round(&mut next, stage);
    (next, report.toppled)
}

/// Topples the start-of-round unstable set one vertex at a time in `order`.
/// The result always equals [`parallel_round`]'s configuration.
pub fn sequential_topple_check(
    config: &Configuration,
    stage: &StageGraph,
    order: &[VertexId],
) -> Result<Configuration, EngineError> {
    config.check_shape(stage)?;
    let unstable = unstable_set(config, stage);
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != unstable {
        return Err(EngineError::NotAPermutation { unstable });
    }
    let mut next = config.clone();
    for &v in order {
        topple_vertex(&mut next.grains, stage, v);
    }
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TerminationMode {
    /// Stop at the first round in which nothing topples.
    #[default]
    FirstQuiet,
    /// Stop after a full period of consecutive quiet rounds, so the result is
    /// stable at every stage.
    FullPeriodQuiet,
}

impl TerminationMode {
    /// Number of consecutive quiet rounds required to stop.
    pub fn window(self, period: usize) -> u64 {
        match self {
            TerminationMode::FirstQuiet => 1,
            TerminationMode::FullPeriodQuiet => period as u64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_rounds: u64,
    pub detect_cycles: bool,
    pub max_tracked_states: usize,
}

impl Limits {
    /// Defaults for central-pile pattern runs.
    pub const PATTERNS: Limits =
        Limits { max_rounds: 1_000_000_000, detect_cycles: true, max_tracked_states: 1 << 20 };
    /// Defaults for a single avalanche in a statistics run.
    pub const AVALANCHE: Limits =
        Limits { max_rounds: 1_000_000, detect_cycles: false, max_tracked_states: 1 << 20 };
}

impl Default for Limits {
    fn default() -> Self {
        Limits::PATTERNS
    }
}

/// A configuration together with the time it is observed at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineState {
    pub config: Configuration,
    pub t: u64,
}

impl EngineState {
    pub fn new(config: Configuration) -> Self {
        EngineState { config, t: 0 }
    }

    pub fn at(config: Configuration, t: u64) -> Self {
        EngineState { config, t }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StabilizationOutcome {
    Stabilized { state: EngineState, rounds: u64, topplings: u64 },
    /// The state at `cycle_start` reappeared `cycle_length` rounds later.
    NonTerminating { cycle_start: u64, cycle_length: u64, topplings: u64 },
    LimitExceeded { state: EngineState, topplings: u64 },
}

impl StabilizationOutcome {
    pub fn topplings(&self) -> u64 {
        match *self {
            StabilizationOutcome::Stabilized { topplings, .. }
            | StabilizationOutcome::NonTerminating { topplings, .. }
            | StabilizationOutcome::LimitExceeded { topplings, .. } => topplings,
        }
    }

    pub fn is_stabilized(&self) -> bool {
        matches!(self, StabilizationOutcome::Stabilized { .. })
    }
}

/// What an observer sees for each round: the configuration at time `t`
/// (before the round) and what the round did.
#[derive(Debug)]
pub struct RoundEvent<'a> {
    pub t: u64,
    pub config: &'a Configuration,
    pub report: RoundReport,
}

pub fn stabilize(
    state: EngineState,
    schedule: &Schedule,
    mode: TerminationMode,
    limits: Limits,
) -> StabilizationOutcome {
    stabilize_observed(state, schedule, mode, limits, |_| {})
}

/// [`stabilize`] with a callback invoked once per round.
pub fn stabilize_observed(
    state: EngineState,
    schedule: &Schedule,
    mode: TerminationMode,
    limits: Limits,
    mut observe: impl FnMut(&RoundEvent<'_>),
) -> StabilizationOutcome {
    let EngineState { mut config, mut t } = state;
    let period = schedule.period() as u64;
    let window = mode.window(schedule.period());
    let mut seen: HashMap<(Vec<u64>, u64, u64), u64> = HashMap::new();
    let mut unstable = Vec::new();
    let mut topplings = 0u64;
    let mut quiet = 0u64;
    let mut rounds = 0u64;

    loop {
        if rounds >= limits.max_rounds {
            return StabilizationOutcome::LimitExceeded { state: EngineState { config, t }, topplings };
        }
        if limits.detect_cycles {
            // the quiet counter is part of the state: it decides termination
            let key = (config.grains.clone(), t % period, quiet);
            if let Some(&first) = seen.get(&key) {
                return StabilizationOutcome::NonTerminating {
                    cycle_start: first,
                    cycle_length: t - first,
                    topplings,
                };
            }
            if seen.len() < limits.max_tracked_states {
                seen.insert(key, t);
            }
        }

        let stage = schedule.stage_at(t);
        collect_unstable(&config, stage, &mut unstable);
        let pending = RoundReport { toppled: unstable.len() as u64, to_sink: 0 };
        observe(&RoundEvent { t, config: &config, report: pending });
        let report = apply_round(&mut config, stage, &unstable);
        topplings += report.toppled;
        rounds += 1;
        t += 1;

        quiet = if report.toppled == 0 { quiet + 1 } else { 0 };
        if quiet >= window {
            return StabilizationOutcome::Stabilized {
                state: EngineState { config, t },
                rounds,
                topplings,
            };
        }
    }
}

/// One trace line: `t=<t> toppled=<k> config=<non-sink grains>`.
pub fn trace_line(t: u64, toppled: u64, config: &Configuration) -> String {
    let mut line = format!("t={t} toppled={toppled} config=");
    for (i, x) in config.non_sink_values().iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        let _ = write!(line, "{x}");
    }
    line
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn triangle_config(values: &[u64]) -> Configuration {
        Configuration::from_non_sink(&catalog::evolving_triangle_with_sink(), values).unwrap()
    }

    #[test]
    fn unstable_sets() {
        let s = catalog::evolving_triangle_with_sink();
        // vertices 1, 2 are the two non-sink triangle corners
        assert_eq!(unstable_set(&triangle_config(&[3, 2]), s.stage_at(0)), vec![1, 2]);
        assert!(unstable_set(&triangle_config(&[0, 0]), s.stage_at(0)).is_empty());

        let osc = catalog::two_stage_oscillator();
        let c = Configuration::from_non_sink(&osc, &[1, 0]).unwrap();
        assert_eq!(unstable_set(&c, osc.stage_at(0)), vec![1]);
    }

    #[test]
    fn sink_is_never_unstable() {
        let s = catalog::evolving_triangle_with_sink();
        let c = Configuration::from_dense(vec![99, 0, 0], Some(0));
        assert_eq!(c.get(0), 0);
        assert!(unstable_set(&c, s.stage_at(0)).is_empty());
    }

    #[test]
    fn rounds_along_the_avalanche() {
        let s = catalog::evolving_triangle_with_sink();
        let (c1, k) = parallel_round(&triangle_config(&[3, 2]), s.stage_at(0));
        assert_eq!((c1.non_sink_values(), k), (vec![1, 1], 2));
        let (c2, k) = parallel_round(&c1, s.stage_at(1));
        assert_eq!((c2.non_sink_values(), k), (vec![1, 1], 0));
        let (c3, k) = parallel_round(&c2, s.stage_at(2));
        assert_eq!((c3.non_sink_values(), k), (vec![0, 2], 1));
    }

    #[test]
    fn sink_outflow_is_reported() {
        let s = catalog::evolving_triangle_with_sink();
        let mut c = triangle_config(&[3, 2]);
        let r = topple_round(&mut c, s.stage_at(0));
        // vertex 1 sends 2 to the sink, vertex 2 sends 1
        assert_eq!(r, RoundReport { toppled: 2, to_sink: 3 });
        assert_eq!(c.total(), 2);
    }

    #[test]
    fn full_period_quiet_stabilization() {
        let s = catalog::evolving_triangle_with_sink();
        let out = stabilize(
            EngineState::new(triangle_config(&[3, 2])),
            &s,
            TerminationMode::FullPeriodQuiet,
            Limits::default(),
        );
        match out {
            StabilizationOutcome::Stabilized { state, rounds, topplings } => {
                assert_eq!(state.config.non_sink_values(), vec![0, 0]);
                assert_eq!(topplings, 4);
                // quiet from t = 4 through t = 7
                assert_eq!(rounds, 8);
                assert_eq!(state.t, 8);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn first_quiet_stops_early() {
        let s = catalog::evolving_triangle_with_sink();
        let out = stabilize(
            EngineState::new(triangle_config(&[3, 2])),
            &s,
            TerminationMode::FirstQuiet,
            Limits::default(),
        );
        match out {
            StabilizationOutcome::Stabilized { state, rounds, topplings } => {
                // t = 1 is already quiet
                assert_eq!(state.config.non_sink_values(), vec![1, 1]);
                assert_eq!((rounds, topplings, state.t), (2, 2, 2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn oscillator_never_stabilizes() {
        let s = catalog::two_stage_oscillator();
        let c = Configuration::from_non_sink(&s, &[1, 0]).unwrap();
        let out = stabilize(EngineState::new(c), &s, TerminationMode::FirstQuiet, Limits::default());
        assert_eq!(
            out,
            StabilizationOutcome::NonTerminating { cycle_start: 0, cycle_length: 2, topplings: 2 }
        );
    }

    #[test]
    fn already_stable_runs_one_window() {
        let s = catalog::evolving_triangle_with_sink();
        for (mode, window) in
            [(TerminationMode::FirstQuiet, 1), (TerminationMode::FullPeriodQuiet, 4)]
        {
            let out = stabilize(EngineState::new(triangle_config(&[0, 0])), &s, mode, Limits::default());
            match out {
                StabilizationOutcome::Stabilized { rounds, topplings, .. } => {
                    assert_eq!((rounds, topplings), (window, 0));
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn round_limit_is_an_outcome() {
        let s = catalog::two_stage_oscillator();
        let c = Configuration::from_non_sink(&s, &[1, 0]).unwrap();
        let limits = Limits { max_rounds: 5, detect_cycles: false, max_tracked_states: 0 };
        match stabilize(EngineState::new(c), &s, TerminationMode::FirstQuiet, limits) {
            StabilizationOutcome::LimitExceeded { state, topplings } => {
                assert_eq!((state.t, topplings), (5, 5));
                assert_eq!(state.config.non_sink_values(), vec![0, 1]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sequential_orders_agree() {
        let s = catalog::evolving_triangle_with_sink();
        let c = triangle_config(&[3, 2]);
        let a = sequential_topple_check(&c, s.stage_at(0), &[1, 2]).unwrap();
        let b = sequential_topple_check(&c, s.stage_at(0), &[2, 1]).unwrap();
        assert_eq!(a.non_sink_values(), vec![1, 1]);
        assert_eq!(a, b);

        let calm = triangle_config(&[0, 1]);
        assert_eq!(sequential_topple_check(&calm, s.stage_at(0), &[]).unwrap(), calm);

        assert_eq!(
            sequential_topple_check(&c, s.stage_at(0), &[1]),
            Err(EngineError::NotAPermutation { unstable: vec![1, 2] })
        );
        assert!(sequential_topple_check(&c, s.stage_at(0), &[1, 1]).is_err());
        let short = Configuration::zeros(2, None);
        assert!(matches!(
            sequential_topple_check(&short, s.stage_at(0), &[]),
            Err(EngineError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn trace_lines() {
        let s = catalog::evolving_triangle_with_sink();
        let mut lines = Vec::new();
        stabilize_observed(
            EngineState::new(triangle_config(&[3, 2])),
            &s,
            TerminationMode::FirstQuiet,
            Limits::default(),
            |e| lines.push(trace_line(e.t, e.report.toppled, e.config)),
        );
        assert_eq!(lines, vec!["t=0 toppled=2 config=3,2", "t=1 toppled=0 config=1,1"]);
    }

    #[test]
    fn from_non_sink_checks_length() {
        let s = catalog::evolving_triangle_with_sink();
        assert_eq!(
            Configuration::from_non_sink(&s, &[1, 2, 3]),
            Err(EngineError::NonSinkCountMismatch { expected: 2, found: 3 })
        );
    }
}
