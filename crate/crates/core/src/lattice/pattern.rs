//! Synchronous rounds on the infinite lattice and central-pile runs.

use crate::engine::{Limits, TerminationMode};

use super::grid::DenseGrid;
use super::odometer;
use super::rule::{LatticeRule, LatticeSchedule};

/// A lattice configuration at time `t`.
#[derive(Debug, Clone)]
pub struct LatticeState {
    grid: DenseGrid,
    t: u64,
    // every nonzero cell has max(|i|, |j|) <= support
    support: usize,
    // Cells that toppled or gained grains in the last round. Every other cell
    // was stable under the last rule, so the next round only has to look
    // here unless its degree is lower.
    touched: Option<Vec<usize>>,
    last_degree: u64,
    // round stamps used to deduplicate `touched`
    stamp: Vec<u32>,
    // max(|i|, |j|) of each storage cell
    ring: Vec<u32>,
    epoch: u32,
    unstable: Vec<usize>,
}

/// What an observer sees once per round, before the round is applied.
#[derive(Debug)]
pub struct LatticeRound<'a> {
    pub t: u64,
    pub toppled: u64,
    pub grid: &'a DenseGrid,
    /// Topplings before this round.
    pub topplings_so_far: u64,
}

impl LatticeState {
    pub fn new(grid: DenseGrid, t: u64) -> Self {
        let support = grid.extent().unwrap_or(0);
        let mut s = LatticeState {
            grid,
            t,
            support,
            touched: None,
            last_degree: 0,
            stamp: Vec::new(),
            ring: Vec::new(),
            epoch: 0,
            unstable: Vec::new(),
        };
        s.ensure_room();
        s.reset_tables();
        s
    }

    pub fn central(grains: u64) -> Self {
        Self::new(DenseGrid::with_center(grains), 0)
    }

    pub fn grid(&self) -> &DenseGrid {
        &self.grid
    }

    pub fn into_grid(self) -> DenseGrid {
        self.grid
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    // Writes reach support + 1, which must stay strictly inside the box.
    fn ensure_room(&mut self) {
        if self.support + 2 > self.grid.radius() {
            self.grid.grow_to(self.support + 2);
            self.reset_tables();
        }
    }

    fn reset_tables(&mut self) {
        let (side, r) = (self.grid.side(), self.grid.radius());
        self.stamp = vec![0; side * side];
        self.epoch = 0;
        self.ring = (0..side * side).map(|k| ((k % side).abs_diff(r).max((k / side).abs_diff(r))) as u32).collect();
        // storage indices moved
        self.touched = None;
    }

    // Collects the cells holding at least `d` into `self.unstable`.
    fn mark(&mut self, d: u64) {
        self.unstable.clear();
        let cells = self.grid.cells();
        match &self.touched {
            Some(touched) if d >= self.last_degree => {
                self.unstable.extend(touched.iter().copied().filter(|&k| cells[k] >= d));
            }
            _ => {
                let side = self.grid.side();
                let r = self.grid.radius();
                let (lo, hi) = (r - self.support, r + self.support);
                for row in lo..=hi {
                    let a = row * side + lo;
                    let found = cells[a..=row * side + hi].iter().enumerate().filter(|&(_, &v)| v >= d);
                    self.unstable.extend(found.map(|(i, _)| a + i));
                }
            }
        }
    }

    fn apply(&mut self, rule: LatticeRule) {
        let d = rule.degree();
        let side = self.grid.side() as isize;
        let deltas: Vec<(isize, u64)> = rule
            .offsets()
            .iter()
            .map(|&((di, dj), m)| (dj as isize * side + di as isize, u64::from(m)))
            .collect();
        let cells = self.grid.cells_mut();
        // every subtraction first: a toppling cell held at least d
        for &k in &self.unstable {
            cells[k] -= d;
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        let mut touched = self.touched.take().unwrap_or_default();
        touched.clear();
        let mut reach = self.support;
        for &k in &self.unstable {
            reach = reach.max(self.ring[k] as usize + 1);
            if self.stamp[k] != self.epoch {
                self.stamp[k] = self.epoch;
                touched.push(k);
            }
            for &(delta, mult) in &deltas {
                let n = (k as isize + delta) as usize;
                cells[n] += mult;
                if self.stamp[n] != self.epoch {
                    self.stamp[n] = self.epoch;
                    touched.push(n);
                }
            }
        }
        self.support = reach;
        self.touched = Some(touched);
        self.last_degree = d;
    }

    /// One synchronous round against `rule`; returns the number of cells
    /// toppled.
    pub fn round(&mut self, rule: LatticeRule) -> u64 {
        self.round_observed(rule, 0, &mut |_| {})
    }

    fn round_observed(
        &mut self,
        rule: LatticeRule,
        topplings_so_far: u64,
        observe: &mut dyn FnMut(&LatticeRound<'_>),
    ) -> u64 {
        self.ensure_room();
        self.mark(rule.degree());
        let count = self.unstable.len() as u64;
        observe(&LatticeRound { t: self.t, toppled: count, grid: &self.grid, topplings_so_far });
        self.apply(rule);
        self.t += 1;
        count
    }

    fn same_state(&self, other: &LatticeState) -> bool {
        if self.grid.radius() == other.grid.radius() {
            self.grid.cells() == other.grid.cells()
        } else {
            self.grid.same_cells(&other.grid)
        }
    }
}

/// `t=<t> toppled=<k> config=<values>`, listing the square `|i|, |j| <= e`
/// around the nonzero cells row by row from the top, so the side is the
/// square root of the value count.
pub fn trace_line(round: &LatticeRound<'_>) -> String {
    let e = round.grid.extent().unwrap_or(0) as i64;
    let mut values = Vec::with_capacity(((2 * e + 1) * (2 * e + 1)) as usize);
    for j in (-e..=e).rev() {
        for i in -e..=e {
            values.push(round.grid.get((i, j)).to_string());
        }
    }
    format!("t={} toppled={} config={}", round.t, round.toppled, values.join(","))
}

/// A stabilized pattern.
#[derive(Debug, Clone)]
pub struct PatternResult {
    pub grid: DenseGrid,
    /// Rounds executed; `None` when the static solver computed the result
    /// without running rounds.
    pub rounds: Option<u64>,
    pub final_t: Option<u64>,
    pub topplings: u64,
    pub max_value: u64,
}

#[derive(Debug, Clone)]
pub enum PatternOutcome {
    Stabilized(PatternResult),
    NonTerminating { cycle_start: u64, cycle_length: u64, topplings: u64 },
    LimitExceeded { grid: DenseGrid, t: u64, topplings: u64 },
}

impl PatternOutcome {
    pub fn topplings(&self) -> u64 {
        match self {
            PatternOutcome::Stabilized(r) => r.topplings,
            PatternOutcome::NonTerminating { topplings, .. }
            | PatternOutcome::LimitExceeded { topplings, .. } => *topplings,
        }
    }

    pub fn stabilized(self) -> Option<PatternResult> {
        match self {
            PatternOutcome::Stabilized(r) => Some(r),
            _ => None,
        }
    }
}

/// Runs rounds from `start` until the termination condition holds.
///
/// Cycle detection compares against a snapshot taken at power-of-two round
/// counts, so memory stays at one extra grid.
pub fn run_lattice(
    start: LatticeState,
    schedule: &LatticeSchedule,
    mode: TerminationMode,
    limits: Limits,
    mut observe: impl FnMut(&LatticeRound<'_>),
) -> PatternOutcome {
    let window = mode.window(schedule.period());
    let period = schedule.period() as u64;
    let initial = if limits.detect_cycles { Some(start.clone()) } else { None };
    let mut state = start;
    let mut topplings = 0u64;
    let mut quiet = 0u64;
    let mut rounds = 0u64;
    // snapshot, its quiet counter, and rounds since it was taken
    let mut saved: Option<(LatticeState, u64)> = None;
    let (mut power, mut lam) = (1u64, 0u64);

    loop {
        if rounds >= limits.max_rounds {
            return PatternOutcome::LimitExceeded { grid: state.grid, t: state.t, topplings };
        }
        let k = state.round_observed(schedule.rule_at(state.t), topplings, &mut observe);
        topplings += k;
        rounds += 1;
        quiet = if k == 0 { quiet + 1 } else { 0 };
        if quiet >= window {
            let max_value = state.grid.max_value();
            return PatternOutcome::Stabilized(PatternResult {
                grid: state.grid,
                rounds: Some(rounds),
                final_t: Some(state.t),
                topplings,
                max_value,
            });
        }

        if limits.detect_cycles {
            lam += 1;
            if let Some((snap, snap_quiet)) = &saved {
                if snap.t % period == state.t % period
                    && *snap_quiet == quiet
                    && state.same_state(snap)
                {
                    let start = initial.expect("kept when detecting cycles");
                    let cycle_start = first_repeat(start, schedule, lam);
                    return PatternOutcome::NonTerminating {
                        cycle_start,
                        cycle_length: lam,
                        topplings,
                    };
                }
            }
            if lam == power {
                saved = Some((state.clone(), quiet));
                power *= 2;
                lam = 0;
            }
        }
    }
}

// Earliest time whose state recurs `cycle_length` rounds later.
fn first_repeat(start: LatticeState, schedule: &LatticeSchedule, cycle_length: u64) -> u64 {
    let mut lead = start.clone();
    for _ in 0..cycle_length {
        lead.round(schedule.rule_at(lead.t));
    }
    let mut trail = start;
    let (mut qt, mut ql) = (0u64, 0u64);
    loop {
        if trail.same_state(&lead) && qt == ql {
            return trail.t;
        }
        qt = if trail.round(schedule.rule_at(trail.t)) == 0 { qt + 1 } else { 0 };
        ql = if lead.round(schedule.rule_at(lead.t)) == 0 { ql + 1 } else { 0 };
    }
}

/// How a central pile is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Synchronous rounds, except that a single-rule schedule is solved
    /// directly (the result does not depend on toppling order there).
    #[default]
    Auto,
    /// Always run synchronous rounds.
    Rounds,
}

/// `grains` at the origin, stabilized under `schedule` with full-period-quiet
/// termination.
pub fn run_central_pile(schedule: &LatticeSchedule, grains: u64, limits: Limits) -> PatternOutcome {
    run_central_pile_with(schedule, grains, limits, Backend::Auto, |_| {})
}

/// [`run_central_pile`] with a backend choice and a per-round observer.
/// The observer is not called when the direct solver is used.
pub fn run_central_pile_with(
    schedule: &LatticeSchedule,
    grains: u64,
    limits: Limits,
    backend: Backend,
    observe: impl FnMut(&LatticeRound<'_>),
) -> PatternOutcome {
    if backend == Backend::Auto && schedule.rules() == [LatticeRule::Grid4] {
        let (grid, topplings) = odometer::stabilize_grid4(grains);
        let max_value = grid.max_value();
        return PatternOutcome::Stabilized(PatternResult {
            grid,
            rounds: None,
            final_t: None,
            topplings,
            max_value,
        });
    }
    run_lattice(
        LatticeState::central(grains),
        schedule,
        TerminationMode::FullPeriodQuiet,
        limits,
        observe,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_of(cells: &[((i64, i64), u64)]) -> DenseGrid {
        let mut g = DenseGrid::new(2);
        for &(c, v) in cells {
            g.set(c, v);
        }
        g
    }

    fn rounds_of(schedule: &LatticeSchedule, grains: u64) -> (Vec<DenseGrid>, PatternResult) {
        let mut seen = Vec::new();
        let out = run_central_pile_with(schedule, grains, Limits::PATTERNS, Backend::Rounds, |r| {
            seen.push(r.grid.clone())
        });
        (seen, out.stabilized().expect("stabilizes"))
    }

    #[test]
    fn static_eight_grains() {
        let (seen, res) = rounds_of(&LatticeSchedule::static_grid(), 8);
        let cross = |c, a| grid_of(&[((0, 0), c), ((1, 0), a), ((-1, 0), a), ((0, 1), a), ((0, -1), a)]);
        assert!(seen[1].same_cells(&cross(4, 1)));
        assert!(seen[2].same_cells(&cross(0, 2)));
        assert!(res.grid.same_cells(&cross(0, 2)));
        assert_eq!((res.topplings, res.rounds, res.final_t), (2, Some(3), Some(3)));
    }

    #[test]
    fn trace_lines() {
        let mut lines = Vec::new();
        run_central_pile_with(&LatticeSchedule::static_grid(), 8, Limits::PATTERNS, Backend::Rounds, |r| {
            lines.push(trace_line(r))
        });
        assert_eq!(lines[0], "t=0 toppled=1 config=8");
        assert_eq!(lines[1], "t=1 toppled=1 config=0,1,0,1,4,1,0,1,0");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn doubled_eight_grains() {
        let (seen, res) = rounds_of(&LatticeSchedule::doubled(), 8);
        let want = grid_of(&[((0, 0), 2), ((0, 1), 2), ((0, -1), 2), ((1, 0), 1), ((-1, 0), 1)]);
        assert!(seen[1].same_cells(&want));
        assert!(res.grid.same_cells(&want));
        assert_eq!(res.topplings, 1);
    }

    #[test]
    fn single_grain_is_stable() {
        for name in LatticeSchedule::BUILT_IN {
            let s = LatticeSchedule::by_name(name).unwrap();
            let res = run_central_pile(&s, 1, Limits::PATTERNS).stabilized().unwrap();
            assert_eq!(res.topplings, 0);
            assert!(res.grid.same_cells(&DenseGrid::with_center(1)));
        }
    }

    #[test]
    fn round_limit() {
        let s = LatticeSchedule::model_g();
        let limits = Limits { max_rounds: 3, ..Limits::PATTERNS };
        match run_central_pile(&s, 8, limits) {
            PatternOutcome::LimitExceeded { t, grid, .. } => {
                assert_eq!(t, 3);
                assert_eq!(grid.total(), 8);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn grid_grows_without_losing_grains() {
        let res = run_central_pile(&LatticeSchedule::model_d(), 2000, Limits::PATTERNS)
            .stabilized()
            .unwrap();
        assert_eq!(res.grid.total(), 2000);
        assert!(res.grid.radius() > 2);
        for rule in LatticeSchedule::model_d().rules() {
            assert!(res.grid.is_stable_under(*rule));
        }
    }

    #[test]
    fn static_solver_matches_rounds() {
        let s = LatticeSchedule::static_grid();
        for n in [5, 64, 300, 5000] {
            let fast = run_central_pile(&s, n, Limits::PATTERNS).stabilized().unwrap();
            let (_, slow) = rounds_of(&s, n);
            assert!(fast.grid.same_cells(&slow.grid), "n = {n}");
            assert_eq!(fast.topplings, slow.topplings);
        }
    }
}
