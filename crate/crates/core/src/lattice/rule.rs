//! Lattice adjacency rules and periodic rule lists.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A cell `(i, j)`: `i` grows to the right, `j` grows upward.
pub type Cell = (i64, i64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeRule {
    Grid4,
    Diag4,
    VerticalOnly,
    HorizontalOnly,
    GridVerticalDoubled,
    GridHorizontalDoubled,
}

type Offsets = &'static [((i64, i64), u32)];

impl LatticeRule {
    pub const ALL: [LatticeRule; 6] = [
        LatticeRule::Grid4,
        LatticeRule::Diag4,
        LatticeRule::VerticalOnly,
        LatticeRule::HorizontalOnly,
        LatticeRule::GridVerticalDoubled,
        LatticeRule::GridHorizontalDoubled,
    ];

    /// Neighbor offsets `(di, dj)` with their multiplicities.
    pub fn offsets(self) -> Offsets {
        match self {
            LatticeRule::Grid4 => &[((1, 0), 1), ((-1, 0), 1), ((0, 1), 1), ((0, -1), 1)],
            LatticeRule::Diag4 => &[((-1, 1), 1), ((1, 1), 1), ((-1, -1), 1), ((1, -1), 1)],
            LatticeRule::VerticalOnly => &[((0, 1), 1), ((0, -1), 1)],
            LatticeRule::HorizontalOnly => &[((1, 0), 1), ((-1, 0), 1)],
            LatticeRule::GridVerticalDoubled => {
                &[((1, 0), 1), ((-1, 0), 1), ((0, 1), 2), ((0, -1), 2)]
            }
            LatticeRule::GridHorizontalDoubled => {
                &[((1, 0), 2), ((-1, 0), 2), ((0, 1), 1), ((0, -1), 1)]
            }
        }
    }

    pub fn degree(self) -> u64 {
        self.offsets().iter().map(|&(_, m)| u64::from(m)).sum()
    }

    /// The neighbor multiset of `cell`, each neighbor repeated by multiplicity.
    pub fn neighbors(self, (i, j): Cell) -> Vec<Cell> {
        self.offsets()
            .iter()
            .flat_map(|&((di, dj), m)| std::iter::repeat((i + di, j + dj)).take(m as usize))
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            LatticeRule::Grid4 => "grid4",
            LatticeRule::Diag4 => "diag4",
            LatticeRule::VerticalOnly => "vertical-only",
            LatticeRule::HorizontalOnly => "horizontal-only",
            LatticeRule::GridVerticalDoubled => "grid-vertical-doubled",
            LatticeRule::GridHorizontalDoubled => "grid-horizontal-doubled",
        }
    }
}

impl fmt::Display for LatticeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScheduleParseError {
    #[error("unknown lattice rule `{0}`")]
    UnknownRule(String),
    #[error("unknown schedule `{0}` (expected static, model-d, model-g or doubled)")]
    UnknownSchedule(String),
    #[error("a lattice schedule needs at least one rule")]
    Empty,
    #[error("period {period} does not match {rules} rules")]
    PeriodMismatch { period: usize, rules: usize },
    #[error("invalid schedule JSON: {0}")]
    Json(String),
}

impl FromStr for LatticeRule {
    type Err = ScheduleParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LatticeRule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| ScheduleParseError::UnknownRule(s.to_string()))
    }
}

/// Symmetries a central pile keeps under a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// All 8 symmetries of the square.
    Dihedral,
    /// Reflections in the two coordinate axes.
    Axes,
    None,
}

/// Periodic list of lattice rules; the rule at time `t` is `rules[t mod P]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSchedule {
    rules: Vec<LatticeRule>,
}

#[derive(Deserialize, Serialize)]
struct LatticeScheduleDoc {
    #[serde(default)]
    period: Option<usize>,
    rules: Vec<LatticeRule>,
}

impl LatticeSchedule {
    pub fn new(rules: Vec<LatticeRule>) -> Result<Self, ScheduleParseError> {
        if rules.is_empty() {
            return Err(ScheduleParseError::Empty);
        }
        Ok(LatticeSchedule { rules })
    }

    pub fn static_grid() -> Self {
        LatticeSchedule { rules: vec![LatticeRule::Grid4] }
    }

    pub fn model_d() -> Self {
        LatticeSchedule { rules: vec![LatticeRule::Grid4, LatticeRule::Diag4] }
    }

    pub fn model_g() -> Self {
        LatticeSchedule { rules: vec![LatticeRule::VerticalOnly, LatticeRule::HorizontalOnly] }
    }

    pub fn doubled() -> Self {
        LatticeSchedule {
            rules: vec![LatticeRule::GridVerticalDoubled, LatticeRule::GridHorizontalDoubled],
        }
    }

    /// `static`, `model-d`, `model-g` or `doubled`.
    pub fn by_name(name: &str) -> Result<Self, ScheduleParseError> {
        match name {
            "static" => Ok(Self::static_grid()),
            "model-d" => Ok(Self::model_d()),
            "model-g" => Ok(Self::model_g()),
            "doubled" => Ok(Self::doubled()),
            _ => Err(ScheduleParseError::UnknownSchedule(name.to_string())),
        }
    }

    pub const BUILT_IN: [&'static str; 4] = ["static", "model-d", "model-g", "doubled"];

    /// Parses `{"period": 2, "rules": ["vertical-only", "horizontal-only"]}`;
    /// `period` is optional.
    pub fn from_json(text: &str) -> Result<Self, ScheduleParseError> {
        let doc: LatticeScheduleDoc =
            serde_json::from_str(text).map_err(|e| ScheduleParseError::Json(e.to_string()))?;
        if let Some(period) = doc.period {
            if period != doc.rules.len() {
                return Err(ScheduleParseError::PeriodMismatch { period, rules: doc.rules.len() });
            }
        }
        Self::new(doc.rules)
    }

    pub fn to_json(&self) -> String {
        let doc = LatticeScheduleDoc { period: Some(self.period()), rules: self.rules.clone() };
        serde_json::to_string(&doc).expect("schedule serializes")
    }

    pub fn period(&self) -> usize {
        self.rules.len()
    }

    pub fn rules(&self) -> &[LatticeRule] {
        &self.rules
    }

    pub fn rule_at(&self, t: u64) -> LatticeRule {
        self.rules[(t % self.rules.len() as u64) as usize]
    }

    /// The symmetry group every rule of the schedule respects.
    pub fn symmetry(&self) -> Symmetry {
        use LatticeRule::*;
        if self.rules.iter().all(|r| matches!(r, Grid4 | Diag4)) {
            Symmetry::Dihedral
        } else {
            Symmetry::Axes
        }
    }

    pub fn max_degree(&self) -> u64 {
        self.rules.iter().map(|r| r.degree()).max().unwrap_or(0)
    }
}
