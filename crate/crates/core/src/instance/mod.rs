//! Problem instances: a chip, a goal set, the problem variant and the number
//! of phase-separation stages.

mod chip;
mod generate;
mod io;

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use chip::{
    build_grid_chip, build_preset_chip, Chip, Edge, GridColoring, PsColor, Preset,
    DEFAULT_BLUE_DURATION, DEFAULT_MIX_DURATION, DEFAULT_RED_DURATION, DEFAULT_SWAP_DURATION,
    MAX_QUBITS, UNREACHABLE,
};
pub use generate::generate_instance;
pub use io::{parse_instance, read_instance, write_instance};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid chip: {0}")]
    InvalidChip(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("unknown preset chip `{0}`")]
    UnknownPreset(String),
    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "QCC")]
    Qcc,
    /// Initial placement of states on qubits is part of the decision.
    #[serde(rename = "QCC-I")]
    QccI,
    /// Crosstalk: a running gate blocks every qubit adjacent to its endpoints.
    #[serde(rename = "QCC-X")]
    QccX,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Qcc, Variant::QccI, Variant::QccX];

    pub fn initial_mapping(self) -> InitialMapping {
        match self {
            Variant::QccI => InitialMapping::Free,
            Variant::Qcc | Variant::QccX => InitialMapping::Identity,
        }
    }

    pub fn crosstalk(self) -> bool {
        self == Variant::QccX
    }

    pub fn label(self) -> &'static str {
        match self {
            Variant::Qcc => "QCC",
            Variant::QccI => "QCC-I",
            Variant::QccX => "QCC-X",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Variant {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "qcc" => Ok(Variant::Qcc),
            "qcc-i" => Ok(Variant::QccI),
            "qcc-x" => Ok(Variant::QccX),
            _ => Err(InstanceError::InvalidInstance(format!("unknown variant `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialMapping {
    /// State `q_i` starts on qubit `n_i`.
    Identity,
    Free,
}

/// An unordered pair of qubit states, stored 0-based with `.0 < .1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Goal(pub usize, pub usize);

impl Goal {
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            Goal(a, b)
        } else {
            Goal(b, a)
        }
    }

    pub fn involves(&self, state: usize) -> bool {
        self.0 == state || self.1 == state
    }

    /// True when `{x, y}` is this pair in either order.
    pub fn matches(&self, x: usize, y: usize) -> bool {
        (self.0 == x && self.1 == y) || (self.0 == y && self.1 == x)
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<q{}, q{}>", self.0 + 1, self.1 + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    chip: Chip,
    goals: Vec<Goal>,
    stages: u8,
    variant: Variant,
    initial_mapping: InitialMapping,
}

impl Instance {
    /// Builds an instance with the mapping implied by the variant.
    pub fn new(
        chip: Chip,
        goals: Vec<Goal>,
        stages: u8,
        variant: Variant,
    ) -> Result<Self, InstanceError> {
        let mapping = variant.initial_mapping();
        Self::with_mapping(chip, goals, stages, variant, mapping)
    }

    pub fn with_mapping(
        chip: Chip,
        goals: Vec<Goal>,
        stages: u8,
        variant: Variant,
        initial_mapping: InitialMapping,
    ) -> Result<Self, InstanceError> {
        let bad = |msg: String| Err(InstanceError::InvalidInstance(msg));
        if !(1..=2).contains(&stages) {
            return bad(format!("stages must be 1 or 2, got {stages}"));
        }
        if initial_mapping != variant.initial_mapping() {
            return bad(format!(
                "variant {variant} requires initial_mapping {:?}",
                variant.initial_mapping()
            ));
        }
        let beta = chip.qubit_count();
        let mut seen = std::collections::HashSet::new();
        let mut normalized = Vec::with_capacity(goals.len());
        for g in goals {
            if g.0 >= beta || g.1 >= beta {
                return bad(format!("goal {g} references a state outside 1..{beta}"));
            }
            if g.0 == g.1 {
                return bad(format!("goal {g} pairs a state with itself"));
            }
            let g = Goal::new(g.0, g.1);
            if !seen.insert(g) {
                return bad(format!("goal {g} appears twice"));
            }
            normalized.push(g);
        }
        Ok(Instance {
            chip,
            goals: normalized,
            stages,
            variant,
            initial_mapping,
        })
    }

    pub fn chip(&self) -> &Chip {
        &self.chip
    }

    /// The goal set `G` (one stage).
    pub fn goals(&self) -> &[Goal] {
        &self.goals
    }

    pub fn stages(&self) -> u8 {
        self.stages
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn initial_mapping(&self) -> InitialMapping {
        self.initial_mapping
    }

    /// Number of qubit states; always equal to the qubit count.
    pub fn state_count(&self) -> usize {
        self.chip.qubit_count()
    }

    /// Number of goal slots over all stages: `|G|` or `|G| + |G'|`.
    pub fn goal_slots(&self) -> usize {
        self.goals.len() * self.stages as usize
    }

    /// The pair for goal slot `o`; slots `|G|..2|G|` repeat `G`.
    pub fn goal_at(&self, o: usize) -> Goal {
        self.goals[o % self.goals.len()]
    }

    /// 1 for slots in `G`, 2 for slots in `G'`.
    pub fn stage_of(&self, o: usize) -> u8 {
        if o < self.goals.len() {
            1
        } else {
            2
        }
    }

    /// Goal slots whose pair involves `state`, in slot order.
    pub fn slots_involving(&self, state: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.goal_slots()).filter(move |&o| self.goal_at(o).involves(state))
    }

    /// Whether `state` appears in any goal.
    pub fn state_in_goals(&self, state: usize) -> bool {
        self.goals.iter().any(|g| g.involves(state))
    }

    /// Stable identity derived from the canonical serialized form.
    pub fn fingerprint(&self) -> String {
        let text = io::to_json(self);
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
