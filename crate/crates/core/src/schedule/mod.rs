//! Timed gate schedules, the qubit-state simulator, the independent
//! validator and IPC-style scoring.

mod score;
mod simulate;
mod validate;

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::Instance;

pub use score::{improvement_delta, score, ScoreError};
pub use simulate::{simulate_states, SimulationError, StateTrace, TraceEvent};
pub use validate::{validate, validate_with_horizon, Rule, ValidationReport, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Swap,
    Ps,
    Mix,
    Init,
}

/// Where a task runs. Edge endpoints are 0-based and stored with `u <= v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Location {
    Edge(usize, usize),
    Qubit(usize),
}

impl Location {
    pub fn edge(a: usize, b: usize) -> Self {
        Location::Edge(a.min(b), a.max(b))
    }

    /// The one or two qubits this location occupies.
    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            Location::Edge(u, v) => (u, Some(v)),
            Location::Qubit(q) => (q, None),
        };
        std::iter::once(a).chain(b)
    }

    pub fn touches(&self, q: usize) -> bool {
        self.qubits().any(|x| x == q)
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Location::Edge(u, v) => write!(f, "(n{}, n{})", u + 1, v + 1),
            Location::Qubit(q) => write!(f, "n{}", q + 1),
        }
    }
}

/// One gate application. The interval occupied is `[start, start + duration)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GateTask {
    pub kind: TaskKind,
    pub location: Location,
    pub start: u32,
    pub duration: u32,
    /// Goal slot realised by a PS task (`0..|G|` then `|G|..2|G|`).
    pub goal_index: Option<usize>,
    /// State mixed by a mix task or placed by an init task (0-based).
    pub state: Option<usize>,
}

impl GateTask {
    pub fn swap(a: usize, b: usize, start: u32, duration: u32) -> Self {
        GateTask {
            kind: TaskKind::Swap,
            location: Location::edge(a, b),
            start,
            duration,
            goal_index: None,
            state: None,
        }
    }

    pub fn ps(a: usize, b: usize, start: u32, duration: u32, goal: usize) -> Self {
        GateTask {
            kind: TaskKind::Ps,
            location: Location::edge(a, b),
            start,
            duration,
            goal_index: Some(goal),
            state: None,
        }
    }

    pub fn mix(qubit: usize, state: usize, start: u32, duration: u32) -> Self {
        GateTask {
            kind: TaskKind::Mix,
            location: Location::Qubit(qubit),
            start,
            duration,
            goal_index: None,
            state: Some(state),
        }
    }

    pub fn init(qubit: usize, state: usize) -> Self {
        GateTask {
            kind: TaskKind::Init,
            location: Location::Qubit(qubit),
            start: 0,
            duration: 0,
            goal_index: None,
            state: Some(state),
        }
    }

    pub fn end(&self) -> u32 {
        self.start + self.duration
    }

    /// Closed-open interval intersection; zero-length tasks never overlap.
    pub fn overlaps(&self, other: &GateTask) -> bool {
        self.duration > 0
            && other.duration > 0
            && self.start < other.end()
            && other.start < self.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    /// Fingerprint of the instance this schedule solves.
    pub instance_ref: String,
    pub tasks: Vec<GateTask>,
    /// Latest completion over goal PS tasks.
    pub makespan: u32,
    pub swap_count: u32,
}

impl Schedule {
    /// Wraps `tasks`, computing makespan and swap count from them.
    pub fn from_tasks(inst: &Instance, mut tasks: Vec<GateTask>) -> Self {
        tasks.sort_by_key(|t| (t.start, t.kind, t.location, t.goal_index, t.state));
        let makespan = goal_makespan(&tasks);
        let swap_count = tasks.iter().filter(|t| t.kind == TaskKind::Swap).count() as u32;
        Schedule {
            instance_ref: inst.fingerprint(),
            tasks,
            makespan,
            swap_count,
        }
    }

    /// Lexicographic objective `(makespan, swap_count)`.
    pub fn objective(&self) -> (u32, u32) {
        (self.makespan, self.swap_count)
    }

    /// Latest end over all tasks, goal or not.
    pub fn total_span(&self) -> u32 {
        self.tasks.iter().map(GateTask::end).max().unwrap_or(0)
    }
}

pub(crate) fn goal_makespan(tasks: &[GateTask]) -> u32 {
    tasks
        .iter()
        .filter(|t| t.kind == TaskKind::Ps && t.goal_index.is_some())
        .map(GateTask::end)
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Error)]
pub enum ScheduleFileError {
    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum LocationFile {
    Edge([usize; 2]),
    Qubit(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateTaskFile {
    kind: TaskKind,
    location: LocationFile,
    start: u32,
    duration: u32,
    #[serde(default)]
    goal_index: Option<usize>,
    #[serde(default)]
    state: Option<usize>,
}

impl Serialize for GateTask {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GateTaskFile {
            kind: self.kind,
            location: match self.location {
                Location::Edge(u, v) => LocationFile::Edge([u + 1, v + 1]),
                Location::Qubit(q) => LocationFile::Qubit(q + 1),
            },
            start: self.start,
            duration: self.duration,
            goal_index: self.goal_index,
            state: self.state.map(|s| s + 1),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GateTask {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let f = GateTaskFile::deserialize(d)?;
        let one_based = |x: usize| {
            x.checked_sub(1)
                .ok_or_else(|| D::Error::custom("qubit and state ids are 1-based"))
        };
        let location = match f.location {
            LocationFile::Edge([u, v]) => Location::edge(one_based(u)?, one_based(v)?),
            LocationFile::Qubit(q) => Location::Qubit(one_based(q)?),
        };
        Ok(GateTask {
            kind: f.kind,
            location,
            start: f.start,
            duration: f.duration,
            goal_index: f.goal_index,
            state: f.state.map(one_based).transpose()?,
        })
    }
}

impl Serialize for Schedule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Schedule", 4)?;
        st.serialize_field("instance_ref", &self.instance_ref)?;
        st.serialize_field("tasks", &self.tasks)?;
        st.serialize_field("makespan", &self.makespan)?;
        st.serialize_field("swap_count", &self.swap_count)?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleDoc {
    instance_ref: String,
    tasks: Vec<GateTask>,
    makespan: u32,
    swap_count: u32,
}

impl<'de> Deserialize<'de> for Schedule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = ScheduleDoc::deserialize(d)?;
        Ok(Schedule {
            instance_ref: doc.instance_ref,
            tasks: doc.tasks,
            makespan: doc.makespan,
            swap_count: doc.swap_count,
        })
    }
}

pub fn parse_schedule(text: &str) -> Result<Schedule, ScheduleFileError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| ScheduleFileError::Parse {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })
}

pub fn read_schedule(path: impl AsRef<Path>) -> Result<Schedule, ScheduleFileError> {
    parse_schedule(&fs::read_to_string(path)?)
}

pub fn write_schedule(s: &Schedule, path: impl AsRef<Path>) -> Result<(), ScheduleFileError> {
    let mut text = serde_json::to_string_pretty(s).expect("schedules always serialize");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
