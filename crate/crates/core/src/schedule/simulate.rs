use thiserror::Error;

use super::{GateTask, Location, Schedule, TaskKind};
use crate::instance::{InitialMapping, Instance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimulationError {
    #[error("tasks {first} and {second} overlap on qubit n{}", qubit + 1)]
    Overlap {
        qubit: usize,
        first: usize,
        second: usize,
    },
    #[error("no init task places a state on qubit n{}", qubit + 1)]
    MissingInit { qubit: usize },
    #[error("task {task} references qubit or state outside the chip")]
    OutOfRange { task: usize },
}

/// One entry of a qubit's event sequence: the state held before and after
/// the task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEvent {
    pub task: usize,
    pub start: u32,
    pub end: u32,
    pub before: usize,
    pub after: usize,
}

/// Per-qubit event-indexed qubit-state history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateTrace {
    /// State on each qubit at time 0.
    pub initial: Vec<usize>,
    /// Events on each qubit in chronological order.
    pub events: Vec<Vec<TraceEvent>>,
}

impl StateTrace {
    /// State held by `qubit` at time `t`: the result of every task on the
    /// qubit that has completed by `t`.
    pub fn state_at(&self, qubit: usize, t: u32) -> usize {
        self.events[qubit]
            .iter()
            .rev()
            .find(|e| e.end <= t)
            .map_or(self.initial[qubit], |e| e.after)
    }

    /// Final state on every qubit.
    pub fn final_states(&self) -> Vec<usize> {
        (0..self.initial.len())
            .map(|q| self.events[q].last().map_or(self.initial[q], |e| e.after))
            .collect()
    }

    /// The event recorded for `task` on `qubit`, if any.
    pub fn event(&self, qubit: usize, task: usize) -> Option<&TraceEvent> {
        self.events[qubit].iter().find(|e| e.task == task)
    }
}

/// Replays a schedule qubit by qubit: swaps exchange the endpoint states,
/// PS and mix tasks leave them unchanged.
pub fn simulate_states(inst: &Instance, schedule: &Schedule) -> Result<StateTrace, SimulationError> {
    let n = inst.chip().qubit_count();
    let tasks = &schedule.tasks;

    let mut per_qubit: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ix, t) in tasks.iter().enumerate() {
        for q in t.location.qubits() {
            if q >= n {
                return Err(SimulationError::OutOfRange { task: ix });
            }
            if t.duration > 0 {
                per_qubit[q].push(ix);
            }
        }
        if t.state.is_some_and(|s| s >= n) {
            return Err(SimulationError::OutOfRange { task: ix });
        }
    }
    for (q, list) in per_qubit.iter_mut().enumerate() {
        list.sort_by_key(|&ix| (tasks[ix].start, ix));
        for w in list.windows(2) {
            if tasks[w[0]].overlaps(&tasks[w[1]]) {
                return Err(SimulationError::Overlap {
                    qubit: q,
                    first: w[0],
                    second: w[1],
                });
            }
        }
    }

    let initial = match inst.initial_mapping() {
        InitialMapping::Identity => (0..n).collect::<Vec<_>>(),
        InitialMapping::Free => {
            let mut placed = vec![None; n];
            for t in tasks.iter().filter(|t| t.kind == TaskKind::Init) {
                if let (Location::Qubit(q), Some(s)) = (t.location, t.state) {
                    placed[q].get_or_insert(s);
                }
            }
            placed
                .into_iter()
                .enumerate()
                .map(|(q, s)| s.ok_or(SimulationError::MissingInit { qubit: q }))
                .collect::<Result<Vec<_>, _>>()?
        }
    };

    let mut order: Vec<usize> = (0..tasks.len())
        .filter(|&ix| tasks[ix].kind != TaskKind::Init)
        .collect();
    order.sort_by_key(|&ix| (tasks[ix].start, ix));

    let mut current = initial.clone();
    let mut events = vec![Vec::new(); n];
    for ix in order {
        let t: &GateTask = &tasks[ix];
        let ev = |before: usize, after: usize| TraceEvent {
            task: ix,
            start: t.start,
            end: t.end(),
            before,
            after,
        };
        match (t.kind, t.location) {
            (TaskKind::Swap, Location::Edge(u, v)) => {
                let (su, sv) = (current[u], current[v]);
                events[u].push(ev(su, sv));
                events[v].push(ev(sv, su));
                current[u] = sv;
                current[v] = su;
            }
            (_, loc) => {
                for q in loc.qubits() {
                    events[q].push(ev(current[q], current[q]));
                }
            }
        }
    }
    Ok(StateTrace { initial, events })
}
