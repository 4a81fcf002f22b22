//! Fast schedule construction: the sequential baseline that certifies the
//! horizon, a randomized greedy router and an anytime restart wrapper.

mod anytime;
mod baseline;
mod greedy;

use thiserror::Error;

use crate::instance::{Chip, Goal, Instance, UNREACHABLE};
use crate::schedule::{GateTask, Schedule};

pub use anytime::{solve_anytime, solve_anytime_with, AnytimeRun, NODES_PER_RESTART};
pub use baseline::solve_sequential_baseline;
pub use greedy::{solve_greedy, solve_greedy_restart};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RouterError {
    #[error("goal {0} cannot be reached over swap-enabled edges")]
    Unreachable(Goal),
}

/// Append-only schedule under construction.
///
/// Every task starts no earlier than the release time of each qubit it
/// occupies, or under crosstalk of each qubit in their closed neighbourhood.
/// Tasks are therefore chronological per qubit in insertion order and state
/// positions can be tracked incrementally.
#[derive(Debug, Clone)]
pub(crate) struct Timeline<'a> {
    chip: &'a Chip,
    crosstalk: bool,
    /// End of the last task on each qubit.
    pub release: Vec<u32>,
    /// Qubit holding each state.
    pub loc: Vec<usize>,
    /// State held by each qubit.
    pub occ: Vec<usize>,
    pub tasks: Vec<GateTask>,
}

impl<'a> Timeline<'a> {
    pub fn new(inst: &'a Instance, placement: Vec<usize>) -> Self {
        let n = inst.chip().qubit_count();
        let mut loc = vec![0; n];
        for (q, &s) in placement.iter().enumerate() {
            loc[s] = q;
        }
        let mut tasks = Vec::new();
        if inst.variant().initial_mapping() == crate::instance::InitialMapping::Free {
            tasks.extend(placement.iter().enumerate().map(|(q, &s)| GateTask::init(q, s)));
        }
        Timeline {
            chip: inst.chip(),
            crosstalk: inst.variant().crosstalk(),
            release: vec![0; n],
            loc,
            occ: placement,
            tasks,
        }
    }

    /// Earliest start at or after `not_before` for a task on `qubits`.
    pub fn earliest(&self, qubits: &[usize], not_before: u32) -> u32 {
        earliest_in(self.chip, self.crosstalk, &self.release, qubits, not_before)
    }

    pub fn swap(&mut self, a: usize, b: usize, not_before: u32) -> u32 {
        let start = self.earliest(&[a, b], not_before);
        let task = GateTask::swap(a, b, start, self.chip.swap_duration());
        self.push(task);
        let (sa, sb) = (self.occ[a], self.occ[b]);
        self.occ[a] = sb;
        self.occ[b] = sa;
        self.loc[sa] = b;
        self.loc[sb] = a;
        task.end()
    }

    pub fn ps(&mut self, a: usize, b: usize, goal: usize, not_before: u32) -> u32 {
        let e = self.chip.edge_between(a, b).expect("PS on a chip edge");
        let start = self.earliest(&[a, b], not_before);
        let task = GateTask::ps(a, b, start, self.chip.edge(e).ps_duration, goal);
        self.push(task);
        task.end()
    }

    pub fn mix(&mut self, state: usize, not_before: u32) -> u32 {
        let q = self.loc[state];
        let start = self.earliest(&[q], not_before);
        let task = GateTask::mix(q, state, start, self.chip.mix_duration());
        self.push(task);
        task.end()
    }

    fn push(&mut self, task: GateTask) {
        for q in task.location.qubits() {
            self.release[q] = task.end();
        }
        self.tasks.push(task);
    }

    pub fn finish(self, inst: &Instance) -> Schedule {
        Schedule::from_tasks(inst, self.tasks)
    }
}

pub(crate) fn earliest_in(chip: &Chip, crosstalk: bool, release: &[u32], qubits: &[usize], not_before: u32) -> u32 {
    let mut t = not_before;
    for &q in qubits {
        t = t.max(release[q]);
        if crosstalk {
            for &n in chip.neighbors(q) {
                t = t.max(release[n]);
            }
        }
    }
    t
}

/// Meeting edges `(u, v)` for bringing the states on `pa` and `pb`
/// together: the state from `pa` walks to `u`, the one from `pb` to `v`, and
/// `d(pa, u) + 1 + d(v, pb) = d(pa, pb)`. The two walks never share a qubit.
pub(crate) fn meeting_edges(chip: &Chip, pa: usize, pb: usize) -> Result<Vec<(usize, usize)>, ()> {
    if chip.are_adjacent(pa, pb) {
        return Ok(vec![(pa, pb)]);
    }
    let d = chip.swap_distance(pa, pb);
    if d == UNREACHABLE {
        return Err(());
    }
    let mut out = Vec::new();
    for e in chip.edges() {
        for (u, v) in [(e.u, e.v), (e.v, e.u)] {
            let (du, dv) = (chip.swap_distance(pa, u), chip.swap_distance(v, pb));
            if du != UNREACHABLE && dv != UNREACHABLE && du + 1 + dv == d {
                out.push((u, v));
            }
        }
    }
    Ok(out)
}
