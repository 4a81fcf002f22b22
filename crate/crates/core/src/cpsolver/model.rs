//! The event-based interval model: optional gate intervals, mandatory goal
//! and mix intervals, per-qubit state variables and the constraint set.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::CpError;
use crate::bounds::BoundSet;
use crate::instance::{Goal, InitialMapping, Instance};
use crate::schedule::{Location, Schedule, TaskKind};

pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Presence {
    Present,
    Absent,
    Undecided,
}

/// Domain of an optional interval variable. A fixed-length task has
/// `len_min == len_max`; goal intervals range over the PS durations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OptionalIntervalVar {
    pub presence: Presence,
    pub start_min: u32,
    pub start_max: u32,
    pub len_min: u32,
    pub len_max: u32,
}

impl OptionalIntervalVar {
    fn optional(len: u32, horizon: u32) -> Self {
        OptionalIntervalVar {
            presence: Presence::Undecided,
            start_min: 0,
            start_max: horizon.saturating_sub(len),
            len_min: len,
            len_max: len,
        }
    }

    pub fn end_min(&self) -> u32 {
        self.start_min + self.len_min
    }

    pub fn end_max(&self) -> u32 {
        self.start_max + self.len_max
    }

    pub fn is_present(&self) -> bool {
        self.presence == Presence::Present
    }

    pub fn is_absent(&self) -> bool {
        self.presence == Presence::Absent
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum VarKind {
    /// Replica `replica` of the swap gate on chip edge `gate`.
    Swap { gate: usize, replica: usize },
    /// The PS task of chip edge `gate` reserved for goal slot `slot`.
    Ps { gate: usize, slot: usize },
    /// Mandatory interval of goal slot `slot`.
    Goal { slot: usize },
    /// Optional mix of `state` on `qubit`.
    Mix { qubit: usize, state: usize },
    /// Mandatory mix interval of `state`.
    MixTotal { state: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ResourceScope {
    Qubit(usize),
    /// Crosstalk: every gate touching either end of this chip edge.
    Pair(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Resource {
    pub scope: ResourceScope,
    pub vars: Vec<VarId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    /// Makespan and swap count are the objective's two components.
    Objective,
    InitialState { qubit: usize, state: usize },
    /// Free placement: the initial states are pairwise different.
    AllDifferentInitial,
    MakespanCover { goal: VarId },
    NoOverlap { resource: usize },
    /// Exactly one option present, sharing the master's start and length.
    Alternative { master: VarId, options: Vec<VarId> },
    SwapExchange { var: VarId },
    PassThrough { var: VarId },
    GoalMatch { var: VarId, goal: Goal },
    /// Replica `second` is used only after replica `first`.
    ReplicaOrder { first: VarId, second: VarId },
    /// The state's mix starts after the stage-1 goal ends.
    MixAfter { mix: VarId, goal: VarId },
    /// The state's mix ends before the stage-2 goal starts.
    MixBefore { mix: VarId, goal: VarId },
    /// A mix runs on the qubit currently holding its state.
    MixLocation { var: VarId },
}

impl Constraint {
    /// Number of the constraint family in the usual presentation of the
    /// model; zero for the mix-location link.
    pub fn tag(&self) -> u8 {
        match self {
            Constraint::Objective => 1,
            Constraint::InitialState { .. } => 2,
            Constraint::MakespanCover { .. } => 3,
            Constraint::NoOverlap { .. } => 4,
            Constraint::Alternative { .. } => 5,
            Constraint::SwapExchange { .. } => 6,
            Constraint::PassThrough { .. } => 7,
            Constraint::GoalMatch { .. } => 8,
            Constraint::ReplicaOrder { .. } => 9,
            Constraint::MixAfter { .. } => 11,
            Constraint::MixBefore { .. } => 12,
            Constraint::AllDifferentInitial => 13,
            Constraint::MixLocation { .. } => 0,
        }
    }
}

/// The interval model of one instance.
#[derive(Debug, Clone)]
pub struct Model {
    instance: Instance,
    pub instance_ref: String,
    pub bounds: BoundSet,
    pub vars: Vec<OptionalIntervalVar>,
    pub kinds: Vec<VarKind>,
    /// `swap_vars[gate][replica]`; empty for gates without a swap.
    pub swap_vars: Vec<Vec<VarId>>,
    /// `ps_vars[gate][slot]`.
    pub ps_vars: Vec<Vec<VarId>>,
    pub goal_vars: Vec<VarId>,
    /// `mix_vars[qubit][state]`; empty for single-stage instances.
    pub mix_vars: Vec<Vec<VarId>>,
    pub mix_totals: Vec<VarId>,
    /// Own tasks of each qubit; event slot `k + 1` follows `events[q][k]`,
    /// slot 0 is the initial state.
    pub events: Vec<Vec<VarId>>,
    /// Bitmask domains of the state variables, `states[q][slot]`.
    pub states: Vec<Vec<u64>>,
    pub makespan: (u32, u32),
    pub resources: Vec<Resource>,
    pub constraints: Vec<Constraint>,
}

impl Model {
    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn var(&self, id: VarId) -> &OptionalIntervalVar {
        &self.vars[id]
    }

    pub fn var_mut(&mut self, id: VarId) -> &mut OptionalIntervalVar {
        &mut self.vars[id]
    }

    /// Qubits a task variable occupies; goal and mix totals occupy none.
    pub fn qubits_of(&self, id: VarId) -> Vec<usize> {
        let chip = self.instance.chip();
        match self.kinds[id] {
            VarKind::Swap { gate, .. } | VarKind::Ps { gate, .. } => {
                let e = chip.edge(gate);
                vec![e.u, e.v]
            }
            VarKind::Mix { qubit, .. } => vec![qubit],
            VarKind::Goal { .. } | VarKind::MixTotal { .. } => vec![],
        }
    }

    /// Event slot of `var` on `qubit` (1-based; 0 is the initial state).
    pub fn event_slot(&self, qubit: usize, var: VarId) -> Option<usize> {
        self.events[qubit].iter().position(|&v| v == var).map(|k| k + 1)
    }

    pub fn swap_var_count(&self) -> usize {
        self.swap_vars.iter().map(Vec::len).sum()
    }
}

/// Builds the model. A horizon of zero with goals yields a model whose goal
/// intervals cannot fit, which propagation reports as a conflict.
pub fn build_model(inst: &Instance, bounds: &BoundSet) -> Model {
    let chip = inst.chip();
    let n = chip.qubit_count();
    let horizon = bounds.horizon;
    let slots = inst.goal_slots();
    let mut vars = Vec::new();
    let mut kinds = Vec::new();
    let mut add = |v: OptionalIntervalVar, k: VarKind| {
        vars.push(v);
        kinds.push(k);
        vars.len() - 1
    };

    let mut swap_vars = vec![Vec::new(); chip.edges().len()];
    for (gate, e) in chip.edges().iter().enumerate() {
        if e.swap_enabled {
            for replica in 0..bounds.swaps_per_gate as usize {
                swap_vars[gate].push(add(
                    OptionalIntervalVar::optional(chip.swap_duration(), horizon),
                    VarKind::Swap { gate, replica },
                ));
            }
        }
    }
    let mut ps_vars = vec![Vec::new(); chip.edges().len()];
    for (gate, e) in chip.edges().iter().enumerate() {
        for slot in 0..bounds.ps_tasks_per_gate as usize {
            ps_vars[gate].push(add(
                OptionalIntervalVar::optional(e.ps_duration, horizon),
                VarKind::Ps { gate, slot },
            ));
        }
    }
    let (ps_lo, ps_hi) = (chip.min_ps_duration(), chip.max_ps_duration());
    let goal_vars: Vec<VarId> = (0..slots)
        .map(|slot| {
            let mut v = OptionalIntervalVar::optional(ps_lo, horizon);
            v.presence = Presence::Present;
            v.len_max = ps_hi;
            add(v, VarKind::Goal { slot })
        })
        .collect();
    let mut mix_vars = Vec::new();
    let mut mix_totals = Vec::new();
    if inst.stages() == 2 {
        for qubit in 0..n {
            mix_vars.push(
                (0..n)
                    .map(|state| {
                        add(
                            OptionalIntervalVar::optional(chip.mix_duration(), horizon),
                            VarKind::Mix { qubit, state },
                        )
                    })
                    .collect::<Vec<_>>(),
            );
        }
        for state in 0..n {
            let mut v = OptionalIntervalVar::optional(chip.mix_duration(), horizon);
            v.presence = Presence::Present;
            mix_totals.push(add(v, VarKind::MixTotal { state }));
        }
    }

    let mut events = vec![Vec::new(); n];
    for (id, k) in kinds.iter().enumerate() {
        match *k {
            VarKind::Swap { gate, .. } | VarKind::Ps { gate, .. } => {
                let e = chip.edge(gate);
                events[e.u].push(id);
                events[e.v].push(id);
            }
            VarKind::Mix { qubit, .. } => events[qubit].push(id),
            _ => {}
        }
    }

    let all: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut states: Vec<Vec<u64>> = events.iter().map(|e| vec![all; e.len() + 1]).collect();
    let mut constraints = vec![Constraint::Objective];
    match inst.initial_mapping() {
        InitialMapping::Identity => {
            for (q, row) in states.iter_mut().enumerate() {
                row[0] = 1 << q;
                constraints.push(Constraint::InitialState { qubit: q, state: q });
            }
        }
        InitialMapping::Free => constraints.push(Constraint::AllDifferentInitial),
    }
    for &g in &goal_vars {
        constraints.push(Constraint::MakespanCover { goal: g });
    }

    let mut resources: Vec<Resource> = (0..n)
        .map(|q| Resource {
            scope: ResourceScope::Qubit(q),
            vars: events[q].clone(),
        })
        .collect();
    if inst.variant().crosstalk() {
        for e in chip.edges() {
            let mut vs: Vec<VarId> = events[e.u].iter().chain(&events[e.v]).copied().collect();
            vs.sort_unstable();
            vs.dedup();
            resources.push(Resource {
                scope: ResourceScope::Pair(e.u, e.v),
                vars: vs,
            });
        }
    }
    for r in 0..resources.len() {
        constraints.push(Constraint::NoOverlap { resource: r });
    }

    for (slot, &g) in goal_vars.iter().enumerate() {
        constraints.push(Constraint::Alternative {
            master: g,
            options: ps_vars.iter().map(|row| row[slot]).collect(),
        });
    }
    for (state, &m) in mix_totals.iter().enumerate() {
        constraints.push(Constraint::Alternative {
            master: m,
            options: mix_vars.iter().map(|row| row[state]).collect(),
        });
    }
    for row in &swap_vars {
        for &v in row {
            constraints.push(Constraint::SwapExchange { var: v });
        }
        for w in row.windows(2) {
            constraints.push(Constraint::ReplicaOrder {
                first: w[0],
                second: w[1],
            });
        }
    }
    for row in &ps_vars {
        for (slot, &v) in row.iter().enumerate() {
            constraints.push(Constraint::PassThrough { var: v });
            constraints.push(Constraint::GoalMatch {
                var: v,
                goal: inst.goal_at(slot),
            });
        }
    }
    for row in &mix_vars {
        for &v in row {
            constraints.push(Constraint::PassThrough { var: v });
            constraints.push(Constraint::MixLocation { var: v });
        }
    }
    for (state, &m) in mix_totals.iter().enumerate() {
        for slot in inst.slots_involving(state) {
            let goal = goal_vars[slot];
            constraints.push(if inst.stage_of(slot) == 1 {
                Constraint::MixAfter { mix: m, goal }
            } else {
                Constraint::MixBefore { mix: m, goal }
            });
        }
    }

    Model {
        instance: inst.clone(),
        instance_ref: inst.fingerprint(),
        bounds: *bounds,
        vars,
        kinds,
        swap_vars,
        ps_vars,
        goal_vars,
        mix_vars,
        mix_totals,
        events,
        states,
        makespan: (0, horizon),
        resources,
        constraints,
    }
}

/// A full assignment of the model: every interval present with a start and
/// length or absent, every state variable of a present event fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub intervals: Vec<Option<(u32, u32)>>,
    /// `states[q][slot]`, `None` for absent events.
    pub states: Vec<Vec<Option<usize>>>,
    pub makespan: u32,
    pub swap_count: u32,
}

impl Assignment {
    pub fn start(&self, id: VarId) -> Option<u32> {
        self.intervals[id].map(|(s, _)| s)
    }

    pub fn end(&self, id: VarId) -> Option<u32> {
        self.intervals[id].map(|(s, l)| s + l)
    }

    pub fn present_count(&self, ids: &[VarId]) -> usize {
        ids.iter().filter(|&&v| self.intervals[v].is_some()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelViolation {
    pub tag: u8,
    pub detail: String,
}

impl fmt::Display for ModelViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {}", self.tag, self.detail)
    }
}

/// Maps a schedule onto the model's variables.
///
/// Swap tasks fill each gate's replicas in chronological order, PS tasks go
/// to their gate's variable for their goal slot, mixes to the variable of
/// their qubit and state. State variables are derived by replaying each
/// qubit's event sequence. Fails when a task has no variable to land on.
pub fn assignment_from_schedule(model: &Model, schedule: &Schedule) -> Result<Assignment, CpError> {
    let inst = &model.instance;
    let chip = inst.chip();
    let n = chip.qubit_count();
    let unmapped = |msg: String| Err(CpError::Unmapped(msg));
    if schedule.instance_ref != model.instance_ref {
        return unmapped("schedule belongs to another instance".into());
    }

    let mut intervals: Vec<Option<(u32, u32)>> = vec![None; model.vars.len()];
    let mut initial: Vec<Option<usize>> = match inst.initial_mapping() {
        InitialMapping::Identity => (0..n).map(Some).collect(),
        InitialMapping::Free => vec![None; n],
    };

    let mut swaps: Vec<(u32, usize, usize)> = Vec::new();
    for (ix, t) in schedule.tasks.iter().enumerate() {
        let edge_of = |loc: Location| match loc {
            Location::Edge(u, v) if u < n && v < n => chip.edge_between(u, v),
            _ => None,
        };
        let put = |intervals: &mut Vec<Option<(u32, u32)>>, id: VarId| {
            if intervals[id].is_some() {
                return Err(CpError::Unmapped(format!("task {ix} maps onto an already used variable")));
            }
            let v = &model.vars[id];
            if t.duration < v.len_min || t.duration > v.len_max {
                return Err(CpError::Unmapped(format!("task {ix} has the wrong duration")));
            }
            intervals[id] = Some((t.start, t.duration));
            Ok(())
        };
        match t.kind {
            TaskKind::Swap => match edge_of(t.location) {
                Some(gate) if chip.edge(gate).swap_enabled => swaps.push((t.start, ix, gate)),
                _ => return unmapped(format!("task {ix} is a swap off any swap gate")),
            },
            TaskKind::Ps => {
                let (Some(gate), Some(slot)) = (edge_of(t.location), t.goal_index) else {
                    return unmapped(format!("task {ix} is a PS task without gate or goal"));
                };
                if slot >= model.goal_vars.len() {
                    return unmapped(format!("task {ix} names goal slot {slot}"));
                }
                put(&mut intervals, model.ps_vars[gate][slot])?;
            }
            TaskKind::Mix => match (t.location, t.state) {
                (Location::Qubit(q), Some(s)) if q < n && s < n && !model.mix_vars.is_empty() => {
                    put(&mut intervals, model.mix_vars[q][s])?;
                }
                _ => return unmapped(format!("task {ix} is a mix without a variable")),
            },
            TaskKind::Init => match (t.location, t.state, inst.initial_mapping()) {
                (Location::Qubit(q), Some(s), InitialMapping::Free)
                    if q < n && s < n && t.start == 0 && t.duration == 0 && initial[q].is_none() =>
                {
                    initial[q] = Some(s);
                }
                _ => return unmapped(format!("task {ix} is not a valid placement")),
            },
        }
    }
    swaps.sort_unstable();
    let mut used = vec![0usize; chip.edges().len()];
    for (_, ix, gate) in swaps {
        let Some(&id) = model.swap_vars[gate].get(used[gate]) else {
            return unmapped(format!("task {ix} exceeds the swap replicas of its gate"));
        };
        used[gate] += 1;
        let t = &schedule.tasks[ix];
        if t.duration != model.vars[id].len_min {
            return unmapped(format!("task {ix} has the wrong duration"));
        }
        intervals[id] = Some((t.start, t.duration));
    }
    let Some(initial) = initial.into_iter().collect::<Option<Vec<usize>>>() else {
        return unmapped("some qubit has no initial state".into());
    };

    // mandatory intervals follow their present option
    for (slot, &g) in model.goal_vars.iter().enumerate() {
        intervals[g] = model.ps_vars.iter().map(|row| row[slot]).find_map(|v| intervals[v]);
    }
    for (state, &m) in model.mix_totals.iter().enumerate() {
        intervals[m] = model.mix_vars.iter().map(|row| row[state]).find_map(|v| intervals[v]);
    }

    let states = replay(model, &intervals, &initial);
    Ok(Assignment {
        intervals,
        states,
        makespan: schedule.makespan,
        swap_count: schedule.swap_count,
    })
}

/// Per-qubit event order: present own events by `(start, id)`.
pub(crate) fn sequences(model: &Model, intervals: &[Option<(u32, u32)>]) -> Vec<Vec<(usize, VarId)>> {
    model
        .events
        .iter()
        .map(|evs| {
            let mut seq: Vec<(usize, VarId)> = evs
                .iter()
                .enumerate()
                .filter(|(_, &v)| intervals[v].is_some())
                .map(|(k, &v)| (k + 1, v))
                .collect();
            seq.sort_by_key(|&(_, v)| (intervals[v].unwrap().0, v));
            seq
        })
        .collect()
}

fn replay(model: &Model, intervals: &[Option<(u32, u32)>], initial: &[usize]) -> Vec<Vec<Option<usize>>> {
    let mut states: Vec<Vec<Option<usize>>> = model.events.iter().map(|e| vec![None; e.len() + 1]).collect();
    for (q, &s) in initial.iter().enumerate() {
        states[q][0] = Some(s);
    }
    let mut order: Vec<(u32, VarId)> = model
        .events
        .iter()
        .flatten()
        .filter_map(|&v| intervals[v].map(|(s, _)| (s, v)))
        .collect();
    order.sort_unstable();
    order.dedup();
    let mut current: Vec<usize> = initial.to_vec();
    for (_, v) in order {
        let qs = model.qubits_of(v);
        let before: Vec<usize> = qs.iter().map(|&q| current[q]).collect();
        let swap = matches!(model.kinds[v], VarKind::Swap { .. });
        for (k, &q) in qs.iter().enumerate() {
            let after = if swap { before[1 - k] } else { before[k] };
            let slot = model.event_slot(q, v).expect("own event");
            states[q][slot] = Some(after);
            current[q] = after;
        }
    }
    states
}

/// Checks every constraint on a concrete assignment.
pub fn check(model: &Model, a: &Assignment) -> Vec<ModelViolation> {
    let horizon = model.bounds.horizon;
    let mut out = Vec::new();
    let mut bad = |tag: u8, detail: String| out.push(ModelViolation { tag, detail });

    for (id, iv) in a.intervals.iter().enumerate() {
        let dom = &model.vars[id];
        match iv.as_ref() {
            None if dom.presence == Presence::Present => bad(0, format!("mandatory {:?} is absent", model.kinds[id])),
            Some(&(s, l)) => {
                if l < dom.len_min || l > dom.len_max {
                    bad(0, format!("{:?} has length {l}", model.kinds[id]));
                }
                if s + l > horizon {
                    bad(0, format!("{:?} ends at {} beyond the horizon", model.kinds[id], s + l));
                }
            }
            None => {}
        }
    }

    let seqs = sequences(model, &a.intervals);
    // state before `var` on `q`
    let pre = |q: usize, var: VarId| -> Option<usize> {
        let k = seqs[q].iter().position(|&(_, v)| v == var)?;
        let slot = if k == 0 { 0 } else { seqs[q][k - 1].0 };
        a.states[q][slot]
    };
    let post = |q: usize, var: VarId| -> Option<usize> { model.event_slot(q, var).and_then(|s| a.states[q][s]) };

    for c in &model.constraints {
        let tag = c.tag();
        match c {
            Constraint::Objective => {
                let cmax = model.goal_vars.iter().filter_map(|&g| a.end(g)).max().unwrap_or(0);
                if a.makespan != cmax {
                    bad(tag, format!("makespan {} but the goals end at {cmax}", a.makespan));
                }
                let swaps: usize = model.swap_vars.iter().map(|row| a.present_count(row)).sum();
                if a.swap_count as usize != swaps {
                    bad(tag, format!("swap count {} but {swaps} swaps are present", a.swap_count));
                }
            }
            Constraint::InitialState { qubit, state } => {
                if a.states[*qubit][0] != Some(*state) {
                    bad(tag, format!("n{} does not start with q{}", qubit + 1, state + 1));
                }
            }
            Constraint::AllDifferentInitial => {
                let mut seen = 0u64;
                for row in &a.states {
                    match row[0] {
                        Some(s) if seen & (1 << s) == 0 => seen |= 1 << s,
                        _ => bad(tag, "initial states are not all different".into()),
                    }
                }
            }
            Constraint::MakespanCover { goal } => {
                if a.end(*goal).is_some_and(|e| e > a.makespan) {
                    bad(tag, format!("{:?} ends after the makespan", model.kinds[*goal]));
                }
            }
            Constraint::NoOverlap { resource } => {
                let r = &model.resources[*resource];
                let mut present: Vec<(u32, u32, VarId)> = r
                    .vars
                    .iter()
                    .filter_map(|&v| a.intervals[v].filter(|&(_, l)| l > 0).map(|(s, l)| (s, s + l, v)))
                    .collect();
                present.sort_unstable();
                for (k, x) in present.iter().enumerate() {
                    for y in &present[k + 1..] {
                        if y.0 >= x.1 {
                            break;
                        }
                        bad(tag, format!("{:?} and {:?} overlap on {:?}", model.kinds[x.2], model.kinds[y.2], r.scope));
                    }
                }
            }
            Constraint::Alternative { master, options } => {
                let present: Vec<VarId> = options.iter().copied().filter(|&v| a.intervals[v].is_some()).collect();
                if present.len() != 1 {
                    bad(tag, format!("{:?} has {} present options", model.kinds[*master], present.len()));
                } else if a.intervals[*master] != a.intervals[present[0]] {
                    bad(tag, format!("{:?} is not synchronised with its option", model.kinds[*master]));
                }
            }
            Constraint::SwapExchange { var } => {
                if a.intervals[*var].is_none() {
                    continue;
                }
                let qs = model.qubits_of(*var);
                let (u, v) = (qs[0], qs[1]);
                if post(u, *var) != pre(v, *var) || post(v, *var) != pre(u, *var) || pre(u, *var).is_none() {
                    bad(tag, format!("{:?} does not exchange its states", model.kinds[*var]));
                }
            }
            Constraint::PassThrough { var } => {
                if a.intervals[*var].is_none() {
                    continue;
                }
                for q in model.qubits_of(*var) {
                    if post(q, *var) != pre(q, *var) || pre(q, *var).is_none() {
                        bad(tag, format!("{:?} changes the state of n{}", model.kinds[*var], q + 1));
                    }
                }
            }
            Constraint::GoalMatch { var, goal } => {
                if a.intervals[*var].is_none() {
                    continue;
                }
                let qs = model.qubits_of(*var);
                match (pre(qs[0], *var), pre(qs[1], *var)) {
                    (Some(x), Some(y)) if goal.matches(x, y) => {}
                    _ => bad(tag, format!("{:?} does not see goal {goal}", model.kinds[*var])),
                }
            }
            Constraint::ReplicaOrder { first, second } => {
                match (a.intervals[*first], a.intervals[*second]) {
                    (None, Some(_)) => bad(tag, format!("{:?} used before its predecessor", model.kinds[*second])),
                    (Some((s1, _)), Some((s2, _))) if s1 > s2 => {
                        bad(tag, format!("{:?} starts before its predecessor", model.kinds[*second]))
                    }
                    _ => {}
                }
            }
            Constraint::MixAfter { mix, goal } => {
                if let (Some(m), Some(g)) = (a.start(*mix), a.end(*goal)) {
                    if m < g {
                        bad(tag, format!("{:?} starts before {:?} ends", model.kinds[*mix], model.kinds[*goal]));
                    }
                }
            }
            Constraint::MixBefore { mix, goal } => {
                if let (Some(m), Some(g)) = (a.end(*mix), a.start(*goal)) {
                    if m > g {
                        bad(tag, format!("{:?} ends after {:?} starts", model.kinds[*mix], model.kinds[*goal]));
                    }
                }
            }
            Constraint::MixLocation { var } => {
                if a.intervals[*var].is_none() {
                    continue;
                }
                let VarKind::Mix { qubit, state } = model.kinds[*var] else {
                    continue;
                };
                if pre(qubit, *var) != Some(state) {
                    bad(tag, format!("mix of q{} on n{} which holds another state", state + 1, qubit + 1));
                }
            }
        }
    }
    out
}

/// Decodes an assignment back into a schedule.
pub fn schedule_from_assignment(model: &Model, a: &Assignment) -> Schedule {
    use crate::schedule::GateTask;
    let inst = &model.instance;
    let chip = inst.chip();
    let mut tasks = Vec::new();
    if inst.initial_mapping() == InitialMapping::Free {
        for (q, row) in a.states.iter().enumerate() {
            if let Some(s) = row[0] {
                tasks.push(GateTask::init(q, s));
            }
        }
    }
    for (id, iv) in a.intervals.iter().enumerate() {
        let Some((start, len)) = *iv else { continue };
        match model.kinds[id] {
            VarKind::Swap { gate, .. } => {
                let e = chip.edge(gate);
                tasks.push(GateTask::swap(e.u, e.v, start, len));
            }
            VarKind::Ps { gate, slot } => {
                let e = chip.edge(gate);
                tasks.push(GateTask::ps(e.u, e.v, start, len, slot));
            }
            VarKind::Mix { qubit, state } => tasks.push(GateTask::mix(qubit, state, start, len)),
            VarKind::Goal { .. } | VarKind::MixTotal { .. } => {}
        }
    }
    Schedule::from_tasks(inst, tasks)
}

/// Quick lookup from `(kind, location, goal, state)` of a task to the
/// variables it could map to; used for value-ordering hints.
pub(crate) type TaskKey = (TaskKind, Location, Option<usize>, Option<usize>);

pub(crate) fn task_keys(schedule: &Schedule) -> HashMap<TaskKey, Vec<u32>> {
    let mut out: HashMap<TaskKey, Vec<u32>> = HashMap::new();
    for t in &schedule.tasks {
        out.entry((t.kind, t.location, t.goal_index, t.state)).or_default().push(t.start);
    }
    out
}
