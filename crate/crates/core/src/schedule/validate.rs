//! Independent schedule validator.
//!
//! Shares no code with the solvers: it re-derives qubit states through
//! [`simulate_states`] and checks every rule of every variant directly on
//! the task list.

use std::fmt;

use serde::Serialize;

use super::{goal_makespan, simulate_states, GateTask, Location, Schedule, SimulationError, StateTrace, TaskKind};
use crate::bounds::horizon_bound;
use crate::instance::{Instance, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    /// Task is well-formed and references this instance and chip.
    R0,
    /// No two tasks on one qubit overlap.
    R1,
    /// Crosstalk: no task overlaps a task on an adjacent qubit.
    R2,
    /// Exactly one PS task per goal slot.
    R3,
    /// A goal PS task sees exactly the goal's state pair.
    R4,
    /// Durations match the chip.
    R5,
    /// Two-stage mixing: one mix per state, between its two goal stages.
    R6,
    /// Free placement: init tasks place all states on distinct qubits.
    R7,
    /// Reported makespan and swap count match the tasks.
    R8,
    /// Every task ends within the horizon.
    R9,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    pub detail: String,
    /// Indices into `Schedule::tasks`.
    pub tasks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
    /// Absent when the tasks could not be replayed (overlaps, missing init).
    pub state_trace: Option<StateTrace>,
    /// Latest end over all tasks, for diagnostics.
    pub total_span: u32,
    pub horizon: u32,
}

impl ValidationReport {
    pub fn rules(&self) -> Vec<Rule> {
        let mut r: Vec<Rule> = self.violations.iter().map(|v| v.rule).collect();
        r.sort_unstable();
        r.dedup();
        r
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            return write!(f, "valid");
        }
        writeln!(f, "invalid: {} violation(s)", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  [{}] {} (tasks {:?})", v.rule, v.detail, v.tasks)?;
        }
        Ok(())
    }
}

/// Validates against the instance's default horizon.
pub fn validate(inst: &Instance, schedule: &Schedule) -> ValidationReport {
    validate_with_horizon(inst, schedule, horizon_bound(inst))
}

pub fn validate_with_horizon(inst: &Instance, schedule: &Schedule, horizon: u32) -> ValidationReport {
    let mut v = Validator {
        inst,
        tasks: &schedule.tasks,
        out: Vec::new(),
    };
    if schedule.instance_ref != inst.fingerprint() {
        v.push(
            Rule::R0,
            format!(
                "schedule references instance {} but was checked against {}",
                schedule.instance_ref,
                inst.fingerprint()
            ),
            vec![],
        );
    }
    let well_formed = v.structure();
    v.durations();
    v.no_overlap();
    if inst.variant() == Variant::QccX {
        v.crosstalk();
    }
    v.goal_coverage();
    v.initialization();

    let trace = if well_formed {
        match simulate_states(inst, schedule) {
            Ok(trace) => Some(trace),
            Err(SimulationError::Overlap { .. }) => None,
            Err(e) => {
                v.push(Rule::R7, e.to_string(), vec![]);
                None
            }
        }
    } else {
        None
    };
    if let Some(trace) = &trace {
        v.goal_matching(trace);
    }
    v.mixing(trace.as_ref());

    let makespan = goal_makespan(v.tasks);
    if schedule.makespan != makespan {
        v.push(
            Rule::R8,
            format!("reported makespan {} but goal tasks end at {}", schedule.makespan, makespan),
            vec![],
        );
    }
    let swaps = v.tasks.iter().filter(|t| t.kind == TaskKind::Swap).count() as u32;
    if schedule.swap_count != swaps {
        v.push(
            Rule::R8,
            format!("reported {} swaps but the schedule has {}", schedule.swap_count, swaps),
            vec![],
        );
    }
    for (ix, t) in v.tasks.iter().enumerate() {
        if t.end() > horizon {
            v.out.push(Violation {
                rule: Rule::R9,
                detail: format!("task ends at {} beyond horizon {}", t.end(), horizon),
                tasks: vec![ix],
            });
        }
    }

    let mut violations = v.out;
    violations.sort_by(|a, b| a.rule.cmp(&b.rule).then_with(|| a.tasks.cmp(&b.tasks)));
    ValidationReport {
        valid: violations.is_empty(),
        violations,
        state_trace: trace,
        total_span: schedule.total_span(),
        horizon,
    }
}

struct Validator<'a> {
    inst: &'a Instance,
    tasks: &'a [GateTask],
    out: Vec<Violation>,
}

impl Validator<'_> {
    fn push(&mut self, rule: Rule, detail: String, tasks: Vec<usize>) {
        self.out.push(Violation { rule, detail, tasks });
    }

    /// Returns false when tasks reference things outside the chip, in which
    /// case state replay is skipped.
    fn structure(&mut self) -> bool {
        let chip = self.inst.chip();
        let n = chip.qubit_count();
        let mut ok = true;
        for (ix, t) in self.tasks.iter().enumerate() {
            let problem = match (t.kind, t.location) {
                (_, loc) if loc.qubits().any(|q| q >= n) => Some("location is outside the chip".to_string()),
                (TaskKind::Swap | TaskKind::Ps, Location::Edge(u, v)) => match chip.edge_between(u, v) {
                    None => Some(format!("no chip edge between n{} and n{}", u + 1, v + 1)),
                    Some(e) if t.kind == TaskKind::Swap && !chip.edge(e).swap_enabled => {
                        Some("swap on an edge without a swap gate".to_string())
                    }
                    _ => None,
                },
                (TaskKind::Mix | TaskKind::Init, Location::Qubit(_)) => None,
                (kind, loc) => Some(format!("{kind:?} task cannot run on {loc}")),
            };
            let problem = problem.or_else(|| match t.kind {
                TaskKind::Ps if t.goal_index.is_none() => Some("PS task without a goal".to_string()),
                TaskKind::Mix | TaskKind::Init if t.state.is_none() => Some("task without a state".to_string()),
                TaskKind::Mix | TaskKind::Init if t.state.is_some_and(|s| s >= n) => {
                    Some("state outside the chip".to_string())
                }
                _ => None,
            });
            if let Some(p) = problem {
                ok = false;
                self.push(Rule::R0, p, vec![ix]);
            }
        }
        ok
    }

    fn durations(&mut self) {
        let chip = self.inst.chip();
        for (ix, t) in self.tasks.iter().enumerate() {
            let expected = match (t.kind, t.location) {
                (TaskKind::Swap, _) => Some(chip.swap_duration()),
                (TaskKind::Ps, Location::Edge(u, v)) => chip.edge_between(u, v).map(|e| chip.edge(e).ps_duration),
                (TaskKind::Mix, _) => Some(chip.mix_duration()),
                (TaskKind::Init, _) => Some(0),
                _ => None,
            };
            if let Some(d) = expected.filter(|&d| d != t.duration) {
                self.push(
                    Rule::R5,
                    format!("{:?} on {} lasts {} instead of {}", t.kind, t.location, t.duration, d),
                    vec![ix],
                );
            }
        }
    }

    fn no_overlap(&mut self) {
        let n = self.inst.chip().qubit_count();
        for q in 0..n {
            let mut on_q: Vec<usize> = (0..self.tasks.len())
                .filter(|&ix| self.tasks[ix].duration > 0 && self.tasks[ix].location.touches(q))
                .collect();
            on_q.sort_by_key(|&ix| (self.tasks[ix].start, ix));
            for (k, &a) in on_q.iter().enumerate() {
                for &b in &on_q[k + 1..] {
                    if self.tasks[b].start >= self.tasks[a].end() {
                        break;
                    }
                    self.push(
                        Rule::R1,
                        format!("tasks overlap on qubit n{}", q + 1),
                        vec![a.min(b), a.max(b)],
                    );
                }
            }
        }
    }

    fn crosstalk(&mut self) {
        let chip = self.inst.chip();
        let gates: Vec<usize> = (0..self.tasks.len())
            .filter(|&ix| self.tasks[ix].duration > 0 && self.tasks[ix].kind != TaskKind::Init)
            .collect();
        for (k, &a) in gates.iter().enumerate() {
            for &b in &gates[k + 1..] {
                let (ta, tb) = (&self.tasks[a], &self.tasks[b]);
                if !ta.overlaps(tb) {
                    continue;
                }
                let shares = ta.location.qubits().any(|q| tb.location.touches(q));
                let adjacent = ta
                    .location
                    .qubits()
                    .any(|p| tb.location.qubits().any(|q| chip.are_adjacent(p, q)));
                if adjacent && !shares {
                    self.push(
                        Rule::R2,
                        format!("{} runs while {} blocks its neighbourhood", tb.location, ta.location),
                        vec![a, b],
                    );
                }
            }
        }
    }

    fn goal_coverage(&mut self) {
        let slots = self.inst.goal_slots();
        let mut seen: Vec<Vec<usize>> = vec![Vec::new(); slots];
        for (ix, t) in self.tasks.iter().enumerate() {
            if t.kind != TaskKind::Ps {
                continue;
            }
            match t.goal_index {
                Some(o) if o < slots => seen[o].push(ix),
                Some(o) => self.push(Rule::R3, format!("goal slot {o} does not exist"), vec![ix]),
                None => {}
            }
        }
        for (o, list) in seen.into_iter().enumerate() {
            if list.len() != 1 {
                self.push(
                    Rule::R3,
                    format!(
                        "goal slot {o} {} is realised by {} PS tasks",
                        self.inst.goal_at(o),
                        list.len()
                    ),
                    list,
                );
            }
        }
    }

    fn goal_matching(&mut self, trace: &StateTrace) {
        let slots = self.inst.goal_slots();
        for (ix, t) in self.tasks.iter().enumerate() {
            let (Some(o), Location::Edge(u, v)) = (t.goal_index, t.location) else {
                continue;
            };
            if t.kind != TaskKind::Ps || o >= slots {
                continue;
            }
            let (Some(eu), Some(ev)) = (trace.event(u, ix), trace.event(v, ix)) else {
                continue;
            };
            let goal = self.inst.goal_at(o);
            if !goal.matches(eu.before, ev.before) {
                self.push(
                    Rule::R4,
                    format!(
                        "goal {goal} applied to q{} and q{} on {}",
                        eu.before + 1,
                        ev.before + 1,
                        t.location
                    ),
                    vec![ix],
                );
            }
        }
    }

    fn mixing(&mut self, trace: Option<&StateTrace>) {
        let mixes: Vec<usize> = (0..self.tasks.len())
            .filter(|&ix| self.tasks[ix].kind == TaskKind::Mix)
            .collect();
        if self.inst.stages() == 1 {
            for ix in mixes {
                self.push(Rule::R6, "mix task in a single-stage problem".into(), vec![ix]);
            }
            return;
        }
        let beta = self.inst.state_count();
        let slots = self.inst.goal_slots();
        let ps_for = |o: usize| -> Vec<usize> {
            (0..self.tasks.len())
                .filter(|&ix| self.tasks[ix].kind == TaskKind::Ps && self.tasks[ix].goal_index == Some(o))
                .collect()
        };
        for state in 0..beta {
            let own: Vec<usize> = mixes
                .iter()
                .copied()
                .filter(|&ix| self.tasks[ix].state == Some(state))
                .collect();
            if own.len() != 1 {
                self.push(
                    Rule::R6,
                    format!("state q{} is mixed {} times", state + 1, own.len()),
                    own,
                );
                continue;
            }
            let m = own[0];
            let mix = self.tasks[m];
            if let (Some(trace), Location::Qubit(q)) = (trace, mix.location) {
                if let Some(e) = trace.event(q, m) {
                    if e.before != state {
                        self.push(
                            Rule::R6,
                            format!("mix of q{} runs on n{} which holds q{}", state + 1, q + 1, e.before + 1),
                            vec![m],
                        );
                    }
                }
            }
            for o in (0..slots).filter(|&o| self.inst.goal_at(o).involves(state)) {
                for p in ps_for(o) {
                    let ps = self.tasks[p];
                    let stage1 = self.inst.stage_of(o) == 1;
                    if stage1 && ps.end() > mix.start {
                        self.push(
                            Rule::R6,
                            format!("stage-1 goal slot {o} ends after q{} is mixed", state + 1),
                            vec![p, m],
                        );
                    }
                    if !stage1 && mix.end() > ps.start {
                        self.push(
                            Rule::R6,
                            format!("stage-2 goal slot {o} starts before q{} is mixed", state + 1),
                            vec![m, p],
                        );
                    }
                }
            }
        }
    }

    fn initialization(&mut self) {
        let inits: Vec<usize> = (0..self.tasks.len())
            .filter(|&ix| self.tasks[ix].kind == TaskKind::Init)
            .collect();
        if self.inst.variant() != Variant::QccI {
            for ix in inits {
                self.push(Rule::R7, "init task outside the free-placement variant".into(), vec![ix]);
            }
            return;
        }
        let n = self.inst.chip().qubit_count();
        let mut per_qubit = vec![Vec::new(); n];
        let mut per_state = vec![Vec::new(); n];
        for &ix in &inits {
            let t = self.tasks[ix];
            if t.start != 0 {
                self.push(Rule::R7, format!("init task starts at {}", t.start), vec![ix]);
            }
            if let (Location::Qubit(q), Some(s)) = (t.location, t.state) {
                if q < n && s < n {
                    per_qubit[q].push(ix);
                    per_state[s].push(ix);
                }
            }
        }
        for q in 0..n {
            if per_qubit[q].len() != 1 {
                self.push(
                    Rule::R7,
                    format!("qubit n{} is initialised {} times", q + 1, per_qubit[q].len()),
                    per_qubit[q].clone(),
                );
            }
            if per_state[q].len() != 1 {
                self.push(
                    Rule::R7,
                    format!("state q{} is placed {} times", q + 1, per_state[q].len()),
                    per_state[q].clone(),
                );
            }
        }
    }
}
