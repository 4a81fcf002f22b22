//! Depth-first branch-and-bound over the interval model.
//!
//! Decisions are taken chronologically. At each decision time (zero or the
//! end of some running task) every startable task is either started now or
//! skipped; a skipped task stays suppressed until a conflicting task starts,
//! which keeps the search on semi-active schedules without losing optima.
//! Under free placement the initial positions of goal states are branched
//! on first. Goal-free states are mixed afterwards, in the earliest gap on
//! their trajectory.

use std::collections::HashMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::model::{task_keys, Model, TaskKey};
use super::propagate::{propagate, Propagation};
use super::warm::warm_start;
use super::CpError;
use crate::bounds::{makespan_lower_bound, swap_lower_bound};
use crate::budget::{Budget, Incumbent, Meter, Spent};
use crate::instance::{Chip, InitialMapping, Instance, UNREACHABLE};
use crate::schedule::{GateTask, Location, Schedule, TaskKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    /// The search space was exhausted; the best schedule is optimal for the
    /// model (within its swap replica allowance).
    Optimal,
    /// Exhausted without any schedule.
    Infeasible,
    /// Budget ran out first.
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub budget: Budget,
    /// Treat swap replicas of one gate as interchangeable. Switching this
    /// off branches over replica ids too, which only repeats work.
    pub symmetry_breaking: bool,
}

impl SearchConfig {
    pub fn new(budget: Budget) -> Self {
        SearchConfig {
            budget,
            symmetry_breaking: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    /// Warm start the search was given, if any.
    pub start: Option<Schedule>,
    /// Schedules found by the search, each strictly better than the last
    /// and than the warm start.
    pub incumbents: Vec<Incumbent>,
    pub spent: Spent,
}

impl SearchOutcome {
    pub fn best(&self) -> Option<&Schedule> {
        self.incumbents.last().map(|i| &i.schedule).or(self.start.as_ref())
    }
}

/// Searches for schedules better than `incumbent`.
pub fn search(model: &Model, incumbent: Option<&Schedule>, config: &SearchConfig) -> Result<SearchOutcome, CpError> {
    search_with(model, incumbent, config, |_| {})
}

/// As [`search`], calling `on_incumbent` for every improvement found.
pub fn search_with(
    model: &Model,
    incumbent: Option<&Schedule>,
    config: &SearchConfig,
    mut on_incumbent: impl FnMut(&Incumbent),
) -> Result<SearchOutcome, CpError> {
    let meter = Meter::new(config.budget);
    if let Some(s) = incumbent {
        warm_start(model, s)?;
    }
    if config.budget.is_zero() {
        return Ok(SearchOutcome {
            status: SearchStatus::Timeout,
            start: incumbent.cloned(),
            incumbents: Vec::new(),
            spent: meter.spent(),
        });
    }
    let mut search = Search::new(model, incumbent, config.symmetry_breaking, meter, &mut on_incumbent);
    let status = search.run()?;
    Ok(SearchOutcome {
        status,
        start: incumbent.cloned(),
        spent: search.meter.spent(),
        incumbents: search.found,
    })
}

const NONE: u32 = u32::MAX;
const FREE: usize = usize::MAX;
const FAR: u32 = u32::MAX / 4;
/// Entries kept in the table of explored decision points.
const SEEN_CAP: usize = 1 << 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cand {
    Ps { gate: usize, slot: usize },
    Swap { gate: usize },
    Mix { state: usize, qubit: usize },
}

/// Stage-one goal indices sharing states pairwise, and the states whose
/// stage-one goals include all of them.
struct Clique {
    goals: Vec<usize>,
    keys: Vec<usize>,
}

struct Link {
    task: GateTask,
    prev: Option<Rc<Link>>,
}

#[derive(Clone)]
struct Node {
    t: u32,
    /// Goal states placed so far (free placement only).
    placing: usize,
    occ: Vec<usize>,
    loc: Vec<usize>,
    /// Placement at time zero, fixed once routing starts.
    init: Rc<Vec<usize>>,
    release: Vec<u32>,
    slot_end: Vec<u32>,
    pending: usize,
    pending_of: Vec<u32>,
    mix_end: Vec<u32>,
    replicas: Vec<u32>,
    /// End of the gate running on each edge.
    edge_release: Vec<u32>,
    used_ids: Vec<u64>,
    swaps: u32,
    goal_end: u32,
    suppressed: Vec<(Cand, [usize; 2])>,
    tasks: Option<Rc<Link>>,
    cands: Rc<Vec<Cand>>,
    next: usize,
}

struct Search<'a> {
    model: &'a Model,
    inst: &'a Instance,
    chip: &'a Chip,
    n: usize,
    horizon: u32,
    crosstalk: bool,
    two_stage: bool,
    tau_s: u32,
    tau_mix: u32,
    ps_min: u32,
    replica_cap: u32,
    symmetry_breaking: bool,
    free_placement: bool,
    goal_state: Vec<bool>,
    stage1_of: Vec<Vec<usize>>,
    near: Vec<Vec<usize>>,
    place_order: Vec<usize>,
    ps_smax: Vec<Vec<Option<u32>>>,
    swap_smax: Vec<Option<u32>>,
    mix_smax: Vec<Vec<Option<u32>>>,
    hint: Option<HashMap<TaskKey, Vec<u32>>>,
    hint_place: Vec<Option<usize>>,
    best: Option<(u32, u32)>,
    root_lb: (u32, u32),
    meter: Meter,
    found: Vec<Incumbent>,
    on_incumbent: &'a mut dyn FnMut(&Incumbent),
    /// Goal sets whose gates can never overlap (pairwise sharing a state).
    cliques: Vec<Clique>,
    /// Most gates that can run at once.
    edge_width: u32,
    /// Most mixes that can run at once, when a mix anywhere stalls every
    /// gate; `None` otherwise.
    mix_width: Option<u32>,
    /// Decision points already expanded, with the fewest swaps seen there.
    seen: HashMap<Vec<u32>, u32>,
}

impl<'a> Search<'a> {
    fn new(
        model: &'a Model,
        incumbent: Option<&Schedule>,
        symmetry_breaking: bool,
        meter: Meter,
        on_incumbent: &'a mut dyn FnMut(&Incumbent),
    ) -> Self {
        let inst = model.instance();
        let chip = inst.chip();
        let n = chip.qubit_count();
        let crosstalk = inst.variant().crosstalk();
        let mut goal_state = vec![false; n];
        let mut stage1_of = vec![Vec::new(); n];
        let mut degree = vec![0usize; n];
        for (o, g) in inst.goals().iter().enumerate() {
            for s in [g.0, g.1] {
                goal_state[s] = true;
                stage1_of[s].push(o);
                degree[s] += 1;
            }
        }
        let near = (0..n)
            .map(|q| {
                let mut v = vec![q];
                if crosstalk {
                    v.extend_from_slice(chip.neighbors(q));
                }
                v
            })
            .collect();
        let free_placement = inst.initial_mapping() == InitialMapping::Free;
        let mut place_order: Vec<usize> = if free_placement {
            (0..n).filter(|&s| goal_state[s]).collect()
        } else {
            Vec::new()
        };
        place_order.sort_by_key(|&s| (std::cmp::Reverse(degree[s]), s));

        let mut hint_place = vec![None; n];
        if let Some(s) = incumbent {
            for t in s.tasks.iter().filter(|t| t.kind == TaskKind::Init) {
                if let (Location::Qubit(q), Some(st)) = (t.location, t.state) {
                    hint_place[st] = Some(q);
                }
            }
        }
        let replica_cap = model.bounds.swaps_per_gate;
        let cliques = goal_cliques(inst);
        let hits = |a: [usize; 2], b: [usize; 2]| {
            a.iter().any(|&x| b.iter().any(|&y| x == y || (crosstalk && chip.are_adjacent(x, y))))
        };
        let edges: Vec<[usize; 2]> = chip.edges().iter().map(|e| [e.u, e.v]).collect();
        let edge_width = widest(&edges, &hits).unwrap_or(edges.len()) as u32;
        let qubits: Vec<[usize; 2]> = (0..n).map(|q| [q, q]).collect();
        let mix_width = (crosstalk && qubits.iter().all(|&q| edges.iter().all(|&e| hits(q, e))))
            .then(|| widest(&qubits, &hits).unwrap_or(n) as u32);
        Search {
            model,
            inst,
            chip,
            n,
            horizon: model.bounds.horizon,
            crosstalk,
            two_stage: inst.stages() == 2,
            tau_s: chip.swap_duration(),
            tau_mix: chip.mix_duration(),
            ps_min: chip.min_ps_duration(),
            replica_cap,
            // ids are tracked in a u64 mask
            symmetry_breaking: symmetry_breaking || replica_cap > 64,
            free_placement,
            goal_state,
            stage1_of,
            near,
            place_order,
            ps_smax: Vec::new(),
            swap_smax: Vec::new(),
            mix_smax: Vec::new(),
            hint: incumbent.map(task_keys),
            hint_place,
            best: incumbent.map(Schedule::objective),
            root_lb: (0, 0),
            meter,
            found: Vec::new(),
            on_incumbent,
            seen: HashMap::new(),
            cliques,
            edge_width: edge_width.max(1),
            mix_width: mix_width.map(|w| w.max(1)),
        }
    }

    fn run(&mut self) -> Result<SearchStatus, CpError> {
        if !self.root_filters()? {
            return Ok(self.exhausted_status());
        }
        let root = self.root();
        let lb = self.lower_bound(&root);
        self.root_lb = (
            lb.0.max(makespan_lower_bound(self.inst)),
            lb.1.max(swap_lower_bound(self.inst)),
        );
        if self.settled() || self.pruned(&root) {
            return Ok(self.exhausted_status());
        }
        let mut stack = vec![root];
        while let Some(node) = stack.pop() {
            self.meter.charge(1);
            if self.meter.exhausted() {
                return Ok(SearchStatus::Timeout);
            }
            if node.placing < self.place_order.len() {
                self.expand_placement(node, &mut stack);
            } else {
                self.expand(node, &mut stack)?;
            }
            if self.settled() {
                break;
            }
        }
        Ok(self.exhausted_status())
    }

    fn exhausted_status(&self) -> SearchStatus {
        if self.best.is_some() {
            SearchStatus::Optimal
        } else {
            SearchStatus::Infeasible
        }
    }

    fn settled(&self) -> bool {
        self.best.is_some_and(|b| b <= self.root_lb)
    }

    /// Propagates the model under the incumbent's makespan and keeps the
    /// resulting latest start times. False when no schedule can exist.
    fn root_filters(&mut self) -> Result<bool, CpError> {
        let mut m = self.model.clone();
        if let Some((c, _)) = self.best {
            m.makespan.1 = m.makespan.1.min(c);
        }
        if propagate(&mut m) == Propagation::Conflict {
            if self.best.is_some() {
                return Err(CpError::Internal("propagation rejects the warm start".into()));
            }
            return Ok(false);
        }
        let smax = |ids: &[usize]| {
            ids.iter()
                .filter(|&&v| !m.vars[v].is_absent())
                .map(|&v| m.vars[v].start_max)
                .max()
        };
        self.ps_smax = m
            .ps_vars
            .iter()
            .map(|row| row.iter().map(|&v| smax(&[v])).collect())
            .collect();
        self.swap_smax = m.swap_vars.iter().map(|row| smax(row)).collect();
        self.mix_smax = m
            .mix_vars
            .iter()
            .map(|row| row.iter().map(|&v| smax(&[v])).collect())
            .collect();
        Ok(true)
    }

    fn root(&self) -> Node {
        let n = self.n;
        let slots = self.inst.goal_slots();
        let mut pending_of = vec![0u32; n];
        for o in 0..slots {
            let g = self.inst.goal_at(o);
            pending_of[g.0] += 1;
            pending_of[g.1] += 1;
        }
        let (occ, loc) = if self.free_placement {
            (vec![FREE; n], vec![FREE; n])
        } else {
            ((0..n).collect(), (0..n).collect())
        };
        let mut node = Node {
            t: 0,
            placing: 0,
            occ,
            loc,
            init: Rc::new(Vec::new()),
            release: vec![0; n],
            slot_end: vec![NONE; slots],
            pending: slots,
            pending_of,
            mix_end: vec![NONE; n],
            replicas: vec![0; self.chip.edges().len()],
            edge_release: vec![0; self.chip.edges().len()],
            used_ids: if self.symmetry_breaking {
                Vec::new()
            } else {
                vec![0; self.chip.edges().len()]
            },
            swaps: 0,
            goal_end: 0,
            suppressed: Vec::new(),
            tasks: None,
            cands: Rc::new(Vec::new()),
            next: 0,
        };
        if self.place_order.is_empty() {
            self.begin_routing(&mut node);
        }
        node
    }

    /// Fills the qubits left over by placement and lists the time-zero
    /// candidates.
    fn begin_routing(&self, node: &mut Node) {
        if self.free_placement {
            let spare: Vec<usize> = (0..self.n).filter(|&q| node.occ[q] == FREE).collect();
            let mut spare = spare.into_iter();
            for s in 0..self.n {
                if node.loc[s] == FREE {
                    let q = spare.next().expect("as many states as qubits");
                    node.loc[s] = q;
                    node.occ[q] = s;
                }
            }
        }
        node.init = Rc::new(node.occ.clone());
        node.cands = Rc::new(self.candidates(node));
        node.next = 0;
    }

    fn expand_placement(&mut self, node: Node, stack: &mut Vec<Node>) {
        let s = self.place_order[node.placing];
        let cost = |q: usize| -> u32 {
            self.stage1_of[s]
                .iter()
                .map(|&o| {
                    let g = self.inst.goal_at(o);
                    let p = if g.0 == s { g.1 } else { g.0 };
                    match node.loc[p] {
                        FREE => 0,
                        lp => self.chip.swap_distance(q, lp).min(FAR),
                    }
                })
                .sum()
        };
        let mut choices: Vec<usize> = (0..self.n).filter(|&q| node.occ[q] == FREE).collect();
        choices.sort_by_key(|&q| (self.hint_place[s] != Some(q), cost(q), q));
        for &q in choices.iter().rev() {
            let mut child = node.clone();
            child.occ[q] = s;
            child.loc[s] = q;
            child.placing += 1;
            if child.placing == self.place_order.len() {
                self.begin_routing(&mut child);
            }
            if !self.pruned(&child) {
                stack.push(child);
            }
        }
    }

    fn expand(&mut self, mut node: Node, stack: &mut Vec<Node>) -> Result<(), CpError> {
        loop {
            if node.next == node.cands.len() {
                if node.pending == 0 {
                    return self.leaf(&node);
                }
                let Some(t) = node.release.iter().copied().filter(|&r| r > node.t).min() else {
                    return Ok(());
                };
                node.t = t;
                if self.pruned(&node) || self.revisited(&node) {
                    return Ok(());
                }
                node.cands = Rc::new(self.candidates(&node));
                node.next = 0;
                continue;
            }
            let c = node.cands[node.next];
            node.next += 1;
            if !self.feasible(&node, c) {
                continue;
            }
            let prefer_start = self.prefers_start(&node, c);
            let mut starts = Vec::new();
            match c {
                Cand::Swap { gate } if !self.symmetry_breaking => {
                    for r in 0..self.replica_cap as usize {
                        if node.used_ids[gate] & (1 << r) == 0 {
                            let mut child = node.clone();
                            child.used_ids[gate] |= 1 << r;
                            self.start(&mut child, c);
                            starts.push(child);
                        }
                    }
                }
                _ => {
                    let mut child = node.clone();
                    self.start(&mut child, c);
                    starts.push(child);
                }
            }
            let qubits = self.cand_qubits(c);
            node.suppressed.push((c, qubits));
            if prefer_start {
                stack.push(node);
                stack.extend(starts.into_iter().rev());
            } else {
                stack.extend(starts.into_iter().rev());
                stack.push(node);
            }
            return Ok(());
        }
    }

    /// Everything the subtree below a decision point depends on, except the
    /// swap count.
    fn signature(&self, node: &Node) -> Vec<u32> {
        let t = node.t;
        let mut key = Vec::with_capacity(4 * self.n + node.slot_end.len() + node.suppressed.len() + 8);
        key.push(t);
        key.extend(node.occ.iter().map(|&s| s as u32));
        key.extend(node.release.iter().map(|&r| r.saturating_sub(t)));
        key.extend(node.slot_end.iter().copied());
        key.extend(node.mix_end.iter().copied());
        key.extend(node.replicas.iter().copied());
        for &ids in &node.used_ids {
            key.extend([ids as u32, (ids >> 32) as u32]);
        }
        let mut sup: Vec<u32> = node
            .suppressed
            .iter()
            .map(|(c, _)| match *c {
                Cand::Ps { gate, slot } => (gate as u32) << 12 | (slot as u32) << 2,
                Cand::Swap { gate } => (gate as u32) << 12 | 1,
                Cand::Mix { state, qubit } => (qubit as u32) << 12 | (state as u32) << 2 | 2,
            })
            .collect();
        sup.sort_unstable();
        key.push(u32::MAX);
        key.extend(sup);
        key
    }

    /// Whether an identical decision point was reached before with no more
    /// swaps. Its subtree was (or is being) searched against an incumbent at
    /// least as weak, so this one cannot improve on it.
    fn revisited(&mut self, node: &Node) -> bool {
        let key = self.signature(node);
        match self.seen.get_mut(&key) {
            Some(s) if *s <= node.swaps => true,
            Some(s) => {
                *s = node.swaps;
                false
            }
            None => {
                if self.seen.len() < SEEN_CAP {
                    self.seen.insert(key, node.swaps);
                }
                false
            }
        }
    }

    fn cand_qubits(&self, c: Cand) -> [usize; 2] {
        match c {
            Cand::Ps { gate, .. } | Cand::Swap { gate } => {
                let e = self.chip.edge(gate);
                [e.u, e.v]
            }
            Cand::Mix { qubit, .. } => [qubit, qubit],
        }
    }

    fn conflict(&self, a: [usize; 2], b: [usize; 2]) -> bool {
        a.iter()
            .any(|&x| b.iter().any(|&y| x == y || (self.crosstalk && self.chip.are_adjacent(x, y))))
    }

    fn idle(&self, node: &Node, qubits: [usize; 2]) -> bool {
        qubits
            .iter()
            .all(|&q| self.near[q].iter().all(|&x| node.release[x] <= node.t))
    }

    /// Whether a task ending at `end`, adding `extra_swaps`, can still lead
    /// to something better than the incumbent.
    fn promising(&self, node: &Node, end: u32, extra_swaps: u32) -> bool {
        end <= self.horizon
            && self
                .best
                .map_or(true, |(c, s)| end < c || (end == c && node.swaps + extra_swaps < s))
    }

    fn candidates(&self, node: &Node) -> Vec<Cand> {
        let t = node.t;
        let mut out = Vec::new();
        for (o, &end) in node.slot_end.iter().enumerate() {
            if end == NONE {
                let g = self.inst.goal_at(o);
                if let Some(gate) = self.chip.edge_between(node.loc[g.0], node.loc[g.1]) {
                    out.push(Cand::Ps { gate, slot: o });
                }
            }
        }
        if self.two_stage {
            for s in 0..self.n {
                if self.goal_state[s]
                    && node.mix_end[s] == NONE
                    && self.stage1_of[s].iter().all(|&o| node.slot_end[o] <= t)
                {
                    out.push(Cand::Mix {
                        state: s,
                        qubit: node.loc[s],
                    });
                }
            }
        }
        let mut swaps: Vec<(bool, i64, usize)> = Vec::new();
        for (gate, e) in self.chip.edges().iter().enumerate() {
            if e.swap_enabled
                && (node.pending_of[node.occ[e.u]] > 0 || node.pending_of[node.occ[e.v]] > 0)
                && self.idle(node, [e.u, e.v])
            {
                let c = Cand::Swap { gate };
                swaps.push((!self.hinted(node, c), -self.benefit(node, gate), gate));
            }
        }
        swaps.sort_unstable();
        out.extend(swaps.into_iter().map(|(_, _, gate)| Cand::Swap { gate }));
        out
    }

    fn feasible(&self, node: &Node, c: Cand) -> bool {
        if node.suppressed.iter().any(|(s, _)| *s == c) {
            return false;
        }
        let t = node.t;
        match c {
            Cand::Ps { gate, slot } => {
                let e = self.chip.edge(gate);
                let g = self.inst.goal_at(slot);
                node.slot_end[slot] == NONE
                    && g.matches(node.occ[e.u], node.occ[e.v])
                    && (self.inst.stage_of(slot) == 1
                        || (node.mix_end[g.0] <= t && node.mix_end[g.1] <= t))
                    && self.ps_smax[gate][slot].is_some_and(|m| t <= m)
                    && self.promising(node, t + e.ps_duration, 0)
                    && self.idle(node, [e.u, e.v])
            }
            Cand::Swap { gate } => {
                let e = self.chip.edge(gate);
                node.replicas[gate] < self.replica_cap
                    && (node.pending_of[node.occ[e.u]] > 0 || node.pending_of[node.occ[e.v]] > 0)
                    && self.swap_smax[gate].is_some_and(|m| t <= m)
                    && self.promising(node, t + self.tau_s + self.ps_min, 1)
                    && self.idle(node, [e.u, e.v])
            }
            Cand::Mix { state, qubit } => {
                node.mix_end[state] == NONE
                    && node.loc[state] == qubit
                    && self.mix_smax[qubit][state].is_some_and(|m| t <= m)
                    && self.promising(node, t + self.tau_mix + self.ps_min, 0)
                    && self.idle(node, [qubit, qubit])
            }
        }
    }

    fn key(&self, c: Cand) -> TaskKey {
        match c {
            Cand::Ps { gate, slot } => {
                let e = self.chip.edge(gate);
                (TaskKind::Ps, Location::edge(e.u, e.v), Some(slot), None)
            }
            Cand::Swap { gate } => {
                let e = self.chip.edge(gate);
                (TaskKind::Swap, Location::edge(e.u, e.v), None, None)
            }
            Cand::Mix { state, qubit } => (TaskKind::Mix, Location::Qubit(qubit), None, Some(state)),
        }
    }

    fn hinted(&self, node: &Node, c: Cand) -> bool {
        self.hint
            .as_ref()
            .and_then(|h| h.get(&self.key(c)))
            .is_some_and(|starts| starts.contains(&node.t))
    }

    /// Net reduction in distance to pending partners if the gate swapped now.
    fn benefit(&self, node: &Node, gate: usize) -> i64 {
        let e = self.chip.edge(gate);
        let (x, y) = (node.occ[e.u], node.occ[e.v]);
        let mut gain = 0i64;
        for (s, from, to) in [(x, e.u, e.v), (y, e.v, e.u)] {
            for &o in self.stage1_of[s].iter() {
                let g = self.inst.goal_at(o);
                let p = if g.0 == s { g.1 } else { g.0 };
                if p == x || p == y {
                    continue;
                }
                let pending = (0..self.inst.stages() as usize)
                    .filter(|k| node.slot_end[o + k * self.inst.goals().len()] == NONE)
                    .count() as i64;
                let lp = node.loc[p];
                gain += pending
                    * (self.chip.swap_distance(from, lp) as i64 - self.chip.swap_distance(to, lp) as i64);
            }
        }
        gain
    }

    fn prefers_start(&self, node: &Node, c: Cand) -> bool {
        match c {
            Cand::Swap { gate } => self.hinted(node, c) || self.benefit(node, gate) > 0,
            _ => true,
        }
    }

    fn start(&self, node: &mut Node, c: Cand) {
        let t = node.t;
        let task = match c {
            Cand::Ps { gate, slot } => {
                let e = self.chip.edge(gate);
                let end = t + e.ps_duration;
                let g = self.inst.goal_at(slot);
                node.slot_end[slot] = end;
                node.pending -= 1;
                node.pending_of[g.0] -= 1;
                node.pending_of[g.1] -= 1;
                node.release[e.u] = end;
                node.release[e.v] = end;
                node.edge_release[gate] = end;
                node.goal_end = node.goal_end.max(end);
                GateTask::ps(e.u, e.v, t, e.ps_duration, slot)
            }
            Cand::Swap { gate } => {
                let e = self.chip.edge(gate);
                let (x, y) = (node.occ[e.u], node.occ[e.v]);
                node.occ[e.u] = y;
                node.occ[e.v] = x;
                node.loc[x] = e.v;
                node.loc[y] = e.u;
                node.release[e.u] = t + self.tau_s;
                node.release[e.v] = t + self.tau_s;
                node.edge_release[gate] = t + self.tau_s;
                node.replicas[gate] += 1;
                node.swaps += 1;
                GateTask::swap(e.u, e.v, t, self.tau_s)
            }
            Cand::Mix { state, qubit } => {
                node.mix_end[state] = t + self.tau_mix;
                node.release[qubit] = t + self.tau_mix;
                GateTask::mix(qubit, state, t, self.tau_mix)
            }
        };
        node.tasks = Some(Rc::new(Link {
            task,
            prev: node.tasks.take(),
        }));
        let qubits = self.cand_qubits(c);
        node.suppressed.retain(|&(_, q)| !self.conflict(qubits, q));
    }

    /// Earliest time two states could finish a gate together, and the fewest
    /// swaps that takes. A state may travel from `avail` on but cannot take
    /// part in the gate before `ready`.
    fn meet(&self, a: (u32, u32, usize), b: (u32, u32, usize)) -> (u32, u32) {
        let mut best = (FAR, FAR);
        for e in self.chip.edges() {
            for (u, v) in [(e.u, e.v), (e.v, e.u)] {
                let (da, db) = (self.chip.swap_distance(a.2, u), self.chip.swap_distance(b.2, v));
                if da == UNREACHABLE || db == UNREACHABLE {
                    continue;
                }
                let done = (a.0 + da * self.tau_s)
                    .max(b.0 + db * self.tau_s)
                    .max(a.1)
                    .max(b.1)
                    + e.ps_duration;
                best.0 = best.0.min(done);
                best.1 = best.1.min(da + db);
            }
        }
        best
    }

    fn lower_bound(&self, node: &Node) -> (u32, u32) {
        let t = node.t;
        let avail = |s: usize| match node.loc[s] {
            FREE => t,
            q => t.max(node.release[q]),
        };
        let g_count = self.inst.goals().len();
        let mut lb_c = node.goal_end;
        let mut lb_s = 0;
        let mut stage1 = vec![0u32; g_count];
        for o in 0..self.inst.goal_slots() {
            if node.slot_end[o] != NONE {
                if o < g_count {
                    stage1[o] = node.slot_end[o];
                }
                continue;
            }
            let g = self.inst.goal_at(o);
            let ready = |s: usize| {
                if o < g_count {
                    return avail(s);
                }
                if node.mix_end[s] != NONE {
                    return avail(s).max(node.mix_end[s]);
                }
                let stage1_done = self.stage1_of[s].iter().map(|&k| stage1[k]).max().unwrap_or(0);
                avail(s).max(stage1_done) + self.tau_mix
            };
            let (c, sw) = if node.loc[g.0] == FREE || node.loc[g.1] == FREE {
                (ready(g.0).max(ready(g.1)) + self.ps_min, 0)
            } else {
                self.meet(
                    (avail(g.0), ready(g.0), node.loc[g.0]),
                    (avail(g.1), ready(g.1), node.loc[g.1]),
                )
            };
            if o < g_count {
                stage1[o] = c;
            }
            lb_c = lb_c.max(c);
            lb_s = lb_s.max(sw);
        }
        for s in 0..self.n {
            if node.pending_of[s] > 0 {
                let mix = if self.two_stage && node.mix_end[s] == NONE {
                    self.tau_mix
                } else {
                    0
                };
                lb_c = lb_c.max(avail(s) + node.pending_of[s] * self.ps_min + mix);
            }
        }
        for c in &self.cliques {
            lb_c = lb_c.max(self.clique_bound(node, c));
        }
        // gates share the chip: at most `edge_width` run at any moment
        let running: u32 = node.edge_release.iter().map(|&r| r.saturating_sub(t)).sum();
        let work = running + node.pending as u32 * self.ps_min + lb_s * self.tau_s;
        let mut energy = t + work.div_ceil(self.edge_width);
        if let Some(width) = self.mix_width {
            let mixes = (0..self.n)
                .filter(|&s| self.two_stage && self.goal_state[s] && node.mix_end[s] == NONE)
                .count() as u32;
            energy += (mixes * self.tau_mix).div_ceil(width);
        }
        lb_c = lb_c.max(energy);
        (lb_c, node.swaps + lb_s)
    }

    /// Gates of a clique run one after another; in two stages the second
    /// round also waits for a mix after the first.
    fn clique_bound(&self, node: &Node, c: &Clique) -> u32 {
        let t = node.t;
        let g_count = self.inst.goals().len();
        let tally = |offset: usize| {
            let (mut pending, mut last) = (0, 0);
            for &o in &c.goals {
                match node.slot_end[o + offset] {
                    NONE => pending += 1,
                    e => last = last.max(e),
                }
            }
            (pending, last)
        };
        let (p1, last1) = tally(0);
        let end1 = if p1 > 0 { t.max(last1) + p1 * self.ps_min } else { last1 };
        if !self.two_stage {
            return end1;
        }
        let (p2, last2) = tally(g_count);
        if p2 == 0 {
            return end1.max(last2);
        }
        let unmixed = c.goals.iter().any(|&o| {
            node.slot_end[o + g_count] == NONE && {
                let g = self.inst.goal_at(o);
                [g.0, g.1].iter().any(|s| c.keys.contains(s) && node.mix_end[*s] == NONE)
            }
        });
        let mix = if unmixed { self.tau_mix } else { 0 };
        t.max(last2).max(end1 + mix) + p2 * self.ps_min
    }

    fn pruned(&self, node: &Node) -> bool {
        let lb = self.lower_bound(node);
        lb.0 > self.horizon || self.best.is_some_and(|b| lb >= b)
    }

    fn leaf(&mut self, node: &Node) -> Result<(), CpError> {
        let objective = (node.goal_end, node.swaps);
        if self.best.is_some_and(|b| objective >= b) {
            return Ok(());
        }
        let Some(schedule) = self.finalize(node) else {
            return Ok(());
        };
        if let Err(e) = warm_start(self.model, &schedule) {
            return Err(CpError::Internal(format!("search built a schedule the model rejects: {e}")));
        }
        debug_assert_eq!(schedule.objective(), objective);
        self.best = Some(objective);
        let inc = Incumbent {
            schedule,
            found_at: self.meter.spent(),
        };
        (self.on_incumbent)(&inc);
        self.found.push(inc);
        Ok(())
    }

    fn finalize(&self, node: &Node) -> Option<Schedule> {
        let mut tasks = Vec::new();
        let mut link = node.tasks.as_deref();
        while let Some(l) = link {
            tasks.push(l.task);
            link = l.prev.as_deref();
        }
        tasks.reverse();
        if self.two_stage && !self.mix_goal_free_states(&mut tasks, &node.init) {
            return None;
        }
        if self.free_placement {
            tasks.extend(node.init.iter().enumerate().map(|(q, &s)| GateTask::init(q, s)));
        }
        let schedule = Schedule::from_tasks(self.inst, tasks);
        (schedule.total_span() <= self.horizon).then_some(schedule)
    }

    /// Places one mix for every state outside the goals, in the earliest
    /// idle window along the state's path. `tasks` is in start order.
    fn mix_goal_free_states(&self, tasks: &mut Vec<GateTask>, init: &[usize]) -> bool {
        let swaps: Vec<GateTask> = tasks.iter().filter(|t| t.kind == TaskKind::Swap).copied().collect();
        for (q0, &s) in init.iter().enumerate() {
            if self.goal_state[s] {
                continue;
            }
            // segments of the trajectory: (qubit, from, until)
            let mut segments = Vec::new();
            let (mut q, mut from) = (q0, 0);
            for sw in &swaps {
                if let Location::Edge(u, v) = sw.location {
                    if u == q || v == q {
                        segments.push((q, from, sw.start));
                        q = if u == q { v } else { u };
                        from = sw.end();
                    }
                }
            }
            segments.push((q, from, self.horizon));
            let placed = segments.into_iter().find_map(|(q, from, until)| {
                let blocking: Vec<(u32, u32)> = tasks
                    .iter()
                    .filter(|t| t.duration > 0 && t.location.qubits().any(|x| self.near[q].contains(&x)))
                    .map(|t| (t.start, t.end()))
                    .collect();
                let mut starts: Vec<u32> = std::iter::once(from)
                    .chain(blocking.iter().map(|b| b.1).filter(|&e| e > from))
                    .collect();
                starts.sort_unstable();
                starts.into_iter().find_map(|st| {
                    let end = st + self.tau_mix;
                    (end <= until.min(self.horizon) && blocking.iter().all(|&(a, b)| b <= st || end <= a))
                        .then_some(GateTask::mix(q, s, st, self.tau_mix))
                })
            });
            match placed {
                Some(m) => tasks.push(m),
                None => return false,
            }
        }
        true
    }
}

/// Stars (all goals of one state) and triangles of goals.
fn goal_cliques(inst: &Instance) -> Vec<Clique> {
    let goals = inst.goals();
    let mut out = Vec::new();
    for s in 0..inst.state_count() {
        let star: Vec<usize> = (0..goals.len()).filter(|&o| goals[o].involves(s)).collect();
        if star.len() > 1 {
            out.push(Clique { goals: star, keys: vec![s] });
        }
    }
    let shares = |a: usize, b: usize| goals[a].involves(goals[b].0) || goals[a].involves(goals[b].1);
    for a in 0..goals.len() {
        for b in a + 1..goals.len() {
            for c in b + 1..goals.len() {
                let mut states = vec![goals[a].0, goals[a].1, goals[b].0, goals[b].1, goals[c].0, goals[c].1];
                states.sort_unstable();
                states.dedup();
                if states.len() == 3 && shares(a, b) && shares(b, c) && shares(a, c) {
                    out.push(Clique { goals: vec![a, b, c], keys: states });
                }
            }
        }
    }
    out
}

/// Size of the largest set of mutually compatible locations, or `None` when
/// there are too many to search exactly.
fn widest(locs: &[[usize; 2]], hits: &impl Fn([usize; 2], [usize; 2]) -> bool) -> Option<usize> {
    let k = locs.len();
    if k > 64 {
        return None;
    }
    let compatible: Vec<u64> = (0..k)
        .map(|i| (0..k).filter(|&j| j != i && !hits(locs[i], locs[j])).fold(0, |m, j| m | 1 << j))
        .collect();
    fn grow(cands: u64, size: usize, best: &mut usize, compatible: &[u64]) {
        if cands == 0 {
            *best = (*best).max(size);
            return;
        }
        if size + cands.count_ones() as usize <= *best {
            return;
        }
        let i = cands.trailing_zeros() as usize;
        grow(cands & compatible[i], size + 1, best, compatible);
        grow(cands & !(1 << i), size, best, compatible);
    }
    let mut best = 0;
    let all = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    grow(all, 0, &mut best, &compatible);
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::BoundSet;
    use crate::cpsolver::build_model;
    use crate::instance::{build_preset_chip, generate_instance, Goal, Variant};
    use crate::router::{solve_greedy, solve_sequential_baseline};
    use crate::schedule::validate;

    fn worked(variant: Variant, stages: u8) -> Instance {
        Instance::new(build_preset_chip("rigetti-8").unwrap(), vec![Goal(2, 3)], stages, variant).unwrap()
    }

    fn nodes(n: u64) -> SearchConfig {
        SearchConfig::new(Budget::Nodes(n))
    }

    #[test]
    fn worked_example_is_solved_to_optimality() {
        let inst = worked(Variant::Qcc, 1);
        let m = build_model(&inst, &BoundSet::for_instance(&inst));
        let out = search(&m, None, &nodes(100_000)).unwrap();
        assert_eq!(out.status, SearchStatus::Optimal);
        let best = out.best().unwrap();
        assert_eq!(best.objective(), (5, 2));
        assert!(validate(&inst, best).valid);
    }

    #[test]
    fn zero_budget_returns_the_warm_start() {
        let inst = worked(Variant::Qcc, 1);
        let m = build_model(&inst, &BoundSet::for_instance(&inst));
        let base = solve_sequential_baseline(&inst).unwrap();
        let out = search(&m, Some(&base), &nodes(0)).unwrap();
        assert_eq!(out.status, SearchStatus::Timeout);
        assert!(out.incumbents.is_empty());
        assert_eq!(out.best(), Some(&base));
    }

    #[test]
    fn incumbents_strictly_improve_and_validate() {
        let chip = build_preset_chip("rigetti-8").unwrap();
        for variant in Variant::ALL {
            for stages in [1, 2] {
                let inst = generate_instance(&chip, 3, stages, variant, 5).unwrap();
                let m = build_model(&inst, &BoundSet::for_instance(&inst));
                let base = solve_sequential_baseline(&inst).unwrap();
                let out = search(&m, Some(&base), &nodes(20_000)).unwrap();
                let mut last = base.objective();
                for inc in &out.incumbents {
                    assert!(inc.schedule.objective() < last);
                    last = inc.schedule.objective();
                    let report = validate(&inst, &inc.schedule);
                    assert!(report.valid, "{variant:?} {stages}: {report}");
                }
            }
        }
    }

    #[test]
    fn free_placement_needs_no_swaps_for_a_path() {
        let inst = Instance::new(
            build_preset_chip("rigetti-8").unwrap(),
            vec![Goal(0, 1), Goal(1, 2)],
            1,
            Variant::QccI,
        )
        .unwrap();
        let m = build_model(&inst, &BoundSet::for_instance(&inst));
        let out = search(&m, None, &nodes(100_000)).unwrap();
        assert_eq!(out.status, SearchStatus::Optimal);
        assert_eq!(out.best().unwrap().objective(), (6, 0));
    }

    #[test]
    fn symmetric_replicas_find_the_same_optimum() {
        let inst = generate_instance(&build_preset_chip("rigetti-8").unwrap(), 2, 1, Variant::Qcc, 9).unwrap();
        let m = build_model(&inst, &BoundSet::for_instance(&inst));
        let on = search(&m, None, &nodes(1_000_000)).unwrap();
        let mut cfg = nodes(5_000_000);
        cfg.symmetry_breaking = false;
        let off = search(&m, None, &cfg).unwrap();
        assert_eq!(on.status, SearchStatus::Optimal);
        assert_eq!(off.status, SearchStatus::Optimal);
        assert_eq!(on.best().unwrap().objective(), off.best().unwrap().objective());
        assert!(off.spent.nodes >= on.spent.nodes);
    }

    #[test]
    fn two_stage_optimum_never_beats_the_greedy_lower_bound() {
        let inst = worked(Variant::QccX, 2);
        let m = build_model(&inst, &BoundSet::for_instance(&inst));
        let greedy = solve_greedy(&inst, 1).unwrap();
        let out = search(&m, Some(&greedy), &nodes(200_000)).unwrap();
        assert_eq!(out.status, SearchStatus::Optimal);
        let best = out.best().unwrap();
        assert!(validate(&inst, best).valid);
        assert!(best.makespan >= makespan_lower_bound(&inst));
        assert!(best.objective() <= greedy.objective());
    }
}
