//! Brute-force optimum by breadth-first search over unit time steps.
//!
//! Every configuration at time `t` is expanded with every compatible subset
//! of startable tasks, so any integer-timed schedule is reachable. Only
//! states that appear in goals are tracked; the rest are interchangeable.
//! Mixes of states outside the goals never constrain the goal makespan and
//! are ignored. Swaps touching no state with an unstarted goal cannot help
//! and are not tried. Configurations that provably cannot beat a greedy
//! schedule are dropped.

use std::collections::HashMap;

use qcc::bounds::horizon_bound;
use qcc::instance::{InitialMapping, Instance};
use qcc::router::solve_greedy;

const DONE: u8 = u8::MAX;

#[derive(Clone, PartialEq, Eq, Hash)]
struct Config {
    /// State on each qubit plus one, zero for a goal-free state.
    occ: Vec<u8>,
    busy: Vec<u8>,
    /// Per goal slot: 0 pending, DONE, or cycles left while running.
    goals: Vec<u8>,
    /// Per state: 0 not mixed, DONE, or cycles left.
    mixed: Vec<u8>,
}

#[derive(Clone, Copy)]
enum Task {
    Swap(usize, usize),
    Ps(usize, usize, usize, u32),
    Mix(usize, usize),
}

impl Task {
    fn qubits(self) -> [usize; 2] {
        match self {
            Task::Swap(u, v) | Task::Ps(u, v, _, _) => [u, v],
            Task::Mix(q, _) => [q, q],
        }
    }
}

/// Lexicographically smallest `(makespan, swaps)` of any schedule ending
/// within the horizon, or `None` if there is none.
pub fn optimum(inst: &Instance) -> Option<(u32, u32)> {
    let chip = inst.chip();
    let n = chip.qubit_count();
    let slots = inst.goal_slots();
    let horizon = horizon_bound(inst);
    let upper = solve_greedy(inst, 0).map_or(horizon, |s| s.makespan.min(horizon));
    let ps_min = chip.min_ps_duration();
    let g_count = inst.goals().len();
    let crosstalk = inst.variant().crosstalk();
    let relevant: Vec<bool> = (0..n).map(|s| inst.state_in_goals(s)).collect();
    let tau_s = chip.swap_duration() as u8;
    let tau_mix = chip.mix_duration() as u8;

    let conflict = |a: [usize; 2], b: [usize; 2]| {
        a.iter()
            .any(|&x| b.iter().any(|&y| x == y || (crosstalk && chip.are_adjacent(x, y))))
    };

    let mut layer: HashMap<Config, u32> = HashMap::new();
    let blank = |occ: Vec<u8>| Config {
        occ,
        busy: vec![0; n],
        goals: vec![0; slots],
        mixed: vec![0; n],
    };
    match inst.initial_mapping() {
        InitialMapping::Identity => {
            let occ = (0..n).map(|s| if relevant[s] { s as u8 + 1 } else { 0 }).collect();
            layer.insert(blank(occ), 0);
        }
        InitialMapping::Free => {
            let states: Vec<usize> = (0..n).filter(|&s| relevant[s]).collect();
            let mut occ = vec![0u8; n];
            place(&states, &mut occ, &mut |occ| {
                layer.insert(blank(occ.to_vec()), 0);
            });
        }
    }

    for t in 0..=horizon {
        let finished: Vec<u32> = layer
            .iter()
            .filter(|(c, _)| c.goals.iter().all(|&g| g == DONE))
            .map(|(_, &s)| s)
            .collect();
        if let Some(&swaps) = finished.iter().min() {
            return Some((t, swaps));
        }
        if t == horizon {
            break;
        }
        let mut next: HashMap<Config, u32> = HashMap::new();
        for (c, &swaps) in &layer {
            let loc = |s: usize| c.occ.iter().position(|&x| x as usize == s + 1);
            // time still needed by the slowest goal
            let rest = (0..slots)
                .map(|o| {
                    let g = c.goals[o];
                    if g == DONE {
                        return 0;
                    }
                    if g != 0 {
                        return g as u32;
                    }
                    let goal = inst.goal_at(o);
                    let d = chip.swap_distance(loc(goal.0).unwrap(), loc(goal.1).unwrap());
                    let own = (d - 1).div_ceil(2) * tau_s as u32 + ps_min;
                    if o < g_count {
                        return own;
                    }
                    let before = match c.goals[o - g_count] {
                        DONE => 0,
                        0 => ps_min + tau_mix as u32,
                        r => r as u32 + tau_mix as u32,
                    };
                    own.max(before + ps_min)
                })
                .max()
                .unwrap_or(0);
            if t + rest > upper {
                continue;
            }
            let pending: Vec<bool> = (0..n)
                .map(|s| (0..slots).any(|o| c.goals[o] == 0 && inst.goal_at(o).involves(s)))
                .collect();
            let moves = |q: usize| c.occ[q] != 0 && pending[c.occ[q] as usize - 1];
            let free = |q: usize| {
                c.busy[q] == 0 && (!crosstalk || chip.neighbors(q).iter().all(|&x| c.busy[x] == 0))
            };
            let mut startable = Vec::new();
            for (o, &g) in c.goals.iter().enumerate() {
                if g != 0 {
                    continue;
                }
                let goal = inst.goal_at(o);
                if inst.stage_of(o) == 2 && (c.mixed[goal.0] != DONE || c.mixed[goal.1] != DONE) {
                    continue;
                }
                let (Some(a), Some(b)) = (loc(goal.0), loc(goal.1)) else { continue };
                if let Some(e) = chip.edge_between(a, b) {
                    let e = chip.edge(e);
                    if free(e.u) && free(e.v) && t + e.ps_duration <= horizon {
                        startable.push(Task::Ps(e.u, e.v, o, e.ps_duration));
                    }
                }
            }
            if inst.stages() == 2 {
                for s in (0..n).filter(|&s| relevant[s] && c.mixed[s] == 0) {
                    let ready = (0..inst.goals().len()).all(|o| !inst.goal_at(o).involves(s) || c.goals[o] == DONE);
                    let q = loc(s).unwrap();
                    if ready && free(q) {
                        startable.push(Task::Mix(q, s));
                    }
                }
            }
            for e in chip.edges().iter().filter(|e| e.swap_enabled) {
                if (moves(e.u) || moves(e.v)) && free(e.u) && free(e.v) {
                    startable.push(Task::Swap(e.u, e.v));
                }
            }

            let mut chosen: Vec<Task> = Vec::new();
            subsets(&startable, 0, &mut chosen, &conflict, &mut |tasks| {
                let mut d = c.clone();
                let mut added = 0;
                for &task in tasks {
                    match task {
                        Task::Swap(u, v) => {
                            d.occ.swap(u, v);
                            d.busy[u] = tau_s;
                            d.busy[v] = tau_s;
                            added += 1;
                        }
                        Task::Ps(u, v, o, dur) => {
                            d.busy[u] = dur as u8;
                            d.busy[v] = dur as u8;
                            d.goals[o] = dur as u8;
                        }
                        Task::Mix(q, s) => {
                            d.busy[q] = tau_mix;
                            d.mixed[s] = tau_mix;
                        }
                    }
                }
                tick(&mut d);
                let e = next.entry(d).or_insert(u32::MAX);
                *e = (*e).min(swaps + added);
            });
        }
        layer = next;
    }
    None
}

fn tick(c: &mut Config) {
    for x in c.busy.iter_mut().chain(c.goals.iter_mut()).chain(c.mixed.iter_mut()) {
        if *x != 0 && *x != DONE {
            *x -= 1;
            if *x == 0 {
                *x = DONE;
            }
        }
    }
    for b in c.busy.iter_mut() {
        if *b == DONE {
            *b = 0;
        }
    }
}

fn place(states: &[usize], occ: &mut [u8], out: &mut impl FnMut(&[u8])) {
    let Some((&s, rest)) = states.split_first() else {
        out(occ);
        return;
    };
    for q in 0..occ.len() {
        if occ[q] == 0 {
            occ[q] = s as u8 + 1;
            place(rest, occ, out);
            occ[q] = 0;
        }
    }
}

fn subsets(
    tasks: &[Task],
    from: usize,
    chosen: &mut Vec<Task>,
    conflict: &impl Fn([usize; 2], [usize; 2]) -> bool,
    out: &mut impl FnMut(&[Task]),
) {
    if from == tasks.len() {
        out(chosen);
        return;
    }
    subsets(tasks, from + 1, chosen, conflict, out);
    let t = tasks[from];
    if chosen.iter().all(|c| !conflict(c.qubits(), t.qubits())) {
        chosen.push(t);
        subsets(tasks, from + 1, chosen, conflict, out);
        chosen.pop();
    }
}
