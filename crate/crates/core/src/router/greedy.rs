use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{earliest_in, meeting_edges, solve_sequential_baseline, RouterError, Timeline};
use crate::bounds::horizon_bound;
use crate::instance::{Chip, InitialMapping, Instance};
use crate::schedule::{GateTask, Schedule};

/// Event-driven greedy routing with seeded tie-breaking.
///
/// Repeatedly routes the pending goal whose states are currently closest,
/// trying every meeting edge and keeping the one that completes first. Under
/// free placement the states are first assigned to qubits so that goal
/// partners sit close together. Falls back to the sequential baseline if the
/// result would not fit in the horizon.
pub fn solve_greedy(inst: &Instance, seed: u64) -> Result<Schedule, RouterError> {
    solve_greedy_restart(inst, seed, false)
}

/// As [`solve_greedy`]; with `noisy` set, goal order and placement are
/// randomly perturbed so that restarts explore different schedules.
pub fn solve_greedy_restart(inst: &Instance, seed: u64, noisy: bool) -> Result<Schedule, RouterError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let placement = match inst.initial_mapping() {
        InitialMapping::Identity => (0..inst.chip().qubit_count()).collect(),
        InitialMapping::Free => place_states(inst, &mut rng, noisy),
    };
    let s = route(inst, placement, &mut rng, noisy)?;
    if s.total_span() > horizon_bound(inst) {
        return solve_sequential_baseline(inst);
    }
    Ok(s)
}

/// Greedy placement for free initial mappings; returns the state on each
/// qubit.
fn place_states(inst: &Instance, rng: &mut ChaCha8Rng, noisy: bool) -> Vec<usize> {
    let chip = inst.chip();
    let n = chip.qubit_count();
    let mut degree = vec![0usize; n];
    for g in inst.goals() {
        degree[g.0] += 1;
        degree[g.1] += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.sort_by_key(|&s| std::cmp::Reverse(degree[s]));

    let centrality: Vec<u32> = (0..n)
        .map(|q| (0..n).map(|p| chip.swap_distance(q, p)).sum())
        .collect();
    let mut qubit_of: Vec<Option<usize>> = vec![None; n];
    let mut free: Vec<bool> = vec![true; n];
    for &s in &order {
        let partners: Vec<usize> = inst
            .goals()
            .iter()
            .filter(|g| g.involves(s))
            .filter_map(|g| qubit_of[if g.0 == s { g.1 } else { g.0 }])
            .collect();
        let cost = |q: usize| -> (u32, u32, u32) {
            let dist: u32 = partners.iter().map(|&p| chip.swap_distance(q, p)).sum();
            // prefer short PS edges to already placed partners
            let ps: u32 = partners
                .iter()
                .filter_map(|&p| chip.edge_between(q, p))
                .map(|e| chip.edge(e).ps_duration)
                .sum();
            (dist, ps, centrality[q])
        };
        let mut best: Vec<usize> = Vec::new();
        let mut best_cost = (u32::MAX, u32::MAX, u32::MAX);
        for q in (0..n).filter(|&q| free[q]) {
            let c = if degree[s] == 0 { (0, 0, 0) } else { cost(q) };
            if c < best_cost {
                best_cost = c;
                best.clear();
            }
            if c == best_cost {
                best.push(q);
            }
        }
        let q = if noisy && degree[s] > 0 && rng.gen_bool(0.2) {
            let mut open: Vec<usize> = (0..n).filter(|&q| free[q]).collect();
            open.sort_by_key(|&q| cost(q));
            open[rng.gen_range(0..open.len().min(3))]
        } else {
            best[rng.gen_range(0..best.len())]
        };
        qubit_of[s] = Some(q);
        free[q] = false;
    }
    let mut placement = vec![0; n];
    for (s, q) in qubit_of.into_iter().enumerate() {
        placement[q.expect("every state placed")] = s;
    }
    placement
}

fn route(inst: &Instance, placement: Vec<usize>, rng: &mut ChaCha8Rng, noisy: bool) -> Result<Schedule, RouterError> {
    let chip = inst.chip();
    let n = chip.qubit_count();
    let g = inst.goals().len();
    let slots = inst.goal_slots();
    let mut tl = Timeline::new(inst, placement);
    let mut done = vec![false; slots];
    let mut mixed = vec![false; n];
    let two_stage = inst.stages() == 2;

    for _ in 0..slots {
        let available: Vec<usize> = (0..slots)
            .filter(|&o| !done[o])
            .filter(|&o| {
                let goal = inst.goal_at(o);
                o < g || (mixed[goal.0] && mixed[goal.1])
            })
            .collect();
        let key = |o: usize| {
            let goal = inst.goal_at(o);
            let (pa, pb) = (tl.loc[goal.0], tl.loc[goal.1]);
            (chip.swap_distance(pa, pb), tl.release[pa].max(tl.release[pb]))
        };
        let mut ranked: Vec<(u32, u32, u64, usize)> = available
            .iter()
            .map(|&o| {
                let (d, r) = key(o);
                (d, r, rng.gen::<u64>(), o)
            })
            .collect();
        ranked.sort_unstable();
        let pick = if noisy && ranked.len() > 1 && rng.gen_bool(0.3) {
            ranked[rng.gen_range(0..ranked.len().min(3))].3
        } else {
            ranked[0].3
        };

        route_goal(inst, &mut tl, pick, rng)?;
        done[pick] = true;

        if two_stage && pick < g {
            let goal = inst.goal_at(pick);
            for s in [goal.0, goal.1] {
                let finished = inst.slots_involving(s).filter(|&o| o < g).all(|o| done[o]);
                if finished && !mixed[s] {
                    tl.mix(s, 0);
                    mixed[s] = true;
                }
            }
        }
    }
    if two_stage {
        for s in 0..n {
            if !mixed[s] {
                tl.mix(s, 0);
            }
        }
    }
    Ok(tl.finish(inst))
}

/// Routes goal slot `o` along the meeting edge with the earliest simulated
/// completion.
fn route_goal(inst: &Instance, tl: &mut Timeline, o: usize, rng: &mut ChaCha8Rng) -> Result<(), RouterError> {
    let chip = inst.chip();
    let crosstalk = inst.variant().crosstalk();
    let goal = inst.goal_at(o);
    let (pa, pb) = (tl.loc[goal.0], tl.loc[goal.1]);
    let edges = meeting_edges(chip, pa, pb).map_err(|_| RouterError::Unreachable(goal))?;

    let mut best: Option<((u32, usize, u64), Vec<GateTask>)> = None;
    for (u, v) in edges {
        let plan = plan_meeting(chip, crosstalk, &tl.release, pa, pb, u, v, o);
        let end = plan.last().map_or(0, GateTask::end);
        let key = (end, plan.len(), rng.gen::<u64>());
        if best.as_ref().map_or(true, |(k, _)| key < *k) {
            best = Some((key, plan));
        }
    }
    let (_, plan) = best.expect("a reachable pair has a meeting edge");
    for t in plan {
        let (a, b) = match t.location {
            crate::schedule::Location::Edge(a, b) => (a, b),
            crate::schedule::Location::Qubit(_) => unreachable!("plans hold edge tasks only"),
        };
        match t.kind {
            crate::schedule::TaskKind::Swap => {
                tl.swap(a, b, t.start);
            }
            _ => {
                tl.ps(a, b, o, t.start);
            }
        }
    }
    Ok(())
}

/// Swaps walking both states to `(u, v)` followed by the PS task, timed on a
/// copy of the release vector. Walks alternate step by step and each step
/// prefers the next hop that frees up first.
#[allow(clippy::too_many_arguments)]
fn plan_meeting(
    chip: &Chip,
    crosstalk: bool,
    release: &[u32],
    pa: usize,
    pb: usize,
    u: usize,
    v: usize,
    o: usize,
) -> Vec<GateTask> {
    let mut release = release.to_vec();
    let mut plan = Vec::new();
    let (mut ca, mut cb) = (pa, pb);
    let place = |release: &mut Vec<u32>, plan: &mut Vec<GateTask>, a: usize, b: usize, dur: u32, ps: bool| {
        let start = earliest_in(chip, crosstalk, release, &[a, b], 0);
        let t = if ps {
            GateTask::ps(a, b, start, dur, o)
        } else {
            GateTask::swap(a, b, start, dur)
        };
        release[a] = t.end();
        release[b] = t.end();
        plan.push(t);
    };
    let step = |release: &[u32], cur: usize, to: usize| -> usize {
        let d = chip.swap_distance(cur, to);
        chip.neighbors(cur)
            .iter()
            .copied()
            .filter(|&nb| {
                chip.edge(chip.edge_between(cur, nb).unwrap()).swap_enabled && chip.swap_distance(nb, to) + 1 == d
            })
            .min_by_key(|&nb| (release[nb], nb))
            .expect("a shortest path continues")
    };
    while ca != u || cb != v {
        if ca != u {
            let next = step(&release, ca, u);
            place(&mut release, &mut plan, ca, next, chip.swap_duration(), false);
            ca = next;
        }
        if cb != v {
            let next = step(&release, cb, v);
            place(&mut release, &mut plan, cb, next, chip.swap_duration(), false);
            cb = next;
        }
    }
    let ps = chip.edge(chip.edge_between(u, v).unwrap()).ps_duration;
    place(&mut release, &mut plan, u, v, ps, true);
    plan
}
