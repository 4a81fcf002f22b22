#![allow(dead_code)]

pub mod oracle;

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcc::bounds::BoundSet;
use qcc::cpsolver::{assignment_from_schedule, build_model, check};
use qcc::instance::{
    build_grid_chip, build_preset_chip, generate_instance, Chip, Goal, GridColoring, Instance, Variant,
};
use qcc::router::{solve_greedy_restart, solve_sequential_baseline};
use qcc::schedule::{GateTask, Location, Schedule, TaskKind};

pub fn worked_example() -> Instance {
    Instance::new(build_preset_chip("rigetti-8").unwrap(), vec![Goal(2, 3)], 1, Variant::Qcc).unwrap()
}

fn goal_sets(states: usize, max: usize) -> Vec<Vec<Goal>> {
    let pairs: Vec<Goal> = (0..states)
        .flat_map(|a| (a + 1..states).map(move |b| Goal(a, b)))
        .collect();
    let mut out = Vec::new();
    let mut pick = Vec::new();
    fn rec(pairs: &[Goal], from: usize, max: usize, pick: &mut Vec<Goal>, out: &mut Vec<Vec<Goal>>) {
        if !pick.is_empty() {
            out.push(pick.clone());
        }
        if pick.len() == max {
            return;
        }
        for i in from..pairs.len() {
            pick.push(pairs[i]);
            rec(pairs, i + 1, max, pick, out);
            pick.pop();
        }
    }
    rec(&pairs, 0, max, &mut pick, &mut out);
    out
}

/// Every goal set of up to three pairs on both 2x2 grids, all variants and
/// both stage counts; every goal set of up to two pairs on the 3x3 grid,
/// all variants, one stage.
pub fn small_suite() -> Vec<Instance> {
    let mut out = Vec::new();
    for coloring in [GridColoring::AllBlue, GridColoring::Alternating] {
        let chip = build_grid_chip(2, coloring).unwrap();
        for goals in goal_sets(4, 3) {
            for variant in Variant::ALL {
                for stages in [1, 2] {
                    out.push(Instance::new(chip.clone(), goals.clone(), stages, variant).unwrap());
                }
            }
        }
    }
    let chip = build_grid_chip(3, GridColoring::Alternating).unwrap();
    for goals in goal_sets(9, 2) {
        for variant in Variant::ALL {
            out.push(Instance::new(chip.clone(), goals.clone(), 1, variant).unwrap());
        }
    }
    out
}

pub fn chips() -> Vec<Chip> {
    vec![
        build_preset_chip("rigetti-8").unwrap(),
        build_preset_chip("rigetti-21").unwrap(),
        build_grid_chip(2, GridColoring::AllBlue).unwrap(),
        build_grid_chip(3, GridColoring::Alternating).unwrap(),
        build_grid_chip(4, GridColoring::Alternating).unwrap(),
    ]
}

/// A random instance over the presets and small grids.
pub fn random_instance(rng: &mut ChaCha8Rng, max_goals: usize) -> Instance {
    let chips = chips();
    let chip = chips.choose(rng).unwrap();
    let pairs = chip.qubit_count() * (chip.qubit_count() - 1) / 2;
    let goals = rng.gen_range(1..=max_goals.min(pairs));
    let variant = Variant::ALL[rng.gen_range(0..3)];
    let stages = rng.gen_range(1..=2);
    generate_instance(chip, goals, stages, variant, rng.gen()).unwrap()
}

/// A valid schedule from one of the routers.
pub fn random_schedule(inst: &Instance, rng: &mut ChaCha8Rng) -> Schedule {
    if rng.gen_bool(0.2) {
        solve_sequential_baseline(inst).unwrap()
    } else {
        solve_greedy_restart(inst, rng.gen(), rng.gen_bool(0.5)).unwrap()
    }
}

/// Swap multiplier making room for the busiest gate of `s`.
pub fn multiplier_for(inst: &Instance, s: &Schedule) -> u32 {
    let base = BoundSet::for_instance(inst).swaps_per_gate.max(1);
    let mut per_gate: HashMap<Location, u32> = HashMap::new();
    for t in s.tasks.iter().filter(|t| t.kind == TaskKind::Swap) {
        *per_gate.entry(t.location).or_default() += 1;
    }
    per_gate.values().max().copied().unwrap_or(0).div_ceil(base).max(1)
}

/// Whether `s` satisfies the interval model of `inst`.
pub fn model_accepts(inst: &Instance, s: &Schedule, multiplier: u32) -> bool {
    let model = build_model(inst, &BoundSet::with_swap_multiplier(inst, multiplier));
    match assignment_from_schedule(&model, s) {
        Ok(a) => check(&model, &a).is_empty(),
        Err(_) => false,
    }
}

/// One random edit of a schedule.
pub fn mutate(inst: &Instance, s: &Schedule, rng: &mut ChaCha8Rng) -> Schedule {
    let chip = inst.chip();
    let mut out = s.clone();
    let real: Vec<usize> = (0..out.tasks.len()).filter(|&i| out.tasks[i].kind != TaskKind::Init).collect();
    let pick = |rng: &mut ChaCha8Rng, ix: &[usize]| ix.choose(rng).copied();
    match rng.gen_range(0..10) {
        0 => {
            if let Some(i) = pick(rng, &real) {
                let t = &mut out.tasks[i];
                t.start = t.start.saturating_sub(rng.gen_range(1..=3));
            }
        }
        1 => {
            if let Some(i) = pick(rng, &real) {
                out.tasks[i].start += rng.gen_range(1..=3);
            }
        }
        2 => {
            if let Some(i) = pick(rng, &real) {
                out.tasks.remove(i);
            }
        }
        3 => {
            if let Some(i) = pick(rng, &real) {
                let t = out.tasks[i];
                out.tasks.push(t);
            }
        }
        4 => {
            if let Some(i) = pick(rng, &real) {
                let t = &mut out.tasks[i];
                t.duration = if t.duration > 1 && rng.gen_bool(0.5) { t.duration - 1 } else { t.duration + 1 };
            }
        }
        5 => {
            let e = chip.edges().choose(rng).unwrap();
            if let Some(i) = pick(rng, &real) {
                if let Location::Edge(..) = out.tasks[i].location {
                    out.tasks[i].location = Location::edge(e.u, e.v);
                }
            }
        }
        6 => {
            let ps: Vec<usize> = real.iter().copied().filter(|&i| out.tasks[i].kind == TaskKind::Ps).collect();
            if let Some(i) = pick(rng, &ps) {
                out.tasks[i].goal_index = Some(rng.gen_range(0..inst.goal_slots().max(1) + 1));
            }
        }
        7 => {
            let e = chip.edges().choose(rng).unwrap();
            let start = rng.gen_range(0..=out.makespan + 2);
            out.tasks.push(GateTask::swap(e.u, e.v, start, chip.swap_duration()));
        }
        8 => {
            if rng.gen_bool(0.5) {
                out.makespan = out.makespan.wrapping_add(1);
            } else {
                out.swap_count += 1;
            }
        }
        _ => {
            let stateful: Vec<usize> = (0..out.tasks.len()).filter(|&i| out.tasks[i].state.is_some()).collect();
            if let Some(i) = pick(rng, &stateful) {
                out.tasks[i].state = Some(rng.gen_range(0..chip.qubit_count()));
            } else {
                let q = rng.gen_range(0..chip.qubit_count());
                out.tasks.push(GateTask::mix(q, q, 0, chip.mix_duration()));
            }
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
