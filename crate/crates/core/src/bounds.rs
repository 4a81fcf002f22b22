//! Horizon and per-gate task-count bounds that size the interval model.

use serde::{Deserialize, Serialize};

use crate::instance::{Chip, InitialMapping, Instance, Variant, UNREACHABLE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundSet {
    /// Scheduling horizon `T` in clock cycles.
    pub horizon: u32,
    /// Optional swap tasks allocated per physical swap gate.
    pub swaps_per_gate: u32,
    /// Optional PS tasks per physical PS gate, one per goal slot.
    pub ps_tasks_per_gate: u32,
    /// Worst-case swaps needed to make two states adjacent, `2*side - 3`.
    pub max_swap_distance: u32,
    pub max_ps_duration: u32,
}

impl BoundSet {
    pub fn for_instance(inst: &Instance) -> Self {
        Self::with_swap_multiplier(inst, 1)
    }

    /// Like [`BoundSet::for_instance`] with `multiplier` times as many swap
    /// replicas per gate. The default of one replica per goal and stage can
    /// exclude optima that reuse a gate more often when goals are worked on
    /// in parallel.
    pub fn with_swap_multiplier(inst: &Instance, multiplier: u32) -> Self {
        BoundSet {
            horizon: horizon_bound(inst),
            swaps_per_gate: swap_task_bound(inst) * multiplier.max(1),
            ps_tasks_per_gate: ps_task_bound(inst),
            max_swap_distance: max_swap_distance(inst),
            max_ps_duration: inst.chip().max_ps_duration(),
        }
    }
}

/// `phi = 2*side - 3`, floored at zero for degenerate chips.
pub fn max_swap_distance(inst: &Instance) -> u32 {
    (2 * inst.chip().side_length()).saturating_sub(3)
}

/// Number of `tau_mix` windows needed to mix every state once when all
/// qubits are idle: one, or one per color class under crosstalk.
pub fn mix_rounds(inst: &Instance) -> u32 {
    if inst.variant() == Variant::QccX {
        inst.chip().color_classes().len() as u32
    } else {
        1
    }
}

/// One-stage horizon `|G| * (phi * tau_swap + tau_ps_max)`.
fn single_stage_horizon(inst: &Instance) -> u32 {
    let chip = inst.chip();
    let per_goal = max_swap_distance(inst) * chip.swap_duration() + chip.max_ps_duration();
    inst.goals().len() as u32 * per_goal
}

/// Upper bound on the optimal makespan.
///
/// Two stages: both goal blocks run back to back with the mixing window in
/// between, `2*T1 + rounds * tau_mix`.
pub fn horizon_bound(inst: &Instance) -> u32 {
    let t1 = single_stage_horizon(inst);
    match inst.stages() {
        1 => t1,
        _ => 2 * t1 + mix_rounds(inst) * inst.chip().mix_duration(),
    }
}

pub fn swap_task_bound(inst: &Instance) -> u32 {
    inst.goals().len() as u32 * inst.stages() as u32
}

/// PS task `n` of every gate is reserved for goal slot `n`.
pub fn ps_task_bound(inst: &Instance) -> u32 {
    inst.goal_slots() as u32
}

/// Earliest possible completion of a goal whose states start on `pa` and
/// `pb`: both states must reach the two ends of some edge, each moving at
/// most one hop per swap duration, and the PS gate there must run.
pub(crate) fn meeting_lower_bound(chip: &Chip, pa: usize, pb: usize) -> u32 {
    chip.edges()
        .iter()
        .flat_map(|e| [(e.u, e.v), (e.v, e.u)])
        .filter_map(|(u, v)| {
            let (da, db) = (chip.swap_distance(pa, u), chip.swap_distance(pb, v));
            (da != UNREACHABLE && db != UNREACHABLE)
                .then(|| da.max(db) * chip.swap_duration() + chip.edge(chip.edge_between(u, v).unwrap()).ps_duration)
        })
        .min()
        .unwrap_or(0)
}

/// A makespan no schedule can beat. Combines per-goal travel time with the
/// per-state chain of PS tasks (a state takes part in one gate at a time)
/// and, with two stages, the mixing window between a goal's two gates.
pub(crate) fn makespan_lower_bound(inst: &Instance) -> u32 {
    if inst.goals().is_empty() {
        return 0;
    }
    let chip = inst.chip();
    let ps_min = chip.min_ps_duration();
    let free = inst.initial_mapping() == InitialMapping::Free;
    let goal_lb = inst
        .goals()
        .iter()
        .map(|g| if free { ps_min } else { meeting_lower_bound(chip, g.0, g.1) })
        .max()
        .unwrap_or(0);
    let mut degree = vec![0u32; inst.state_count()];
    for g in inst.goals() {
        degree[g.0] += 1;
        degree[g.1] += 1;
    }
    let chain = degree.iter().copied().max().unwrap_or(0) * ps_min;
    match inst.stages() {
        1 => goal_lb.max(chain),
        _ => (goal_lb + chip.mix_duration() + ps_min).max(2 * chain + chip.mix_duration()),
    }
}

/// Fewest swaps any schedule needs: under a fixed placement, the goal whose
/// states are furthest apart still has to close that gap.
pub(crate) fn swap_lower_bound(inst: &Instance) -> u32 {
    if inst.initial_mapping() == InitialMapping::Free {
        return 0;
    }
    let chip = inst.chip();
    inst.goals()
        .iter()
        .map(|g| {
            chip.edges()
                .iter()
                .flat_map(|e| [(e.u, e.v), (e.v, e.u)])
                .map(|(u, v)| chip.swap_distance(g.0, u).saturating_add(chip.swap_distance(g.1, v)))
                .min()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}
