use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{solve_greedy_restart, solve_sequential_baseline, RouterError};
use crate::bounds::{makespan_lower_bound, swap_lower_bound};
use crate::budget::{Budget, Incumbent, Meter, Spent};
use crate::instance::Instance;
use crate::schedule::Schedule;

/// Node cost charged per greedy restart under a node budget.
pub const NODES_PER_RESTART: u64 = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnytimeRun {
    /// Strictly improving in `(makespan, swap_count)`.
    pub incumbents: Vec<Incumbent>,
    pub spent: Spent,
    pub restarts: u64,
}

impl AnytimeRun {
    pub fn best(&self) -> &Incumbent {
        self.incumbents.last().expect("the baseline is always recorded")
    }
}

/// Baseline first, then randomized greedy restarts until the budget runs out
/// or a schedule meets the lower bounds on both makespan and swaps.
pub fn solve_anytime(inst: &Instance, budget: Budget, seed: u64) -> Result<AnytimeRun, RouterError> {
    solve_anytime_with(inst, budget, seed, |_| {})
}

/// As [`solve_anytime`], calling `on_incumbent` for every improvement.
pub fn solve_anytime_with(
    inst: &Instance,
    budget: Budget,
    seed: u64,
    mut on_incumbent: impl FnMut(&Incumbent),
) -> Result<AnytimeRun, RouterError> {
    let mut meter = Meter::new(budget);
    let mut incumbents: Vec<Incumbent> = Vec::new();
    let lower = (makespan_lower_bound(inst), swap_lower_bound(inst));
    let mut offer = |s: Schedule, meter: &Meter, incumbents: &mut Vec<Incumbent>| {
        if incumbents.last().map_or(true, |b| s.objective() < b.schedule.objective()) {
            let inc = Incumbent {
                schedule: s,
                found_at: meter.spent(),
            };
            on_incumbent(&inc);
            incumbents.push(inc);
        }
    };

    offer(solve_sequential_baseline(inst)?, &meter, &mut incumbents);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut restarts = 0;
    let settled = |incumbents: &Vec<Incumbent>| {
        incumbents.last().unwrap().schedule.objective() <= lower
    };
    while !budget.is_zero() && !meter.exhausted() && !settled(&incumbents) {
        let s = solve_greedy_restart(inst, rng.gen(), restarts > 0)?;
        restarts += 1;
        meter.charge(NODES_PER_RESTART);
        offer(s, &meter, &mut incumbents);
    }
    Ok(AnytimeRun {
        incumbents,
        spent: meter.spent(),
        restarts,
    })
}
