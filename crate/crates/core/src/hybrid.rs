//! Budgeted pipelines: the router alone, the exact search alone, and two
//! ways of handing the router's best schedule to the exact search.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::BoundSet;
use crate::budget::{Budget, Incumbent, Spent};
use crate::cpsolver::{build_model, search, CpError, Model, SearchConfig, SearchStatus};
use crate::instance::Instance;
use crate::router::{solve_anytime, RouterError};
use crate::schedule::{improvement_delta, Schedule, TaskKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Anytime router for the whole budget.
    Router,
    /// Exact search from scratch for the whole budget.
    Cp,
    /// Router for half the budget, then the exact search warm-started.
    Half,
    /// Router for the whole budget; the exact search then gets whatever
    /// was left when the router found its last improvement.
    Last,
}

impl Engine {
    pub const ALL: [Engine; 4] = [Engine::Router, Engine::Cp, Engine::Half, Engine::Last];

    pub fn label(self) -> &'static str {
        match self {
            Engine::Router => "router",
            Engine::Cp => "cp",
            Engine::Half => "half",
            Engine::Last => "last",
        }
    }

    pub fn is_hybrid(self) -> bool {
        matches!(self, Engine::Half | Engine::Last)
    }
}

#[derive(Debug, Error)]
pub enum HybridError {
    #[error("budget must be positive")]
    ZeroBudget,
    #[error("router produced no schedule")]
    NoHandoff,
    #[error(transparent)]
    Router(#[from] RouterError),
    #[error(transparent)]
    Cp(#[from] CpError),
}

/// One incumbent in a stage trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TracePoint {
    /// Milliseconds since the stage started.
    pub t: u64,
    pub nodes: u64,
    pub makespan: u32,
    pub swaps: u32,
}

impl From<&Incumbent> for TracePoint {
    fn from(inc: &Incumbent) -> Self {
        TracePoint {
            t: inc.found_at.elapsed.as_millis() as u64,
            nodes: inc.found_at.nodes,
            makespan: inc.schedule.makespan,
            swaps: inc.schedule.swap_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    /// `router` or `cp`.
    pub engine: String,
    pub budget: Budget,
    pub seed: Option<u64>,
    pub trace: Vec<TracePoint>,
    pub spent: Spent,
    /// Exact search outcome; absent for the router.
    pub status: Option<SearchStatus>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    /// Proven optimal by the exact search.
    Optimal,
    /// A schedule, optimality unknown.
    Feasible,
    /// The exact search proved no schedule fits the horizon.
    Infeasible,
    /// Budget ran out before any schedule was found.
    Unsolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance_ref: String,
    pub engine: Engine,
    pub budget: Budget,
    pub seed: u64,
    pub stages: Vec<StageReport>,
    /// Schedule passed from the router to the exact search.
    pub handoff: Option<Schedule>,
    /// Budget spent before the exact search of a hybrid started.
    pub switch_at: Option<Spent>,
    pub schedule: Option<Schedule>,
    pub status: RunStatus,
    /// Makespan improvement of a hybrid over its own router stage, percent.
    pub delta: Option<f64>,
}

impl RunReport {
    pub fn objective(&self) -> Option<(u32, u32)> {
        self.schedule.as_ref().map(Schedule::objective)
    }

    pub fn makespan(&self) -> Option<u32> {
        self.schedule.as_ref().map(|s| s.makespan)
    }
}

/// Runs `engine` on `inst` within `budget`.
pub fn run(inst: &Instance, engine: Engine, budget: Budget, seed: u64) -> Result<RunReport, HybridError> {
    match engine {
        Engine::Router | Engine::Cp => run_standalone(inst, engine, budget, seed),
        Engine::Half => run_half(inst, budget, seed),
        Engine::Last => run_last(inst, budget, seed),
    }
}

fn router_seed(seed: u64) -> u64 {
    ChaCha8Rng::seed_from_u64(seed).next_u64()
}

/// Model sized so that `warm` fits: the default swap allowance per gate is
/// multiplied until it covers the busiest gate of the warm start.
pub fn model_for(inst: &Instance, warm: Option<&Schedule>) -> Model {
    let base = BoundSet::for_instance(inst);
    let busiest = warm.map_or(0, |s| {
        let mut per_gate = std::collections::HashMap::new();
        for t in s.tasks.iter().filter(|t| t.kind == TaskKind::Swap) {
            *per_gate.entry(t.location).or_insert(0u32) += 1;
        }
        per_gate.into_values().max().unwrap_or(0)
    });
    let bounds = match base.swaps_per_gate {
        0 => base,
        u if busiest > u => BoundSet::with_swap_multiplier(inst, busiest.div_ceil(u)),
        _ => base,
    };
    build_model(inst, &bounds)
}

fn router_stage(inst: &Instance, budget: Budget, seed: u64) -> Result<(StageReport, Vec<Incumbent>), HybridError> {
    let run = solve_anytime(inst, budget, seed)?;
    let stage = StageReport {
        engine: "router".into(),
        budget,
        seed: Some(seed),
        trace: run.incumbents.iter().map(TracePoint::from).collect(),
        spent: run.spent,
        status: None,
    };
    Ok((stage, run.incumbents))
}

fn cp_stage(
    inst: &Instance,
    warm: Option<&Schedule>,
    budget: Budget,
) -> Result<(StageReport, Option<Schedule>, SearchStatus), HybridError> {
    let model = model_for(inst, warm);
    let out = search(&model, warm, &SearchConfig::new(budget))?;
    let stage = StageReport {
        engine: "cp".into(),
        budget,
        seed: None,
        trace: out.incumbents.iter().map(TracePoint::from).collect(),
        spent: out.spent,
        status: Some(out.status),
    };
    Ok((stage, out.best().cloned(), out.status))
}

fn status_of(schedule: &Option<Schedule>, cp: Option<SearchStatus>) -> RunStatus {
    match (schedule, cp) {
        (Some(_), Some(SearchStatus::Optimal)) => RunStatus::Optimal,
        (Some(_), _) => RunStatus::Feasible,
        (None, Some(SearchStatus::Infeasible)) => RunStatus::Infeasible,
        (None, _) => RunStatus::Unsolved,
    }
}

/// One engine for the whole budget. The exact search starts cold.
pub fn run_standalone(inst: &Instance, engine: Engine, budget: Budget, seed: u64) -> Result<RunReport, HybridError> {
    if budget.is_zero() {
        return Err(HybridError::ZeroBudget);
    }
    let (stage, schedule, cp) = match engine {
        Engine::Cp => {
            let (stage, best, status) = cp_stage(inst, None, budget)?;
            (stage, best, Some(status))
        }
        _ => {
            let (stage, incumbents) = router_stage(inst, budget, router_seed(seed))?;
            (stage, incumbents.last().map(|i| i.schedule.clone()), None)
        }
    };
    Ok(RunReport {
        instance_ref: inst.fingerprint(),
        engine: if engine == Engine::Cp { Engine::Cp } else { Engine::Router },
        budget,
        seed,
        stages: vec![stage],
        handoff: None,
        switch_at: None,
        status: status_of(&schedule, cp),
        schedule,
        delta: None,
    })
}

fn hybrid(
    inst: &Instance,
    engine: Engine,
    budget: Budget,
    seed: u64,
    stage1_budget: Budget,
    pick: impl Fn(&[Incumbent], Spent) -> (Spent, Budget),
) -> Result<RunReport, HybridError> {
    if budget.is_zero() {
        return Err(HybridError::ZeroBudget);
    }
    let (stage1, incumbents) = router_stage(inst, stage1_budget, router_seed(seed))?;
    let handoff = incumbents.last().ok_or(HybridError::NoHandoff)?.schedule.clone();
    let (switch_at, stage2_budget) = pick(&incumbents, stage1.spent);
    let (stage2, best, status) = cp_stage(inst, Some(&handoff), stage2_budget)?;
    let schedule = best.expect("the warm start is always available");
    let delta = improvement_delta(handoff.makespan, schedule.makespan).unwrap_or(0.0);
    Ok(RunReport {
        instance_ref: inst.fingerprint(),
        engine,
        budget,
        seed,
        stages: vec![stage1, stage2],
        handoff: Some(handoff),
        switch_at: Some(switch_at),
        status: status_of(&Some(schedule.clone()), Some(status)),
        schedule: Some(schedule),
        delta: Some(delta),
    })
}

/// Router for half the budget, exact search for the rest.
pub fn run_half(inst: &Instance, budget: Budget, seed: u64) -> Result<RunReport, HybridError> {
    hybrid(inst, Engine::Half, budget, seed, budget.half(), |_, spent| {
        (spent, budget.remaining(spent))
    })
}

/// Router for the full budget; the exact search is then run from the last
/// incumbent with the budget that remained when that incumbent appeared.
/// A best-case estimate of switching at exactly the right moment.
pub fn run_last(inst: &Instance, budget: Budget, seed: u64) -> Result<RunReport, HybridError> {
    hybrid(inst, Engine::Last, budget, seed, budget, |incumbents, _| {
        let t_last = incumbents.last().map(|i| i.found_at).unwrap_or_default();
        (t_last, budget.remaining(t_last))
    })
}
