//! The interval model and branch-and-bound search: cold, then warm-started
//! from a router schedule.

use qcc::bounds::BoundSet;
use qcc::budget::Budget;
use qcc::cpsolver::{build_model, propagate, search_with, warm_start, SearchConfig};
use qcc::hybrid::model_for;
use qcc::instance::{build_preset_chip, generate_instance, Variant};
use qcc::router::solve_greedy;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chip = build_preset_chip("rigetti-8")?;
    let inst = generate_instance(&chip, 6, 1, Variant::Qcc, 5)?;

    let model = build_model(&inst, &BoundSet::for_instance(&inst));
    println!("{} interval variables, {} constraints", model.vars.len(), model.constraints.len());
    let mut narrowed = model.clone();
    println!("root propagation: {:?}", propagate(&mut narrowed));

    let cfg = SearchConfig::new(Budget::millis(2_000));
    let cold = search_with(&model, None, &cfg, |inc| {
        println!("  cold {:>7} nodes: makespan {}", inc.found_at.nodes, inc.schedule.makespan)
    })?;
    println!("cold: {:?} {:?}", cold.status, cold.best().map(|s| s.objective()));

    let warm = solve_greedy(&inst, 1)?;
    let model = model_for(&inst, Some(&warm));
    warm_start(&model, &warm)?;
    let hot = search_with(&model, Some(&warm), &cfg, |inc| {
        println!("  warm {:>7} nodes: makespan {}", inc.found_at.nodes, inc.schedule.makespan)
    })?;
    println!("warm from {:?}: {:?} {:?}", warm.objective(), hot.status, hot.best().map(|s| s.objective()));
    Ok(())
}
