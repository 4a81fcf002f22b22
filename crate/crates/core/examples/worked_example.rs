//! The single-goal example on the 8-qubit preset: two parallel swaps bring
//! states 3 and 4 together, then one blue gate. Builds the schedule by hand,
//! replays it, validates it and proves it optimal.

use qcc::bounds::BoundSet;
use qcc::budget::Budget;
use qcc::cpsolver::{build_model, search, SearchConfig};
use qcc::instance::{build_preset_chip, Goal, Instance, Variant};
use qcc::schedule::{simulate_states, validate, GateTask, Schedule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chip = build_preset_chip("rigetti-8")?;
    // ids are 0-based in code, 1-based in files and output
    let inst = Instance::new(chip, vec![Goal(2, 3)], 1, Variant::Qcc)?;

    let tau = inst.chip().swap_duration();
    let blue = inst.chip().edges()[inst.chip().edge_between(0, 1).unwrap()].ps_duration;
    let schedule = Schedule::from_tasks(
        &inst,
        vec![
            GateTask::swap(3, 0, 0, tau),
            GateTask::swap(1, 2, 0, tau),
            GateTask::ps(0, 1, tau, blue, 0),
        ],
    );

    let trace = simulate_states(&inst, &schedule)?;
    println!(
        "at t={tau}: qubit 1 holds state {}, qubit 2 holds state {}",
        trace.state_at(0, tau) + 1,
        trace.state_at(1, tau) + 1
    );
    println!("validator: {}", validate(&inst, &schedule));
    println!("makespan {} with {} swaps", schedule.makespan, schedule.swap_count);

    let model = build_model(&inst, &BoundSet::for_instance(&inst));
    let out = search(&model, None, &SearchConfig::new(Budget::millis(10_000)))?;
    let best = out.best().expect("a single goal is always reachable");
    println!("exact search: {:?}, makespan {} in {} nodes", out.status, best.makespan, out.spent.nodes);
    Ok(())
}
