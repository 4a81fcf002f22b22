//! Horizon and task-count bounds, checked against the sequential baseline
//! that proves them.

use qcc::bounds::{horizon_bound, ps_task_bound, swap_task_bound, BoundSet};
use qcc::instance::{build_preset_chip, generate_instance, Variant};
use qcc::router::solve_sequential_baseline;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:<11} {:>5} {:>6} {:>8} {:>6} {:>5} {:>9}", "chip", "goals", "stages", "horizon", "swaps", "ps", "baseline");
    for name in ["rigetti-8", "rigetti-21"] {
        let chip = build_preset_chip(name)?;
        for goals in [1, 5, 10] {
            for stages in [1, 2] {
                let inst = generate_instance(&chip, goals, stages, Variant::Qcc, goals as u64)?;
                let baseline = solve_sequential_baseline(&inst)?;
                let horizon = horizon_bound(&inst);
                assert!(baseline.makespan <= horizon);
                println!(
                    "{:<11} {:>5} {:>6} {:>8} {:>6} {:>5} {:>9}",
                    name,
                    goals,
                    stages,
                    horizon,
                    swap_task_bound(&inst),
                    ps_task_bound(&inst),
                    baseline.makespan
                );
            }
        }
    }
    let inst = generate_instance(&build_preset_chip("rigetti-8")?, 3, 1, Variant::Qcc, 0)?;
    println!("{:?}", BoundSet::with_swap_multiplier(&inst, 2));
    Ok(())
}
