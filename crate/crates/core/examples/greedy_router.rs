//! The routers: sequential baseline, seeded greedy, and the
//! anytime restart loop.

use qcc::budget::Budget;
use qcc::instance::{build_preset_chip, generate_instance, Variant};
use qcc::router::{solve_anytime_with, solve_greedy, solve_sequential_baseline};
use qcc::schedule::validate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chip = build_preset_chip("rigetti-21")?;
    for variant in Variant::ALL {
        let inst = generate_instance(&chip, 20, 1, variant, 3)?;
        let baseline = solve_sequential_baseline(&inst)?;
        let greedy = solve_greedy(&inst, 3)?;
        assert!(validate(&inst, &greedy).valid);
        println!("{} baseline {} greedy {}", variant.label(), baseline.makespan, greedy.makespan);

        let run = solve_anytime_with(&inst, Budget::millis(300), 3, |inc| {
            println!(
                "  {:>8.1?} makespan {:>3} swaps {:>3}",
                inc.found_at.elapsed, inc.schedule.makespan, inc.schedule.swap_count
            );
        })?;
        println!("  {} restarts, best {}", run.restarts, run.best().schedule.makespan);
    }
    Ok(())
}
