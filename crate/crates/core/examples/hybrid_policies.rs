//! All four engines on one instance, with their stage traces.

use qcc::budget::Budget;
use qcc::hybrid::{run, Engine};
use qcc::instance::{build_preset_chip, generate_instance, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chip = build_preset_chip("rigetti-8")?;
    let inst = generate_instance(&chip, 10, 1, Variant::QccX, 12)?;
    for engine in Engine::ALL {
        let report = run(&inst, engine, Budget::millis(1_000), 12)?;
        println!("{:<6} {:?} makespan {:?} delta {:?}", engine.label(), report.status, report.makespan(), report.delta);
        for stage in &report.stages {
            let trace: Vec<String> = stage.trace.iter().map(|p| format!("{}ms:{}", p.t, p.makespan)).collect();
            let trace = if trace.is_empty() { "no improvement".to_string() } else { trace.join(" ") };
            println!("       {:<6} {trace}", stage.engine);
        }
        if let Some(at) = report.switch_at {
            println!("       switched after {:?}", at.elapsed);
        }
    }
    Ok(())
}
