//! Crosstalk scheduling drawn as a Gantt chart, as text and SVG.

use qcc::budget::Budget;
use qcc::hybrid::{run, Engine};
use qcc::bench::{gantt, GanttFormat};
use qcc::instance::{build_preset_chip, generate_instance, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chip = build_preset_chip("rigetti-8")?;
    for variant in [Variant::Qcc, Variant::QccX] {
        let inst = generate_instance(&chip, 5, 1, variant, 4)?;
        let report = run(&inst, Engine::Half, Budget::millis(500), 4)?;
        let schedule = report.schedule.expect("the router always answers");
        println!("{} makespan {}", variant.label(), schedule.makespan);
        print!("{}", gantt(&inst, &schedule, GanttFormat::Text)?);
        let svg = std::env::temp_dir().join(format!("qcc-{}.svg", variant.label().to_ascii_lowercase()));
        std::fs::write(&svg, gantt(&inst, &schedule, GanttFormat::Svg)?)?;
        println!("wrote {}\n", svg.display());
    }
    Ok(())
}
