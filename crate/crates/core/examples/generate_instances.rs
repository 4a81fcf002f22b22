//! Seeded instance generation and the instance file format.

use qcc::instance::{build_grid_chip, build_preset_chip, generate_instance, read_instance, write_instance, GridColoring, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("qcc-generate-example");
    std::fs::create_dir_all(&dir)?;

    let rigetti = build_preset_chip("rigetti-8")?;
    let grid = build_grid_chip(3, GridColoring::Alternating)?;
    for (name, chip) in [("rigetti-8", &rigetti), ("grid3", &grid)] {
        for variant in Variant::ALL {
            let inst = generate_instance(chip, 6, 2, variant, 42)?;
            let path = dir.join(format!("{name}-{}.instance.json", variant.label().to_ascii_lowercase()));
            write_instance(&inst, &path)?;
            assert_eq!(read_instance(&path)?, inst);
            let goals: Vec<String> = inst.goals().iter().map(|g| format!("q{}-q{}", g.0 + 1, g.1 + 1)).collect();
            println!("{:<10} {:<6} {:?} goals {}", name, variant.label(), inst.initial_mapping(), goals.join(" "));
        }
    }

    // same seed, same instance
    assert_eq!(
        generate_instance(&rigetti, 6, 1, Variant::Qcc, 7)?,
        generate_instance(&rigetti, 6, 1, Variant::Qcc, 7)?
    );
    println!("files in {}", dir.display());
    Ok(())
}
