//! A small benchmark matrix: generate a suite, run every engine on it and
//! print the score table.

use qcc::bench::{load_suite, run_matrix, MatrixConfig};
use qcc::budget::Budget;
use qcc::hybrid::Engine;
use qcc::instance::{build_preset_chip, generate_instance, write_instance, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("qcc-bench-example");
    let _ = std::fs::remove_dir_all(&dir);
    let suite_dir = dir.join("suite");
    std::fs::create_dir_all(&suite_dir)?;
    let chip = build_preset_chip("rigetti-8")?;
    for variant in Variant::ALL {
        for seed in 0..3 {
            let inst = generate_instance(&chip, 8, 1, variant, seed)?;
            let name = format!("r8-{}-{seed}.instance.json", variant.label().to_ascii_lowercase());
            write_instance(&inst, suite_dir.join(name))?;
        }
    }

    let suite = load_suite(&suite_dir)?;
    let mut cfg = MatrixConfig::new(Engine::ALL.to_vec(), Budget::Nodes(20_000), dir.join("runs"));
    cfg.workers = 2;
    let (entries, table) = run_matrix(&suite, &cfg)?;
    println!("{} runs", entries.len());
    print!("{table}");
    Ok(())
}
