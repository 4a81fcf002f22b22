//! Benchmark matrix: every engine on every instance of a suite, one report
//! file per pair, folded into a score table.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::Budget;
use crate::hybrid::{run, Engine, RunReport};
use crate::instance::{read_instance, Instance, InstanceError};
use crate::schedule::{score, validate};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("suite is empty")]
    EmptySuite,
    #[error("{path}: {source}")]
    Instance { path: PathBuf, source: InstanceError },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One instance of a suite, identified by its file stem.
#[derive(Debug, Clone)]
pub struct SuiteEntry {
    pub id: String,
    pub instance: Instance,
}

/// Problem class used for table columns, e.g. `QCC-X 8q s1`.
pub fn class_of(inst: &Instance) -> String {
    format!(
        "{} {}q s{}",
        inst.variant(),
        inst.chip().qubit_count(),
        inst.stages()
    )
}

/// Reads every `*.instance.json` in `dir`, sorted by file name.
pub fn load_suite(dir: impl AsRef<Path>) -> Result<Vec<SuiteEntry>, BenchError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.to_string_lossy().ends_with(".instance.json"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let instance = read_instance(&path).map_err(|source| BenchError::Instance {
                path: path.clone(),
                source,
            })?;
            let name = path.file_name().unwrap().to_string_lossy();
            let id = name.trim_end_matches(".instance.json").to_string();
            Ok(SuiteEntry { id, instance })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct MatrixConfig {
    pub engines: Vec<Engine>,
    /// Budget for instances up to `large_from` qubits.
    pub budget: Budget,
    /// Budget for chips with at least `large_from` qubits.
    pub large_budget: Budget,
    pub large_from: usize,
    pub seed: u64,
    pub workers: usize,
    /// Where reports are stored and reused from.
    pub out_dir: PathBuf,
}

impl MatrixConfig {
    pub fn new(engines: Vec<Engine>, budget: Budget, out_dir: impl Into<PathBuf>) -> Self {
        MatrixConfig {
            engines,
            budget,
            large_budget: budget,
            large_from: usize::MAX,
            seed: 0,
            workers: 1,
            out_dir: out_dir.into(),
        }
    }

    fn budget_for(&self, inst: &Instance) -> Budget {
        if inst.chip().qubit_count() >= self.large_from {
            self.large_budget
        } else {
            self.budget
        }
    }
}

/// Result of one (instance, engine) cell: a report or the error that
/// stopped the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixEntry {
    pub id: String,
    pub class: String,
    pub engine: Engine,
    pub outcome: Result<RunReport, String>,
}

fn report_path(dir: &Path, id: &str, engine: Engine) -> PathBuf {
    dir.join(format!("{id}.{}.report.json", engine.label()))
}

fn run_cell(entry: &SuiteEntry, engine: Engine, cfg: &MatrixConfig) -> MatrixEntry {
    let path = report_path(&cfg.out_dir, &entry.id, engine);
    let stored = fs::read_to_string(&path)
        .ok()
        .and_then(|text| serde_json::from_str::<RunReport>(&text).ok())
        .filter(|r| r.instance_ref == entry.instance.fingerprint());
    let outcome = match stored {
        Some(r) => Ok(r),
        None => match run(&entry.instance, engine, cfg.budget_for(&entry.instance), cfg.seed) {
            Ok(r) => {
                let bad = r
                    .schedule
                    .as_ref()
                    .map(|s| validate(&entry.instance, s))
                    .filter(|v| !v.valid);
                match bad {
                    Some(v) => Err(format!("engine returned an invalid schedule: {v}")),
                    None => {
                        let text = serde_json::to_string_pretty(&r).expect("reports serialize");
                        match fs::write(&path, text + "\n") {
                            Ok(()) => Ok(r),
                            Err(e) => Err(format!("cannot store report: {e}")),
                        }
                    }
                }
            }
            Err(e) => Err(e.to_string()),
        },
    };
    MatrixEntry {
        id: entry.id.clone(),
        class: class_of(&entry.instance),
        engine,
        outcome,
    }
}

/// Runs (or reloads) every cell and folds the results into a table.
/// Failures are recorded in their cell and never stop the matrix.
pub fn run_matrix(suite: &[SuiteEntry], cfg: &MatrixConfig) -> Result<(Vec<MatrixEntry>, ResultsTable), BenchError> {
    if suite.is_empty() {
        return Err(BenchError::EmptySuite);
    }
    fs::create_dir_all(&cfg.out_dir)?;
    let cells: Vec<(usize, Engine)> = (0..suite.len())
        .flat_map(|i| cfg.engines.iter().map(move |&e| (i, e)))
        .collect();
    let next = AtomicUsize::new(0);
    let done = Mutex::new(Vec::with_capacity(cells.len()));
    std::thread::scope(|scope| {
        for _ in 0..cfg.workers.max(1) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, engine)) = cells.get(k) else { break };
                let entry = run_cell(&suite[i], engine, cfg);
                done.lock().unwrap().push((k, entry));
            });
        }
    });
    let mut done = done.into_inner().unwrap();
    done.sort_by_key(|(k, _)| *k);
    let entries: Vec<MatrixEntry> = done.into_iter().map(|(_, e)| e).collect();
    let table = build_table(&entries);
    Ok((entries, table))
}

/// One cell of the score table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub instances: usize,
    pub solved: usize,
    /// Mean score over solved instances.
    pub score: f64,
    /// Hybrids only: mean improvement over their router stage, percent.
    pub delta: Option<f64>,
    pub improved: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub classes: Vec<String>,
    pub engines: Vec<Engine>,
    /// `cells[engine][class]`.
    pub cells: BTreeMap<Engine, BTreeMap<String, Cell>>,
    /// Best makespan per instance over the whole matrix.
    pub best_known: BTreeMap<String, u32>,
}

/// Score of `makespan` against `best`; an empty goal set scores one.
fn cell_score(best: u32, makespan: u32) -> f64 {
    if best == 0 && makespan == 0 {
        1.0
    } else {
        score(best, makespan).unwrap_or(0.0)
    }
}

/// Pure fold over matrix entries.
pub fn build_table(entries: &[MatrixEntry]) -> ResultsTable {
    let mut best_known: BTreeMap<String, u32> = BTreeMap::new();
    for e in entries {
        if let Some(m) = e.outcome.as_ref().ok().and_then(RunReport::makespan) {
            let b = best_known.entry(e.id.clone()).or_insert(m);
            *b = (*b).min(m);
        }
    }
    let mut classes: Vec<String> = entries.iter().map(|e| e.class.clone()).collect();
    classes.sort();
    classes.dedup();
    let mut engines: Vec<Engine> = entries.iter().map(|e| e.engine).collect();
    engines.sort();
    engines.dedup();

    let mut cells: BTreeMap<Engine, BTreeMap<String, Cell>> = BTreeMap::new();
    for &engine in &engines {
        for class in &classes {
            let mine: Vec<&MatrixEntry> = entries
                .iter()
                .filter(|e| e.engine == engine && &e.class == class)
                .collect();
            let mut scores = Vec::new();
            let mut deltas = Vec::new();
            for e in &mine {
                let Ok(r) = &e.outcome else { continue };
                if let Some(m) = r.makespan() {
                    scores.push(cell_score(best_known[&e.id], m));
                }
                if let Some(d) = r.delta {
                    deltas.push(d);
                }
            }
            let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
            cells.entry(engine).or_default().insert(
                class.clone(),
                Cell {
                    instances: mine.len(),
                    solved: scores.len(),
                    score: mean(&scores),
                    delta: engine.is_hybrid().then(|| mean(&deltas)),
                    improved: deltas.iter().filter(|&&d| d > 0.0).count(),
                },
            );
        }
    }
    ResultsTable {
        classes,
        engines,
        cells,
        best_known,
    }
}

impl fmt::Display for ResultsTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const W: usize = 16;
        write!(f, "{:<8}", "engine")?;
        for c in &self.classes {
            write!(f, " {c:>W$}")?;
        }
        writeln!(f)?;
        for engine in &self.engines {
            write!(f, "{:<8}", engine.label())?;
            for c in &self.classes {
                let cell = &self.cells[engine][c];
                write!(f, " {:>W$}", format!("{:.2} ({})", cell.score, cell.solved))?;
            }
            writeln!(f)?;
            if engine.is_hybrid() {
                write!(f, "{:<8}", "  delta")?;
                for c in &self.classes {
                    let cell = &self.cells[engine][c];
                    let d = cell.delta.unwrap_or(0.0);
                    write!(f, " {:>W$}", format!("{d:.1}% ({})", cell.improved))?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}
