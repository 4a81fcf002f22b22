//! Benchmark harness, score tables, Gantt charts and the command line.

pub mod cli;
pub mod gantt;
pub mod matrix;

pub use cli::run_cli;
pub use gantt::{chart, gantt, render_svg, render_text, Block, BlockKind, Blocked, Chart, GanttError, GanttFormat};
pub use matrix::{
    build_table, class_of, load_suite, run_matrix, BenchError, Cell, MatrixConfig, MatrixEntry, ResultsTable,
    SuiteEntry,
};
