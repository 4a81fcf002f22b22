//! Post-hoc Gantt charts: one row per qubit, clock cycles left to right.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{Instance, PsColor};
use crate::schedule::{validate, Location, Schedule, TaskKind, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GanttFormat {
    Text,
    Svg,
}

#[derive(Debug, Error)]
pub enum GanttError {
    #[error("refusing to draw an invalid schedule:\n{0}")]
    Invalid(ValidationReport),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Swap,
    PsBlue,
    PsRed,
    Mix,
}

/// One gate drawn across the rows of the qubits it uses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub kind: BlockKind,
    pub rows: Vec<usize>,
    pub start: u32,
    pub end: u32,
    pub label: String,
}

/// A qubit kept idle by crosstalk from a gate on a neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Blocked {
    pub row: usize,
    pub start: u32,
    pub end: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chart {
    pub rows: Vec<String>,
    pub width: u32,
    pub blocks: Vec<Block>,
    pub blocked: Vec<Blocked>,
    /// Initial state of each row under free placement.
    pub init: Vec<Option<usize>>,
}

/// Lays out a valid schedule.
pub fn chart(inst: &Instance, schedule: &Schedule) -> Result<Chart, GanttError> {
    let report = validate(inst, schedule);
    if !report.valid {
        return Err(GanttError::Invalid(report));
    }
    let chip = inst.chip();
    let n = chip.qubit_count();
    let mut blocks = Vec::new();
    let mut blocked = Vec::new();
    let mut init = vec![None; n];
    for t in &schedule.tasks {
        let kind = match (t.kind, t.location) {
            (TaskKind::Init, Location::Qubit(q)) => {
                init[q] = t.state;
                continue;
            }
            (TaskKind::Swap, _) => BlockKind::Swap,
            (TaskKind::Mix, _) => BlockKind::Mix,
            (TaskKind::Ps, Location::Edge(u, v)) => {
                match chip.edge_between(u, v).map(|e| chip.edge(e).ps_color) {
                    Some(PsColor::Red) => BlockKind::PsRed,
                    _ => BlockKind::PsBlue,
                }
            }
            _ => continue,
        };
        let rows: Vec<usize> = t.location.qubits().collect();
        if inst.variant().crosstalk() {
            let mut around: Vec<usize> = rows
                .iter()
                .flat_map(|&q| chip.neighbors(q).iter().copied())
                .filter(|x| !rows.contains(x))
                .collect();
            around.sort_unstable();
            around.dedup();
            blocked.extend(around.into_iter().map(|row| Blocked {
                row,
                start: t.start,
                end: t.end(),
            }));
        }
        let label = match t.kind {
            TaskKind::Ps => format!("g{}", t.goal_index.map_or(0, |g| g + 1)),
            TaskKind::Mix => format!("q{}", t.state.map_or(0, |s| s + 1)),
            _ => String::new(),
        };
        blocks.push(Block {
            kind,
            rows,
            start: t.start,
            end: t.end(),
            label,
        });
    }
    Ok(Chart {
        rows: (0..n).map(|q| format!("n{}", q + 1)).collect(),
        width: schedule.total_span(),
        blocks,
        blocked,
        init,
    })
}

/// Renders a valid schedule as text or SVG.
pub fn gantt(inst: &Instance, schedule: &Schedule, format: GanttFormat) -> Result<String, GanttError> {
    let c = chart(inst, schedule)?;
    Ok(match format {
        GanttFormat::Text => render_text(&c),
        GanttFormat::Svg => render_svg(&c),
    })
}

fn glyph(kind: BlockKind) -> char {
    match kind {
        BlockKind::Swap => '=',
        BlockKind::PsBlue => 'B',
        BlockKind::PsRed => 'R',
        BlockKind::Mix => 'm',
    }
}

/// `=` swap, `B`/`R` blue/red PS, `m` mix, `x` blocked by crosstalk.
pub fn render_text(c: &Chart) -> String {
    let w = c.width as usize;
    let mut grid = vec![vec!['.'; w]; c.rows.len()];
    for b in &c.blocked {
        for cell in &mut grid[b.row][b.start as usize..b.end as usize] {
            *cell = 'x';
        }
    }
    for b in &c.blocks {
        for &r in &b.rows {
            for cell in &mut grid[r][b.start as usize..b.end as usize] {
                *cell = glyph(b.kind);
            }
        }
    }
    let name_w = c.rows.iter().map(String::len).max().unwrap_or(0);
    let mut out = String::new();
    let mut axis = String::new();
    for t in 0..=w {
        axis.push(if t % 5 == 0 { '|' } else { ' ' });
    }
    let _ = writeln!(out, "{:name_w$}     {axis}", "");
    let mut ticks = String::new();
    let mut t = 0;
    while t <= w {
        let label = t.to_string();
        ticks.push_str(&format!("{label:<5}"));
        t += 5;
    }
    let _ = writeln!(out, "{:name_w$}     {}", "", ticks.trim_end());
    for (r, name) in c.rows.iter().enumerate() {
        let init = c.init[r].map_or("   ".to_string(), |s| format!("q{:<2}", s + 1));
        let line: String = grid[r].iter().collect();
        let _ = writeln!(out, "{name:>name_w$} {init} {line}");
    }
    out
}

const CELL: u32 = 24;
const ROW: u32 = 28;
const LEFT: u32 = 60;
const TOP: u32 = 30;

fn fill(kind: BlockKind) -> &'static str {
    match kind {
        BlockKind::Swap => "url(#swap)",
        BlockKind::PsBlue => "#3a6fd8",
        BlockKind::PsRed => "#d8453a",
        BlockKind::Mix => "#8e5cc4",
    }
}

/// Static SVG with a fixed palette: blue and red PS blocks, hatched swaps,
/// purple mixes, gray initialization lines and yellow crosses for
/// crosstalk-blocked cells.
pub fn render_svg(c: &Chart) -> String {
    let width = LEFT + c.width * CELL + 20;
    let height = TOP + c.rows.len() as u32 * ROW + 20;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="monospace" font-size="12">"#
    );
    s.push_str(
        r##"<defs><pattern id="swap" width="6" height="6" patternUnits="userSpaceOnUse" patternTransform="rotate(45)"><rect width="6" height="6" fill="#dddddd"/><line x1="0" y1="0" x2="0" y2="6" stroke="#555555" stroke-width="2"/></pattern></defs>
"##,
    );
    for t in 0..=c.width {
        let x = LEFT + t * CELL;
        let _ = writeln!(
            s,
            r##"<line x1="{x}" y1="{TOP}" x2="{x}" y2="{}" stroke="#eeeeee"/>"##,
            TOP + c.rows.len() as u32 * ROW
        );
        if t % 5 == 0 {
            let _ = writeln!(s, r#"<text x="{x}" y="{}" text-anchor="middle">{t}</text>"#, TOP - 8);
        }
    }
    for (r, name) in c.rows.iter().enumerate() {
        let y = TOP + r as u32 * ROW;
        let _ = writeln!(s, r#"<text x="8" y="{}">{name}</text>"#, y + ROW / 2 + 4);
        if let Some(state) = c.init[r] {
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT}" y1="{}" x2="{LEFT}" y2="{}" stroke="#999999" stroke-width="3"><title>q{}</title></line>"##,
                y + 3,
                y + ROW - 3,
                state + 1
            );
        }
    }
    for b in &c.blocked {
        for t in b.start..b.end {
            let (x, y) = (LEFT + t * CELL + CELL / 2, TOP + b.row as u32 * ROW + ROW / 2);
            let _ = writeln!(
                s,
                r##"<path d="M{} {} L{} {} M{} {} L{} {}" stroke="#e0b000" stroke-width="2"/>"##,
                x - 5,
                y - 5,
                x + 5,
                y + 5,
                x - 5,
                y + 5,
                x + 5,
                y - 5
            );
        }
    }
    for b in &c.blocks {
        for &r in &b.rows {
            let (x, y) = (LEFT + b.start * CELL, TOP + r as u32 * ROW + 3);
            let w = (b.end - b.start) * CELL;
            let _ = writeln!(
                s,
                r##"<rect x="{x}" y="{y}" width="{w}" height="{}" fill="{}" stroke="#333333"/>"##,
                ROW - 6,
                fill(b.kind)
            );
            if !b.label.is_empty() {
                let _ = writeln!(
                    s,
                    r##"<text x="{}" y="{}" text-anchor="middle" fill="#ffffff">{}</text>"##,
                    x + w / 2,
                    y + ROW / 2 + 1,
                    b.label
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}
