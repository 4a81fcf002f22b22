//! Chip architecture graphs.
//!
//! Qubits are nodes, every edge carries a phase-separation (PS) gate of a
//! given color and optionally a swap gate. Ids are 0-based in memory and
//! 1-based in files and in anything printed for humans.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::InstanceError;

pub const DEFAULT_BLUE_DURATION: u32 = 3;
pub const DEFAULT_RED_DURATION: u32 = 4;
pub const DEFAULT_SWAP_DURATION: u32 = 2;
pub const DEFAULT_MIX_DURATION: u32 = 1;

/// Distance value for qubit pairs that are not connected.
pub const UNREACHABLE: u32 = u32::MAX;

/// Largest chip supported; state sets are stored as `u64` bitmasks.
pub const MAX_QUBITS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsColor {
    Red,
    Blue,
}

impl PsColor {
    pub fn default_duration(self) -> u32 {
        match self {
            PsColor::Red => DEFAULT_RED_DURATION,
            PsColor::Blue => DEFAULT_BLUE_DURATION,
        }
    }
}

/// An undirected chip edge; `u < v`, both 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub ps_color: PsColor,
    pub ps_duration: u32,
    pub swap_enabled: bool,
}

impl Edge {
    pub fn touches(&self, q: usize) -> bool {
        self.u == q || self.v == q
    }

    /// The endpoint opposite to `q`.
    pub fn other(&self, q: usize) -> usize {
        if self.u == q {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridColoring {
    /// Checkerboard by the parity of the lower/left endpoint.
    Alternating,
    AllBlue,
}

/// A validated chip with cached adjacency and distance tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ChipFile", into = "ChipFile")]
pub struct Chip {
    qubit_count: usize,
    edges: Vec<Edge>,
    swap_duration: u32,
    mix_duration: u32,
    side_length: u32,
    neighbors: Vec<Vec<usize>>,
    incident: Vec<Vec<usize>>,
    edge_lookup: Vec<Option<usize>>,
    swap_dist: Vec<u32>,
}

impl Chip {
    /// Builds a chip from 0-based edges and checks every structural invariant.
    pub fn new(
        qubit_count: usize,
        edges: Vec<Edge>,
        swap_duration: u32,
        mix_duration: u32,
        side_length: u32,
    ) -> Result<Self, InstanceError> {
        let bad = |msg: String| Err(InstanceError::InvalidChip(msg));
        if qubit_count == 0 {
            return bad("qubit_count must be positive".into());
        }
        if qubit_count > MAX_QUBITS {
            return bad(format!("at most {MAX_QUBITS} qubits are supported"));
        }
        if side_length == 0 {
            return bad("side_length must be positive".into());
        }
        if swap_duration == 0 || mix_duration == 0 {
            return bad("gate durations must be positive".into());
        }

        let mut edge_lookup = vec![None; qubit_count * qubit_count];
        let mut normalized = Vec::with_capacity(edges.len());
        for (ix, mut e) in edges.into_iter().enumerate() {
            if e.u >= qubit_count || e.v >= qubit_count {
                return bad(format!(
                    "edge {} references a qubit outside 1..{}",
                    ix + 1,
                    qubit_count
                ));
            }
            if e.u == e.v {
                return bad(format!("edge {} is a self-loop on n{}", ix + 1, e.u + 1));
            }
            if e.u > e.v {
                std::mem::swap(&mut e.u, &mut e.v);
            }
            if e.ps_duration == 0 {
                return bad(format!("edge {} has a zero PS duration", ix + 1));
            }
            if edge_lookup[e.u * qubit_count + e.v].is_some() {
                return bad(format!("duplicate edge (n{}, n{})", e.u + 1, e.v + 1));
            }
            edge_lookup[e.u * qubit_count + e.v] = Some(ix);
            edge_lookup[e.v * qubit_count + e.u] = Some(ix);
            normalized.push(e);
        }

        let mut neighbors = vec![Vec::new(); qubit_count];
        let mut incident = vec![Vec::new(); qubit_count];
        for (ix, e) in normalized.iter().enumerate() {
            neighbors[e.u].push(e.v);
            neighbors[e.v].push(e.u);
            incident[e.u].push(ix);
            incident[e.v].push(ix);
        }
        for n in &mut neighbors {
            n.sort_unstable();
        }

        let all_dist = bfs_all_pairs(qubit_count, &normalized, |_| true);
        if all_dist.iter().any(|&d| d == UNREACHABLE) {
            return bad("the chip graph is not connected".into());
        }
        let swap_dist = bfs_all_pairs(qubit_count, &normalized, |e| e.swap_enabled);

        // The sequential-baseline horizon assumes no two qubits are further than
        // 2*side - 2 hops apart on the swap graph.
        let reach = 2 * side_length as u64 - 2;
        let diameter = swap_dist
            .iter()
            .copied()
            .filter(|&d| d != UNREACHABLE)
            .max()
            .unwrap_or(0);
        if qubit_count > 1 && diameter as u64 > reach.max(1) {
            return bad(format!(
                "swap-graph diameter {diameter} exceeds 2*side_length-2 = {reach}"
            ));
        }

        Ok(Chip {
            qubit_count,
            edges: normalized,
            swap_duration,
            mix_duration,
            side_length,
            neighbors,
            incident,
            edge_lookup,
            swap_dist,
        })
    }

    /// `side x side` grid with swaps on every edge.
    pub fn grid(side: usize, coloring: GridColoring) -> Result<Self, InstanceError> {
        if side < 2 {
            return Err(InstanceError::InvalidChip(format!(
                "grid side must be at least 2, got {side}"
            )));
        }
        let id = |r: usize, c: usize| r * side + c;
        let mut edges = Vec::new();
        for r in 0..side {
            for c in 0..side {
                for (nr, nc) in [(r, c + 1), (r + 1, c)] {
                    if nr < side && nc < side {
                        let color = match coloring {
                            GridColoring::AllBlue => PsColor::Blue,
                            GridColoring::Alternating if (r + c) % 2 == 0 => PsColor::Blue,
                            GridColoring::Alternating => PsColor::Red,
                        };
                        edges.push(Edge {
                            u: id(r, c),
                            v: id(nr, nc),
                            ps_color: color,
                            ps_duration: color.default_duration(),
                            swap_enabled: true,
                        });
                    }
                }
            }
        }
        Chip::new(
            side * side,
            edges,
            DEFAULT_SWAP_DURATION,
            DEFAULT_MIX_DURATION,
            side as u32,
        )
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, ix: usize) -> &Edge {
        &self.edges[ix]
    }

    pub fn swap_duration(&self) -> u32 {
        self.swap_duration
    }

    pub fn mix_duration(&self) -> u32 {
        self.mix_duration
    }

    pub fn side_length(&self) -> u32 {
        self.side_length
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.neighbors[q]
    }

    /// Edge ids incident to qubit `q`.
    pub fn incident_edges(&self, q: usize) -> &[usize] {
        &self.incident[q]
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        if a >= self.qubit_count || b >= self.qubit_count {
            return None;
        }
        self.edge_lookup[a * self.qubit_count + b]
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.edge_between(a, b).is_some()
    }

    /// Hop distance over swap-enabled edges, or [`UNREACHABLE`].
    pub fn swap_distance(&self, a: usize, b: usize) -> u32 {
        self.swap_dist[a * self.qubit_count + b]
    }

    pub fn max_ps_duration(&self) -> u32 {
        self.edges.iter().map(|e| e.ps_duration).max().unwrap_or(0)
    }

    pub fn min_ps_duration(&self) -> u32 {
        self.edges.iter().map(|e| e.ps_duration).min().unwrap_or(0)
    }

    /// Number of colors used by a greedy proper coloring of the chip graph.
    /// Qubits of one color class are pairwise non-adjacent.
    pub fn color_classes(&self) -> Vec<Vec<usize>> {
        let mut color = vec![usize::MAX; self.qubit_count];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for q in 0..self.qubit_count {
            let used: Vec<usize> = self.neighbors[q]
                .iter()
                .map(|&n| color[n])
                .filter(|&c| c != usize::MAX)
                .collect();
            let c = (0..).find(|c| !used.contains(c)).unwrap();
            color[q] = c;
            if c == classes.len() {
                classes.push(Vec::new());
            }
            classes[c].push(q);
        }
        classes
    }

    /// One shortest path from `from` to `to` over swap-enabled edges,
    /// including both endpoints. Among equal-length paths the choice is
    /// delegated to `pick`, which receives the candidate next hops.
    pub fn shortest_swap_path(
        &self,
        from: usize,
        to: usize,
        mut pick: impl FnMut(&[usize]) -> usize,
    ) -> Option<Vec<usize>> {
        if self.swap_distance(from, to) == UNREACHABLE {
            return None;
        }
        let mut path = vec![from];
        let mut cur = from;
        let mut options = Vec::new();
        while cur != to {
            let d = self.swap_distance(cur, to);
            options.clear();
            for &e in &self.incident[cur] {
                let edge = &self.edges[e];
                if !edge.swap_enabled {
                    continue;
                }
                let n = edge.other(cur);
                if self.swap_distance(n, to) + 1 == d {
                    options.push(n);
                }
            }
            options.sort_unstable();
            let next = options[pick(&options) % options.len()];
            path.push(next);
            cur = next;
        }
        Some(path)
    }
}

fn bfs_all_pairs(n: usize, edges: &[Edge], usable: impl Fn(&Edge) -> bool) -> Vec<u32> {
    let mut adj = vec![Vec::new(); n];
    for e in edges.iter().filter(|e| usable(e)) {
        adj[e.u].push(e.v);
        adj[e.v].push(e.u);
    }
    let mut dist = vec![UNREACHABLE; n * n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        let row = &mut dist[s * n..(s + 1) * n];
        row[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if row[v] == UNREACHABLE {
                    row[v] = row[u] + 1;
                    queue.push_back(v);
                }
            }
        }
    }
    dist
}

/// Preset chips bundled with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Rigetti8,
    Rigetti21,
}

impl Preset {
    pub const ALL: [Preset; 2] = [Preset::Rigetti8, Preset::Rigetti21];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Rigetti8 => "rigetti-8",
            Preset::Rigetti21 => "rigetti-21",
        }
    }

    fn data(self) -> &'static str {
        match self {
            Preset::Rigetti8 => include_str!("../../data/rigetti-8.chip.json"),
            Preset::Rigetti21 => include_str!("../../data/rigetti-21.chip.json"),
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| InstanceError::UnknownPreset(s.to_string()))
    }
}

/// Loads a bundled preset chip by name (`rigetti-8` or `rigetti-21`).
pub fn build_preset_chip(name: &str) -> Result<Chip, InstanceError> {
    let preset: Preset = name.parse()?;
    Ok(preset.chip())
}

impl Preset {
    pub fn chip(self) -> Chip {
        serde_json::from_str(self.data()).expect("bundled chip data is valid")
    }
}

pub fn build_grid_chip(side: usize, coloring: GridColoring) -> Result<Chip, InstanceError> {
    Chip::grid(side, coloring)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeFile {
    u: usize,
    v: usize,
    ps_color: PsColor,
    ps_duration: u32,
    swap_enabled: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChipFile {
    qubit_count: usize,
    edges: Vec<EdgeFile>,
    swap_duration: u32,
    mix_duration: u32,
    side_length: u32,
}

impl TryFrom<ChipFile> for Chip {
    type Error = InstanceError;

    fn try_from(f: ChipFile) -> Result<Self, Self::Error> {
        let mut edges = Vec::with_capacity(f.edges.len());
        for (ix, e) in f.edges.into_iter().enumerate() {
            if e.u == 0 || e.v == 0 {
                return Err(InstanceError::InvalidChip(format!(
                    "edge {} uses qubit id 0; ids are 1-based",
                    ix + 1
                )));
            }
            edges.push(Edge {
                u: e.u - 1,
                v: e.v - 1,
                ps_color: e.ps_color,
                ps_duration: e.ps_duration,
                swap_enabled: e.swap_enabled,
            });
        }
        Chip::new(
            f.qubit_count,
            edges,
            f.swap_duration,
            f.mix_duration,
            f.side_length,
        )
    }
}

impl From<Chip> for ChipFile {
    fn from(c: Chip) -> Self {
        ChipFile {
            qubit_count: c.qubit_count,
            edges: c
                .edges
                .iter()
                .map(|e| EdgeFile {
                    u: e.u + 1,
                    v: e.v + 1,
                    ps_color: e.ps_color,
                    ps_duration: e.ps_duration,
                    swap_enabled: e.swap_enabled,
                })
                .collect(),
            swap_duration: c.swap_duration,
            mix_duration: c.mix_duration,
            side_length: c.side_length,
        }
    }
}
