use super::{meeting_edges, RouterError, Timeline};
use crate::bounds::mix_rounds;
use crate::instance::Instance;
use crate::schedule::Schedule;

/// Achieves the goals strictly one after another.
///
/// Each goal's two states walk towards each other along a shortest swap
/// path and meet on the edge that minimises the longer walk; the PS gate is
/// then applied there. With two stages every state is mixed once between the
/// two goal blocks (one window per color class under crosstalk). Free
/// placement uses the identity.
///
/// A goal block never takes more than `phi * tau_swap + tau_ps_max`, so the
/// makespan stays within [`crate::bounds::horizon_bound`].
pub fn solve_sequential_baseline(inst: &Instance) -> Result<Schedule, RouterError> {
    let chip = inst.chip();
    let n = chip.qubit_count();
    let mut tl = Timeline::new(inst, (0..n).collect());
    let mut cursor = 0;
    let sequential = inst.variant().crosstalk();

    let stage_block = |tl: &mut Timeline, cursor: &mut u32, slots: std::ops::Range<usize>| {
        for o in slots {
            let g = inst.goal_at(o);
            let (pa, pb) = (tl.loc[g.0], tl.loc[g.1]);
            let edges = meeting_edges(chip, pa, pb).map_err(|_| RouterError::Unreachable(g))?;
            let (u, v) = edges
                .into_iter()
                .min_by_key(|&(u, v)| {
                    let walk = chip.swap_distance(pa, u).max(chip.swap_distance(pb, v));
                    let ps = chip.edge(chip.edge_between(u, v).unwrap()).ps_duration;
                    (walk * chip.swap_duration() + ps, u, v)
                })
                .expect("a reachable pair has a meeting edge");
            let path_a = chip.shortest_swap_path(pa, u, |_| 0).unwrap();
            let path_b = chip.shortest_swap_path(pb, v, |_| 0).unwrap();
            let mut end = *cursor;
            let mut walk = |tl: &mut Timeline, path: &[usize], from: u32| {
                let mut t = from;
                for w in path.windows(2) {
                    t = tl.swap(w[0], w[1], t);
                    end = end.max(t);
                }
                t
            };
            let ta = walk(tl, &path_a, *cursor);
            let tb = walk(tl, &path_b, if sequential { ta } else { *cursor });
            end = end.max(ta).max(tb);
            *cursor = tl.ps(u, v, o, end);
        }
        Ok::<(), RouterError>(())
    };

    let g = inst.goals().len();
    stage_block(&mut tl, &mut cursor, 0..g)?;
    if inst.stages() == 2 {
        let window = cursor;
        if inst.variant().crosstalk() {
            for (r, class) in chip.color_classes().iter().enumerate() {
                for &q in class {
                    let s = tl.occ[q];
                    tl.mix(s, window + r as u32 * chip.mix_duration());
                }
            }
        } else {
            for s in 0..n {
                tl.mix(s, window);
            }
        }
        cursor = window + mix_rounds(inst) * chip.mix_duration();
        stage_block(&mut tl, &mut cursor, g..2 * g)?;
    }
    Ok(tl.finish(inst))
}
