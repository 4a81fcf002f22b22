//! Domain filtering to a fixpoint.
//!
//! Incomplete by design: time windows through precedence and
//! synchronisation links, pairwise disjunctive filtering with an overload
//! check per resource, the replica presence chain, all-different on the
//! initial states and state channelling on qubits whose event order is
//! already decided.

use super::model::{Constraint, Model, OptionalIntervalVar, Presence, VarId, VarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagation {
    Fixpoint,
    Conflict,
}

struct Conflict;

type Step = Result<bool, Conflict>;

/// Runs every filtering rule until nothing changes.
pub fn propagate(model: &mut Model) -> Propagation {
    for _ in 0..10_000 {
        match sweep(model) {
            Err(Conflict) => return Propagation::Conflict,
            Ok(false) => return Propagation::Fixpoint,
            Ok(true) => {}
        }
    }
    Propagation::Fixpoint
}

fn sweep(m: &mut Model) -> Step {
    let mut changed = false;
    for id in 0..m.vars.len() {
        changed |= normalize(&mut m.vars[id])?;
    }
    changed |= makespan(m)?;
    let constraints = std::mem::take(&mut m.constraints);
    let result = (|| {
        for c in &constraints {
            changed |= match c {
                Constraint::Alternative { master, options } => alternative(m, *master, options)?,
                Constraint::ReplicaOrder { first, second } => replica_order(m, *first, *second)?,
                Constraint::MixAfter { mix, goal } => precedence(m, *goal, *mix)?,
                Constraint::MixBefore { mix, goal } => precedence(m, *mix, *goal)?,
                Constraint::NoOverlap { resource } => {
                    let vars = m.resources[*resource].vars.clone();
                    disjunctive(m, &vars)?
                }
                Constraint::AllDifferentInitial => all_different(m)?,
                _ => false,
            };
        }
        changed |= state_channel(m)?;
        Ok(changed)
    })();
    m.constraints = constraints;
    result
}

/// Empty windows make optional intervals absent and present ones fail.
fn normalize(v: &mut OptionalIntervalVar) -> Step {
    if v.is_absent() || v.start_min <= v.start_max && v.len_min <= v.len_max {
        return Ok(false);
    }
    if v.presence == Presence::Present {
        return Err(Conflict);
    }
    v.presence = Presence::Absent;
    Ok(true)
}

fn set_start_min(v: &mut OptionalIntervalVar, x: u32) -> Step {
    if v.is_absent() || x <= v.start_min {
        return Ok(false);
    }
    v.start_min = x;
    normalize(v).map(|_| true)
}

fn set_start_max(v: &mut OptionalIntervalVar, x: u32) -> Step {
    if v.is_absent() || x >= v.start_max {
        return Ok(false);
    }
    if x < v.start_min {
        if v.presence == Presence::Present {
            return Err(Conflict);
        }
        v.presence = Presence::Absent;
        return Ok(true);
    }
    v.start_max = x;
    Ok(true)
}

fn set_end_max(v: &mut OptionalIntervalVar, x: u32) -> Step {
    if v.is_absent() {
        return Ok(false);
    }
    if x < v.end_min() {
        if v.presence == Presence::Present {
            return Err(Conflict);
        }
        v.presence = Presence::Absent;
        return Ok(true);
    }
    set_start_max(v, x - v.len_min)
}

fn set_presence(v: &mut OptionalIntervalVar, p: Presence) -> Step {
    match (v.presence, p) {
        (a, b) if a == b => Ok(false),
        (Presence::Undecided, _) => {
            v.presence = p;
            normalize(v).map(|_| true)
        }
        _ => Err(Conflict),
    }
}

/// The makespan covers every goal interval.
fn makespan(m: &mut Model) -> Step {
    let mut changed = false;
    let (lo, hi) = m.makespan;
    let need = m.goal_vars.iter().map(|&g| m.vars[g].end_min()).max().unwrap_or(0);
    if need > hi {
        return Err(Conflict);
    }
    if need > lo {
        m.makespan.0 = need;
        changed = true;
    }
    for g in m.goal_vars.clone() {
        changed |= set_end_max(&mut m.vars[g], hi)?;
    }
    Ok(changed)
}

fn alternative(m: &mut Model, master: VarId, options: &[VarId]) -> Step {
    let mut changed = false;
    let present: Vec<VarId> = options.iter().copied().filter(|&o| m.vars[o].is_present()).collect();
    if present.len() > 1 {
        return Err(Conflict);
    }
    if let Some(&p) = present.first() {
        for &o in options {
            if o != p {
                changed |= set_presence(&mut m.vars[o], Presence::Absent)?;
            }
        }
    }
    let open: Vec<VarId> = options.iter().copied().filter(|&o| !m.vars[o].is_absent()).collect();
    if open.is_empty() {
        return Err(Conflict);
    }
    if open.len() == 1 {
        changed |= set_presence(&mut m.vars[open[0]], Presence::Present)?;
    }

    // master window is the hull of the open options
    let s_min = open.iter().map(|&o| m.vars[o].start_min).min().unwrap();
    let s_max = open.iter().map(|&o| m.vars[o].start_max).max().unwrap();
    let l_min = open.iter().map(|&o| m.vars[o].len_min).min().unwrap();
    let l_max = open.iter().map(|&o| m.vars[o].len_max).max().unwrap();
    let mv = &mut m.vars[master];
    changed |= set_start_min(mv, s_min)?;
    changed |= set_start_max(mv, s_max)?;
    if l_min > mv.len_min {
        mv.len_min = l_min;
        changed = true;
    }
    if l_max < mv.len_max {
        mv.len_max = l_max;
        changed = true;
    }
    changed |= normalize(mv)?;
    let mv = *mv;

    // each option lies inside the master window
    for &o in &open {
        let ov = &mut m.vars[o];
        changed |= set_start_min(ov, mv.start_min)?;
        changed |= set_start_max(ov, mv.start_max)?;
        if ov.len_max < mv.len_min || ov.len_min > mv.len_max {
            changed |= set_presence(ov, Presence::Absent)?;
        }
    }
    Ok(changed)
}

/// `before` ends no later than `after` starts (both mandatory).
fn precedence(m: &mut Model, before: VarId, after: VarId) -> Step {
    let b = m.vars[before];
    let mut changed = set_start_min(&mut m.vars[after], b.end_min())?;
    let a = m.vars[after];
    changed |= set_end_max(&mut m.vars[before], a.start_max)?;
    Ok(changed)
}

fn replica_order(m: &mut Model, first: VarId, second: VarId) -> Step {
    let mut changed = false;
    if m.vars[second].is_present() {
        changed |= set_presence(&mut m.vars[first], Presence::Present)?;
    }
    if m.vars[first].is_absent() {
        changed |= set_presence(&mut m.vars[second], Presence::Absent)?;
    }
    if m.vars[first].is_present() && m.vars[second].is_present() {
        let f = m.vars[first];
        changed |= set_start_min(&mut m.vars[second], f.end_min())?;
        let s = m.vars[second];
        changed |= set_end_max(&mut m.vars[first], s.start_max)?;
    }
    Ok(changed)
}

/// Pairwise filtering between present tasks and every non-absent task,
/// followed by an overload check over the present ones.
fn disjunctive(m: &mut Model, vars: &[VarId]) -> Step {
    let mut changed = false;
    let present: Vec<VarId> = vars
        .iter()
        .copied()
        .filter(|&v| m.vars[v].is_present() && m.vars[v].len_min > 0)
        .collect();
    if present.is_empty() {
        return Ok(false);
    }
    for &a in &present {
        for &b in vars {
            if a == b || m.vars[b].is_absent() || m.vars[b].len_min == 0 {
                continue;
            }
            let (va, vb) = (m.vars[a], m.vars[b]);
            let a_first = va.end_min() <= vb.start_max;
            let b_first = vb.end_min() <= va.start_max;
            match (a_first, b_first) {
                (false, false) => {
                    if vb.is_present() {
                        return Err(Conflict);
                    }
                    changed |= set_presence(&mut m.vars[b], Presence::Absent)?;
                }
                (true, false) => {
                    changed |= set_start_min(&mut m.vars[b], va.end_min())?;
                    if vb.is_present() {
                        changed |= set_end_max(&mut m.vars[a], vb.start_max)?;
                    }
                }
                (false, true) => {
                    changed |= set_start_min(&mut m.vars[a], vb.end_min())?;
                    if vb.is_present() {
                        changed |= set_end_max(&mut m.vars[b], va.start_max)?;
                    }
                }
                (true, true) => {}
            }
        }
    }
    // overload: tasks confined to [est, lct) need at most lct - est
    let present: Vec<OptionalIntervalVar> = present.iter().map(|&v| m.vars[v]).collect();
    for x in &present {
        for y in &present {
            let (est, lct) = (x.start_min, y.end_max());
            if lct <= est {
                continue;
            }
            let load: u32 = present
                .iter()
                .filter(|t| t.start_min >= est && t.end_max() <= lct)
                .map(|t| t.len_min)
                .sum();
            if load > lct - est {
                return Err(Conflict);
            }
        }
    }
    Ok(changed)
}

fn all_different(m: &mut Model) -> Step {
    let mut changed = false;
    loop {
        let mut fixed = 0u64;
        for row in &m.states {
            if row[0] == 0 {
                return Err(Conflict);
            }
            if row[0].count_ones() == 1 {
                if fixed & row[0] != 0 {
                    return Err(Conflict);
                }
                fixed |= row[0];
            }
        }
        let mut again = false;
        for row in &mut m.states {
            if row[0].count_ones() > 1 && row[0] & fixed != 0 {
                row[0] &= !fixed;
                again = true;
            }
        }
        if !again {
            return Ok(changed);
        }
        changed = true;
    }
}

/// Narrows state domains along a qubit's event sequence once it is known:
/// every own event is decided, present ones have fixed, distinct starts.
fn state_channel(m: &mut Model) -> Step {
    let n = m.events.len();
    let mut seqs: Vec<Option<Vec<(usize, VarId)>>> = Vec::with_capacity(n);
    for q in 0..n {
        let mut seq = Vec::new();
        let mut decided = true;
        for (k, &v) in m.events[q].iter().enumerate() {
            let d = m.vars[v];
            match d.presence {
                Presence::Absent => {}
                Presence::Present if d.start_min == d.start_max => seq.push((k + 1, v)),
                _ => {
                    decided = false;
                    break;
                }
            }
        }
        seq.sort_by_key(|&(_, v)| (m.vars[v].start_min, v));
        seqs.push(decided.then_some(seq));
    }
    let mut changed = false;
    let narrow = |m: &mut Model, q: usize, slot: usize, mask: u64| -> Step {
        let d = &mut m.states[q][slot];
        let next = *d & mask;
        if next == 0 {
            return Err(Conflict);
        }
        let c = next != *d;
        *d = next;
        Ok(c)
    };
    for q in 0..n {
        let Some(seq) = &seqs[q] else { continue };
        for (k, &(slot, v)) in seq.iter().enumerate() {
            let prev = if k == 0 { 0 } else { seq[k - 1].0 };
            match m.kinds[v] {
                VarKind::Swap { .. } => {
                    let other = m.qubits_of(v).into_iter().find(|&x| x != q).unwrap();
                    let Some(oseq) = &seqs[other] else { continue };
                    let j = oseq.iter().position(|&(_, w)| w == v).unwrap();
                    let oprev = if j == 0 { 0 } else { oseq[j - 1].0 };
                    let src = m.states[other][oprev];
                    changed |= narrow(m, q, slot, src)?;
                    let dst = m.states[q][slot];
                    changed |= narrow(m, other, oprev, dst)?;
                }
                kind => {
                    let a = m.states[q][prev];
                    changed |= narrow(m, q, slot, a)?;
                    let b = m.states[q][slot];
                    changed |= narrow(m, q, prev, b)?;
                    match kind {
                        VarKind::Ps { slot: o, .. } => {
                            let g = m.instance().goal_at(o);
                            changed |= narrow(m, q, prev, (1 << g.0) | (1 << g.1))?;
                        }
                        VarKind::Mix { state, .. } => changed |= narrow(m, q, prev, 1 << state)?,
                        _ => {}
                    }
                }
            }
        }
    }
    Ok(changed)
}
