//! Constraint filtering run to a common fixed point.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::domain::Domain;
use super::network::{Constraint, ConstraintNetwork, Cumulative, Linear, Precedence, VarId};

/// Some domain became empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inconsistent;

/// Runs every filter of `network` on `domains` until nothing changes.
///
/// `network` must be valid (see [`ConstraintNetwork::validate`]) and
/// `domains` must hold one entry per variable. The result is a subset of
/// the input; no value that belongs to a solution is removed.
pub fn propagate(
    network: &ConstraintNetwork,
    mut domains: Vec<Domain>,
) -> Result<Vec<Domain>, Inconsistent> {
    Propagator::new(network).run_all(&mut domains)?;
    Ok(domains)
}

/// Filtering engine with per-variable watch lists, built once per search.
pub(crate) struct Propagator<'a> {
    network: &'a ConstraintNetwork,
    watchers: Vec<Vec<usize>>,
}

struct Changes(Vec<VarId>);

impl Changes {
    fn remove(&mut self, d: &mut [Domain], v: VarId, value: i64) -> Result<(), Inconsistent> {
        if d[v.0].remove(value) {
            self.touched(d, v)?;
        }
        Ok(())
    }

    fn below(&mut self, d: &mut [Domain], v: VarId, bound: i128) -> Result<(), Inconsistent> {
        let bound = clamp_i64(bound);
        if d[v.0].remove_below(bound) {
            self.touched(d, v)?;
        }
        Ok(())
    }

    fn above(&mut self, d: &mut [Domain], v: VarId, bound: i128) -> Result<(), Inconsistent> {
        let bound = clamp_i64(bound);
        if d[v.0].remove_above(bound) {
            self.touched(d, v)?;
        }
        Ok(())
    }

    fn touched(&mut self, d: &[Domain], v: VarId) -> Result<(), Inconsistent> {
        if d[v.0].is_empty() {
            return Err(Inconsistent);
        }
        self.0.push(v);
        Ok(())
    }
}

fn clamp_i64(x: i128) -> i64 {
    x.clamp(i128::from(i64::MIN), i128::from(i64::MAX)) as i64
}

impl<'a> Propagator<'a> {
    pub(crate) fn new(network: &'a ConstraintNetwork) -> Self {
        let mut watchers = vec![Vec::new(); network.num_vars()];
        for (ci, c) in network.constraints().iter().enumerate() {
            let mut scope = c.scope();
            scope.sort_unstable();
            scope.dedup();
            for v in scope {
                watchers[v.0].push(ci);
            }
        }
        Propagator { network, watchers }
    }

    pub(crate) fn run_all(&self, domains: &mut [Domain]) -> Result<(), Inconsistent> {
        if domains.iter().any(Domain::is_empty) {
            return Err(Inconsistent);
        }
        self.run((0..self.network.constraints().len()).collect(), domains)
    }

    /// Propagates after the domains of `vars` were reduced externally.
    pub(crate) fn run_from(&self, vars: &[VarId], domains: &mut [Domain]) -> Result<(), Inconsistent> {
        if vars.iter().any(|v| domains[v.0].is_empty()) {
            return Err(Inconsistent);
        }
        let mut seed: Vec<usize> = vars.iter().flat_map(|v| self.watchers[v.0].iter().copied()).collect();
        seed.sort_unstable();
        seed.dedup();
        self.run(seed, domains)
    }

    fn run(&self, seed: Vec<usize>, domains: &mut [Domain]) -> Result<(), Inconsistent> {
        let constraints = self.network.constraints();
        let mut queued = vec![false; constraints.len()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for ci in seed {
            queued[ci] = true;
            queue.push_back(ci);
        }
        let mut changes = Changes(Vec::new());
        while let Some(ci) = queue.pop_front() {
            queued[ci] = false;
            changes.0.clear();
            filter(&constraints[ci], domains, &mut changes)?;
            for v in changes.0.drain(..) {
                for &cj in &self.watchers[v.0] {
                    if !queued[cj] {
                        queued[cj] = true;
                        queue.push_back(cj);
                    }
                }
            }
        }
        Ok(())
    }
}

fn filter(c: &Constraint, d: &mut [Domain], ch: &mut Changes) -> Result<(), Inconsistent> {
    match c {
        Constraint::EqConst(v, value) => {
            if !d[v.0].contains(*value) {
                return Err(Inconsistent);
            }
            if d[v.0].assign(*value) {
                ch.0.push(*v);
            }
            Ok(())
        }
        Constraint::AllDifferent(vars) => all_different(vars, d, ch),
        Constraint::LinearLe(l) => linear_le(l.terms.iter().copied(), l.rhs.into(), d, ch),
        Constraint::LinearEq(l) => linear_eq(l, d, ch),
        Constraint::Precedence(p) => precedence(p, d, ch),
        Constraint::Cumulative(cu) => cumulative(cu, d, ch),
    }
}

/// Value elimination from fixed variables plus a pigeonhole test.
fn all_different(vars: &[VarId], d: &mut [Domain], ch: &mut Changes) -> Result<(), Inconsistent> {
    let mut done = vec![false; vars.len()];
    while let Some(i) = (0..vars.len()).find(|&i| !done[i] && d[vars[i].0].is_fixed()) {
        done[i] = true;
        let value = d[vars[i].0].value().unwrap();
        for (j, &other) in vars.iter().enumerate() {
            if j != i {
                ch.remove(d, other, value)?;
            }
        }
    }
    let mut union: Vec<i64> = vars.iter().flat_map(|v| d[v.0].iter()).collect();
    union.sort_unstable();
    union.dedup();
    if vars.len() > union.len() {
        return Err(Inconsistent);
    }
    Ok(())
}

fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -floor_div(-a, b)
}

/// Bounds reasoning for `Σ c·x ≤ rhs`.
fn linear_le(
    terms: impl Iterator<Item = (i64, VarId)> + Clone,
    rhs: i128,
    d: &mut [Domain],
    ch: &mut Changes,
) -> Result<(), Inconsistent> {
    let term_min = |c: i64, v: VarId, d: &[Domain]| -> i128 {
        let dom = &d[v.0];
        let x = if c > 0 { dom.min() } else { dom.max() };
        i128::from(c) * i128::from(x.unwrap())
    };
    let total_min: i128 = terms.clone().map(|(c, v)| term_min(c, v, d)).sum();
    if total_min > rhs {
        return Err(Inconsistent);
    }
    for (c, v) in terms {
        if c == 0 {
            continue;
        }
        let slack = rhs - (total_min - term_min(c, v, d));
        let c = i128::from(c);
        if c > 0 {
            ch.above(d, v, floor_div(slack, c))?;
        } else {
            ch.below(d, v, ceil_div(slack, c))?;
        }
    }
    Ok(())
}

fn linear_eq(l: &Linear, d: &mut [Domain], ch: &mut Changes) -> Result<(), Inconsistent> {
    linear_le(l.terms.iter().copied(), l.rhs.into(), d, ch)?;
    linear_le(l.terms.iter().map(|&(c, v)| (-c, v)), -i128::from(l.rhs), d, ch)
}

fn precedence(p: &Precedence, d: &mut [Domain], ch: &mut Changes) -> Result<(), Inconsistent> {
    let lag = i128::from(p.duration) + i128::from(p.gap);
    let before_min = i128::from(d[p.before.0].min().unwrap());
    ch.below(d, p.after, before_min + lag)?;
    let after_max = i128::from(d[p.after.0].max().unwrap());
    ch.above(d, p.before, after_max - lag)
}

/// A load level over `[start, end)` built from compulsory parts.
struct Segment {
    start: i64,
    end: i64,
    load: i64,
}

/// Time-table filtering: compulsory parts form a resource profile, the
/// profile must fit under capacity, and start values that would push any
/// overlapped segment above capacity are removed.
fn cumulative(cu: &Cumulative, d: &mut [Domain], ch: &mut Changes) -> Result<(), Inconsistent> {
    let tasks: Vec<_> = cu.tasks.iter().filter(|t| t.duration > 0 && t.demand > 0).collect();
    let compulsory = |t: &super::network::CumulativeTask, d: &[Domain]| -> Option<(i64, i64)> {
        let lst = d[t.start.0].max().unwrap();
        let ect = d[t.start.0].min().unwrap() + t.duration;
        (lst < ect).then_some((lst, ect))
    };

    let mut events: Vec<(i64, i64)> = Vec::new();
    for t in &tasks {
        if let Some((s, e)) = compulsory(t, d) {
            events.push((s, t.demand));
            events.push((e, -t.demand));
        }
    }
    events.sort_unstable();
    let mut profile: Vec<Segment> = Vec::new();
    let mut load = 0i64;
    for (k, &(time, delta)) in events.iter().enumerate() {
        load += delta;
        let next = events.get(k + 1).map(|e| e.0);
        if let Some(next) = next {
            if next > time && load > 0 {
                if load > cu.capacity {
                    return Err(Inconsistent);
                }
                profile.push(Segment { start: time, end: next, load });
            }
        }
    }
    if profile.is_empty() {
        // every task still has to fit on its own
        for t in &tasks {
            if t.demand > cu.capacity {
                return Err(Inconsistent);
            }
        }
        return Ok(());
    }

    for t in &tasks {
        let own = compulsory(t, d);
        let doomed: Vec<i64> = d[t.start.0]
            .iter()
            .filter(|&s| {
                let end = s + t.duration;
                t.demand > cu.capacity
                    || profile.iter().any(|seg| {
                        if seg.end <= s || seg.start >= end {
                            return false;
                        }
                        let mine = match own {
                            Some((os, oe)) if seg.start >= os && seg.end <= oe => t.demand,
                            _ => 0,
                        };
                        seg.load - mine + t.demand > cu.capacity
                    })
            })
            .collect();
        for s in doomed {
            ch.remove(d, t.start, s)?;
        }
    }
    Ok(())
}
