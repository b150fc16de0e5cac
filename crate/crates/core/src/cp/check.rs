//! Direct evaluation of constraint semantics on a complete assignment.
//!
//! Nothing here touches domains or filtering, so solver output can be
//! validated against it.

use alloc::vec::Vec;

use super::network::{Assignment, Constraint, ConstraintNetwork, Cumulative, NetworkError};

/// True iff `a` lies inside every declared range and satisfies every
/// constraint of `network`.
pub fn check(a: &Assignment, network: &ConstraintNetwork) -> Result<bool, NetworkError> {
    network.validate()?;
    if a.len() != network.num_vars() {
        return Err(NetworkError::AssignmentLength {
            expected: network.num_vars(),
            found: a.len(),
        });
    }
    let in_range = network.vars().all(|v| {
        let (lo, hi) = network.bounds(v);
        (lo..=hi).contains(&a.get(v))
    });
    Ok(in_range && network.constraints().iter().all(|c| satisfies(c, a)))
}

/// Evaluates one constraint. Every variable in its scope must be covered by `a`.
pub fn satisfies(constraint: &Constraint, a: &Assignment) -> bool {
    match constraint {
        Constraint::AllDifferent(vars) => {
            let mut seen: Vec<i64> = vars.iter().map(|&v| a.get(v)).collect();
            seen.sort_unstable();
            seen.windows(2).all(|w| w[0] != w[1])
        }
        Constraint::Cumulative(c) => cumulative_holds(c, a),
        Constraint::LinearEq(l) => linear_sum(&l.terms, a) == i128::from(l.rhs),
        Constraint::LinearLe(l) => linear_sum(&l.terms, a) <= i128::from(l.rhs),
        Constraint::Precedence(p) => {
            i128::from(a.get(p.after))
                >= i128::from(a.get(p.before)) + i128::from(p.duration) + i128::from(p.gap)
        }
        Constraint::EqConst(v, value) => a.get(*v) == *value,
    }
}

fn linear_sum(terms: &[(i64, super::network::VarId)], a: &Assignment) -> i128 {
    terms
        .iter()
        .map(|&(c, v)| i128::from(c) * i128::from(a.get(v)))
        .sum()
}

/// Sweeps start/end events; load only changes at those points.
fn cumulative_holds(c: &Cumulative, a: &Assignment) -> bool {
    let mut events: Vec<(i64, i64)> = Vec::new();
    for t in c.tasks.iter().filter(|t| t.duration > 0 && t.demand > 0) {
        let s = a.get(t.start);
        events.push((s, t.demand));
        events.push((s + t.duration, -t.demand));
    }
    // ends sort before starts at the same instant
    events.sort_unstable_by_key(|&(time, delta)| (time, delta));
    let mut load = 0i64;
    for (_, delta) in events {
        load += delta;
        if load > c.capacity {
            return false;
        }
    }
    true
}
