//! Random small networks and a brute-force enumeration oracle.
//!
//! The oracle evaluates constraints straight from their definitions and
//! shares no code with the solver or its checker.
#![allow(dead_code)]

use icp_core::cp::{
    Assignment, Constraint, ConstraintNetwork, Cumulative, CumulativeTask, Linear, Precedence, VarId,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Up to 6 variables with up to 5 values each and a mix of every
/// constraint kind; the last variable is the objective when requested.
pub fn random_network(rng: &mut ChaCha8Rng, with_objective: bool) -> ConstraintNetwork {
    let mut n = ConstraintNetwork::new();
    let nvars = rng.random_range(2..=6);
    for i in 0..nvars {
        let lo = rng.random_range(-2..=2);
        let size = rng.random_range(1..=5);
        n.add_var(format!("v{i}"), lo, lo + size - 1);
    }
    let pick = |rng: &mut ChaCha8Rng| VarId(rng.random_range(0..nvars));
    let ncons = rng.random_range(1..=4);
    for _ in 0..ncons {
        let c = match rng.random_range(0..6) {
            0 => {
                let k = rng.random_range(2..=3.min(nvars));
                let mut vars: Vec<VarId> = (0..nvars).map(VarId).collect();
                for i in 0..k {
                    let j = rng.random_range(i..nvars);
                    vars.swap(i, j);
                }
                vars.truncate(k);
                Constraint::AllDifferent(vars)
            }
            1 => {
                let k = rng.random_range(1..=3);
                let terms = (0..k).map(|_| (rng.random_range(-3..=3), pick(rng))).collect();
                Constraint::LinearEq(Linear::new(terms, rng.random_range(-4..=4)))
            }
            2 => {
                let k = rng.random_range(1..=3);
                let terms = (0..k).map(|_| (rng.random_range(-3..=3), pick(rng))).collect();
                Constraint::LinearLe(Linear::new(terms, rng.random_range(-4..=4)))
            }
            3 => Constraint::Precedence(Precedence {
                before: pick(rng),
                after: pick(rng),
                duration: rng.random_range(0..=2),
                gap: rng.random_range(0..=1),
            }),
            4 => {
                let v = pick(rng);
                let (lo, hi) = n.bounds(v);
                Constraint::EqConst(v, rng.random_range(lo - 1..=hi))
            }
            _ => {
                let k = rng.random_range(2..=3);
                let tasks = (0..k)
                    .map(|_| CumulativeTask {
                        start: pick(rng),
                        duration: rng.random_range(0..=3),
                        demand: rng.random_range(0..=2),
                    })
                    .collect();
                Constraint::Cumulative(Cumulative { tasks, capacity: rng.random_range(1..=3) })
            }
        };
        n.post(c);
    }
    if with_objective {
        n.set_objective(VarId(nvars - 1));
    }
    n
}

pub fn holds(c: &Constraint, x: &[i64]) -> bool {
    match c {
        Constraint::AllDifferent(vars) => {
            for i in 0..vars.len() {
                for j in i + 1..vars.len() {
                    if x[vars[i].0] == x[vars[j].0] {
                        return false;
                    }
                }
            }
            true
        }
        Constraint::LinearEq(l) => l.terms.iter().map(|&(c, v)| c * x[v.0]).sum::<i64>() == l.rhs,
        Constraint::LinearLe(l) => l.terms.iter().map(|&(c, v)| c * x[v.0]).sum::<i64>() <= l.rhs,
        Constraint::Precedence(p) => x[p.after.0] >= x[p.before.0] + p.duration + p.gap,
        Constraint::EqConst(v, val) => x[v.0] == *val,
        Constraint::Cumulative(cu) => {
            let lo = cu.tasks.iter().map(|t| x[t.start.0]).min().unwrap_or(0);
            let hi = cu.tasks.iter().map(|t| x[t.start.0] + t.duration).max().unwrap_or(0);
            (lo..hi).all(|time| {
                let load: i64 = cu
                    .tasks
                    .iter()
                    .filter(|t| x[t.start.0] <= time && time < x[t.start.0] + t.duration)
                    .map(|t| t.demand)
                    .sum();
                load <= cu.capacity
            })
        }
    }
}

/// Every assignment of the declared ranges, in lexicographic order.
pub fn all_assignments(n: &ConstraintNetwork) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for v in n.vars() {
        let (lo, hi) = n.bounds(v);
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (lo..=hi).map(move |val| {
                    let mut p = prefix.clone();
                    p.push(val);
                    p
                })
            })
            .collect();
    }
    out
}

pub fn solutions(n: &ConstraintNetwork) -> Vec<Vec<i64>> {
    all_assignments(n)
        .into_iter()
        .filter(|x| n.constraints().iter().all(|c| holds(c, x)))
        .collect()
}

pub fn brute_min(n: &ConstraintNetwork) -> Option<i64> {
    let obj = n.objective().unwrap();
    solutions(n).iter().map(|x| x[obj.0]).min()
}

/// Independent Sudoku validity: rows, columns and boxes are permutations of 1..=9.
pub fn sudoku_valid(g: &[[u8; 9]; 9]) -> bool {
    let perm = |cells: Vec<u8>| {
        let mut c = cells;
        c.sort_unstable();
        c == (1..=9).collect::<Vec<u8>>()
    };
    (0..9).all(|i| perm((0..9).map(|j| g[i][j]).collect()))
        && (0..9).all(|j| perm((0..9).map(|i| g[i][j]).collect()))
        && (0..9).all(|b| perm((0..9).map(|k| g[(b / 3) * 3 + k / 3][(b % 3) * 3 + k % 3]).collect()))
}

/// Every assignment of `n` variables over `lo..=hi`, in lexicographic order.
pub fn assignments(n: usize, lo: i64, hi: i64) -> Vec<Assignment> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| (lo..=hi).map(move |v| [p.clone(), vec![v]].concat()))
            .collect();
    }
    out.into_iter().map(Assignment::new).collect()
}
