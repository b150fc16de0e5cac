mod common;

use common::{brute_min, random_network, rng, solutions, sudoku_valid};
use icp_core::cp::{
    build_schedule, build_sudoku, check, grid_of, propagate, Constraint,
    ConstraintNetwork, Cumulative, CumulativeTask, ScheduleInstance, SolveOutcome, Solver,
};
use proptest::prelude::*;

#[test]
fn satisfiability_matches_enumeration() {
    let mut r = rng(11);
    for case in 0..300 {
        let n = random_network(&mut r, false);
        let sols = solutions(&n);
        let res = Solver::default().solve(&n).unwrap();
        match &res.outcome {
            SolveOutcome::Solution { assignment, .. } => {
                assert!(!sols.is_empty(), "case {case}: solver found a solution the oracle denies");
                assert!(sols.contains(&assignment.0), "case {case}");
                assert!(check(assignment, &n).unwrap());
            }
            SolveOutcome::Unsat => assert!(sols.is_empty(), "case {case}: missed solution {n:?}"),
            other => panic!("case {case}: {other:?}"),
        }
    }
}

#[test]
fn minimize_matches_enumeration() {
    let mut r = rng(12);
    for case in 0..300 {
        let n = random_network(&mut r, true);
        let res = Solver::default().minimize(&n).unwrap();
        assert_eq!(res.objective(), brute_min(&n), "case {case}: {n:?}");
        if let Some(a) = res.assignment() {
            assert!(check(a, &n).unwrap());
        }
    }
}

#[test]
fn three_tasks_two_slots_makespan_four() {
    // brute force over {0..8}^3 gives 4
    let mut n = ConstraintNetwork::new();
    let starts: Vec<_> = (0..3).map(|i| n.add_var(format!("s{i}"), 0, 8)).collect();
    n.post(Constraint::Cumulative(Cumulative {
        tasks: starts.iter().map(|&s| CumulativeTask { start: s, duration: 2, demand: 1 }).collect(),
        capacity: 2,
    }));
    let mut best = i64::MAX;
    for a in 0..=8 {
        for b in 0..=8 {
            for c in 0..=8 {
                let x = vec![a, b, c];
                if common::holds(&n.constraints()[0], &x) {
                    best = best.min(a.max(b).max(c) + 2);
                }
            }
        }
    }
    assert_eq!(best, 4);

    let inst = ScheduleInstance {
        durations: vec![0, 2, 2, 2],
        prev: vec![0; 4],
        capacities: vec![2],
        usage: vec![vec![0, 1, 1, 1]],
        max_time: 8,
        gap: 0,
    };
    let s = build_schedule(&inst).unwrap();
    assert_eq!(Solver::default().minimize(&s.network).unwrap().objective(), Some(best));
}

#[test]
fn single_task_starts_immediately() {
    let inst = ScheduleInstance {
        durations: vec![0, 3],
        prev: vec![0, 0],
        capacities: vec![1],
        usage: vec![vec![0, 1]],
        max_time: 10,
        gap: 0,
    };
    let s = build_schedule(&inst).unwrap();
    let r = Solver::default().minimize(&s.network).unwrap();
    assert_eq!(r.objective(), Some(3));
    assert_eq!(r.assignment().unwrap().get(s.starts[1]), 0);
}

#[test]
fn empty_sudoku_solves_to_valid_grid() {
    let n = build_sudoku(&[[0; 9]; 9]);
    let r = Solver::default().solve(&n).unwrap();
    let a = r.assignment().expect("empty grid has solutions");
    assert!(sudoku_valid(&grid_of(a)));
}

#[test]
fn prefilled_sudoku_is_returned_unchanged() {
    let n = build_sudoku(&[[0; 9]; 9]);
    let full = grid_of(Solver::default().solve(&n).unwrap().assignment().unwrap());
    let r = Solver::default().solve(&build_sudoku(&full)).unwrap();
    assert_eq!(grid_of(r.assignment().unwrap()), full);
    assert_eq!(r.nodes, 0);
}

#[test]
fn puzzle_solution_keeps_givens() {
    let puzzle: [[u8; 9]; 9] = [
        [5, 3, 0, 0, 7, 0, 0, 0, 0],
        [6, 0, 0, 1, 9, 5, 0, 0, 0],
        [0, 9, 8, 0, 0, 0, 0, 6, 0],
        [8, 0, 0, 0, 6, 0, 0, 0, 3],
        [4, 0, 0, 8, 0, 3, 0, 0, 1],
        [7, 0, 0, 0, 2, 0, 0, 0, 6],
        [0, 6, 0, 0, 0, 0, 2, 8, 0],
        [0, 0, 0, 4, 1, 9, 0, 0, 5],
        [0, 0, 0, 0, 8, 0, 0, 7, 9],
    ];
    let r = Solver::default().solve(&build_sudoku(&puzzle)).unwrap();
    let g = grid_of(r.assignment().unwrap());
    assert!(sudoku_valid(&g));
    for i in 0..9 {
        for j in 0..9 {
            if puzzle[i][j] != 0 {
                assert_eq!(g[i][j], puzzle[i][j]);
            }
        }
    }
}

fn network_strategy() -> impl Strategy<Value = ConstraintNetwork> {
    (any::<u64>(), any::<bool>()).prop_map(|(seed, obj)| random_network(&mut rng(seed), obj))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn propagation_is_sound_and_idempotent(n in network_strategy()) {
        let sols = solutions(&n);
        match propagate(&n, n.initial_domains().unwrap()) {
            Err(_) => prop_assert!(sols.is_empty()),
            Ok(d) => {
                for s in &sols {
                    for (v, dom) in s.iter().zip(&d) {
                        prop_assert!(dom.contains(*v));
                    }
                }
                prop_assert_eq!(propagate(&n, d.clone()).unwrap(), d);
            }
        }
    }

    #[test]
    fn solver_is_deterministic(n in network_strategy()) {
        prop_assert_eq!(Solver::default().solve(&n).unwrap(), Solver::default().solve(&n).unwrap());
    }

    #[test]
    fn solutions_pass_check(n in network_strategy()) {
        if let Some(a) = Solver::default().solve(&n).unwrap().assignment() {
            prop_assert!(check(a, &n).unwrap());
        }
    }
}
