//! The 9×9 Sudoku model: one variable per cell, givens as equalities, and
//! an all-different constraint per row, column and 3×3 box.

use alloc::format;
use alloc::vec::Vec;

use super::network::{Assignment, Constraint, ConstraintNetwork, VarId};

pub type Grid = [[u8; 9]; 9];

/// Variable of cell (`row`, `col`), both 0-based.
pub fn cell(row: usize, col: usize) -> VarId {
    VarId(row * 9 + col)
}

/// Builds the model; `0` marks a blank cell.
pub fn build_sudoku(start: &Grid) -> ConstraintNetwork {
    let mut n = ConstraintNetwork::new();
    for i in 1..=9 {
        for j in 1..=9 {
            n.add_var(format!("puzzle[{i},{j}]"), 1, 9);
        }
    }
    for (r, row) in start.iter().enumerate() {
        for (c, &given) in row.iter().enumerate() {
            if given != 0 {
                n.post(Constraint::EqConst(cell(r, c), i64::from(given)));
            }
        }
    }
    for i in 0..9 {
        n.post(Constraint::AllDifferent((0..9).map(|j| cell(i, j)).collect()));
    }
    for j in 0..9 {
        n.post(Constraint::AllDifferent((0..9).map(|i| cell(i, j)).collect()));
    }
    for band in 0..3 {
        for stack in 0..3 {
            let vars: Vec<VarId> = (0..9)
                .map(|k| cell(band * 3 + k / 3, stack * 3 + k % 3))
                .collect();
            n.post(Constraint::AllDifferent(vars));
        }
    }
    n
}

/// Reads a solved grid back out of an assignment of [`build_sudoku`]'s network.
pub fn grid_of(a: &Assignment) -> Grid {
    let mut g = [[0u8; 9]; 9];
    for (r, row) in g.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = a.get(cell(r, c)) as u8;
        }
    }
    g
}
