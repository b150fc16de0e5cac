//! Inductive constraint programming: a finite-domain constraint solver and a
//! learning component coupled through a closed observe/learn/solve/apply loop.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, configuration and
//! the command-line front end live in the companion `icp` crate.
//!
//! - [`cp`]: constraint networks, propagation, search and branch-and-bound.
//! - [`ml`]: least-squares regression and a version-space constraint learner.
//! - [`icp`]: repositories, channel bindings and the loop cycle.
//! - [`worlds`]: the hospital scheduling simulator and the constraint
//!   acquisition oracle, each wired into the loop.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cp;
pub mod icp;
pub mod ml;
pub mod worlds;
