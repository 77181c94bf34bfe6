//! Randomized block Kaczmarz solvers for the matrix equation `AXB = F`,
//! with problem generators, convergence bounds and a benchmark harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod partition;
pub mod problems;
pub mod rng;
pub mod solvers;
