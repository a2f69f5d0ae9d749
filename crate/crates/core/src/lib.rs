//! Inclusion representations of finite posets.
//!
//! A representation assigns a finite set `S_x` to every element so that
//! `x <= y` iff `S_x ⊆ S_y`. This crate computes the cube height, the
//! 2-dimension, the cube width and the largest irreducible ground size of a
//! poset, and provides the reductions, decompositions and characterizations
//! that go with them.

pub mod characterization;
pub mod generators;
pub mod poset;
pub mod representation;
pub mod solvers;
pub mod verify;

pub use poset::{Elem, Poset};
pub use representation::Representation;
pub use solvers::{MethodChoice, Param, ParamReport, SolveError, Solver};
