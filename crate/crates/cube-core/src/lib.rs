//! Cube: a structured, cut-free reconstruction of Prolog with `until`,
//! `unless` and if-then-else, clauses as abstractions, and a compositional
//! semantics of lazy solution streams over rational-tree bindings.

pub mod difftest;
pub mod engine;
pub mod outcome;
pub mod setting;
pub mod stdlib;
pub mod syntax;
pub mod term;
