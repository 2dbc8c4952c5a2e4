//! Ramanujan Cayley graphs from the class-number-one definite quaternion
//! orders.
//!
//! The modules follow the construction in order: [`quat`] and [`lattice`]
//! for the maximal order and its norm form, [`units`] for units and norm
//! classes, [`finite`] and [`congruence`] for the finite quotients and
//! congruence pairs, [`tree`] for the generators, [`matrix`] and [`graph`]
//! for the Cayley graph, and [`spectrum`] for the Ramanujan test.
//! [`pipeline`] chains them together. The guide in `book/` walks through
//! each step with runnable examples.

// Index loops over structure constants read better than iterator chains here.
#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod congruence;
pub mod error;
pub mod export;
pub mod fingerprint;
pub mod graph;
pub mod finite;
pub mod lattice;
pub mod matrix;
pub mod pipeline;
pub mod quat;
pub mod spectrum;
pub mod tree;
pub mod units;

// The guide's code blocks run as doc-tests.
#[doc = include_str!("../../../book/src/introduction.md")]
#[cfg(doctest)]
pub mod guide_introduction {}
#[doc = include_str!("../../../book/src/orders.md")]
#[cfg(doctest)]
pub mod guide_orders {}
#[doc = include_str!("../../../book/src/units.md")]
#[cfg(doctest)]
pub mod guide_units {}
#[doc = include_str!("../../../book/src/congruence.md")]
#[cfg(doctest)]
pub mod guide_congruence {}
#[doc = include_str!("../../../book/src/tree.md")]
#[cfg(doctest)]
pub mod guide_tree {}
#[doc = include_str!("../../../book/src/graphs.md")]
#[cfg(doctest)]
pub mod guide_graphs {}
#[doc = include_str!("../../../book/src/cli.md")]
#[cfg(doctest)]
pub mod guide_cli {}
#[doc = include_str!("../../../README.md")]
#[cfg(doctest)]
pub mod readme {}
