//! Decorated localization graphs for Mixed-Spin-P fields on the bidegree
//! (3,3) Calabi-Yau threefold in `P2 x P2`.
//!
//! The crate computes exact torus weights at graph vertices and edges,
//! detects and removes T-balanced nodes, evaluates virtual dimensions of
//! the localized moduli, and runs the reduction that certifies vanishing of
//! the contribution of irregular graphs. [`enumerate`] generates every
//! small graph so the certification can be checked exhaustively.

pub mod canon;
pub mod cli;
pub mod enumerate;
pub mod flatten;
pub mod format;
pub mod graph;
pub mod lg;
pub mod rat;
pub mod reduce;
pub mod vdim;
pub mod weights;

pub use graph::{DecoratedGraph, GraphBuilder};
pub use rat::Rat;
