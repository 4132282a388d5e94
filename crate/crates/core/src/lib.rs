//! Exact computation of undominated privacy-preserving signals.
//!
//! All arithmetic is over arbitrary-precision rationals. The crate decides
//! Blackwell dominance between finite belief distributions, computes
//! minimum-informative extensions of a permissible belief distribution,
//! characterizes the frontier under several privacy constraints, and builds
//! composite signals from quantile-signal branches.

pub mod belief;
pub mod blackwell;
pub mod error;
pub mod extension;
pub mod frontier;
pub mod io;
pub mod lp;
pub mod rational;
pub mod synthesis;

pub use belief::{BeliefDistribution, Posterior, SignalKernel, StateSpace};
pub use blackwell::{check_mps, compare, Dilation, DominanceResult, Relation};
pub use error::{Error, Result};
pub use rational::Rational;
