//! Solver library for the two-stage capacitated facility location problem:
//! pick plants and depots to open and route a single product
//! plant -> depot -> customer at minimum fixed-plus-transport cost.
//!
//! The pieces, bottom up:
//!
//! - [`instance`]: problem data, the five-class benchmark generator, JSON
//!   file I/O.
//! - [`flow`]: exact min-cost flow on the layered network, generic over the
//!   cost scalar (integers for evaluation, rationals for the LP bound).
//! - [`evaluator`]: exact objective of an open/close mask, LP-relaxation
//!   lower bound, RPD.
//! - [`surrogate`]: extreme-learning-machine fitness approximation.
//! - [`heuristics`]: cost-benefit construction (CBR), LP rounding, and the
//!   MIH repair/improvement pass.
//! - [`search`]: CX crossover, swap mutation, adaptive operator
//!   probabilities, inversion local search, restart strategy.
//! - [`engine`]: the full surrogate-assisted evolutionary loop and a plain
//!   exact-evaluation baseline.
//!
//! Everything stochastic draws from seeded ChaCha8 substreams, so runs and
//! generated instances reproduce bit-for-bit.

pub mod engine;
pub mod error;
pub mod evaluator;
pub mod flow;
pub mod heuristics;
pub mod instance;
pub mod matrix;
pub mod rng;
pub mod scalar;
pub mod search;
pub mod surrogate;

pub use error::{Error, Result, Stage};

/// Money amounts (costs and objectives). All instance data is integral, so
/// exact evaluation never leaves the integers.
pub type Money = i64;

/// Product units (capacities, demands, flows).
pub type Units = i64;

/// Fitness values as handled by the evolutionary engine.
pub type Fitness = f64;

/// Exact rational scalar used by the LP-relaxation bound.
pub type Rational = num_rational::BigRational;

/// The ELM surrogate at engine precision.
pub type Elm = surrogate::ElmModel<f64>;
