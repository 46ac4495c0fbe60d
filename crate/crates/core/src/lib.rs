//! First-moment bound on the 3-colourability threshold of sparse random
//! graphs, computed through rigid colourings.
//!
//! * [`model`]: parameters, Poisson degree weights, large-deviation rate.
//! * [`spread`]: the stationary occupation fractions and the two-equation
//!   spread system.
//! * [`solver`]: monotone bracketing solvers for that system.
//! * [`bound`]: the per-vertex bound `F(c)`, threshold search and scans.
//! * [`graph`]: sampling, exact colouring counts and Monte Carlo checks on
//!   small random multigraphs.

pub mod bound;
pub mod error;
pub mod graph;
pub mod model;
pub mod solver;
pub mod spread;

pub use error::{Error, Result};
