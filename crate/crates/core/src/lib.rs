//! Clustering by a modified random walk.
//!
//! Every data point is treated as a particle. At each iteration a particle
//! looks at the neighbors inside its interaction range, weighs them by their
//! current and initial degree and distance, picks exactly one of them, and
//! steps toward it by a fraction equal to the transition probability. All
//! particles move synchronously. Dense regions contract into coincident
//! points; the run stops once the summed walk length falls below a threshold
//! and the co-located groups are read off as clusters.
//!
//! The crate is organised as:
//!
//! - [`geometry`]: the exponential distance, neighborhood topology and the
//!   rank-based choice of interaction range.
//! - [`dynamics`]: transition rows, the deterministic (RW1) and dice-based
//!   (RW2) event generators, and the synchronous step.
//! - [`pipeline`]: complete runs, cluster extraction, merging down to a
//!   preset count, accuracy and parameter sweeps.
//! - [`theory`]: closed forms and Monte Carlo simulators for the absorbing
//!   and encounter probabilities of one-dimensional walks.
//! - [`io`]: dataset loading with imputation, and run reports.

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod io;
pub mod params;
pub mod pipeline;
pub mod rng;
pub mod theory;

pub use error::{Error, Result};
pub use geometry::{ParticleSystem, TopologySnapshot};
pub use params::{ModelParams, RangeSpec, Variant};
pub use pipeline::{ClusterResult, RunConfig, StopReason};
