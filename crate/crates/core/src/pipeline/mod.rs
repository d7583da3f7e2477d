//! Complete clustering runs and what is done with their output.

mod accuracy;
mod extract;
mod merge;
mod sweep;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::dynamics;
use crate::error::{Error, Result};
use crate::geometry::ParticleSystem;
use crate::params::ModelParams;

pub use accuracy::clustering_accuracy;
pub use extract::{cluster_count, extract_clusters};
pub use merge::merge_to_k;
pub use sweep::{sweep_b, AccuracyStats, SweepEntry};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    /// Preset class count; surplus clusters are merged away.
    pub target_clusters: Option<usize>,
    /// Record Σω for every iteration.
    pub trace: bool,
}

impl RunConfig {
    pub fn new(params: ModelParams) -> Self {
        Self {
            params,
            target_clusters: None,
            trace: true,
        }
    }

    pub fn with_target(mut self, k: usize) -> Self {
        self.target_clusters = Some(k);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// Σω dropped below ε.
    Converged,
    HitMaxIters,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    /// Contiguous ids 0..k after merging.
    pub assignments: Vec<usize>,
    pub raw_cluster_count: usize,
    pub merged_cluster_count: usize,
    pub iterations: usize,
    /// Σω per iteration; empty when tracing was off.
    pub convergence_trace: Vec<f64>,
    pub accuracy: Option<f64>,
    pub final_positions: Array2<f64>,
    pub stop_reason: StopReason,
    /// Interaction range the run used.
    pub range: f64,
    pub epsilon: f64,
}

/// Runs the walk until Σω < ε or `max_iters`, then reads off clusters.
///
/// The system must have been built with the same sigma, range and
/// include-self setting as `config.params`. Accuracy is filled in when the
/// system carries labels.
pub fn run_clustering(system: &ParticleSystem, config: &RunConfig) -> Result<ClusterResult> {
    let params = &config.params;
    params.validate()?;
    if params.sigma != system.sigma() || params.include_self != system.include_self() {
        return Err(Error::usage("run parameters do not match the particle system"));
    }
    if let Some(0) = config.target_clusters {
        return Err(Error::usage("target cluster count must be >= 1"));
    }
    let epsilon = params.epsilon_for(system.len());
    let mut state = system.clone();
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut stop_reason = StopReason::HitMaxIters;
    while iterations < params.max_iters {
        let out = dynamics::iterate(&state, params, iterations);
        iterations += 1;
        let total = out.total_omega();
        state.positions = out.positions;
        if config.trace {
            trace.push(total);
        }
        if total < epsilon {
            stop_reason = StopReason::Converged;
            break;
        }
    }

    let raw = extract_clusters(state.positions.view(), params.sigma, params.theta);
    let raw_cluster_count = cluster_count(&raw);
    let assignments = match config.target_clusters {
        Some(k) if raw_cluster_count > k => merge_to_k(&raw, state.positions.view(), k)?,
        _ => raw,
    };
    let merged_cluster_count = cluster_count(&assignments);
    let accuracy = system
        .labels
        .as_deref()
        .map(|labels| clustering_accuracy(&assignments, labels))
        .transpose()?;

    Ok(ClusterResult {
        assignments,
        raw_cluster_count,
        merged_cluster_count,
        iterations,
        convergence_trace: trace,
        accuracy,
        final_positions: state.positions,
        stop_reason,
        range: system.range(),
        epsilon,
    })
}

/// Builds the system for `features` under `config` and runs it.
pub fn cluster(features: Array2<f64>, labels: Option<Vec<String>>, config: &RunConfig) -> Result<ClusterResult> {
    let mut system = ParticleSystem::new(features, &config.params)?;
    if let Some(labels) = labels {
        system = system.with_labels(labels)?;
    }
    run_clustering(&system, config)
}
