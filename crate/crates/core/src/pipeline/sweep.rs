use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::ParticleSystem;
use crate::params::{RangeSpec, Variant};
use crate::pipeline::{run_clustering, ClusterResult, RunConfig};

/// Mean, sample variance and maximum of per-trial accuracies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyStats {
    pub mean: f64,
    pub variance: f64,
    pub max: f64,
}

impl AccuracyStats {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(Self { mean, variance, max })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub b: usize,
    pub range: f64,
    /// One run for deterministic variants, `trials` runs for RW2.
    pub runs: Vec<ClusterResult>,
    pub accuracy: Option<AccuracyStats>,
}

impl SweepEntry {
    pub fn mean_raw_clusters(&self) -> f64 {
        self.runs.iter().map(|r| r.raw_cluster_count as f64).sum::<f64>() / self.runs.len() as f64
    }

    pub fn mean_merged_clusters(&self) -> f64 {
        self.runs.iter().map(|r| r.merged_cluster_count as f64).sum::<f64>() / self.runs.len() as f64
    }
}

/// One full run per `b` (RW2: `trials` runs seeded `seed, seed + 1, ...`).
///
/// The initial topology depends on R, so the system is rebuilt from its
/// initial positions for every `b`.
pub fn sweep_b(
    system: &ParticleSystem,
    base: &RunConfig,
    b_values: &[usize],
    trials: usize,
) -> Result<Vec<SweepEntry>> {
    let trials = match base.params.variant {
        Variant::Rw2 => trials.max(1),
        Variant::Rw1 | Variant::NaiveRw1 => 1,
    };
    b_values
        .iter()
        .map(|&b| {
            let params = base.params.clone().with_range(RangeSpec::Rank(b));
            let mut sys = ParticleSystem::new(system.initial_positions().clone(), &params)?;
            sys.labels = system.labels.clone();
            let runs = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let cfg = RunConfig {
                        params: params.clone().with_seed(params.seed.wrapping_add(t as u64)),
                        ..base.clone()
                    };
                    run_clustering(&sys, &cfg)
                })
                .collect::<Result<Vec<_>>>()?;
            let accs: Vec<f64> = runs.iter().filter_map(|r| r.accuracy).collect();
            Ok(SweepEntry {
                b,
                range: sys.range(),
                accuracy: AccuracyStats::from_values(&accs),
                runs,
            })
        })
        .collect()
}
