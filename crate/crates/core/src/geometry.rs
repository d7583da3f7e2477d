//! Distances, neighborhoods and the interaction range.
//!
//! The distance between two particles is `exp(‖a − b‖₂ / (2σ²))`: it equals 1
//! for coincident points and grows without bound, so every entry of a distance
//! matrix is at least 1 and every degree counts a point's own position when
//! `include_self` is on.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::params::{ModelParams, RangeSpec};

/// Exponential distance between two points.
pub fn pair_distance(a: &[f64], b: &[f64], sigma: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::usage(format!(
            "dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::usage(format!("sigma must be positive, got {sigma}")));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::usage("non-finite coordinate"));
    }
    Ok(exp_distance(euclidean(a.iter(), b.iter()), sigma))
}

#[inline]
fn euclidean<'a>(a: impl Iterator<Item = &'a f64>, b: impl Iterator<Item = &'a f64>) -> f64 {
    a.zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[inline]
fn exp_distance(norm: f64, sigma: f64) -> f64 {
    (norm / (2.0 * sigma * sigma)).exp()
}

pub(crate) fn euclidean_rows(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    euclidean(a.iter(), b.iter())
}

/// Dense N×N distance matrix with a unit diagonal.
pub fn distance_matrix(positions: ArrayView2<'_, f64>, sigma: f64) -> Result<Array2<f64>> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::usage(format!("sigma must be positive, got {sigma}")));
    }
    if positions.iter().any(|v| !v.is_finite()) {
        return Err(Error::usage("non-finite coordinate"));
    }
    let n = positions.nrows();
    let mut d = Array2::<f64>::ones((n, n));
    for i in 0..n {
        let xi = positions.row(i);
        for j in (i + 1)..n {
            let v = exp_distance(euclidean_rows(xi, positions.row(j)), sigma);
            d[[i, j]] = v;
            d[[j, i]] = v;
        }
    }
    Ok(d)
}

/// Distances, adjacency, neighbor sets and degrees for one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologySnapshot {
    pub distance: Array2<f64>,
    pub adjacency: Array2<bool>,
    /// Ascending particle indices.
    pub neighbors: Vec<Vec<usize>>,
    pub degree: Vec<usize>,
}

impl TopologySnapshot {
    pub fn len(&self) -> usize {
        self.degree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degree.is_empty()
    }
}

/// Adjacency is `d <= range`; with `include_self` off the diagonal is cleared.
pub fn build_topology(distance: Array2<f64>, range: f64, include_self: bool) -> TopologySnapshot {
    let n = distance.nrows();
    let mut adjacency = distance.mapv(|d| d <= range);
    if !include_self {
        for i in 0..n {
            adjacency[[i, i]] = false;
        }
    }
    let neighbors: Vec<Vec<usize>> = adjacency
        .axis_iter(Axis(0))
        .map(|row| {
            row.iter()
                .enumerate()
                .filter_map(|(j, &adj)| adj.then_some(j))
                .collect()
        })
        .collect();
    let degree = neighbors.iter().map(Vec::len).collect();
    TopologySnapshot {
        distance,
        adjacency,
        neighbors,
        degree,
    }
}

/// Median over rows of the `b`-th smallest initial distance (1-indexed).
///
/// Position 1 of every sorted row is the self-distance 1, so `b = 1` always
/// yields 1. For an even number of rows the two central values are averaged.
pub fn select_interaction_range(initial_distance: ArrayView2<'_, f64>, b: usize) -> Result<f64> {
    let n = initial_distance.nrows();
    if b == 0 || b > n {
        return Err(Error::usage(format!("b must lie in 1..={n}, got {b}")));
    }
    let mut column: Vec<f64> = initial_distance
        .axis_iter(Axis(0))
        .map(|row| {
            let mut sorted = row.to_vec();
            sorted.sort_by(f64::total_cmp);
            sorted[b - 1]
        })
        .collect();
    Ok(median(&mut column))
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Particles plus the frozen snapshot of their initial configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSystem {
    pub positions: Array2<f64>,
    initial_positions: Array2<f64>,
    initial: TopologySnapshot,
    range: f64,
    sigma: f64,
    include_self: bool,
    pub labels: Option<Vec<String>>,
}

impl ParticleSystem {
    /// Computes D(0), resolves R from `params.range` and builds the initial topology.
    pub fn new(features: Array2<f64>, params: &ModelParams) -> Result<Self> {
        params.validate()?;
        check_shape(&features)?;
        let d0 = distance_matrix(features.view(), params.sigma)?;
        let range = match params.range {
            RangeSpec::Rank(b) => select_interaction_range(d0.view(), b)?,
            RangeSpec::Radius(r) => r,
        };
        let initial = build_topology(d0, range, params.include_self);
        Ok(Self {
            initial_positions: features.clone(),
            positions: features,
            initial,
            range,
            sigma: params.sigma,
            include_self: params.include_self,
            labels: None,
        })
    }

    /// Builds a system around a hand-made initial snapshot.
    ///
    /// Used to pose scenarios whose degrees are specified rather than derived
    /// from geometry. The snapshot must cover every particle.
    pub fn with_initial_topology(
        positions: Array2<f64>,
        initial: TopologySnapshot,
        range: f64,
        sigma: f64,
        include_self: bool,
    ) -> Result<Self> {
        check_shape(&positions)?;
        let n = positions.nrows();
        if initial.len() != n || initial.distance.dim() != (n, n) {
            return Err(Error::usage("initial topology does not match particle count"));
        }
        Ok(Self {
            initial_positions: positions.clone(),
            positions,
            initial,
            range,
            sigma,
            include_self,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::usage(format!(
                "{} labels for {} particles",
                labels.len(),
                self.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.positions.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.positions.ncols()
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn include_self(&self) -> bool {
        self.include_self
    }

    pub fn initial_positions(&self) -> &Array2<f64> {
        &self.initial_positions
    }

    pub fn initial_distance(&self) -> &Array2<f64> {
        &self.initial.distance
    }

    pub fn initial_degree(&self) -> &[usize] {
        &self.initial.degree
    }

    pub fn initial_neighbors(&self) -> &[Vec<usize>] {
        &self.initial.neighbors
    }

    pub fn initial_topology(&self) -> &TopologySnapshot {
        &self.initial
    }

    /// Topology of the current positions under the system's range.
    pub fn current_topology(&self) -> TopologySnapshot {
        let d = distance_matrix(self.positions.view(), self.sigma)
            .expect("positions stay finite under convex updates");
        build_topology(d, self.range, self.include_self)
    }
}

fn check_shape(points: &Array2<f64>) -> Result<()> {
    let (n, m) = points.dim();
    if n < 2 {
        return Err(Error::usage(format!("need at least 2 particles, got {n}")));
    }
    if m < 1 {
        return Err(Error::usage("particles need at least one coordinate"));
    }
    Ok(())
}
