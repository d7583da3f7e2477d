//! One synchronous iteration of the walk.
//!
//! An iteration runs in three phases: rebuild the topology from the current
//! positions, let every particle choose one target from its transition row,
//! then commit all moves at once. Every particle reads only the pre-step
//! position matrix, so the processing order never matters.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::Rng;

use crate::geometry::{ParticleSystem, TopologySnapshot};
use crate::params::{ModelParams, Variant};
use crate::rng;

/// Transition probabilities of one particle, dense over all N particles.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRow {
    pub probs: Vec<f64>,
    /// Indices with nonzero weight, ascending.
    pub support: Vec<usize>,
}

impl TransitionRow {
    fn isolated(n: usize) -> Self {
        Self {
            probs: vec![0.0; n],
            support: Vec::new(),
        }
    }

    /// No neighbor at all: the row is identically zero.
    pub fn is_isolated(&self) -> bool {
        self.support.is_empty()
    }

    /// Normalises `log_weights` (aligned with `support`) into a row.
    fn from_log_weights(n: usize, support: Vec<usize>, log_weights: &[f64]) -> Self {
        let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut probs = vec![0.0; n];
        let mut total = 0.0;
        for (&j, &lw) in support.iter().zip(log_weights) {
            let w = (lw - max).exp();
            probs[j] = w;
            total += w;
        }
        for &j in &support {
            probs[j] /= total;
        }
        Self { probs, support }
    }
}

/// Degree- and history-weighted transition row of particle `i`.
///
/// For every current neighbor j the weight is
///
/// ```text
/// a_ij = (K_j(t) / Σ_{Γ_i(t)} K) · (K_j(0) / Σ_{Γ_i(0)} K(0)) / (d_ij(t) · d_ij(0))
/// ```
///
/// and the row is `a_ij` normalised over Γ_i(t). The initial factors always
/// come from the frozen snapshot, including for neighbors that were not
/// neighbors at t = 0. Weights are combined in log space because the
/// exponential distance overflows long before the ratio does.
pub fn transition_row(i: usize, topo_now: &TopologySnapshot, system: &ParticleSystem) -> TransitionRow {
    let n = topo_now.len();
    let support = topo_now.neighbors[i].clone();
    if support.is_empty() {
        return TransitionRow::isolated(n);
    }
    let k0 = system.initial_degree();
    let d0 = system.initial_distance();
    let now_total: usize = support.iter().map(|&j| topo_now.degree[j]).sum();
    let init_total: usize = system.initial_neighbors()[i].iter().map(|&j| k0[j]).sum();
    let ln_now_total = (now_total as f64).ln();
    let ln_init_total = (init_total as f64).ln();

    let log_weights: Vec<f64> = support
        .iter()
        .map(|&j| {
            (topo_now.degree[j] as f64).ln() - ln_now_total + (k0[j] as f64).ln() - ln_init_total
                - topo_now.distance[[i, j]].ln()
                - d0[[i, j]].ln()
        })
        .collect();
    TransitionRow::from_log_weights(n, support, &log_weights)
}

/// Inverse-distance transition row: `p_ij ∝ 1 / d_ij(t)` over Γ_i(t).
pub fn naive_transition_row(i: usize, topo_now: &TopologySnapshot) -> TransitionRow {
    let n = topo_now.len();
    let support = topo_now.neighbors[i].clone();
    if support.is_empty() {
        return TransitionRow::isolated(n);
    }
    let log_weights: Vec<f64> = support
        .iter()
        .map(|&j| -topo_now.distance[[i, j]].ln())
        .collect();
    TransitionRow::from_log_weights(n, support, &log_weights)
}

/// The single transition chosen by a particle, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventVector {
    pub target: Option<usize>,
    len: usize,
}

impl EventVector {
    pub fn none(len: usize) -> Self {
        Self { target: None, len }
    }

    pub fn to(target: usize, len: usize) -> Self {
        debug_assert!(target < len);
        Self {
            target: Some(target),
            len,
        }
    }

    pub fn one_hot(&self) -> Vec<u8> {
        let mut v = vec![0; self.len];
        if let Some(k) = self.target {
            v[k] = 1;
        }
        v
    }
}

/// Dice tallies for one particle: `counts[j]` rolls landed on neighbor j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiceCounts {
    pub counts: Vec<u32>,
    pub rolls: usize,
}

/// Argmax of `score` over admissible support entries (distance > theta).
/// Ties go to the lowest index.
fn admissible_argmax<T: PartialOrd + Copy>(
    row: &TransitionRow,
    distance_row: ArrayView1<'_, f64>,
    theta: f64,
    score: impl Fn(usize) -> T,
) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for &j in &row.support {
        if distance_row[j] <= theta {
            continue;
        }
        let s = score(j);
        match best {
            Some((_, b)) if s <= b => {}
            _ => best = Some((j, s)),
        }
    }
    best.map(|(j, _)| j)
}

/// Deterministic event: the most probable neighbor farther than `theta`.
pub fn generate_event_rw1(
    _i: usize,
    row: &TransitionRow,
    distance_row: ArrayView1<'_, f64>,
    theta: f64,
) -> EventVector {
    let n = row.probs.len();
    match admissible_argmax(row, distance_row, theta, |j| row.probs[j]) {
        Some(k) => EventVector::to(k, n),
        None => EventVector::none(n),
    }
}

/// Rolls a biased die `rolls` times over the row's support.
///
/// The unit interval is split into consecutive subintervals, one per support
/// entry in index order, each as long as that entry's probability. Every
/// uniform variate is binned by inverse CDF.
pub fn roll_dice<R: Rng + ?Sized>(row: &TransitionRow, rolls: usize, rng: &mut R) -> DiceCounts {
    let n = row.probs.len();
    let mut counts = vec![0u32; n];
    if row.support.is_empty() {
        return DiceCounts { counts, rolls: 0 };
    }
    let mut cumulative = Vec::with_capacity(row.support.len());
    let mut acc = 0.0;
    for &j in &row.support {
        acc += row.probs[j];
        cumulative.push(acc);
    }
    let last = row.support.len() - 1;
    for _ in 0..rolls {
        let u: f64 = rng.random();
        // Rounding can leave the final edge a hair under 1.
        let face = cumulative.partition_point(|&c| c <= u).min(last);
        counts[row.support[face]] += 1;
    }
    DiceCounts { counts, rolls }
}

/// Stochastic event: roll the die, then take the admissible face hit most often.
pub fn generate_event_rw2<R: Rng + ?Sized>(
    _i: usize,
    row: &TransitionRow,
    distance_row: ArrayView1<'_, f64>,
    theta: f64,
    rolls: usize,
    rng: &mut R,
) -> (EventVector, DiceCounts) {
    let n = row.probs.len();
    let dice = roll_dice(row, rolls, rng);
    let event = match admissible_argmax(row, distance_row, theta, |j| dice.counts[j]) {
        Some(k) => EventVector::to(k, n),
        None => EventVector::none(n),
    };
    (event, dice)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    /// Walk length `p_ik · d_ik`, zero when no event fired.
    pub omega: f64,
    pub new_position: Array1<f64>,
}

/// Moves particle `i` toward its chosen target by the fraction `p_ik`.
pub fn apply_step(
    i: usize,
    event: &EventVector,
    row: &TransitionRow,
    distance_row: ArrayView1<'_, f64>,
    positions: ArrayView2<'_, f64>,
) -> StepOutcome {
    let xi = positions.row(i);
    match event.target {
        None => StepOutcome {
            omega: 0.0,
            new_position: xi.to_owned(),
        },
        Some(k) => {
            let p = row.probs[k];
            let xk = positions.row(k);
            let new_position = Array1::from_iter(xi.iter().zip(xk.iter()).map(|(&a, &b)| a + (b - a) * p));
            StepOutcome {
                omega: p * distance_row[k],
                new_position,
            }
        }
    }
}

/// Result of one synchronous iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationOutcome {
    pub positions: Array2<f64>,
    pub omega: Vec<f64>,
    /// Topology the moves were computed from.
    pub topology: TopologySnapshot,
}

impl IterationOutcome {
    pub fn total_omega(&self) -> f64 {
        self.omega.iter().sum()
    }
}

/// Chooses particle `i`'s event under `params.variant`.
pub fn choose_event(
    i: usize,
    topo: &TopologySnapshot,
    system: &ParticleSystem,
    params: &ModelParams,
    iteration: usize,
) -> (TransitionRow, EventVector) {
    let distance_row = topo.distance.row(i);
    match params.variant {
        Variant::Rw1 => {
            let row = transition_row(i, topo, system);
            let ev = generate_event_rw1(i, &row, distance_row, params.theta);
            (row, ev)
        }
        Variant::NaiveRw1 => {
            let row = naive_transition_row(i, topo);
            let ev = generate_event_rw1(i, &row, distance_row, params.theta);
            (row, ev)
        }
        Variant::Rw2 => {
            let row = transition_row(i, topo, system);
            let mut stream = rng::particle_stream(params.seed, iteration, i);
            let (ev, _) =
                generate_event_rw2(i, &row, distance_row, params.theta, topo.degree[i], &mut stream);
            (row, ev)
        }
    }
}

/// Runs one iteration from `system.positions` without mutating the system.
///
/// `iteration` indexes the per-particle random streams used by RW2.
pub fn iterate(system: &ParticleSystem, params: &ModelParams, iteration: usize) -> IterationOutcome {
    let order: Vec<usize> = (0..system.len()).collect();
    iterate_in_order(system, params, iteration, &order)
}

pub(crate) fn iterate_in_order(
    system: &ParticleSystem,
    params: &ModelParams,
    iteration: usize,
    order: &[usize],
) -> IterationOutcome {
    let topology = system.current_topology();
    let old = system.positions.view();
    let mut positions = system.positions.clone();
    let mut omega = vec![0.0; system.len()];
    for &i in order {
        let (row, event) = choose_event(i, &topology, system, params, iteration);
        let step = apply_step(i, &event, &row, topology.distance.row(i), old);
        positions.row_mut(i).assign(&step.new_position);
        omega[i] = step.omega;
    }
    IterationOutcome {
        positions,
        omega,
        topology,
    }
}
