//! Absorbing and encounter probabilities of one-dimensional walks.
//!
//! A walker on the non-negative integers steps away from the origin with
//! probability `p`, toward it with `q` and stays with `r`. The probability of
//! ever reaching the origin from `l` is `(q/p)^l` when `p > q` and 1 otherwise.
//! Two walkers A (left, start `j`) and B (right, start `k >= j`) meet when the
//! gap `Z = B − A` falls to within `eta`; Z is itself such a walk with steps of
//! two, so the same closed form applies with the gap measured in Z-steps.
//!
//! The Monte Carlo simulators are the ground truth for the closed forms. They
//! run a finite horizon, which biases "probability one" cases downward. Walks
//! that cannot reach the target in the steps left are stopped early (exact),
//! and walks drifting away are abandoned once the remaining return
//! probability is below [`ESCAPE_TOLERANCE`].

use rayon::prelude::*;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};

/// Walks whose closed-form chance of coming back is below this are counted as escaped.
pub const ESCAPE_TOLERANCE: f64 = 1e-15;

const BLOCK: usize = 4096;
const PROB_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineWalkSpec {
    /// Step away from the origin.
    pub p: f64,
    /// Step toward the origin.
    pub q: f64,
    /// Stay put.
    pub r: f64,
    pub start: u64,
}

impl LineWalkSpec {
    /// Spec with `r = 1 − p − q`.
    pub fn new(p: f64, q: f64, start: u64) -> Result<Self> {
        let spec = Self {
            p,
            q,
            r: (1.0 - p - q).max(0.0),
            start,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { p, q, r, .. } = *self;
        if !(p > 0.0 && q > 0.0 && r >= 0.0) {
            return Err(Error::usage("line walk needs p, q > 0 and r >= 0"));
        }
        if ((p + q + r) - 1.0).abs() > PROB_TOL {
            return Err(Error::usage(format!("p + q + r = {} != 1", p + q + r)));
        }
        Ok(())
    }
}

/// Probability of ever reaching the origin.
pub fn absorbing_probability(spec: &LineWalkSpec) -> f64 {
    if spec.start == 0 || spec.p <= spec.q {
        1.0
    } else {
        (spec.q / spec.p).powf(spec.start as f64)
    }
}

/// A Bernoulli proportion with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl McEstimate {
    fn from_hits(hits: usize, trials: usize) -> Self {
        let n = trials as f64;
        let estimate = hits as f64 / n;
        Self {
            estimate,
            stderr: (estimate * (1.0 - estimate) / n).sqrt(),
            trials,
        }
    }

    /// `|a − b| <= k · sqrt(se_a² + se_b²)`
    pub fn agrees_with(&self, other: &McEstimate, k: f64) -> bool {
        (self.estimate - other.estimate).abs() <= k * self.stderr.hypot(other.stderr)
    }
}

/// Counts successes over `trials`, split into blocks with their own streams.
fn run_blocks(trials: usize, seed: u64, lane: u64, trial: impl Fn(&mut StreamRng) -> bool + Sync) -> McEstimate {
    let blocks = trials.div_ceil(BLOCK);
    let hits: usize = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng::stream(seed, lane, b as u64);
            let size = BLOCK.min(trials - b * BLOCK);
            (0..size).filter(|_| trial(&mut rng)).count()
        })
        .sum();
    McEstimate::from_hits(hits, trials)
}

/// Smallest height from which the return probability `ratio^height` is negligible.
fn escape_height(ratio: f64) -> Option<u64> {
    (ratio < 1.0).then(|| (ESCAPE_TOLERANCE.ln() / ratio.ln()).ceil() as u64)
}

/// Fraction of walks absorbed at the origin within `horizon` steps.
pub fn simulate_line_walk(spec: &LineWalkSpec, trials: usize, horizon: usize, seed: u64) -> Result<McEstimate> {
    spec.validate()?;
    if trials == 0 || horizon == 0 {
        return Err(Error::usage("trials and horizon must be >= 1"));
    }
    let LineWalkSpec { p, q, start, .. } = *spec;
    let escape = if p > q { escape_height(q / p) } else { None };
    let moves = p + q;
    Ok(run_blocks(trials, seed, 0, |rng| {
        let mut pos = start;
        for step in 0..horizon {
            if pos == 0 {
                return true;
            }
            if pos as usize > horizon - step || escape.is_some_and(|h| pos >= h) {
                return false;
            }
            let u: f64 = rng.random();
            if u < p {
                pos += 1;
            } else if u < moves {
                pos -= 1;
            }
        }
        pos == 0
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairWalkSpec {
    /// A steps right (toward B) with `pa`, left with `qa`.
    pub pa: f64,
    pub qa: f64,
    /// B steps right (away from A) with `pb`, left with `qb`.
    pub pb: f64,
    pub qb: f64,
    pub j: i64,
    pub k: i64,
    /// Encounter tolerance on |A − B|.
    pub eta: u64,
}

impl PairWalkSpec {
    pub fn new(pa: f64, pb: f64, j: i64, k: i64) -> Result<Self> {
        let spec = Self {
            pa,
            qa: 1.0 - pa,
            pb,
            qb: 1.0 - pb,
            j,
            k,
            eta: 1,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| (0.0..=1.0).contains(&x);
        if !(ok(self.pa) && ok(self.qa) && ok(self.pb) && ok(self.qb)) {
            return Err(Error::usage("pair walk probabilities must lie in [0, 1]"));
        }
        if (self.pa + self.qa - 1.0).abs() > PROB_TOL || (self.pb + self.qb - 1.0).abs() > PROB_TOL {
            return Err(Error::usage("each particle's step probabilities must sum to 1"));
        }
        if self.k < self.j {
            return Err(Error::usage("B must start at or to the right of A"));
        }
        if self.eta == 0 {
            return Err(Error::usage("eta must be >= 1"));
        }
        Ok(())
    }

    pub fn gap(&self) -> u64 {
        (self.k - self.j) as u64
    }

    /// Z-steps of size two needed to bring the gap within `eta`.
    pub fn steps_to_meet(&self) -> u64 {
        self.gap().saturating_sub(self.eta).div_ceil(2)
    }
}

/// Probabilities that the gap moves by −2, 0, +2 in one step.
pub fn z_walk_transitions(spec: &PairWalkSpec) -> (f64, f64, f64) {
    (
        spec.pa * spec.qb,
        spec.pa * spec.pb + spec.qa * spec.qb,
        spec.qa * spec.pb,
    )
}

/// Probability that the two walkers ever come within `eta` of each other.
///
/// The gap walk needs `⌈(gap − eta)/2⌉` net closing steps, so the ratio
/// `pa·qb / (qa·pb)` is raised to that power when the walkers drift apart.
pub fn encounter_probability(spec: &PairWalkSpec) -> f64 {
    let (closer, _, apart) = z_walk_transitions(spec);
    let steps = spec.steps_to_meet();
    if steps == 0 || apart <= closer {
        1.0
    } else {
        (closer / apart).powf(steps as f64)
    }
}

/// Direct two-particle and composed gap-walk estimates of the same probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairWalkEstimate {
    pub direct: McEstimate,
    pub composed: McEstimate,
}

impl PairWalkEstimate {
    pub fn consistent(&self, k: f64) -> bool {
        self.direct.agrees_with(&self.composed, k)
    }
}

/// Simulates A and B stepping together, and separately the gap walk Z = B − A.
pub fn simulate_pair_walk(spec: &PairWalkSpec, trials: usize, horizon: usize, seed: u64) -> Result<PairWalkEstimate> {
    spec.validate()?;
    if trials == 0 || horizon == 0 {
        return Err(Error::usage("trials and horizon must be >= 1"));
    }
    let (closer, stay, apart) = z_walk_transitions(spec);
    let eta = spec.eta as i64;
    // Heights are measured in closing steps still needed.
    let escape = if apart > closer { escape_height(closer / apart) } else { None };
    let hopeless = |gap: i64, left: usize| {
        let needed = ((gap - eta).max(0) as u64).div_ceil(2);
        needed as usize > left || escape.is_some_and(|h| needed >= h)
    };

    let direct = run_blocks(trials, seed, 1, |rng| {
        let (mut a, mut b) = (spec.j, spec.k);
        for step in 0..horizon {
            if (b - a).abs() <= eta {
                return true;
            }
            if hopeless(b - a, horizon - step) {
                return false;
            }
            a += if rng.random::<f64>() < spec.pa { 1 } else { -1 };
            b += if rng.random::<f64>() < spec.pb { 1 } else { -1 };
        }
        (b - a).abs() <= eta
    });

    let composed = run_blocks(trials, seed, 2, |rng| {
        let mut z = spec.k - spec.j;
        for step in 0..horizon {
            if z.abs() <= eta {
                return true;
            }
            if hopeless(z, horizon - step) {
                return false;
            }
            let u: f64 = rng.random();
            if u < closer {
                z -= 2;
            } else if u >= closer + stay {
                z += 2;
            }
        }
        z.abs() <= eta
    });

    Ok(PairWalkEstimate { direct, composed })
}

/// One line of the oracle comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub walk: String,
    pub spec: String,
    pub closed_form: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub agrees: bool,
}

/// Tolerance for finite-horizon truncation in recurrent (`p <= q`) walks.
pub const RECURRENT_SLACK: f64 = 0.02;

/// Closed form vs estimate: within `max(0.01, 3·stderr)` for transient walks;
/// recurrent walks (closed form 1) only need `estimate >= 1 − RECURRENT_SLACK`.
pub fn line_walk_agrees(closed_form: f64, mc: &McEstimate) -> bool {
    if closed_form >= 1.0 {
        mc.estimate >= closed_form - RECURRENT_SLACK
    } else {
        (closed_form - mc.estimate).abs() <= (3.0 * mc.stderr).max(0.01)
    }
}

/// Closed form vs Monte Carlo over a grid of line walks (`q = 1 − p`),
/// judged by [`line_walk_agrees`].
pub fn line_walk_grid(ps: &[f64], starts: &[u64], trials: usize, horizon: usize, seed: u64) -> Result<Vec<OracleRow>> {
    let mut rows = Vec::new();
    for &p in ps {
        for &l in starts {
            let spec = LineWalkSpec::new(p, 1.0 - p, l)?;
            let closed = absorbing_probability(&spec);
            let mc = simulate_line_walk(&spec, trials, horizon, seed)?;
            rows.push(OracleRow {
                walk: "line".into(),
                spec: format!("p={p} q={} l={l}", 1.0 - p),
                closed_form: closed,
                estimate: mc.estimate,
                stderr: mc.stderr,
                agrees: line_walk_agrees(closed, &mc),
            });
        }
    }
    Ok(rows)
}

/// Direct vs composed simulation for a batch of pair walks.
///
/// `closed_form` carries the encounter closed form; agreement is the
/// direct/composed consistency within three combined standard errors.
pub fn pair_walk_table(specs: &[PairWalkSpec], trials: usize, horizon: usize, seed: u64) -> Result<Vec<OracleRow>> {
    specs
        .iter()
        .enumerate()
        .map(|(idx, spec)| {
            let est = simulate_pair_walk(spec, trials, horizon, seed.wrapping_add(idx as u64))?;
            Ok(OracleRow {
                walk: "pair".into(),
                spec: format!(
                    "pa={:.4} pb={:.4} gap={} eta={} composed={:.4}",
                    spec.pa,
                    spec.pb,
                    spec.gap(),
                    spec.eta,
                    est.composed.estimate
                ),
                closed_form: encounter_probability(spec),
                estimate: est.direct.estimate,
                stderr: est.direct.stderr.hypot(est.composed.stderr),
                agrees: est.consistent(3.0),
            })
        })
        .collect()
}
