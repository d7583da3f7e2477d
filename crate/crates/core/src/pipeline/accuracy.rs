//! Clustering accuracy under the best one-to-one cluster→class mapping.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Up to this many clusters/classes the mapping is found by enumeration.
const ENUMERATION_LIMIT: usize = 8;

/// Fraction of points whose mapped cluster equals their class.
///
/// Each cluster maps to at most one class and vice versa; unmapped clusters
/// score nothing.
pub fn clustering_accuracy<L: Eq + Hash>(assignments: &[usize], labels: &[L]) -> Result<f64> {
    if assignments.len() != labels.len() {
        return Err(Error::usage(format!(
            "{} assignments vs {} labels",
            assignments.len(),
            labels.len()
        )));
    }
    if assignments.is_empty() {
        return Err(Error::usage("cannot score an empty clustering"));
    }
    let table = contingency(assignments, labels);
    let matched = if table.len().max(table[0].len()) <= ENUMERATION_LIMIT {
        best_matching_enumerated(&table)
    } else {
        best_matching_hungarian(&table)
    };
    Ok(matched as f64 / assignments.len() as f64)
}

/// counts[cluster][class]
pub(crate) fn contingency<L: Eq + Hash>(assignments: &[usize], labels: &[L]) -> Vec<Vec<u64>> {
    let mut class_ids: HashMap<&L, usize> = HashMap::new();
    let classes: Vec<usize> = labels
        .iter()
        .map(|l| {
            let next = class_ids.len();
            *class_ids.entry(l).or_insert(next)
        })
        .collect();
    let mut cluster_ids: HashMap<usize, usize> = HashMap::new();
    let clusters: Vec<usize> = assignments
        .iter()
        .map(|&c| {
            let next = cluster_ids.len();
            *cluster_ids.entry(c).or_insert(next)
        })
        .collect();
    let mut table = vec![vec![0u64; class_ids.len()]; cluster_ids.len()];
    for (&r, &c) in clusters.iter().zip(&classes) {
        table[r][c] += 1;
    }
    table
}

fn transpose(table: &[Vec<u64>]) -> Vec<Vec<u64>> {
    (0..table[0].len())
        .map(|c| table.iter().map(|row| row[c]).collect())
        .collect()
}

/// Exhaustive search over injective row→column maps.
pub(crate) fn best_matching_enumerated(table: &[Vec<u64>]) -> u64 {
    if table.len() > table[0].len() {
        return best_matching_enumerated(&transpose(table));
    }
    fn go(table: &[Vec<u64>], row: usize, used: u32) -> u64 {
        if row == table.len() {
            return 0;
        }
        (0..table[row].len())
            .filter(|c| used & (1 << c) == 0)
            .map(|c| table[row][c] + go(table, row + 1, used | (1 << c)))
            .max()
            .unwrap_or(0)
    }
    go(table, 0, 0)
}

/// Maximum-weight matching via the Hungarian algorithm on negated counts.
pub(crate) fn best_matching_hungarian(table: &[Vec<u64>]) -> u64 {
    if table.len() > table[0].len() {
        return best_matching_hungarian(&transpose(table));
    }
    let cost: Vec<Vec<i64>> = table
        .iter()
        .map(|row| row.iter().map(|&v| -(v as i64)).collect())
        .collect();
    let assignment = hungarian_min(&cost);
    assignment
        .iter()
        .enumerate()
        .map(|(r, &c)| table[r][c])
        .sum()
}

/// Min-cost assignment of every row to a distinct column (rows <= columns).
/// Returns the chosen column per row. O(rows² · columns).
fn hungarian_min(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    let m = cost[0].len();
    debug_assert!(n <= m);
    const INF: i64 = i64::MAX / 4;
    // 1-indexed potentials; column 0 is a sentinel.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![INF; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = INF;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut result = vec![0; n];
    for j in 1..=m {
        if owner[j] != 0 {
            result[owner[j] - 1] = j - 1;
        }
    }
    result
}
