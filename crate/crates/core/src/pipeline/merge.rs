use ndarray::{Array1, ArrayView2};

use crate::error::{Error, Result};
use crate::pipeline::extract::cluster_count;

/// Folds the smallest cluster into its nearest-centroid neighbor until `k` remain.
///
/// Size ties pick the lowest cluster id, as do centroid-distance ties.
/// Centroids are Euclidean means of `positions`. Ids in the output are
/// compacted to 0..k while keeping their relative order.
pub fn merge_to_k(assignments: &[usize], positions: ArrayView2<'_, f64>, k: usize) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::usage("cannot merge down to zero clusters"));
    }
    if assignments.len() != positions.nrows() {
        return Err(Error::usage("assignments and positions differ in length"));
    }
    let count = cluster_count(assignments);
    if count < k {
        return Err(Error::usage(format!(
            "have {count} clusters, cannot reach {k} by merging"
        )));
    }
    let m = positions.ncols();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (i, &c) in assignments.iter().enumerate() {
        members[c].push(i);
    }
    let centroid = |idx: &[usize]| -> Array1<f64> {
        let mut c = Array1::zeros(m);
        for &i in idx {
            c += &positions.row(i);
        }
        c / idx.len() as f64
    };
    let mut alive: Vec<usize> = (0..count).filter(|&c| !members[c].is_empty()).collect();
    while alive.len() > k {
        let smallest = *alive
            .iter()
            .min_by_key(|&&c| (members[c].len(), c))
            .expect("more than k >= 1 clusters alive");
        let from = centroid(&members[smallest]);
        let mut nearest = None;
        let mut best = f64::INFINITY;
        for &c in &alive {
            if c == smallest {
                continue;
            }
            let d = (&centroid(&members[c]) - &from).mapv(|v| v * v).sum().sqrt();
            if d < best {
                best = d;
                nearest = Some(c);
            }
        }
        let into = nearest.expect("at least two clusters alive");
        let moved = std::mem::take(&mut members[smallest]);
        members[into].extend(moved);
        alive.retain(|&c| c != smallest);
    }
    let mut compact = vec![usize::MAX; count];
    for (new, &old) in alive.iter().enumerate() {
        compact[old] = new;
    }
    let mut out = vec![0; assignments.len()];
    for &c in &alive {
        for &i in &members[c] {
            out[i] = compact[c];
        }
    }
    Ok(out)
}
