//! Grid search for mixture weights maximizing an objective over the simplex.

use alloc::vec;
use alloc::vec::Vec;

use super::{combine_logits, LogitEnsemble};
use crate::certificates::gaps;
use crate::{Error, Result};

/// Grid steps per axis used when no resolution is given.
pub fn default_resolution(members: usize) -> usize {
    match members {
        0..=2 => 1000,
        3 => 200,
        4 => 60,
        _ => 20,
    }
}

/// Best weights found and the objective there.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSearch {
    pub weights: Vec<f64>,
    pub value: f64,
}

/// Maximizes `objective` over the `(n−1)`-simplex: a grid with `resolution`
/// steps per axis, then one pass at ten times finer step in a box of one
/// coarse step around the incumbent. Only strict improvements replace the
/// incumbent and points are visited in lexicographic order, so ties resolve
/// to the lexicographically smallest weights.
pub fn optimize_weights_by(
    n: usize,
    resolution: usize,
    objective: impl Fn(&[f64]) -> f64,
) -> Result<WeightSearch> {
    if n == 0 {
        return Err(Error::InvalidParameter("no members to weight".into()));
    }
    let res = resolution.max(1);
    let mut best = WeightSearch {
        weights: vec![0.0; n],
        value: f64::NEG_INFINITY,
    };
    let mut alpha = vec![0.0; n];
    let mut counts = vec![0usize; n];
    visit_compositions(&mut counts, 0, res, &mut |c| {
        for (a, k) in alpha.iter_mut().zip(c) {
            *a = *k as f64 / res as f64;
        }
        let v = objective(&alpha);
        if improves(v, best.value) {
            best.value = v;
            best.weights.copy_from_slice(&alpha);
        }
    });
    if n == 1 {
        return Ok(best);
    }
    // Local refinement over the first n−1 coordinates.
    let coarse = 1.0 / res as f64;
    let fine = coarse / 10.0;
    let centre = best.weights.clone();
    let mut offsets = vec![-10i64; n - 1];
    loop {
        let mut total = 0.0;
        let mut ok = true;
        for i in 0..n - 1 {
            let a = centre[i] + offsets[i] as f64 * fine;
            if !(-1e-15..=1.0 + 1e-15).contains(&a) {
                ok = false;
                break;
            }
            alpha[i] = a.clamp(0.0, 1.0);
            total += alpha[i];
        }
        if ok && total <= 1.0 + 1e-12 {
            alpha[n - 1] = (1.0 - total).max(0.0);
            let v = objective(&alpha);
            if improves(v, best.value) {
                best.value = v;
                best.weights.copy_from_slice(&alpha);
            }
        }
        // Odometer over offsets in [-10, 10].
        let mut i = n - 1;
        loop {
            if i == 0 {
                return Ok(best);
            }
            i -= 1;
            if offsets[i] < 10 {
                offsets[i] += 1;
                break;
            }
            offsets[i] = -10;
        }
    }
}

/// Rounding noise in the objective does not count as an improvement.
fn improves(v: f64, best: f64) -> bool {
    v > best + 1e-12 * best.abs().max(1.0) || (best == f64::NEG_INFINITY && v > best)
}

/// Calls `f` on every `counts` with `Σ counts = total`, in lexicographic
/// order.
fn visit_compositions(counts: &mut [usize], at: usize, left: usize, f: &mut impl FnMut(&[usize])) {
    if at + 1 == counts.len() {
        counts[at] = left;
        f(counts);
        return;
    }
    for k in 0..=left {
        counts[at] = k;
        visit_compositions(counts, at + 1, left - k, f);
    }
}

/// Weights maximizing the ensemble margin `r^g_{c_B}`.
pub fn optimize_weights(ensemble: &LogitEnsemble, resolution: Option<usize>) -> Result<WeightSearch> {
    let n = ensemble.members().len();
    let members = ensemble.members();
    optimize_weights_by(n, resolution.unwrap_or_else(|| default_resolution(n)), |a| {
        margin_of(&combine_logits(members, a))
    })
}

fn margin_of(logits: &[f64]) -> f64 {
    gaps(logits).map_or(f64::NEG_INFINITY, |g| g.margin())
}
