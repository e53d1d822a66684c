//! Monte Carlo statistics over ensembles of random probability vectors.
//!
//! Every draw owns an independent random stream keyed by `(seed, n, draw)`,
//! so draws can be evaluated in any order or in parallel with identical
//! results.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::ensemble::{gap_gain_bound, optimize_weights, GapRegime, LogitEnsemble};
use crate::{math, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub classes: usize,
    /// Ensemble sizes to simulate.
    pub member_counts: Vec<usize>,
    /// Draws per ensemble size.
    pub draws: usize,
    pub seed: u64,
    /// Also search for the margin-maximizing weights of every draw.
    pub optimize: bool,
    /// Optimizer grid steps per axis; `None` uses the per-size default.
    pub resolution: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            classes: 4,
            member_counts: alloc::vec![2, 3, 4],
            draws: 1000,
            seed: 0,
            optimize: true,
            resolution: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.classes < 2 {
            return Err(Error::TooFewClasses(self.classes));
        }
        if self.draws == 0 {
            return Err(Error::InvalidParameter("at least one draw is required".into()));
        }
        if self.member_counts.is_empty() || self.member_counts.contains(&0) {
            return Err(Error::InvalidParameter("ensemble sizes must be positive".into()));
        }
        if self.member_counts.iter().any(|n| *n > u32::MAX as usize) || self.draws > u32::MAX as usize {
            return Err(Error::InvalidParameter("sizes and draw counts must fit in 32 bits".into()));
        }
        Ok(())
    }
}

/// Random stream of draw `index` for ensembles of `n` members.
pub fn draw_stream(seed: u64, n: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) | index as u64);
    rng
}

/// A point drawn uniformly from the probability simplex over `k` classes
/// (normalized unit-rate exponentials).
pub fn draw_classifier(k: usize, rng: &mut impl RngCore) -> Vec<f64> {
    let e: Vec<f64> = (0..k)
        .map(|_| {
            // u in (0, 1].
            let u = ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
            -math::ln(u)
        })
        .collect();
    let total: f64 = e.iter().sum();
    e.iter().map(|v| v / total).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrawRecord {
    pub n: usize,
    pub draw: usize,
    pub members: Vec<Vec<f64>>,
    /// `r̄`.
    pub best_member_margin: f64,
    /// `r̲`.
    pub worst_member_margin: f64,
    /// Ensemble margin with uniform weights.
    pub uniform_margin: f64,
    /// Ensemble margin with optimized weights, when requested.
    pub optimized_margin: Option<f64>,
    /// Gap regime with uniform weights.
    pub gap_regime: GapRegime,
    pub same_top: bool,
    /// Largest margin any weighting may reach.
    pub bound: f64,
    /// `bound − max(margins)`; never negative beyond rounding.
    pub slack: f64,
}

pub fn simulate_draw(config: &ExperimentConfig, n: usize, draw: usize) -> Result<DrawRecord> {
    let mut rng = draw_stream(config.seed, n, draw);
    let members: Vec<Vec<f64>> = (0..n).map(|_| draw_classifier(config.classes, &mut rng)).collect();
    let ens = LogitEnsemble::uniform(members.clone())?;
    let r_bar = ens.best_member_margin();
    let r_under = ens.worst_member_margin();
    let uniform_margin = ens.margin();
    let optimized_margin = if config.optimize {
        Some(optimize_weights(&ens, config.resolution)?.value)
    } else {
        None
    };
    let bound = gap_gain_bound(r_bar.clamp(0.0, 1.0), config.classes)?;
    let best = optimized_margin.map_or(uniform_margin, |o| o.max(uniform_margin));
    Ok(DrawRecord {
        n,
        draw,
        members,
        best_member_margin: r_bar,
        worst_member_margin: r_under,
        uniform_margin,
        optimized_margin,
        gap_regime: ens.gap_regime(),
        same_top: ens.same_top(),
        bound,
        slack: bound - best,
    })
}

/// Every draw, ordered by `(n, draw)`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<DrawRecord>> {
    config.validate()?;
    let mut out = Vec::with_capacity(config.member_counts.len() * config.draws);
    for &n in &config.member_counts {
        for d in 0..config.draws {
            out.push(simulate_draw(config, n, d)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub draws: usize,
    pub gain_fraction: f64,
    pub inconclusive_fraction: f64,
    pub loss_fraction: f64,
    pub zero_gap_fraction: f64,
    /// Fraction of draws whose optimized margin exceeds `r̄`.
    pub optimized_above_best: Option<f64>,
    pub mean_best_member_margin: f64,
    pub mean_worst_member_margin: f64,
    pub mean_uniform_margin: f64,
    /// Draws whose margin exceeds the bound beyond rounding.
    pub bound_violations: usize,
    /// Same-top draws that lose margin.
    pub same_top_losses: usize,
}

pub fn summarize(records: &[DrawRecord]) -> Result<Summary> {
    if records.is_empty() {
        return Err(Error::InvalidParameter("no records to summarize".into()));
    }
    let n = records.len() as f64;
    let frac = |r: GapRegime| records.iter().filter(|x| x.gap_regime == r).count() as f64 / n;
    let mean = |f: &dyn Fn(&DrawRecord) -> f64| records.iter().map(f).sum::<f64>() / n;
    let optimized_above_best = if records.iter().all(|r| r.optimized_margin.is_some()) {
        Some(
            records
                .iter()
                .filter(|r| {
                    r.optimized_margin
                        .is_some_and(|o| o > r.best_member_margin + crate::tol::GAP_REGIME)
                })
                .count() as f64
                / n,
        )
    } else {
        None
    };
    Ok(Summary {
        draws: records.len(),
        gain_fraction: frac(GapRegime::Gain),
        inconclusive_fraction: frac(GapRegime::Inconclusive),
        loss_fraction: frac(GapRegime::Loss),
        zero_gap_fraction: frac(GapRegime::ZeroGap),
        optimized_above_best,
        mean_best_member_margin: mean(&|r| r.best_member_margin),
        mean_worst_member_margin: mean(&|r| r.worst_member_margin),
        mean_uniform_margin: mean(&|r| r.uniform_margin),
        bound_violations: records.iter().filter(|r| r.slack < -1e-12).count(),
        same_top_losses: records
            .iter()
            .filter(|r| r.same_top && matches!(r.gap_regime, GapRegime::Loss | GapRegime::ZeroGap))
            .count(),
    })
}
