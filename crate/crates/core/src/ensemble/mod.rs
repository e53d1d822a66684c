//! Weighted ensembles `g = Σⱼ αⱼ fʲ` of classifiers evaluated at one input.

mod bounds;
mod regime;
mod weights;

pub use bounds::{
    best_radius_gain, damning_alpha, gap_bound_witness, gap_gain_bound, improvement_conditions,
    member_radius, pair_radii, radius_improvement_bound, radius_profile, Damning, RadiusBound,
};
pub use regime::{classify_regimes, CertRegime, Evidence, GapRegime, RegimeReport};
pub use weights::{default_resolution, optimize_weights, optimize_weights_by, WeightSearch};

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::certificates::{gaps, ClassifierAtPoint, Gaps, Mode, Smoothness};
use crate::geometry::ConvexBody;
use crate::{tol, Error, Result};

/// Checks and normalizes mixture weights to sum to one.
fn normalize_weights(weights: &[f64], n: usize) -> Result<Vec<f64>> {
    if weights.len() != n {
        return Err(Error::MemberMismatch(format!(
            "{} weights for {n} members",
            weights.len()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidParameter(
            "weights must be finite and nonnegative".into(),
        ));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidParameter("weights sum to zero".into()));
    }
    Ok(weights.iter().map(|w| w / total).collect())
}

/// `Σⱼ αⱼ fʲ`.
pub fn combine_logits(members: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let k = members.first().map_or(0, |m| m.len());
    let mut out = alloc::vec![0.0; k];
    for (m, a) in members.iter().zip(weights) {
        for (o, v) in out.iter_mut().zip(m) {
            *o += a * v;
        }
    }
    out
}

/// Logits-only view of an ensemble, enough for every gap statement.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitEnsemble {
    members: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl LogitEnsemble {
    pub fn new(members: Vec<Vec<f64>>, weights: &[f64]) -> Result<LogitEnsemble> {
        let k = members.first().ok_or(Error::MemberMismatch("no members".into()))?.len();
        for m in &members {
            gaps(m)?;
            if m.len() != k {
                return Err(Error::MemberMismatch(format!(
                    "members have {k} and {} classes",
                    m.len()
                )));
            }
        }
        let weights = normalize_weights(weights, members.len())?;
        Ok(LogitEnsemble { members, weights })
    }

    pub fn uniform(members: Vec<Vec<f64>>) -> Result<LogitEnsemble> {
        let n = members.len();
        LogitEnsemble::new(members, &alloc::vec![1.0; n])
    }

    pub fn with_weights(&self, weights: &[f64]) -> Result<LogitEnsemble> {
        LogitEnsemble::new(self.members.clone(), weights)
    }

    pub fn members(&self) -> &[Vec<f64>] {
        &self.members
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn classes(&self) -> usize {
        self.members[0].len()
    }

    pub fn logits(&self) -> Vec<f64> {
        combine_logits(&self.members, &self.weights)
    }

    pub fn gaps(&self) -> Gaps {
        // Members are validated, so the combination is finite with K >= 2.
        gaps(&self.logits()).unwrap_or_else(|_| unreachable!())
    }

    pub fn member_gaps(&self) -> Vec<Gaps> {
        self.members
            .iter()
            .map(|m| gaps(m).unwrap_or_else(|_| unreachable!()))
            .collect()
    }

    /// `r^g_{c_B}`.
    pub fn margin(&self) -> f64 {
        self.gaps().margin()
    }

    /// `r̄`, the best member margin.
    pub fn best_member_margin(&self) -> f64 {
        self.member_gaps().iter().map(|g| g.margin()).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `r̲`, the worst member margin.
    pub fn worst_member_margin(&self) -> f64 {
        self.member_gaps().iter().map(|g| g.margin()).fold(f64::INFINITY, f64::min)
    }

    pub fn same_top(&self) -> bool {
        let g = self.member_gaps();
        g.iter().all(|x| x.top == g[0].top)
    }

    pub fn same_runner_up(&self) -> bool {
        let g = self.member_gaps();
        g.iter().all(|x| x.runner_up == g[0].runner_up)
    }

    pub fn gap_regime(&self) -> GapRegime {
        GapRegime::classify(
            self.margin(),
            self.best_member_margin(),
            self.worst_member_margin(),
        )
    }
}

/// Member classifiers with nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    members: Vec<ClassifierAtPoint>,
    weights: Vec<f64>,
}

impl EnsembleSpec {
    pub fn new(members: Vec<ClassifierAtPoint>, weights: &[f64]) -> Result<EnsembleSpec> {
        let first = members.first().ok_or(Error::MemberMismatch("no members".into()))?;
        for m in &members {
            if m.classes() != first.classes() {
                return Err(Error::MemberMismatch(format!(
                    "members have {} and {} classes",
                    first.classes(),
                    m.classes()
                )));
            }
            if m.dim() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: m.dim(),
                });
            }
            if m.mode() != first.mode() {
                return Err(Error::ModeMismatch(format!(
                    "members mix {} and {} smoothness data",
                    first.mode(),
                    m.mode()
                )));
            }
        }
        let weights = normalize_weights(weights, members.len())?;
        Ok(EnsembleSpec { members, weights })
    }

    pub fn uniform(members: Vec<ClassifierAtPoint>) -> Result<EnsembleSpec> {
        let n = members.len();
        EnsembleSpec::new(members, &alloc::vec![1.0; n])
    }

    pub fn with_weights(&self, weights: &[f64]) -> Result<EnsembleSpec> {
        EnsembleSpec::new(self.members.clone(), weights)
    }

    pub fn members(&self) -> &[ClassifierAtPoint] {
        &self.members
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mode(&self) -> Mode {
        self.members[0].mode()
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    pub fn logit_view(&self) -> LogitEnsemble {
        LogitEnsemble {
            members: self.members.iter().map(|m| m.logits().to_vec()).collect(),
            weights: self.weights.clone(),
        }
    }

    pub fn ensemble_logits(&self) -> Vec<f64> {
        self.logit_view().logits()
    }

    /// Every member is uniform with one identical gradient set.
    pub fn shares_uniform_body(&self) -> bool {
        match self.members[0].smoothness() {
            Smoothness::Uniform(s) => self
                .members
                .iter()
                .all(|m| matches!(m.smoothness(), Smoothness::Uniform(t) if t == s)),
            _ => false,
        }
    }

    /// The ensemble as a single classifier: logits `Σ αⱼ fʲ` and gradient
    /// sets `⊕ⱼ αⱼ Sʲ` per class, per pair or overall. Members with zero
    /// weight are left out. Class-difference pairs missing from any weighted
    /// member are dropped.
    pub fn ensemble_classifier(&self) -> Result<ClassifierAtPoint> {
        let active: Vec<(f64, &ClassifierAtPoint)> = self
            .weights
            .iter()
            .copied()
            .zip(self.members.iter())
            .filter(|(a, _)| *a > 0.0)
            .collect();
        let mix = |bodies: &[(f64, &ConvexBody)]| -> Result<ConvexBody> {
            let mut acc: Option<ConvexBody> = None;
            for (a, s) in bodies {
                let term = s.scale(*a)?;
                acc = Some(match acc {
                    None => term,
                    Some(prev) => prev.minkowski_sum(&term)?,
                });
            }
            acc.ok_or(Error::MemberMismatch("no weighted members".into()))
        };
        let smoothness = match self.members[0].smoothness() {
            Smoothness::Uniform(_) => {
                let bodies: Vec<(f64, &ConvexBody)> = active
                    .iter()
                    .map(|(a, m)| match m.smoothness() {
                        Smoothness::Uniform(s) => Ok((*a, s)),
                        _ => Err(Error::ModeMismatch("mixed member modes".into())),
                    })
                    .collect::<Result<_>>()?;
                Smoothness::Uniform(mix(&bodies)?)
            }
            Smoothness::ClassWise(_) => {
                let k = self.members[0].classes();
                let mut per_class = Vec::with_capacity(k);
                for i in 0..k {
                    let bodies: Vec<(f64, &ConvexBody)> = active
                        .iter()
                        .map(|(a, m)| match m.smoothness() {
                            Smoothness::ClassWise(v) => Ok((*a, &v[i])),
                            _ => Err(Error::ModeMismatch("mixed member modes".into())),
                        })
                        .collect::<Result<_>>()?;
                    per_class.push(mix(&bodies)?);
                }
                Smoothness::ClassWise(per_class)
            }
            Smoothness::ClassDiff(first) => {
                let mut pairs = BTreeMap::new();
                'pairs: for key in first.keys() {
                    let mut bodies = Vec::with_capacity(active.len());
                    for (a, m) in &active {
                        let Smoothness::ClassDiff(map) = m.smoothness() else {
                            return Err(Error::ModeMismatch("mixed member modes".into()));
                        };
                        match map.get(key) {
                            Some(s) => bodies.push((*a, s)),
                            None => continue 'pairs,
                        }
                    }
                    pairs.insert(*key, mix(&bodies)?);
                }
                Smoothness::ClassDiff(pairs)
            }
        };
        ClassifierAtPoint::new(self.ensemble_logits(), smoothness)
    }
}

/// Margins at or below this are in the zero-gap bucket.
pub(crate) fn is_zero_gap(r: f64) -> bool {
    r <= tol::ZERO_GAP
}
