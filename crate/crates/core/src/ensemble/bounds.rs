//! Closed-form limits on what ensembling two or more classifiers can gain.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{EnsembleSpec, LogitEnsemble};
use crate::certificates::{gaps, ClassifierAtPoint, Smoothness};
use crate::geometry::BallShape;
use crate::{tol, Error, Result};

/// Largest ensemble margin reachable from members whose best margin is
/// `r̄`, for probability-vector logits over `k` classes:
/// `r̄ + (1 − r̄)/2 − (1 − r̄)/(2(k − 1))`.
pub fn gap_gain_bound(r_bar: f64, k: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&r_bar) {
        return Err(Error::InvalidParameter(format!(
            "best member margin {r_bar} must lie in [0, 1]"
        )));
    }
    if k < 2 {
        return Err(Error::TooFewClasses(k));
    }
    let head = 1.0 - r_bar;
    Ok(r_bar + head / 2.0 - head / (2.0 * (k - 1) as f64))
}

/// Members attaining [`gap_gain_bound`]: `k − 1` members that all put
/// `r̄ + (1 − r̄)/2` on the last class and `(1 − r̄)/2` on a distinct other
/// class, mixed uniformly. For `k = 2` no gain is possible and two copies of
/// one member with margin `r̄` are returned.
pub fn gap_bound_witness(r_bar: f64, k: usize) -> Result<LogitEnsemble> {
    gap_gain_bound(r_bar, k)?;
    let top = r_bar + (1.0 - r_bar) / 2.0;
    let side = (1.0 - r_bar) / 2.0;
    if k == 2 {
        let m = vec![side, top];
        return LogitEnsemble::uniform(vec![m.clone(), m]);
    }
    let members = (0..k - 1)
        .map(|j| {
            let mut f = vec![0.0; k];
            f[k - 1] = top;
            f[j] = side;
            f
        })
        .collect();
    LogitEnsemble::uniform(members)
}

/// Weights that put the ensemble exactly on a decision boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Damning {
    /// `α` on the first member (`1 − α` on the second).
    Alpha(f64),
    /// The two top classes are tied for every `α`.
    AllAlphaTrivial,
}

/// Weight `α` such that `α f¹ + (1 − α) f²` has two tied top classes. The
/// closed-form crossing of the members' top classes is used when no third
/// class overtakes them there; otherwise the first breakpoint of the upper
/// envelope `max_c g_c(α)` below `α = 1` is returned, which is where the top
/// class first changes.
pub fn damning_alpha(f1: &[f64], f2: &[f64]) -> Result<Damning> {
    let g1 = gaps(f1)?;
    let g2 = gaps(f2)?;
    if f1.len() != f2.len() {
        return Err(Error::MemberMismatch("members differ in class count".into()));
    }
    let (a1, a2) = (g1.top, g2.top);
    if a1 == a2 {
        return Err(Error::SameTopClass);
    }
    let num = f2[a2] - f2[a1];
    let den = f1[a1] - f1[a2] + f2[a2] - f2[a1];
    if den <= 1e-12 {
        return Ok(Damning::AllAlphaTrivial);
    }
    let alpha = num / den;
    let at = |a: f64| -> Vec<f64> { f1.iter().zip(f2).map(|(x, y)| a * x + (1.0 - a) * y).collect() };
    let g = at(alpha);
    let level = g[a1].max(g[a2]);
    if g.iter().all(|v| *v <= level + 1e-12) {
        return Ok(Damning::Alpha(alpha));
    }
    // Walk down the upper envelope from α = 1, starting on class a1.
    let slope = |c: usize| f1[c] - f2[c];
    let value = |c: usize, a: f64| a * f1[c] + (1.0 - a) * f2[c];
    let mut best: Option<f64> = None;
    for c in 0..f1.len() {
        if c == a1 {
            continue;
        }
        // g_{a1}(α) − g_c(α) = (s_{a1} − s_c)(α − 1) + (f1[a1] − f1[c]).
        let ds = slope(a1) - slope(c);
        let d1 = f1[a1] - f1[c];
        if ds <= 0.0 {
            continue;
        }
        let cross = 1.0 - d1 / ds;
        if (0.0..=1.0).contains(&cross) && best.is_none_or(|b| cross > b) {
            best = Some(cross);
        }
    }
    let alpha = best.ok_or(Error::Precondition(
        "top class never changes between the members".into(),
    ))?;
    debug_assert!(value(a1, alpha).is_finite());
    Ok(Damning::Alpha(alpha))
}

/// Per-class-pair ball radii `ε_{i−c_A}` of a member whose gradient sets are
/// all centred balls of one shape, with `0` in the top-class slot. Uniform
/// data gives `2ε`, class-wise `ε_i + ε_{c_A}`.
pub fn pair_radii(member: &ClassifierAtPoint, top: usize) -> Result<(BallShape, Vec<f64>)> {
    let k = member.classes();
    let ball = |s: &crate::geometry::ConvexBody| {
        s.as_centered_ball()
            .ok_or_else(|| Error::ModeMismatch("gradient sets must be centred balls".into()))
    };
    let mut shape: Option<BallShape> = None;
    let mut check = |s: &BallShape| -> Result<()> {
        match &shape {
            Some(prev) if !prev.same_as(s) => {
                Err(Error::ModeMismatch("balls of different shapes".into()))
            }
            Some(_) => Ok(()),
            None => {
                shape = Some(s.clone());
                Ok(())
            }
        }
    };
    let mut eps = vec![0.0; k];
    match member.smoothness() {
        Smoothness::Uniform(s) => {
            let (sh, e) = ball(s)?;
            check(&sh)?;
            for (i, v) in eps.iter_mut().enumerate() {
                if i != top {
                    *v = 2.0 * e;
                }
            }
        }
        Smoothness::ClassWise(v) => {
            let (sh, et) = ball(&v[top])?;
            check(&sh)?;
            for i in (0..k).filter(|&i| i != top) {
                let (sh, e) = ball(&v[i])?;
                check(&sh)?;
                eps[i] = e + et;
            }
        }
        Smoothness::ClassDiff(m) => {
            for i in (0..k).filter(|&i| i != top) {
                let s = m.get(&(i, top)).ok_or(Error::MissingPair(i, top))?;
                let (sh, e) = ball(s)?;
                check(&sh)?;
                eps[i] = e;
            }
        }
    }
    let shape = shape.ok_or(Error::ModeMismatch("no gradient sets".into()))?;
    Ok((shape, eps))
}

/// Certified radius `min_{i≠c_A} r_i / ε_{i−c_A}` of a member with ball
/// smoothness.
pub fn member_radius(member: &ClassifierAtPoint) -> Result<f64> {
    let g = member.gaps();
    let (_, eps) = pair_radii(member, g.top)?;
    Ok(radius_from(&g.gaps, &eps, g.top))
}

fn radius_from(gaps: &[f64], eps: &[f64], top: usize) -> f64 {
    (0..gaps.len())
        .filter(|&i| i != top)
        .map(|i| if eps[i] > 0.0 { gaps[i] / eps[i] } else { f64::INFINITY })
        .fold(f64::INFINITY, f64::min)
}

/// Shared top class, common shape and per-member pair radii.
struct BallEnsemble {
    top: usize,
    gaps: Vec<Vec<f64>>,
    eps: Vec<Vec<f64>>,
    radii: Vec<f64>,
}

fn ball_ensemble(spec: &EnsembleSpec) -> Result<BallEnsemble> {
    let members = spec.members();
    if members.len() < 2 {
        return Err(Error::Precondition("at least two members are required".into()));
    }
    let top = members[0].gaps().top;
    let mut shape: Option<BallShape> = None;
    let mut out = BallEnsemble {
        top,
        gaps: Vec::new(),
        eps: Vec::new(),
        radii: Vec::new(),
    };
    for m in members {
        let g = m.gaps();
        if g.top != top {
            return Err(Error::Precondition("members disagree on the top class".into()));
        }
        let (sh, eps) = pair_radii(m, top)?;
        match &shape {
            Some(prev) if !prev.same_as(&sh) => {
                return Err(Error::ModeMismatch("members use different ball shapes".into()))
            }
            Some(_) => {}
            None => shape = Some(sh),
        }
        out.radii.push(radius_from(&g.gaps, &eps, top));
        out.gaps.push(g.gaps);
        out.eps.push(eps);
    }
    Ok(out)
}

/// `R^g(α)` for a same-top ensemble of ball-smooth members:
/// `min_{i≠c_A} (Σⱼ αⱼ rʲ_i) / (Σⱼ αⱼ ε_{j,i−c_A})`. Returns the member radii
/// and the profile as a closure over the weight vector.
pub fn radius_profile(spec: &EnsembleSpec) -> Result<(Vec<f64>, impl Fn(&[f64]) -> f64)> {
    let b = ball_ensemble(spec)?;
    let radii = b.radii.clone();
    let profile = move |alpha: &[f64]| {
        let k = b.gaps[0].len();
        (0..k)
            .filter(|&i| i != b.top)
            .map(|i| {
                let r: f64 = alpha.iter().zip(&b.gaps).map(|(a, g)| a * g[i]).sum();
                let e: f64 = alpha.iter().zip(&b.eps).map(|(a, e)| a * e[i]).sum();
                if e > 0.0 {
                    r / e
                } else {
                    f64::INFINITY
                }
            })
            .fold(f64::INFINITY, f64::min)
    };
    Ok((radii, profile))
}

/// `max_α R^g(α) − max_j Rʲ` over an even grid of two-member weights.
pub fn best_radius_gain(spec: &EnsembleSpec, steps: usize) -> Result<(f64, f64)> {
    if spec.members().len() != 2 {
        return Err(Error::Precondition("two members are required".into()));
    }
    let (radii, profile) = radius_profile(spec)?;
    let best_member = radii.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let steps = steps.max(1);
    let mut best = (f64::NEG_INFINITY, 0.0);
    for s in 0..=steps {
        let a = s as f64 / steps as f64;
        let gain = profile(&[a, 1.0 - a]) - best_member;
        if gain > best.0 {
            best = (gain, a);
        }
    }
    Ok(best)
}

/// Bound on the radius gain of a same-top ensemble of same-shape balls.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusBound {
    /// `1/min M − min r/(min M + Δ)`.
    pub statement: f64,
    /// `1/max M − min r/(max M + Δ)`.
    pub proof: f64,
    /// `Mᵏ = min_{i≠c_A} ε_{k,i−c_A}` per member.
    pub smallest_pair_radius: Vec<f64>,
    /// `Δ = max_k max_{i≠c_A} (ε_{k,i−c_A} − Mᵏ)`.
    pub spread: f64,
    /// `min_k rᵏ_{c_Bᵏ}`.
    pub smallest_margin: f64,
    /// Member radii `Rᵏ`.
    pub member_radii: Vec<f64>,
}

/// Both readings of the radius-improvement bound (see [`RadiusBound`]).
pub fn radius_improvement_bound(spec: &EnsembleSpec) -> Result<RadiusBound> {
    let b = ball_ensemble(spec)?;
    let k = b.gaps[0].len();
    let others = || (0..k).filter(|&i| i != b.top);
    let m: Vec<f64> = b
        .eps
        .iter()
        .map(|e| others().map(|i| e[i]).fold(f64::INFINITY, f64::min))
        .collect();
    if m.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Precondition("pair radii must be positive".into()));
    }
    let spread = b
        .eps
        .iter()
        .zip(&m)
        .map(|(e, mk)| others().map(|i| e[i] - mk).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    let smallest_margin = spec
        .members()
        .iter()
        .map(|f| f.gaps().margin())
        .fold(f64::INFINITY, f64::min);
    let lo = m.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = m.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(RadiusBound {
        statement: 1.0 / lo - smallest_margin / (lo + spread),
        proof: 1.0 / hi - smallest_margin / (hi + spread),
        smallest_pair_radius: m,
        spread,
        smallest_margin,
        member_radii: b.radii,
    })
}

/// Sufficient conditions for a strict radius gain of a two-member,
/// same-top, same-shape ensemble whose members have different runner-ups:
///
/// ```text
/// f¹_{c_A} > f¹_{c_B²} + r²_{c_B²} ε_{1,c_B²−c_A} / ε_{2,c_B²−c_A}
/// f²_{c_A} > f²_{c_B¹} + r¹_{c_B¹} ε_{2,c_B¹−c_A} / ε_{1,c_B¹−c_A}
/// ```
///
/// Classes outside the members' top two must have lower confidence than
/// every runner-up in every member. Violated preconditions are errors.
pub fn improvement_conditions(spec: &EnsembleSpec) -> Result<bool> {
    if spec.members().len() != 2 {
        return Err(Error::Precondition("two members are required".into()));
    }
    let b = ball_ensemble(spec)?;
    let (f1, f2) = (spec.members()[0].logits(), spec.members()[1].logits());
    let (b1, b2) = (spec.members()[0].gaps().runner_up, spec.members()[1].gaps().runner_up);
    if b1 == b2 {
        return Err(Error::Precondition("members share the runner-up class".into()));
    }
    let floor = [f1[b1], f1[b2], f2[b1], f2[b2]]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    for c in (0..f1.len()).filter(|c| ![b.top, b1, b2].contains(c)) {
        if f1[c] >= floor || f2[c] >= floor {
            return Err(Error::Precondition(format!(
                "class {c} is not below every runner-up confidence"
            )));
        }
    }
    let (e1, e2) = (&b.eps[0], &b.eps[1]);
    let first = f1[b.top] > f1[b2] + b.gaps[1][b2] * e1[b2] / e2[b2] + tol::GEOMETRY;
    let second = f2[b.top] > f2[b1] + b.gaps[0][b1] * e2[b1] / e1[b1] + tol::GEOMETRY;
    Ok(first && second)
}
