use alloc::vec::Vec;

use super::body::ConvexBody;
use super::halfspace::{Halfspace, HalfspaceRegion};
use super::hull::prune_in_place;
use crate::{Error, Result};

/// Polar of a centred ball: either another centred ball or, for a zero
/// radius body, the whole space.
#[derive(Debug, Clone, PartialEq)]
pub enum PolarBall {
    Ball(ConvexBody),
    WholeSpace,
}

fn check_level(r: f64) -> Result<()> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "polar level {r} must be a finite nonnegative number"
        )));
    }
    Ok(())
}

/// `{δ : ρ_S(δ) <= r}` as one halfspace `s·δ <= r` per generator of `S`.
/// Generators at the origin are dropped since they never bind.
pub fn polar_hrep(body: &ConvexBody, r: f64) -> Result<HalfspaceRegion> {
    check_level(r)?;
    let mut points = body.expand_points()?.ok_or(Error::NotFinite)?;
    prune_in_place(&mut points);
    let hs = points
        .into_iter()
        .filter(|p| p.iter().any(|x| *x != 0.0))
        .map(|p| Halfspace::new(p, r))
        .collect::<Vec<_>>();
    HalfspaceRegion::new(body.dim(), hs)
}

/// `(ε·B)^r = (r/ε)·B°` for an origin-centred ball `ε·B`.
pub fn polar_dual_ball(body: &ConvexBody, r: f64) -> Result<PolarBall> {
    check_level(r)?;
    let (shape, eps) = body.as_centered_ball().ok_or(Error::NotCenteredBall)?;
    if eps == 0.0 {
        return Ok(PolarBall::WholeSpace);
    }
    Ok(PolarBall::Ball(shape.dual()?.ball(r / eps, body.dim())))
}
