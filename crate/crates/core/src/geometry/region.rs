use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::body::{BallShape, ConvexBody};
use super::halfspace::{Halfspace, HalfspaceRegion};
use super::lp::{lp_maximize, LpOutcome};
use super::polar::{polar_dual_ball, polar_hrep, PolarBall};
use crate::{math, tol, Error, Matrix, Norm, Result, Vector};

/// Seed for the direction sample used by inexact containment tests in three
/// or more dimensions. Fixed so every verdict is reproducible.
const DIRECTION_SEED: u64 = 0x5eed_d1e5;

/// An origin-centred norm ball `{δ : gauge(δ) <= radius}` in perturbation
/// space.
#[derive(Debug, Clone, PartialEq)]
pub struct NormBall {
    shape: BallShape,
    radius: f64,
    dim: usize,
    /// `M⁻¹` for a quadratic shape `{δ : δᵀ M⁻¹ δ <= 1}`.
    inverse: Option<Matrix>,
}

impl NormBall {
    pub fn new(shape: BallShape, radius: f64, dim: usize) -> Result<NormBall> {
        if !(radius >= 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "ball radius {radius} must be nonnegative"
            )));
        }
        let inverse = match &shape {
            BallShape::Quadratic(m) => {
                if m.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: m.dim(),
                    });
                }
                Some(m.spd_inverse()?)
            }
            BallShape::Lp(_) => None,
        };
        Ok(NormBall {
            shape,
            radius,
            dim,
            inverse,
        })
    }

    pub fn shape(&self) -> &BallShape {
        &self.shape
    }

    /// Certified radius in the ball's own norm (may be infinite).
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gauge(&self, x: &[f64]) -> f64 {
        match (&self.shape, &self.inverse) {
            (BallShape::Lp(n), _) => n.eval(x),
            (BallShape::Quadratic(_), Some(inv)) => math::sqrt(inv.quad_form(x).max(0.0)),
            (BallShape::Quadratic(m), None) => {
                math::sqrt(m.spd_inverse().map_or(f64::NAN, |i| i.quad_form(x)).max(0.0))
            }
        }
    }

    /// `sup {v·δ : δ in the ball}`.
    pub fn support(&self, v: &[f64]) -> f64 {
        let unit = match &self.shape {
            BallShape::Lp(n) => n.dual().eval(v),
            BallShape::Quadratic(m) => math::sqrt(m.quad_form(v).max(0.0)),
        };
        if unit == 0.0 {
            0.0
        } else {
            self.radius * unit
        }
    }

    /// Same ball as a gradient-set polar constraint `(B°)^radius`.
    fn as_constraint(&self) -> Result<(ConvexBody, f64)> {
        Ok((self.shape.dual()?.ball(1.0, self.dim), self.radius))
    }

    /// Exact H-representation for `ℓ1`/`ℓ∞` shapes and zero radii.
    fn to_hrep(&self) -> Option<HalfspaceRegion> {
        let d = self.dim;
        if self.radius == 0.0 {
            return Some(HalfspaceRegion::cube(d, 0.0));
        }
        match self.shape {
            BallShape::Lp(Norm::LInf) => Some(HalfspaceRegion::cube(d, self.radius)),
            BallShape::Lp(Norm::L1) => {
                if d >= usize::BITS as usize || (1usize << d) > tol::MAX_EXPANSION {
                    return None;
                }
                let hs = (0..1usize << d)
                    .map(|mask| {
                        let a = (0..d)
                            .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
                            .collect::<Vec<_>>();
                        Halfspace::new(Vector::new(a), self.radius)
                    })
                    .collect();
                HalfspaceRegion::new(d, hs).ok()
            }
            _ => None,
        }
    }
}

/// A star-shaped (about the origin) convex region of perturbations.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Whole { dim: usize },
    Halfspaces(HalfspaceRegion),
    Ball(NormBall),
    /// `∩ₖ {δ : ρ_{Sₖ}(δ) <= rₖ}` for bodies without a finite expansion.
    Polar {
        dim: usize,
        constraints: Vec<(ConvexBody, f64)>,
    },
}

impl Region {
    pub fn whole(dim: usize) -> Region {
        Region::Whole { dim }
    }

    pub fn ball(shape: BallShape, radius: f64, dim: usize) -> Result<Region> {
        if radius == f64::INFINITY {
            return Ok(Region::Whole { dim });
        }
        Ok(Region::Ball(NormBall::new(shape, radius, dim)?))
    }

    /// `{δ : ρ_S(δ) <= r}` in the most explicit representation available.
    pub fn polar(body: &ConvexBody, r: f64) -> Result<Region> {
        let dim = body.dim();
        if body.as_centered_ball().is_some() {
            return Ok(match polar_dual_ball(body, r)? {
                PolarBall::WholeSpace => Region::Whole { dim },
                PolarBall::Ball(b) => {
                    let (shape, radius) = b.as_centered_ball().ok_or(Error::NotCenteredBall)?;
                    Region::Ball(NormBall::new(shape, radius, dim)?)
                }
            });
        }
        match polar_hrep(body, r) {
            Ok(h) => Ok(Region::Halfspaces(h)),
            Err(Error::NotFinite) | Err(Error::ExpansionTooLarge(_)) => Ok(Region::Polar {
                dim,
                constraints: vec![(body.clone(), r)],
            }),
            Err(e) => Err(e),
        }
    }

    /// Intersection of regions of one dimension, kept as explicit as possible:
    /// same-shape balls give the smallest ball, H-representable parts are
    /// concatenated, anything else becomes a list of polar constraints.
    pub fn intersection(dim: usize, parts: Vec<Region>) -> Result<Region> {
        let mut parts: Vec<Region> = parts
            .into_iter()
            .filter(|p| !matches!(p, Region::Whole { .. }))
            .collect();
        for p in &parts {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
        }
        if parts.is_empty() {
            return Ok(Region::Whole { dim });
        }
        if parts.len() == 1 {
            return Ok(parts.pop().unwrap_or(Region::Whole { dim }));
        }
        if let Some((shape, r)) = common_ball(&parts) {
            return Region::ball(shape, r, dim);
        }
        if let Some(hs) = parts.iter().map(|p| p.to_hrep()).collect::<Option<Vec<_>>>() {
            let mut acc = HalfspaceRegion::whole(dim);
            for h in hs {
                acc = acc.intersect(&h);
            }
            return Ok(Region::Halfspaces(acc));
        }
        let mut constraints = Vec::new();
        for p in parts {
            match p {
                Region::Whole { .. } => {}
                Region::Halfspaces(h) => {
                    for hs in h.halfspaces() {
                        if hs.offset < 0.0 {
                            return Err(Error::Precondition(
                                "intersected region must contain the origin".into(),
                            ));
                        }
                        constraints.push((ConvexBody::singleton(hs.normal.clone())?, hs.offset));
                    }
                }
                Region::Ball(b) => constraints.push(b.as_constraint()?),
                Region::Polar { constraints: c, .. } => constraints.extend(c),
            }
        }
        Ok(Region::Polar { dim, constraints })
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Whole { dim } | Region::Polar { dim, .. } => *dim,
            Region::Halfspaces(h) => h.dim(),
            Region::Ball(b) => b.dim(),
        }
    }

    /// How far `x` lies outside (nonpositive inside). Units depend on the
    /// representation; only the sign and the tolerance band are meaningful.
    pub fn violation(&self, x: &[f64]) -> f64 {
        match self {
            Region::Whole { .. } => f64::NEG_INFINITY,
            Region::Halfspaces(h) => h.violation(x),
            Region::Ball(b) => b.gauge(x) - b.radius,
            Region::Polar { constraints, .. } => constraints
                .iter()
                .map(|(s, r)| s.support_unchecked(x) - r)
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.violation(x) <= tol::GEOMETRY
    }

    /// `sup {t >= 0 : t·u ∈ region}`, infinite along unbounded directions.
    pub fn radial(&self, u: &[f64]) -> f64 {
        match self {
            Region::Whole { .. } => f64::INFINITY,
            Region::Halfspaces(h) => h.radial(u),
            Region::Ball(b) => {
                let g = b.gauge(u);
                if g > 0.0 {
                    b.radius / g
                } else {
                    f64::INFINITY
                }
            }
            Region::Polar { constraints, .. } => {
                let mut t = f64::INFINITY;
                for (s, r) in constraints {
                    let rho = s.support_unchecked(u);
                    if rho > 0.0 {
                        t = t.min(r / rho);
                    }
                }
                t
            }
        }
    }

    /// Exact H-representation when one exists within the expansion cap.
    pub fn to_hrep(&self) -> Option<HalfspaceRegion> {
        match self {
            Region::Whole { dim } => Some(HalfspaceRegion::whole(*dim)),
            Region::Halfspaces(h) => Some(h.clone()),
            Region::Ball(b) => b.to_hrep(),
            Region::Polar { dim, constraints } => {
                let mut acc = HalfspaceRegion::whole(*dim);
                for (s, r) in constraints {
                    acc = acc.intersect(&polar_hrep(s, *r).ok()?);
                }
                Some(acc)
            }
        }
    }

    /// `Some(true)` when the region is bounded, `None` when that cannot be
    /// decided exactly.
    pub fn is_bounded(&self) -> Result<Option<bool>> {
        match self {
            Region::Whole { .. } => Ok(Some(false)),
            Region::Ball(b) => Ok(Some(b.radius.is_finite())),
            _ => match self.to_hrep() {
                Some(h) => Ok(Some(hrep_bounded(&h)?)),
                None => Ok(None),
            },
        }
    }

    /// True when the region is exactly `{0}`.
    pub fn is_origin_only(&self) -> Result<bool> {
        if let Region::Ball(b) = self {
            return Ok(b.radius == 0.0);
        }
        let Some(h) = self.to_hrep() else {
            return Ok(false);
        };
        for i in 0..h.dim() {
            for s in [1.0, -1.0] {
                let v = Vector::axis(h.dim(), i, s);
                if lp_maximize(&v, &h)?.value() > tol::GEOMETRY {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The certified interval of a one-dimensional region.
    pub fn interval(&self) -> Option<(f64, f64)> {
        (self.dim() == 1).then(|| (-self.radial(&[-1.0]), self.radial(&[1.0])))
    }
}

fn common_ball(parts: &[Region]) -> Option<(BallShape, f64)> {
    let mut out: Option<(BallShape, f64)> = None;
    for p in parts {
        let Region::Ball(b) = p else { return None };
        match &mut out {
            None => out = Some((b.shape.clone(), b.radius)),
            Some((s, r)) => {
                if !s.same_as(&b.shape) {
                    return None;
                }
                *r = r.min(b.radius);
            }
        }
    }
    out
}

fn hrep_bounded(h: &HalfspaceRegion) -> Result<bool> {
    for i in 0..h.dim() {
        for s in [1.0, -1.0] {
            if let LpOutcome::Unbounded { .. } = lp_maximize(&Vector::axis(h.dim(), i, s), h)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Outcome of a containment test `A ⊆ B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Containment {
    /// The inclusion holds within the geometry tolerance.
    pub holds: bool,
    /// The inclusion fails by more than the strictness margin.
    pub strictly_fails: bool,
    /// Decided exactly (LP, vertices or closed form) rather than by sampling
    /// directions.
    pub exact: bool,
}

impl Containment {
    fn from_excess(hold: f64, strict: f64, exact: bool) -> Containment {
        Containment {
            holds: hold <= tol::GEOMETRY,
            strictly_fails: strict > tol::STRICT,
            exact,
        }
    }
}

/// `sup_{δ∈a} max_k (vₖ·δ − cₖ)` over the unit-normal halfspaces of `b`;
/// `-∞` when `a` is empty or `b` is the whole space.
fn hrep_excess(a: &HalfspaceRegion, b: &HalfspaceRegion) -> Result<f64> {
    let b = b.normalized();
    let mut worst = f64::NEG_INFINITY;
    for h in b.halfspaces() {
        match lp_maximize(&h.normal, a)? {
            LpOutcome::Optimal { value, .. } => worst = worst.max(value - h.offset),
            LpOutcome::Unbounded { .. } => return Ok(f64::INFINITY),
            LpOutcome::Infeasible => return Ok(f64::NEG_INFINITY),
        }
    }
    Ok(worst)
}

/// Excess of `a` over `parts[0] ∪ parts[1] ∪ …`, by splitting `a` along the
/// complement of the first part. Each complement piece is pushed `offset`
/// away from the carved halfspace.
fn hrep_union_excess(a: &HalfspaceRegion, parts: &[HalfspaceRegion], offset: f64) -> Result<f64> {
    let Some((first, rest)) = parts.split_first() else {
        let zero = vec![0.0; a.dim()];
        return Ok(match lp_maximize(&zero, a)? {
            LpOutcome::Infeasible => f64::NEG_INFINITY,
            _ => f64::INFINITY,
        });
    };
    if rest.is_empty() {
        return hrep_excess(a, first);
    }
    let mut worst = f64::NEG_INFINITY;
    for h in first.normalized().halfspaces() {
        let mut piece = a.clone();
        piece.push(Halfspace::new(h.normal.neg(), -h.offset - offset));
        worst = worst.max(hrep_union_excess(&piece, rest, offset)?);
        if worst == f64::INFINITY {
            break;
        }
    }
    Ok(worst)
}

/// True iff `a ⊆ b`, decided by linear programming.
pub fn region_subset(a: &HalfspaceRegion, b: &HalfspaceRegion) -> Result<bool> {
    check_dims(a.dim(), b.dim())?;
    Ok(hrep_excess(a, b)? <= tol::GEOMETRY)
}

/// True iff `a \ carve ⊆ b`: every piece `a ∩ {v·δ >= c}` cut off by a
/// halfspace of `carve` lies in `b`.
pub fn region_minus_subset(
    a: &HalfspaceRegion,
    carve: &HalfspaceRegion,
    b: &HalfspaceRegion,
) -> Result<bool> {
    check_dims(a.dim(), carve.dim())?;
    check_dims(a.dim(), b.dim())?;
    let parts = [carve.clone(), b.clone()];
    Ok(hrep_union_excess(a, &parts, tol::CARVE)? <= tol::GEOMETRY)
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        });
    }
    Ok(())
}

/// Vertices of a bounded H-rep in one or two dimensions; `None` otherwise.
pub fn polytope_vertices(h: &HalfspaceRegion) -> Result<Option<Vec<Vector>>> {
    let d = h.dim();
    if d > 2 {
        return Ok(None);
    }
    let mut extent = Vec::with_capacity(2 * d);
    for i in 0..d {
        for s in [1.0, -1.0] {
            match lp_maximize(&Vector::axis(d, i, s), h)? {
                LpOutcome::Unbounded { .. } => return Ok(None),
                LpOutcome::Infeasible => return Ok(Some(Vec::new())),
                LpOutcome::Optimal { value, .. } => extent.push(value),
            }
        }
    }
    if d == 1 {
        return Ok(Some(vec![Vector::from([extent[0]]), Vector::from([-extent[1]])]));
    }
    let hs = h.normalized();
    let rows = hs.halfspaces();
    let mut out: Vec<Vector> = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (a, b) = (&rows[i], &rows[j]);
            let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let x = (a.offset * b.normal[1] - a.normal[1] * b.offset) / det;
            let y = (a.normal[0] * b.offset - a.offset * b.normal[0]) / det;
            let p = Vector::from([x, y]);
            if hs.violation(&p) <= tol::GEOMETRY && !out.iter().any(|q| q.max_abs_diff(&p) < 1e-12) {
                out.push(p);
            }
        }
    }
    if out.is_empty() {
        // Degenerate (a point or a segment along parallel rows).
        out.push(Vector::from([extent[0], extent[2]]));
    }
    Ok(Some(out))
}

/// Unit directions probed by sampled tests: `±1` in one dimension (which
/// makes the test exact there), an even angle grid in two, seeded Gaussian
/// directions plus the coordinate axes above that.
fn directions(dim: usize) -> (Vec<Vector>, bool) {
    match dim {
        1 => (vec![Vector::from([1.0]), Vector::from([-1.0])], true),
        2 => {
            let n = tol::SAMPLED_DIRECTIONS;
            let v = (0..n)
                .map(|k| {
                    let th = 2.0 * core::f64::consts::PI * k as f64 / n as f64;
                    Vector::from([math::cos(th), math::sin(th)])
                })
                .collect();
            (v, false)
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(DIRECTION_SEED);
            let mut out = Vec::with_capacity(tol::SAMPLED_DIRECTIONS + 2 * dim);
            for i in 0..dim {
                out.push(Vector::axis(dim, i, 1.0));
                out.push(Vector::axis(dim, i, -1.0));
            }
            while out.len() < tol::SAMPLED_DIRECTIONS + 2 * dim {
                let g: Vec<f64> = (0..dim).map(|_| gaussian(&mut rng)).collect();
                let v = Vector::new(g);
                let n = v.norm(Norm::L2);
                if n > 1e-12 {
                    out.push(v.scaled(1.0 / n));
                }
            }
            (out, false)
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = 1.0 - uniform(rng);
    let u2 = uniform(rng);
    math::sqrt(-2.0 * math::ln(u1)) * math::cos(2.0 * core::f64::consts::PI * u2)
}

fn radial_gap(ta: f64, tb: f64) -> f64 {
    if ta == f64::INFINITY {
        if tb == f64::INFINITY {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        ta - tb
    }
}

/// `max_u t_a(u) − t_b(u)` over the sampled directions, with `t_b` the
/// largest radial extent among `bs`.
fn sampled_excess(a: &Region, bs: &[&Region]) -> (f64, bool) {
    let (dirs, exact) = directions(a.dim());
    let mut worst = f64::NEG_INFINITY;
    for u in &dirs {
        let ta = a.radial(u);
        let tb = bs.iter().map(|b| b.radial(u)).fold(0.0, f64::max);
        worst = worst.max(radial_gap(ta, tb));
    }
    (worst, exact)
}

fn same_shape_balls<'a>(a: &'a Region, bs: &[&'a Region]) -> Option<(&'a NormBall, Vec<&'a NormBall>)> {
    let Region::Ball(ab) = a else { return None };
    let mut out = Vec::with_capacity(bs.len());
    for b in bs {
        match b {
            Region::Ball(bb) if bb.shape.same_as(&ab.shape) => out.push(bb),
            _ => return None,
        }
    }
    Some((ab, out))
}

/// Excess of `a` over a single convex region `b`.
fn subset_excess(a: &Region, b: &Region) -> Result<(f64, bool)> {
    if let Region::Whole { .. } = b {
        return Ok((f64::NEG_INFINITY, true));
    }
    if let Some((ab, bb)) = same_shape_balls(a, &[b]) {
        return Ok((ab.radius - bb[0].radius, true));
    }
    let ah = a.to_hrep();
    if let Some(bh) = b.to_hrep() {
        if let Some(ah) = &ah {
            return Ok((hrep_excess(ah, &bh)?, true));
        }
        if let Region::Ball(ab) = a {
            let worst = bh
                .normalized()
                .halfspaces()
                .iter()
                .map(|h| ab.support(&h.normal) - h.offset)
                .fold(f64::NEG_INFINITY, f64::max);
            return Ok((worst, true));
        }
    }
    if let Some(ah) = &ah {
        if let Some(vs) = polytope_vertices(ah)? {
            let worst = vs.iter().map(|v| b.violation(v)).fold(f64::NEG_INFINITY, f64::max);
            return Ok((worst, true));
        }
        if matches!(b, Region::Ball(_)) && !hrep_bounded(ah)? {
            return Ok((f64::INFINITY, true));
        }
    }
    if matches!(a, Region::Whole { .. }) && matches!(b, Region::Ball(_)) {
        return Ok((f64::INFINITY, true));
    }
    Ok(sampled_excess(a, &[b]))
}

/// Decides `a ⊆ b`.
pub fn subset(a: &Region, b: &Region) -> Result<Containment> {
    check_dims(a.dim(), b.dim())?;
    let (e, exact) = subset_excess(a, b)?;
    Ok(Containment::from_excess(e, e, exact))
}

/// Decides `a ⊆ ∪ parts`. Exact for H-representable regions (complement
/// decomposition), for same-shape balls and in one dimension; sampled
/// otherwise.
pub fn subset_of_union(a: &Region, parts: &[&Region]) -> Result<Containment> {
    for p in parts {
        check_dims(a.dim(), p.dim())?;
    }
    if parts.len() == 1 {
        return subset(a, parts[0]);
    }
    if parts.iter().any(|p| matches!(p, Region::Whole { .. })) {
        return Ok(Containment::from_excess(f64::NEG_INFINITY, f64::NEG_INFINITY, true));
    }
    if let Some((ab, bs)) = same_shape_balls(a, parts) {
        let e = ab.radius - bs.iter().map(|b| b.radius).fold(0.0, f64::max);
        return Ok(Containment::from_excess(e, e, true));
    }
    if let Some(ah) = a.to_hrep() {
        if let Some(ph) = parts.iter().map(|p| p.to_hrep()).collect::<Option<Vec<_>>>() {
            let hold = hrep_union_excess(&ah, &ph, tol::CARVE)?;
            let strict = hrep_union_excess(&ah, &ph, tol::STRICT)?;
            return Ok(Containment::from_excess(hold, strict, true));
        }
    }
    let (e, exact) = sampled_excess(a, parts);
    Ok(Containment::from_excess(e, e, exact))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(r: f64) -> HalfspaceRegion {
        HalfspaceRegion::cube(2, r)
    }

    fn halfplane(a: [f64; 2], b: f64) -> HalfspaceRegion {
        HalfspaceRegion::new(2, vec![Halfspace::new(Vector::from(a), b)]).unwrap()
    }

    #[test]
    fn nested_boxes() {
        assert!(region_subset(&cube(1.0 / 3.0), &cube(0.5)).unwrap());
        assert!(!region_subset(&cube(0.5), &cube(1.0 / 3.0)).unwrap());
        assert!(!region_subset(&halfplane([1.0, 0.0], 1.0), &cube(1.0)).unwrap());
    }

    #[test]
    fn minus_subset_cases() {
        let a = cube(1.0);
        let carve = halfplane([1.0, 0.0], 0.0);
        assert!(region_minus_subset(&a, &carve, &a).unwrap());
        assert!(region_minus_subset(&a, &cube(1.0), &cube(1e-3)).unwrap());
        // Right half of the box is not inside a thin strip.
        assert!(!region_minus_subset(&a, &carve, &cube(0.5)).unwrap());
        // Two halfplanes cover the box exactly.
        let right = halfplane([-1.0, 0.0], 0.0);
        assert!(region_minus_subset(&a, &carve, &right).unwrap());
    }

    #[test]
    fn union_of_two_strips_covers_cross_only() {
        let h = HalfspaceRegion::new(
            2,
            vec![
                Halfspace::new(Vector::from([0.0, 1.0]), 0.1),
                Halfspace::new(Vector::from([0.0, -1.0]), 0.1),
            ],
        )
        .unwrap();
        let v = HalfspaceRegion::new(
            2,
            vec![
                Halfspace::new(Vector::from([1.0, 0.0]), 0.1),
                Halfspace::new(Vector::from([-1.0, 0.0]), 0.1),
            ],
        )
        .unwrap();
        let (h, v) = (Region::Halfspaces(h), Region::Halfspaces(v));
        let small = Region::Halfspaces(cube(0.1));
        let big = Region::Halfspaces(cube(0.2));
        let c = subset_of_union(&small, &[&h, &v]).unwrap();
        assert!(c.holds && c.exact);
        let c = subset_of_union(&big, &[&h, &v]).unwrap();
        assert!(!c.holds && c.strictly_fails);
    }

    #[test]
    fn balls_and_polytopes() {
        let l2 = |r| Region::ball(BallShape::Lp(Norm::L2), r, 2).unwrap();
        let c = subset(&l2(1.0), &Region::Halfspaces(cube(1.0))).unwrap();
        assert!(c.holds && c.exact);
        let c = subset(&l2(1.1), &Region::Halfspaces(cube(1.0))).unwrap();
        assert!(c.strictly_fails);
        let c = subset(&Region::Halfspaces(cube(0.7)), &l2(1.0)).unwrap();
        assert!(c.holds && c.exact);
        let c = subset(&Region::Halfspaces(cube(0.8)), &l2(1.0)).unwrap();
        assert!(c.strictly_fails && c.exact);
        let c = subset(&Region::Halfspaces(halfplane([1.0, 0.0], 1.0)), &l2(5.0)).unwrap();
        assert!(c.strictly_fails && c.exact);
        assert!(subset(&l2(1.0), &l2(2.0)).unwrap().holds);
    }

    #[test]
    fn ellipsoid_union_is_sampled_in_2d() {
        let e = |a: f64, b: f64| {
            Region::ball(BallShape::Quadratic(Matrix::diagonal(&[a, b])), 1.0, 2).unwrap()
        };
        let (p, q) = (e(4.0, 0.25), e(0.25, 4.0));
        let disk = Region::ball(BallShape::Lp(Norm::L2), 0.5, 2).unwrap();
        let c = subset_of_union(&disk, &[&p, &q]).unwrap();
        assert!(c.holds && !c.exact);
        let big = Region::ball(BallShape::Lp(Norm::L2), 1.5, 2).unwrap();
        assert!(subset_of_union(&big, &[&p, &q]).unwrap().strictly_fails);
    }

    #[test]
    fn intervals_and_triviality() {
        let s = ConvexBody::points(vec![Vector::from([-0.8]), Vector::from([1.2])]).unwrap();
        let q = Region::polar(&s, 0.2).unwrap();
        let (lo, hi) = q.interval().unwrap();
        assert!((lo + 0.25).abs() < 1e-15 && (hi - 0.2 / 1.2).abs() < 1e-15);
        let half = Region::polar(&ConvexBody::singleton(Vector::from([0.2])).unwrap(), 0.2).unwrap();
        assert_eq!(half.interval().unwrap(), (f64::NEG_INFINITY, 1.0));
        assert_eq!(half.is_bounded().unwrap(), Some(false));
        let cone = Region::polar(&s, 0.0).unwrap();
        assert!(cone.is_origin_only().unwrap());
        assert!(!q.is_origin_only().unwrap());
    }

    #[test]
    fn vertices_of_triangle() {
        let h = HalfspaceRegion::new(
            2,
            vec![
                Halfspace::new(Vector::from([-1.0, 0.0]), 0.0),
                Halfspace::new(Vector::from([0.0, -1.0]), 0.0),
                Halfspace::new(Vector::from([1.0, 1.0]), 1.0),
            ],
        )
        .unwrap();
        let v = polytope_vertices(&h).unwrap().unwrap();
        assert_eq!(v.len(), 3);
        assert!(polytope_vertices(&halfplane([1.0, 0.0], 1.0)).unwrap().is_none());
    }

    #[test]
    fn mixed_intersection_falls_back_to_constraints() {
        let e = Region::ball(BallShape::Quadratic(Matrix::diagonal(&[1.0, 2.0])), 1.0, 2).unwrap();
        let h = Region::Halfspaces(halfplane([1.0, 0.0], 0.5));
        let q = Region::intersection(2, vec![e, h]).unwrap();
        assert!(matches!(q, Region::Polar { .. }));
        assert!(q.contains(&[0.5, 0.0]));
        assert!(!q.contains(&[0.6, 0.0]));
        assert!(!q.contains(&[0.0, 1.5]));
        assert!(q.contains(&[0.0, 1.4]));
    }
}
