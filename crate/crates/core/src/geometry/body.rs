use alloc::vec;
use alloc::vec::Vec;

use super::hull::prune_in_place;
use crate::linalg::dot;
use crate::{math, tol, Error, Matrix, Norm, Result, Vector};

/// A bounded gradient set, known through its support function
/// `ρ_S(δ) = sup_{c ∈ S} c·δ`.
///
/// Sets are only ever used through `ρ_S`, so a body and its convex hull are
/// interchangeable.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexBody {
    /// A finite point set (its convex hull, for every purpose here).
    Points(Vec<Vector>),
    /// `{c : ‖c − center‖_p <= radius}`.
    LpBall {
        norm: Norm,
        radius: f64,
        center: Vector,
    },
    /// `{c : cᵀ Σ⁻¹ c <= radius²}`, with support `radius · sqrt(δᵀ Σ δ)`.
    Ellipsoid { sigma: Matrix, radius: f64 },
    /// A formal weighted Minkowski sum `⊕ₖ coeffₖ · (±Sₖ)`.
    Combination(Vec<Term>),
}

/// One summand of a [`ConvexBody::Combination`].
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: f64,
    /// The summand is `−body` rather than `body`.
    pub negated: bool,
    pub body: ConvexBody,
}

/// Shape of an origin-centred ball, described as a gradient set.
#[derive(Debug, Clone, PartialEq)]
pub enum BallShape {
    /// Unit ball of an `ℓp` norm.
    Lp(Norm),
    /// `{c : cᵀ Σ⁻¹ c <= 1}`; the support is `sqrt(δᵀ Σ δ)`.
    Quadratic(Matrix),
}

impl BallShape {
    /// Shape of the polar: `(ε B)^r = (r/ε) B°` with `B°` the dual ball.
    pub fn dual(&self) -> Result<BallShape> {
        Ok(match self {
            BallShape::Lp(n) => BallShape::Lp(n.dual()),
            BallShape::Quadratic(m) => BallShape::Quadratic(m.spd_inverse()?),
        })
    }

    pub fn same_as(&self, other: &BallShape) -> bool {
        match (self, other) {
            (BallShape::Lp(a), BallShape::Lp(b)) => (a.p() - b.p()).abs() <= 1e-12 || a == b,
            (BallShape::Quadratic(a), BallShape::Quadratic(b)) => {
                let scale = a.rows().iter().flatten().fold(1.0_f64, |m, v| m.max(v.abs()));
                a.max_abs_diff(b) <= 1e-12 * scale
            }
            _ => false,
        }
    }

    /// The origin-centred ball of this shape with the given radius.
    pub fn ball(&self, radius: f64, dim: usize) -> ConvexBody {
        match self {
            BallShape::Lp(norm) => ConvexBody::LpBall {
                norm: *norm,
                radius,
                center: Vector::zeros(dim),
            },
            BallShape::Quadratic(m) => ConvexBody::Ellipsoid {
                sigma: m.clone(),
                radius,
            },
        }
    }
}

impl ConvexBody {
    pub fn points(points: Vec<Vector>) -> Result<ConvexBody> {
        let first = points.first().ok_or(Error::EmptyPointSet)?;
        let d = first.dim();
        if d == 0 {
            return Err(Error::InvalidParameter("zero-dimensional point".into()));
        }
        for p in &points {
            if p.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.dim(),
                });
            }
            if !p.is_finite() {
                return Err(Error::NonFinite("point set"));
            }
        }
        Ok(ConvexBody::Points(points))
    }

    pub fn singleton(point: Vector) -> Result<ConvexBody> {
        Self::points(vec![point])
    }

    pub fn lp_ball(p: f64, radius: f64, center: Vector) -> Result<ConvexBody> {
        let norm = Norm::from_p(p)?;
        check_radius(radius)?;
        if center.dim() == 0 {
            return Err(Error::InvalidParameter("zero-dimensional ball".into()));
        }
        if !center.is_finite() {
            return Err(Error::NonFinite("ball centre"));
        }
        Ok(ConvexBody::LpBall {
            norm,
            radius,
            center,
        })
    }

    pub fn ellipsoid(sigma: Matrix, radius: f64) -> Result<ConvexBody> {
        check_radius(radius)?;
        sigma.cholesky()?;
        Ok(ConvexBody::Ellipsoid { sigma, radius })
    }

    pub fn combination(terms: Vec<Term>) -> Result<ConvexBody> {
        let d = terms.first().ok_or(Error::EmptyPointSet)?.body.dim();
        for t in &terms {
            if !t.coeff.is_finite() || t.coeff < 0.0 {
                return Err(Error::InvalidParameter(alloc::format!(
                    "combination coefficient {} must be a finite nonnegative number",
                    t.coeff
                )));
            }
            if t.body.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: t.body.dim(),
                });
            }
        }
        Ok(ConvexBody::Combination(terms))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Points(p) => p.first().map_or(0, |v| v.dim()),
            ConvexBody::LpBall { center, .. } => center.dim(),
            ConvexBody::Ellipsoid { sigma, .. } => sigma.dim(),
            ConvexBody::Combination(t) => t.first().map_or(0, |t| t.body.dim()),
        }
    }

    /// `ρ_S(δ)` with dimension and finiteness checks.
    pub fn support(&self, direction: &[f64]) -> Result<f64> {
        if direction.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: direction.len(),
            });
        }
        if !direction.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("direction"));
        }
        Ok(self.support_unchecked(direction))
    }

    /// `ρ_S(δ)`; the caller guarantees matching dimensions.
    pub fn support_unchecked(&self, d: &[f64]) -> f64 {
        match self {
            ConvexBody::Points(pts) => pts
                .iter()
                .map(|p| p.dot(d))
                .fold(f64::NEG_INFINITY, f64::max),
            ConvexBody::LpBall {
                norm,
                radius,
                center,
            } => center.dot(d) + radius * norm.dual().eval(d),
            ConvexBody::Ellipsoid { sigma, radius } => {
                radius * math::sqrt(sigma.quad_form(d).max(0.0))
            }
            ConvexBody::Combination(terms) => terms
                .iter()
                .filter(|t| t.coeff != 0.0)
                .map(|t| {
                    let s = if t.negated {
                        let neg: Vec<f64> = d.iter().map(|v| -v).collect();
                        t.body.support_unchecked(&neg)
                    } else {
                        t.body.support_unchecked(d)
                    };
                    t.coeff * s
                })
                .sum(),
        }
    }

    /// A point of the body attaining `ρ_S(δ)`.
    pub fn support_point(&self, d: &[f64]) -> Vector {
        match self {
            ConvexBody::Points(pts) => {
                let mut best = &pts[0];
                let mut best_val = best.dot(d);
                for p in &pts[1..] {
                    let v = p.dot(d);
                    if v > best_val {
                        best = p;
                        best_val = v;
                    }
                }
                best.clone()
            }
            ConvexBody::LpBall {
                norm,
                radius,
                center,
            } => {
                let s = norm.dual_maximizer(d);
                center.add(&Vector::new(s).scaled(*radius))
            }
            ConvexBody::Ellipsoid { sigma, radius } => {
                let sd = sigma.mul_vec(d);
                let n = math::sqrt(dot(d, &sd).max(0.0));
                if n == 0.0 {
                    Vector::zeros(d.len())
                } else {
                    Vector::new(sd).scaled(radius / n)
                }
            }
            ConvexBody::Combination(terms) => {
                let mut acc = Vector::zeros(d.len());
                for t in terms.iter().filter(|t| t.coeff != 0.0) {
                    let p = if t.negated {
                        let neg: Vec<f64> = d.iter().map(|v| -v).collect();
                        t.body.support_point(&neg).neg()
                    } else {
                        t.body.support_point(d)
                    };
                    acc = acc.add(&p.scaled(t.coeff));
                }
                acc
            }
        }
    }

    /// `−S`.
    pub fn negate(&self) -> ConvexBody {
        match self {
            ConvexBody::Points(pts) => ConvexBody::Points(pts.iter().map(Vector::neg).collect()),
            ConvexBody::LpBall {
                norm,
                radius,
                center,
            } => ConvexBody::LpBall {
                norm: *norm,
                radius: *radius,
                center: center.neg(),
            },
            ConvexBody::Ellipsoid { .. } => self.clone(),
            ConvexBody::Combination(terms) => ConvexBody::Combination(
                terms
                    .iter()
                    .map(|t| Term {
                        coeff: t.coeff,
                        negated: !t.negated,
                        body: t.body.clone(),
                    })
                    .collect(),
            ),
        }
    }

    /// `α S` for `α >= 0`; `α = 0` yields `{0}`.
    pub fn scale(&self, alpha: f64) -> Result<ConvexBody> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidParameter(alloc::format!(
                "scale factor {alpha} must be a finite nonnegative number"
            )));
        }
        if alpha == 0.0 {
            return Ok(ConvexBody::Points(vec![Vector::zeros(self.dim())]));
        }
        Ok(match self {
            ConvexBody::Points(pts) => {
                ConvexBody::Points(pts.iter().map(|p| p.scaled(alpha)).collect())
            }
            ConvexBody::LpBall {
                norm,
                radius,
                center,
            } => ConvexBody::LpBall {
                norm: *norm,
                radius: radius * alpha,
                center: center.scaled(alpha),
            },
            ConvexBody::Ellipsoid { sigma, radius } => ConvexBody::Ellipsoid {
                sigma: sigma.clone(),
                radius: radius * alpha,
            },
            ConvexBody::Combination(terms) => ConvexBody::Combination(
                terms
                    .iter()
                    .map(|t| Term {
                        coeff: t.coeff * alpha,
                        negated: t.negated,
                        body: t.body.clone(),
                    })
                    .collect(),
            ),
        })
    }

    /// `S ⊕ T`, in closed form where one exists and as a formal
    /// [`ConvexBody::Combination`] otherwise.
    pub fn minkowski_sum(&self, other: &ConvexBody) -> Result<ConvexBody> {
        let d = self.dim();
        if other.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: other.dim(),
            });
        }
        if self.is_origin() {
            return Ok(other.clone());
        }
        if other.is_origin() {
            return Ok(self.clone());
        }
        match (self, other) {
            (ConvexBody::Points(a), ConvexBody::Points(b))
                if a.len().saturating_mul(b.len()) <= tol::MAX_EXPANSION =>
            {
                let mut a = a.clone();
                let mut b = b.clone();
                prune_in_place(&mut a);
                prune_in_place(&mut b);
                let mut sums = pairwise_sums(&a, &b);
                prune_in_place(&mut sums);
                return Ok(ConvexBody::Points(sums));
            }
            (
                ConvexBody::LpBall {
                    norm: n1,
                    radius: r1,
                    center: c1,
                },
                ConvexBody::LpBall {
                    norm: n2,
                    radius: r2,
                    center: c2,
                },
            ) if BallShape::Lp(*n1).same_as(&BallShape::Lp(*n2)) => {
                return Ok(ConvexBody::LpBall {
                    norm: *n1,
                    radius: r1 + r2,
                    center: c1.add(c2),
                });
            }
            (
                ConvexBody::Ellipsoid {
                    sigma: s1,
                    radius: r1,
                },
                ConvexBody::Ellipsoid {
                    sigma: s2,
                    radius: r2,
                },
            ) if BallShape::Quadratic(s1.clone()).same_as(&BallShape::Quadratic(s2.clone())) => {
                return Ok(ConvexBody::Ellipsoid {
                    sigma: s1.clone(),
                    radius: r1 + r2,
                });
            }
            (ConvexBody::Points(p), ConvexBody::LpBall { norm, radius, center })
            | (ConvexBody::LpBall { norm, radius, center }, ConvexBody::Points(p))
                if p.len() == 1 =>
            {
                return Ok(ConvexBody::LpBall {
                    norm: *norm,
                    radius: *radius,
                    center: center.add(&p[0]),
                });
            }
            _ => {}
        }
        let mut terms = self.as_terms();
        terms.extend(other.as_terms());
        Ok(ConvexBody::Combination(terms))
    }

    fn as_terms(&self) -> Vec<Term> {
        match self {
            ConvexBody::Combination(t) => t.clone(),
            body => vec![Term {
                coeff: 1.0,
                negated: false,
                body: body.clone(),
            }],
        }
    }

    /// True for `{0}` (a single point at the origin, or a zero-radius ball
    /// centred there).
    pub fn is_origin(&self) -> bool {
        match self {
            ConvexBody::Points(p) => p.iter().all(|v| v.iter().all(|x| *x == 0.0)),
            ConvexBody::LpBall { radius, center, .. } => {
                *radius == 0.0 && center.iter().all(|x| *x == 0.0)
            }
            ConvexBody::Ellipsoid { radius, .. } => *radius == 0.0,
            ConvexBody::Combination(t) => t.iter().all(|t| t.coeff == 0.0 || t.body.is_origin()),
        }
    }

    /// Shape and radius when the body is an origin-centred ball. A
    /// combination of centred balls of one shape is itself such a ball
    /// (negation leaves a centred ball unchanged).
    pub fn as_centered_ball(&self) -> Option<(BallShape, f64)> {
        match self {
            ConvexBody::LpBall {
                norm,
                radius,
                center,
            } if center.iter().all(|x| *x == 0.0) => Some((BallShape::Lp(*norm), *radius)),
            ConvexBody::Ellipsoid { sigma, radius } => {
                Some((BallShape::Quadratic(sigma.clone()), *radius))
            }
            ConvexBody::Combination(terms) => {
                let mut shape: Option<BallShape> = None;
                let mut total = 0.0;
                for t in terms.iter().filter(|t| t.coeff != 0.0) {
                    let (s, r) = t.body.as_centered_ball()?;
                    match &shape {
                        Some(prev) if !prev.same_as(&s) => return None,
                        Some(_) => {}
                        None => shape = Some(s),
                    }
                    total += t.coeff * r;
                }
                shape.map(|s| (s, total))
            }
            _ => None,
        }
    }

    /// Explicit generators of the body when it is a polytope: finite point
    /// sets, `ℓ1`/`ℓ∞` balls and combinations of those. Balls with curved
    /// boundaries yield `Ok(None)`. Pairwise sums are hull-pruned after each
    /// step in one and two dimensions.
    pub fn expand_points(&self) -> Result<Option<Vec<Vector>>> {
        let d = self.dim();
        match self {
            ConvexBody::Points(p) => Ok(Some(p.clone())),
            ConvexBody::LpBall {
                norm,
                radius,
                center,
            } => {
                if *radius == 0.0 {
                    return Ok(Some(vec![center.clone()]));
                }
                match norm {
                    Norm::L1 => {
                        let mut v = Vec::with_capacity(2 * d);
                        for i in 0..d {
                            for s in [1.0, -1.0] {
                                v.push(center.add(&Vector::axis(d, i, s * radius)));
                            }
                        }
                        Ok(Some(v))
                    }
                    Norm::LInf => {
                        if d >= usize::BITS as usize || (1usize << d) > tol::MAX_EXPANSION {
                            return Err(Error::ExpansionTooLarge(tol::MAX_EXPANSION));
                        }
                        let v = (0..1usize << d)
                            .map(|mask| {
                                let c: Vec<f64> = (0..d)
                                    .map(|i| {
                                        let s = if mask >> i & 1 == 1 { 1.0 } else { -1.0 };
                                        center[i] + s * radius
                                    })
                                    .collect();
                                Vector::new(c)
                            })
                            .collect();
                        Ok(Some(v))
                    }
                    _ => Ok(None),
                }
            }
            ConvexBody::Ellipsoid { radius, .. } => {
                if *radius == 0.0 {
                    Ok(Some(vec![Vector::zeros(d)]))
                } else {
                    Ok(None)
                }
            }
            ConvexBody::Combination(terms) => {
                let mut acc = vec![Vector::zeros(d)];
                for t in terms {
                    if t.coeff == 0.0 {
                        continue;
                    }
                    let Some(pts) = t.body.expand_points()? else {
                        return Ok(None);
                    };
                    let mut pts: Vec<Vector> = pts
                        .iter()
                        .map(|p| {
                            let p = p.scaled(t.coeff);
                            if t.negated {
                                p.neg()
                            } else {
                                p
                            }
                        })
                        .collect();
                    prune_in_place(&mut pts);
                    if acc.len().saturating_mul(pts.len()) > tol::MAX_EXPANSION {
                        return Err(Error::ExpansionTooLarge(tol::MAX_EXPANSION));
                    }
                    acc = pairwise_sums(&acc, &pts);
                    prune_in_place(&mut acc);
                }
                Ok(Some(acc))
            }
        }
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if !radius.is_finite() || radius < 0.0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "radius {radius} must be a finite nonnegative number"
        )));
    }
    Ok(())
}

fn pairwise_sums(a: &[Vector], b: &[Vector]) -> Vec<Vector> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for p in a {
        for q in b {
            out.push(p.add(q));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[&[f64]]) -> ConvexBody {
        ConvexBody::points(v.iter().map(|p| Vector::from(*p)).collect()).unwrap()
    }

    #[test]
    fn support_of_points_and_balls() {
        let s = pts(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(s.support(&[1.0, 1.0]).unwrap(), 1.0);

        let l1 = ConvexBody::lp_ball(1.0, 1.5, Vector::zeros(2)).unwrap();
        assert_eq!(l1.support(&[1.0, 0.0]).unwrap(), 1.5);

        let diff = pts(&[&[0.3]]).minkowski_sum(&pts(&[&[0.1]]).negate()).unwrap();
        assert!((diff.support(&[1.0]).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn support_rejects_bad_directions() {
        let s = pts(&[&[1.0, 0.0]]);
        assert!(matches!(
            s.support(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            s.support(&[f64::NAN, 0.0]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn negate_and_scale() {
        assert_eq!(pts(&[&[1.0, 2.0]]).negate(), pts(&[&[-1.0, -2.0]]));
        let b = ConvexBody::lp_ball(2.0, 1.0, Vector::zeros(2)).unwrap();
        assert_eq!(
            b.scale(2.0).unwrap(),
            ConvexBody::lp_ball(2.0, 2.0, Vector::zeros(2)).unwrap()
        );
        let z = b.scale(0.0).unwrap();
        assert!(z.is_origin());
        assert_eq!(z.support(&[3.0, -4.0]).unwrap(), 0.0);
        assert!(b.scale(-1.0).is_err());
    }

    #[test]
    fn minkowski_closed_forms() {
        let a = pts(&[&[1.0, 2.0]]);
        let b = pts(&[&[0.5, -1.0]]);
        assert_eq!(a.minkowski_sum(&b.negate()).unwrap(), pts(&[&[0.5, 3.0]]));

        let b1 = ConvexBody::lp_ball(2.0, 1.0, Vector::zeros(2)).unwrap();
        let b2 = ConvexBody::lp_ball(2.0, 2.0, Vector::zeros(2)).unwrap();
        assert_eq!(
            b1.minkowski_sum(&b2).unwrap(),
            ConvexBody::lp_ball(2.0, 3.0, Vector::zeros(2)).unwrap()
        );

        let s = pts(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let ConvexBody::Points(mut diff) = s.minkowski_sum(&s.negate()).unwrap() else {
            panic!("expected points");
        };
        // The difference {0} lies on the segment between the other two and is
        // pruned; the support is unchanged.
        diff.sort_by(|a, b| a[0].total_cmp(&b[0]));
        assert_eq!(diff, vec![Vector::from([-1.0, 1.0]), Vector::from([1.0, -1.0])]);
        let full = pts(&[&[-1.0, 1.0], &[0.0, 0.0], &[1.0, -1.0]]);
        for d in [[1.0, 0.3], [-0.2, -1.0], [0.5, 0.5]] {
            assert_eq!(ConvexBody::Points(diff.clone()).support(&d).unwrap(), full.support(&d).unwrap());
        }
    }

    #[test]
    fn mixed_sum_is_formal() {
        let b = ConvexBody::lp_ball(2.0, 1.0, Vector::zeros(2)).unwrap();
        let p = pts(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let sum = b.minkowski_sum(&p).unwrap();
        assert!(matches!(sum, ConvexBody::Combination(ref t) if t.len() == 2));
        let dir = [0.6, -0.8];
        let expected = b.support(&dir).unwrap() + p.support(&dir).unwrap();
        assert!((sum.support(&dir).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn combination_of_centered_balls_is_a_ball() {
        let b = ConvexBody::lp_ball(2.0, 0.5, Vector::zeros(2)).unwrap();
        let p = pts(&[&[1.0, 0.0]]);
        let c = ConvexBody::Combination(vec![
            Term { coeff: 2.0, negated: false, body: b.clone() },
            Term { coeff: 1.0, negated: true, body: b },
        ]);
        let (shape, r) = c.as_centered_ball().unwrap();
        assert_eq!(shape, BallShape::Lp(Norm::L2));
        assert!((r - 1.5).abs() < 1e-15);
        assert!(p.as_centered_ball().is_none());
    }

    #[test]
    fn expand_polytopes() {
        let l1 = ConvexBody::lp_ball(1.0, 1.5, Vector::zeros(2)).unwrap();
        assert_eq!(l1.expand_points().unwrap().unwrap().len(), 4);
        let linf = ConvexBody::lp_ball(f64::INFINITY, 1.0, Vector::zeros(3)).unwrap();
        assert_eq!(linf.expand_points().unwrap().unwrap().len(), 8);
        let l2 = ConvexBody::lp_ball(2.0, 1.0, Vector::zeros(2)).unwrap();
        assert!(l2.expand_points().unwrap().is_none());
    }

    #[test]
    fn support_point_attains_support() {
        let sigma = Matrix::from_rows(&[vec![1.25, 0.25], vec![0.25, 1.25]]).unwrap();
        let bodies = [
            ConvexBody::ellipsoid(sigma, 0.7).unwrap(),
            ConvexBody::lp_ball(3.0, 1.2, Vector::from([0.1, -0.3])).unwrap(),
            pts(&[&[1.0, 0.0], &[0.2, 0.9]]),
        ];
        let dir = [0.3, -1.1];
        for b in &bodies {
            let p = b.support_point(&dir);
            assert!((p.dot(&dir) - b.support(&dir).unwrap()).abs() < 1e-12, "{b:?}");
        }
    }
}
