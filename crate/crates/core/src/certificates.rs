//! Certificates for a single classifier at a fixed input.
//!
//! Three granularities of smoothness data are supported: one gradient set
//! shared by every class ([`Smoothness::Uniform`]), one per class
//! ([`Smoothness::ClassWise`]) and one per ordered class difference
//! ([`Smoothness::ClassDiff`]). Each yields a Lipschitz certificate (a dual
//! norm ball) when the sets are centred balls, and an S-certificate (a polar
//! region) in general.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::geometry::{BallShape, ConvexBody, Region};
use crate::{math, tol, Error, Matrix, Norm, Result, Vector};

/// Smoothness data for every logit of a classifier.
#[derive(Debug, Clone, PartialEq)]
pub enum Smoothness {
    /// Every `fᵢ` is `S`-Lipschitz.
    Uniform(ConvexBody),
    /// `fᵢ` is `Sᵢ`-Lipschitz.
    ClassWise(Vec<ConvexBody>),
    /// `fᵢ − fⱼ` is `S_{i−j}`-Lipschitz. Pairs not involving the top class
    /// are accepted but never consulted.
    ClassDiff(BTreeMap<(usize, usize), ConvexBody>),
}

impl Smoothness {
    pub fn mode(&self) -> Mode {
        match self {
            Smoothness::Uniform(_) => Mode::Uniform,
            Smoothness::ClassWise(_) => Mode::ClassWise,
            Smoothness::ClassDiff(_) => Mode::ClassDiff,
        }
    }

    fn bodies(&self) -> Vec<&ConvexBody> {
        match self {
            Smoothness::Uniform(s) => alloc::vec![s],
            Smoothness::ClassWise(v) => v.iter().collect(),
            Smoothness::ClassDiff(m) => m.values().collect(),
        }
    }
}

/// Granularity of the smoothness data a certificate is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Uniform,
    ClassWise,
    ClassDiff,
}

impl core::fmt::Display for Mode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Mode::Uniform => "U",
            Mode::ClassWise => "CW",
            Mode::ClassDiff => "CD",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Continuity {
    Lipschitz,
    S,
}

/// Logits of a classifier at an input together with its smoothness data.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierAtPoint {
    logits: Vec<f64>,
    dim: usize,
    smoothness: Smoothness,
}

impl ClassifierAtPoint {
    pub fn new(logits: Vec<f64>, smoothness: Smoothness) -> Result<ClassifierAtPoint> {
        let k = logits.len();
        if k < 2 {
            return Err(Error::TooFewClasses(k));
        }
        if !logits.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("logits"));
        }
        let bodies = smoothness.bodies();
        let dim = bodies.first().map(|b| b.dim()).ok_or(Error::EmptyPointSet)?;
        for b in &bodies {
            if b.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: b.dim(),
                });
            }
        }
        match &smoothness {
            Smoothness::ClassWise(v) if v.len() != k => {
                return Err(Error::InvalidParameter(format!(
                    "{} class-wise bodies for {k} classes",
                    v.len()
                )));
            }
            Smoothness::ClassDiff(m) => {
                for &(i, j) in m.keys() {
                    if i >= k || j >= k || i == j {
                        return Err(Error::InvalidParameter(format!(
                            "class-difference pair ({i}, {j}) is invalid for {k} classes"
                        )));
                    }
                }
            }
            _ => {}
        }
        Ok(ClassifierAtPoint {
            logits,
            dim,
            smoothness,
        })
    }

    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    pub fn classes(&self) -> usize {
        self.logits.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn smoothness(&self) -> &Smoothness {
        &self.smoothness
    }

    pub fn mode(&self) -> Mode {
        self.smoothness.mode()
    }

    pub fn gaps(&self) -> Gaps {
        top_two(&self.logits)
    }

    /// The same classifier with every gradient set replaced by the `ℓq`
    /// ball (`q` dual to `norm`) of radius `sup_{s∈S} ‖s‖_q`, i.e. the
    /// `ℓp`-Lipschitz view of the data.
    pub fn to_lipschitz(&self, norm: Norm) -> Result<ClassifierAtPoint> {
        let q = norm.dual();
        let ball = |s: &ConvexBody| -> Result<ConvexBody> {
            Ok(BallShape::Lp(q).ball(gradient_norm_bound(s, q)?, self.dim))
        };
        let smoothness = match &self.smoothness {
            Smoothness::Uniform(s) => Smoothness::Uniform(ball(s)?),
            Smoothness::ClassWise(v) => {
                Smoothness::ClassWise(v.iter().map(ball).collect::<Result<_>>()?)
            }
            Smoothness::ClassDiff(m) => Smoothness::ClassDiff(
                m.iter()
                    .map(|(k, s)| Ok((*k, ball(s)?)))
                    .collect::<Result<_>>()?,
            ),
        };
        ClassifierAtPoint::new(self.logits.clone(), smoothness)
    }
}

/// Top class, runner-up and the gaps `r_i = f_top − f_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gaps {
    pub top: usize,
    pub runner_up: usize,
    pub gaps: Vec<f64>,
}

impl Gaps {
    /// `r_{c_B}`, the smallest gap to a competing class.
    pub fn margin(&self) -> f64 {
        self.gaps[self.runner_up]
    }
}

/// Top class and runner-up with ties broken toward the lower index. Gaps at
/// or below the zero-gap tolerance are reported as exactly zero.
pub fn gaps(logits: &[f64]) -> Result<Gaps> {
    if logits.len() < 2 {
        return Err(Error::TooFewClasses(logits.len()));
    }
    if !logits.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("logits"));
    }
    Ok(top_two(logits))
}

fn top_two(logits: &[f64]) -> Gaps {
    let argmax = |skip: Option<usize>| {
        let mut best: Option<usize> = None;
        for (i, v) in logits.iter().enumerate() {
            if Some(i) == skip {
                continue;
            }
            if best.is_none_or(|b| *v > logits[b]) {
                best = Some(i);
            }
        }
        best.unwrap_or(0)
    };
    let top = argmax(None);
    let runner_up = argmax(Some(top));
    let gaps = logits
        .iter()
        .map(|v| {
            let g = logits[top] - v;
            if g <= tol::ZERO_GAP {
                0.0
            } else {
                g
            }
        })
        .collect();
    Gaps {
        top,
        runner_up,
        gaps,
    }
}

/// A certified perturbation set around the input.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub region: Region,
    /// The governing gap is zero and the region is exactly `{0}`.
    pub trivial: bool,
    pub mode: Mode,
    pub continuity: Continuity,
}

impl Certificate {
    fn new(region: Region, margin: f64, mode: Mode, continuity: Continuity) -> Result<Certificate> {
        let trivial = margin <= tol::ZERO_GAP && region.is_origin_only()?;
        Ok(Certificate {
            region,
            trivial,
            mode,
            continuity,
        })
    }

    pub fn contains(&self, delta: &[f64]) -> bool {
        self.region.contains(delta)
    }

    /// Radius when the certificate is a norm ball.
    pub fn radius(&self) -> Option<f64> {
        match &self.region {
            Region::Ball(b) => Some(b.radius()),
            Region::Whole { .. } => Some(f64::INFINITY),
            _ => None,
        }
    }

    pub fn is_whole_space(&self) -> bool {
        matches!(self.region, Region::Whole { .. })
    }
}

fn centered_ball(s: &ConvexBody, what: &str) -> Result<(BallShape, f64)> {
    s.as_centered_ball().ok_or_else(|| {
        Error::ModeMismatch(format!("{what} must be an origin-centred norm ball or ellipsoid"))
    })
}

fn common_shape(balls: &[(BallShape, f64)]) -> Result<BallShape> {
    let first = balls[0].0.clone();
    if balls.iter().any(|(s, _)| !s.same_as(&first)) {
        return Err(Error::ModeMismatch("balls of different shapes".into()));
    }
    Ok(first)
}

fn ratio(gap: f64, lipschitz: f64) -> f64 {
    if lipschitz > 0.0 {
        gap / lipschitz
    } else {
        f64::INFINITY
    }
}

/// Lipschitz certificate: `r_{c_B}/(2L)` (uniform) or
/// `min_{i≠c_A} r_i/(L_i + L_{c_A})` (class-wise), as a ball of the norm dual
/// to the gradient ball. Class-wise balls are accepted in uniform mode with
/// `L = max_i L_i`.
pub fn lipschitz_certificate(clf: &ClassifierAtPoint, mode: Mode) -> Result<Certificate> {
    let g = clf.gaps();
    let d = clf.dim();
    let (shape, radius) = match (mode, clf.smoothness()) {
        (Mode::Uniform, Smoothness::Uniform(s)) => {
            let (shape, l) = centered_ball(s, "uniform gradient set")?;
            (shape, ratio(g.margin(), 2.0 * l))
        }
        (Mode::Uniform, Smoothness::ClassWise(v)) => {
            let balls = v.iter().map(|s| centered_ball(s, "class gradient set")).collect::<Result<Vec<_>>>()?;
            let shape = common_shape(&balls)?;
            let l = balls.iter().map(|b| b.1).fold(0.0, f64::max);
            (shape, ratio(g.margin(), 2.0 * l))
        }
        (Mode::ClassWise, Smoothness::ClassWise(v)) => {
            let balls = v.iter().map(|s| centered_ball(s, "class gradient set")).collect::<Result<Vec<_>>>()?;
            let shape = common_shape(&balls)?;
            let radius = (0..clf.classes())
                .filter(|&i| i != g.top)
                .map(|i| ratio(g.gaps[i], balls[i].1 + balls[g.top].1))
                .fold(f64::INFINITY, f64::min);
            (shape, radius)
        }
        (m, s) => {
            return Err(Error::ModeMismatch(format!(
                "Lipschitz {m} certificate from {} smoothness data",
                s.mode()
            )))
        }
    };
    let region = Region::ball(shape.dual()?, radius, d)?;
    Certificate::new(region, g.margin(), mode, Continuity::Lipschitz)
}

/// `sup_{s∈S} ‖s‖_q` over a finite gradient cloud.
pub fn lipschitz_constant_from_gradients(points: &[Vector], q: Norm) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    Ok(points.iter().map(|p| p.norm(q)).fold(0.0, f64::max))
}

/// An upper bound on `sup_{s∈S} ‖s‖_q`, exact for point sets, polytopes,
/// centred `ℓq` balls and ellipsoids with `q ∈ {1, 2, ∞}`.
pub fn gradient_norm_bound(s: &ConvexBody, q: Norm) -> Result<f64> {
    if let Some(points) = s.expand_points()? {
        return lipschitz_constant_from_gradients(&points, q);
    }
    let d = s.dim();
    match s {
        ConvexBody::LpBall {
            norm,
            radius,
            center,
        } => {
            // sup over the unit ℓp ball of ‖x‖_q.
            let (p, qq) = (norm.p(), q.p());
            let expo = if qq < p { 1.0 / qq - 1.0 / p } else { 0.0 };
            Ok(center.norm(q) + radius * math::powf(d as f64, expo))
        }
        ConvexBody::Ellipsoid { sigma, radius } => Ok(radius * ellipsoid_norm_bound(sigma, q)?),
        ConvexBody::Combination(terms) => {
            let mut total = 0.0;
            for t in terms {
                total += t.coeff * gradient_norm_bound(&t.body, q)?;
            }
            Ok(total)
        }
        ConvexBody::Points(_) => unreachable!("point sets always expand"),
    }
}

/// `sup {‖c‖_q : cᵀΣ⁻¹c <= 1} = sup_{‖u‖_p <= 1} sqrt(uᵀΣu)`.
fn ellipsoid_norm_bound(sigma: &Matrix, q: Norm) -> Result<f64> {
    let d = sigma.dim();
    match q {
        Norm::LInf => Ok((0..d).map(|i| math::sqrt(sigma[(i, i)])).fold(0.0, f64::max)),
        Norm::L1 => {
            if d >= usize::BITS as usize || (1usize << d) > tol::MAX_EXPANSION {
                return Err(Error::ExpansionTooLarge(tol::MAX_EXPANSION));
            }
            Ok((0..1usize << d)
                .map(|mask| {
                    let u: Vec<f64> = (0..d)
                        .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
                        .collect();
                    math::sqrt(sigma.quad_form(&u))
                })
                .fold(0.0, f64::max))
        }
        Norm::L2 => Ok(math::sqrt(largest_eigenvalue(sigma))),
        Norm::Lp(_) => Err(Error::InvalidParameter(format!(
            "no ellipsoid norm bound for {q}"
        ))),
    }
}

/// Power iteration on a symmetric positive definite matrix.
fn largest_eigenvalue(m: &Matrix) -> f64 {
    let d = m.dim();
    let mut v = Vector::new(alloc::vec![1.0; d]);
    let mut lambda = 0.0;
    for _ in 0..1000 {
        let w = Vector::new(m.mul_vec(&v));
        let n = w.norm(Norm::L2);
        if n == 0.0 {
            return 0.0;
        }
        let next = v.dot(&w) / v.dot(&v);
        v = w.scaled(1.0 / n);
        if (next - lambda).abs() <= 1e-15 * next.abs() {
            return next;
        }
        lambda = next;
    }
    lambda
}

/// S-certificate in the given mode:
///
/// * uniform: `(S ⊕ −S)^{r_{c_B}}`
/// * class-wise: `∩_{i≠c_A} (S_i ⊕ −S_{c_A})^{r_i}`
/// * class-difference: `∩_{i≠c_A} (S_{i−c_A})^{r_i}`
pub fn s_certificate(clf: &ClassifierAtPoint, mode: Mode) -> Result<Certificate> {
    let g = clf.gaps();
    let d = clf.dim();
    let region = match (mode, clf.smoothness()) {
        (Mode::Uniform, Smoothness::Uniform(s)) => {
            Region::polar(&s.minkowski_sum(&s.negate())?, g.margin())?
        }
        (Mode::ClassWise, Smoothness::ClassWise(v)) => {
            let top = v[g.top].negate();
            let parts = (0..clf.classes())
                .filter(|&i| i != g.top)
                .map(|i| Region::polar(&v[i].minkowski_sum(&top)?, g.gaps[i]))
                .collect::<Result<Vec<_>>>()?;
            Region::intersection(d, parts)?
        }
        (Mode::ClassDiff, Smoothness::ClassDiff(m)) => {
            let parts = (0..clf.classes())
                .filter(|&i| i != g.top)
                .map(|i| {
                    let s = m.get(&(i, g.top)).ok_or(Error::MissingPair(i, g.top))?;
                    Region::polar(s, g.gaps[i])
                })
                .collect::<Result<Vec<_>>>()?;
            Region::intersection(d, parts)?
        }
        (m, s) => {
            return Err(Error::ModeMismatch(format!(
                "{m} certificate from {} smoothness data",
                s.mode()
            )))
        }
    };
    Certificate::new(region, g.margin(), mode, Continuity::S)
}

/// Lipschitz constant of a Gaussian-smoothed classifier with noise level
/// `σ` (for the `ℓ2` norm): `sqrt(2/(πσ²))`.
pub fn smoothing_sigma_to_lipschitz(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "noise level {sigma} must be positive and finite"
        )));
    }
    Ok(math::sqrt(2.0 / (core::f64::consts::PI * sigma * sigma)))
}

/// Two linear logits, both with gradients in `S`, that certify with gap `r`
/// at `x` yet swap their order at `x + δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// Gradient of the top class (`argmin_{c∈S} c·δ`).
    pub top_gradient: Vector,
    /// Gradient of the runner-up (`argmax_{c∈S} c·δ`).
    pub runner_up_gradient: Vector,
    pub x: Vector,
    pub gap: f64,
}

impl Witness {
    /// `(f_top(y), f_runner_up(y))`.
    pub fn logits_at(&self, y: &[f64]) -> [f64; 2] {
        let shift: Vec<f64> = y.iter().zip(self.x.iter()).map(|(a, b)| a - b).collect();
        [
            self.top_gradient.dot(&shift) + self.gap,
            self.runner_up_gradient.dot(&shift),
        ]
    }
}

/// The classifier showing that the uniform S-certificate `(S⊕−S)^r` cannot be
/// enlarged in the direction of `δ`.
pub fn adversarial_witness(s: &ConvexBody, r: f64, x: &Vector, delta: &Vector) -> Result<Witness> {
    let d = s.dim();
    for v in [x, delta] {
        if v.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.dim(),
            });
        }
        if !v.is_finite() {
            return Err(Error::NonFinite("witness input"));
        }
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("gap {r} must be positive")));
    }
    let spread = s.support(delta)? + s.support(&delta.neg())?;
    if spread <= r + tol::GEOMETRY {
        return Err(Error::InsideCertificate);
    }
    Ok(Witness {
        top_gradient: s.support_point(&delta.neg()),
        runner_up_gradient: s.support_point(delta),
        x: x.clone(),
        gap: r,
    })
}
