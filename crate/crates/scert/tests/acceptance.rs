//! Acceptance suite: every criterion at full size and tolerance, timed
//! against its limit, one PASS/FAIL line each.
//!
//! `cargo test -p scert --release --test acceptance` runs them all; pass
//! criterion numbers as arguments (`-- 6 10`) to run a subset.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scert::fixtures;
use scert_core::certificates::{
    adversarial_witness, lipschitz_certificate, lipschitz_constant_from_gradients, s_certificate,
    ClassifierAtPoint, Mode, Smoothness,
};
use scert_core::ensemble::{
    best_radius_gain, damning_alpha, gap_bound_witness, gap_gain_bound, improvement_conditions,
    radius_improvement_bound, radius_profile, Damning, EnsembleSpec, LogitEnsemble,
};
use scert_core::geometry::{
    hull_prune, polar_hrep, region_subset, subset, BallShape, ConvexBody, Halfspace, HalfspaceRegion,
    Region,
};
use scert_core::simulate::{draw_classifier, summarize, ExperimentConfig};
use scert_core::{Matrix, Norm, Vector};

#[derive(Debug)]
struct Failure(String);

impl<E: Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn fail<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(msg.into()))
}

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

const CRITERIA: [Criterion; 11] = [
    Criterion { id: 1, name: "golden fixtures", limit: Duration::from_secs(1), run: golden },
    Criterion { id: 2, name: "gap-gain bound", limit: Duration::from_secs(10), run: gap_gain },
    Criterion { id: 3, name: "zero robustness", limit: Duration::from_secs(1), run: zero_robustness },
    Criterion { id: 4, name: "same-top exclusions", limit: Duration::from_secs(30), run: same_top },
    Criterion { id: 5, name: "shared-body sandwich", limit: Duration::from_secs(5), run: sandwich },
    Criterion { id: 6, name: "simulation statistics", limit: Duration::from_secs(60), run: statistics },
    Criterion { id: 7, name: "geometry properties", limit: Duration::from_secs(10), run: geometry },
    Criterion { id: 8, name: "subsumption and lattice", limit: Duration::from_secs(30), run: lattice },
    Criterion { id: 9, name: "tightness witness", limit: Duration::from_secs(5), run: tightness },
    Criterion { id: 10, name: "radius-improvement bound", limit: Duration::from_secs(60), run: radius_bound },
    Criterion { id: 11, name: "improvement conditions", limit: Duration::from_secs(30), run: conditions },
];

fn main() -> ExitCode {
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for c in CRITERIA.iter().filter(|c| only.is_empty() || only.contains(&c.id)) {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= c.limit => (true, d),
            Ok(d) => (false, format!("{d}; over the time limit")),
            Err(Failure(d)) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {} ({detail}; {:.2} s of {} s)",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

// ---------------------------------------------------------------- helpers

fn stream(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5CE7_0000 + tag)
}

fn simplex(k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    draw_classifier(k, rng)
}

fn argmax(f: &[f64]) -> usize {
    (0..f.len()).fold(0, |b, i| if f[i] > f[b] { i } else { b })
}

/// `f` with its largest entry moved to `top`.
fn with_top(mut f: Vec<f64>, top: usize) -> Vec<f64> {
    let m = argmax(&f);
    f.swap(m, top);
    f
}

/// Simplex draw whose top class is 0 and runner-up is 1.
fn ordered_top_two(k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v = simplex(k, rng);
    v.sort_by(|a, b| b.total_cmp(a));
    v[2..].shuffle(rng);
    v
}

fn point(rng: &mut ChaCha8Rng, scale: f64) -> Vector {
    Vector::from([rng.random_range(-scale..scale), rng.random_range(-scale..scale)])
}

fn cloud(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vector> {
    (0..n).map(|_| point(rng, 1.0)).collect()
}

fn cloud_body(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> ConvexBody {
    let n = rng.random_range(lo..=hi);
    ConvexBody::points(cloud(rng, n)).expect("finite cloud")
}

fn spd(rng: &mut ChaCha8Rng) -> Matrix {
    let a = rng.random_range(0.3..3.0);
    let b = rng.random_range(0.3..3.0);
    let c = rng.random_range(-0.8..0.8) * f64::sqrt(a * b);
    Matrix::from_rows(&[vec![a, c], vec![c, b]]).expect("2x2")
}

fn random_norm(rng: &mut ChaCha8Rng) -> Norm {
    match rng.random_range(0..4) {
        0 => Norm::L1,
        1 => Norm::L2,
        2 => Norm::LInf,
        _ => Norm::from_p(rng.random_range(1.2..6.0)).expect("p >= 1"),
    }
}

fn random_shape(rng: &mut ChaCha8Rng) -> BallShape {
    if rng.random_bool(0.25) {
        BallShape::Quadratic(spd(rng))
    } else {
        BallShape::Lp(random_norm(rng))
    }
}

fn random_body(rng: &mut ChaCha8Rng) -> ConvexBody {
    match rng.random_range(0..4) {
        0 => cloud_body(rng, 1, 8),
        1 => {
            let p = random_norm(rng).p();
            let c = point(rng, 1.0);
            ConvexBody::lp_ball(p, rng.random_range(0.05..2.0), c).expect("ball")
        }
        2 => {
            let m = spd(rng);
            ConvexBody::ellipsoid(m, rng.random_range(0.05..2.0)).expect("ellipsoid")
        }
        _ => {
            let a = cloud_body(rng, 2, 5);
            let b = random_shape(rng).ball(rng.random_range(0.05..1.0), 2);
            a.minkowski_sum(&b.scale(rng.random_range(0.1..2.0)).expect("scale"))
                .expect("sum")
        }
    }
}

fn direction(rng: &mut ChaCha8Rng) -> Vector {
    let t = rng.random_range(0.0..std::f64::consts::TAU);
    Vector::from([t.cos(), t.sin()])
}

/// Exact H-representation of the planar hull of `points`, or `None` when the
/// hull is not full-dimensional.
fn hull_region(points: &[Vector]) -> Option<HalfspaceRegion> {
    let h = hull_prune(points).ok()?;
    if h.len() < 3 {
        return None;
    }
    let rows = (0..h.len())
        .map(|i| {
            let (p, q) = (h[i].as_slice(), h[(i + 1) % h.len()].as_slice());
            let n = Vector::from([q[1] - p[1], p[0] - q[0]]);
            let off = n.dot(p);
            Halfspace::new(n, off)
        })
        .collect();
    HalfspaceRegion::new(2, rows).ok()
}

fn differences(a: &[Vector], b: &[Vector]) -> Vec<Vector> {
    a.iter().flat_map(|x| b.iter().map(move |y| x.sub(y))).collect()
}

/// `m` random convex combinations of `points`.
fn inner_points(rng: &mut ChaCha8Rng, points: &[Vector], m: usize) -> Vec<Vector> {
    (0..m)
        .map(|_| {
            let w = simplex(points.len(), rng);
            points
                .iter()
                .zip(&w)
                .fold(Vector::zeros(2), |acc, (p, wi)| acc.add(&p.scaled(*wi)))
        })
        .collect()
}

fn brute_support(points: &[Vector], d: &[f64]) -> f64 {
    points.iter().map(|p| p.dot(d)).fold(f64::NEG_INFINITY, f64::max)
}

fn must_contain(a: &Region, b: &Region, what: &str) -> Result<(), Failure> {
    let c = subset(a, b)?;
    if c.holds && c.exact {
        Ok(())
    } else {
        fail(format!("{what}: holds={} exact={}", c.holds, c.exact))
    }
}

// ------------------------------------------------------------- criteria

fn golden() -> Outcome {
    let out = fixtures::run_bundled()?;
    let bad: Vec<String> = out
        .iter()
        .filter(|o| !o.passed)
        .map(|o| format!("{} {}: {}", o.fixture, o.check, o.detail))
        .collect();
    if !bad.is_empty() {
        return fail(bad.join("; "));
    }
    // Interior weights of the two-ellipsoid pair, on a fine grid.
    let p = scert::parse_problem(fixtures::bundled("appendix-c4").expect("bundled"))?;
    let spec = p.ensemble(Mode::Uniform, None)?;
    let (radii, profile) = radius_profile(&spec)?;
    if (radii[0] - 1.0).abs() > 1e-9 || (radii[1] - 1.875).abs() > 1e-9 {
        return fail(format!("member radii {radii:?}"));
    }
    for s in 1..1000 {
        let a = s as f64 / 1000.0;
        let rg = profile(&[a, 1.0 - a]);
        if !(rg > 1.0 && rg < 1.875) {
            return fail(format!("ensemble radius {rg} at weight {a}"));
        }
        if s % 100 == 0 {
            let cert = s_certificate(&spec.with_weights(&[a, 1.0 - a])?.ensemble_classifier()?, Mode::Uniform)?;
            match cert.radius() {
                Some(r) if (r - rg).abs() <= 1e-9 => {}
                other => return fail(format!("certificate radius {other:?} vs profile {rg}")),
            }
        }
    }
    Ok(format!("{} fixture checks, 999 interior weights", out.len()))
}

fn gap_gain() -> Outcome {
    for r in [0.0, 0.2, 0.5, 0.9] {
        for k in [3, 4, 10] {
            let w = gap_bound_witness(r, k)?;
            let b = gap_gain_bound(r, k)?;
            if (w.margin() - b).abs() > 1e-12 || (w.best_member_margin() - r).abs() > 1e-12 {
                return fail(format!("witness ({r}, {k}) margin {} vs bound {b}", w.margin()));
            }
        }
    }
    let mut rng = stream(2);
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    for _ in 0..100_000 {
        let n = rng.random_range(1..=4);
        let members: Vec<Vec<f64>> = (0..n).map(|_| simplex(4, &mut rng)).collect();
        let w = simplex(n, &mut rng);
        let e = LogitEnsemble::new(members, &w)?;
        let excess = e.margin() - gap_gain_bound(e.best_member_margin(), 4)?;
        worst = worst.max(excess);
        if excess > 1e-12 {
            violations += 1;
        }
    }
    if violations > 0 {
        return fail(format!("{violations} bound violations, worst excess {worst:e}"));
    }
    Ok(format!("12 witnesses exact, 100000 ensembles, largest margin minus bound {worst:.3e}"))
}

fn zero_robustness() -> Outcome {
    let mut rng = stream(3);
    let mut everywhere = 0;
    let mut worst: f64 = 0.0;
    for case in 0..1000 {
        let k = rng.random_range(2..=5);
        let (f1, f2) = loop {
            let (a, b) = (simplex(k, &mut rng), simplex(k, &mut rng));
            if argmax(&a) != argmax(&b) {
                break (a, b);
            }
        };
        let alpha = match damning_alpha(&f1, &f2)? {
            Damning::Alpha(a) => a,
            Damning::AllAlphaTrivial => {
                everywhere += 1;
                0.5
            }
        };
        let m1 = ClassifierAtPoint::new(f1, Smoothness::Uniform(cloud_body(&mut rng, 2, 6)))?;
        let m2 = ClassifierAtPoint::new(f2, Smoothness::Uniform(cloud_body(&mut rng, 2, 6)))?;
        let spec = EnsembleSpec::new(vec![m1, m2], &[alpha, 1.0 - alpha])?;
        let margin = spec.logit_view().margin();
        worst = worst.max(margin.abs());
        if margin.abs() > 1e-9 {
            return fail(format!("case {case}: margin {margin:e} at weight {alpha}"));
        }
        let cert = s_certificate(&spec.ensemble_classifier()?, Mode::Uniform)?;
        if !cert.trivial {
            return fail(format!("case {case}: certificate is not trivial"));
        }
    }
    Ok(format!("1000 pairs trivial, {everywhere} tied for every weight, largest |margin| {worst:.1e}"))
}

fn cd_member(rng: &mut ChaCha8Rng, k: usize) -> Result<ClassifierAtPoint, Failure> {
    let logits = with_top(simplex(k, rng), 0);
    let bodies: BTreeMap<(usize, usize), ConvexBody> =
        (1..k).map(|i| ((i, 0), cloud_body(rng, 2, 5))).collect();
    Ok(ClassifierAtPoint::new(logits, Smoothness::ClassDiff(bodies))?)
}

fn same_top() -> Outcome {
    let mut rng = stream(4);
    for case in 0..100_000 {
        let n = rng.random_range(2..=4);
        let members: Vec<Vec<f64>> = (0..n).map(|_| with_top(simplex(4, &mut rng), 0)).collect();
        let w = simplex(n, &mut rng);
        let e = LogitEnsemble::new(members, &w)?;
        if e.margin() < e.worst_member_margin() - 1e-12 {
            return fail(format!(
                "case {case}: margin {} below worst member {}",
                e.margin(),
                e.worst_member_margin()
            ));
        }
    }
    for case in 0..1000 {
        let m1 = cd_member(&mut rng, 3)?;
        let m2 = cd_member(&mut rng, 3)?;
        let q1 = s_certificate(&m1, Mode::ClassDiff)?.region;
        let q2 = s_certificate(&m2, Mode::ClassDiff)?.region;
        let spec = EnsembleSpec::new(vec![m1, m2], &simplex(2, &mut rng))?;
        let qg = s_certificate(&spec.ensemble_classifier()?, Mode::ClassDiff)?.region;
        let both = Region::intersection(2, vec![q1, q2])?;
        must_contain(&both, &qg, &format!("case {case}: intersection in ensemble"))?;
    }
    Ok("100000 margin checks, 1000 exact containments".into())
}

fn sandwich() -> Outcome {
    let mut rng = stream(5);
    let mut worst: f64 = 0.0;
    for case in 0..100_000 {
        let k = rng.random_range(2..=5);
        let eps = rng.random_range(0.1..2.0);
        let body = random_shape(&mut rng).ball(eps, 2);
        let f1 = ordered_top_two(k, &mut rng);
        let f2 = ordered_top_two(k, &mut rng);
        let a = rng.random_range(1e-6..1.0 - 1e-6);
        let m1 = ClassifierAtPoint::new(f1, Smoothness::Uniform(body.clone()))?;
        let m2 = ClassifierAtPoint::new(f2, Smoothness::Uniform(body))?;
        let spec = EnsembleSpec::new(vec![m1, m2], &[a, 1.0 - a])?;
        let (radii, profile) = radius_profile(&spec)?;
        let rg = profile(&[a, 1.0 - a]);
        // With one shared body every radius is a margin over 2ε.
        let direct = spec.logit_view().margin() / (2.0 * eps);
        worst = worst.max((rg - direct).abs());
        let (lo, hi) = (radii[0].min(radii[1]), radii[0].max(radii[1]));
        if rg < lo - 1e-12 || rg > hi + 1e-12 || (rg - direct).abs() > 1e-12 {
            return fail(format!("case {case}: {rg} outside [{lo}, {hi}] (direct {direct})"));
        }
    }
    Ok(format!("100000 ensembles, largest profile/direct difference {worst:.1e}"))
}

fn statistics() -> Outcome {
    let config = ExperimentConfig::default();
    let records = scert::sim::run_parallel(&config)?;
    let s = summarize(&records)?;
    let above = s.optimized_above_best.unwrap_or(0.0);
    let detail = format!(
        "{} draws, loss fraction {:.4}, bound violations {}, same-top losses {}, optimized above best {:.4}",
        s.draws, s.loss_fraction, s.bound_violations, s.same_top_losses, above
    );
    if !(0.382..=0.482).contains(&s.loss_fraction)
        || s.bound_violations > 0
        || s.same_top_losses > 0
        || above <= 0.0
    {
        return fail(detail);
    }
    Ok(detail)
}

fn geometry() -> Outcome {
    let mut rng = stream(7);
    const TOL: f64 = 1e-9;

    // Polar monotonicity on random planar point sets.
    let mut done = [0usize; 4];
    while done.iter().any(|&d| d < 1000) {
        let n = rng.random_range(3..=8);
        let big = cloud(&mut rng, n);
        let m = rng.random_range(3..=6);
        let small = inner_points(&mut rng, &big, m);
        let r = rng.random_range(0.1..2.0);
        let (s_small, s_big) = (ConvexBody::points(small.clone())?, ConvexBody::points(big.clone())?);

        if done[0] < 1000 {
            if let (Some(a), Some(b)) =
                (hull_region(&differences(&small, &small)), hull_region(&differences(&big, &big)))
            {
                if !region_subset(&a, &b)? {
                    return fail("difference body of a subset is not contained");
                }
                done[0] += 1;
            }
        }
        if done[1] < 1000 {
            if !region_subset(&polar_hrep(&s_big, r)?, &polar_hrep(&s_small, r)?)? {
                return fail("polar of the larger set is not inside the polar of the smaller");
            }
            done[1] += 1;
        }
        if done[2] < 1000 {
            let r2 = r + rng.random_range(0.0..1.0);
            if !region_subset(&polar_hrep(&s_big, r)?, &polar_hrep(&s_big, r2)?)? {
                return fail("polar does not grow with the level");
            }
            done[2] += 1;
        }
        if done[3] < 1000 {
            let n4 = rng.random_range(3..=8);
            let big2 = cloud(&mut rng, n4);
            let small2 = inner_points(&mut rng, &big2, 3);
            let outer = s_big.minkowski_sum(&ConvexBody::points(big2)?.negate())?;
            let inner = s_small.minkowski_sum(&ConvexBody::points(small2)?.negate())?;
            if !region_subset(&polar_hrep(&outer, r)?, &polar_hrep(&inner, r)?)? {
                return fail("polar of the larger difference body is not inside the smaller one");
            }
            done[3] += 1;
        }
    }

    for _ in 0..1000 {
        // Hull pruning keeps the support function and turns counter-clockwise.
        let n = rng.random_range(3..=12);
        let pts = cloud(&mut rng, n);
        let hull = hull_prune(&pts)?;
        for i in 0..hull.len() {
            let (a, b, c) = (&hull[i], &hull[(i + 1) % hull.len()], &hull[(i + 2) % hull.len()]);
            let (u, v) = (b.sub(a), c.sub(b));
            let turn = u.as_slice()[0] * v.as_slice()[1] - u.as_slice()[1] * v.as_slice()[0];
            if hull.len() >= 3 && turn <= 0.0 {
                return fail("hull is not strictly counter-clockwise");
            }
        }
        let body = ConvexBody::points(pts.clone())?;
        for _ in 0..8 {
            let d = point(&mut rng, 3.0);
            let want = brute_support(&pts, d.as_slice());
            if (brute_support(&hull, d.as_slice()) - want).abs() > 1e-12 || (body.support(d.as_slice())? - want).abs() > TOL {
                return fail("hull changes the support function");
            }
        }

        // Negation and additivity over mixed bodies.
        let a = random_body(&mut rng);
        let b = random_body(&mut rng);
        let sum = a.minkowski_sum(&b)?;
        let neg = a.negate();
        for _ in 0..8 {
            let d = point(&mut rng, 3.0);
            let nd = d.neg();
            if (neg.support(d.as_slice())? - a.support(nd.as_slice())?).abs() > TOL {
                return fail("negation identity fails");
            }
            let split = a.support(d.as_slice())? + b.support(d.as_slice())?;
            if (sum.support(d.as_slice())? - split).abs() > TOL {
                return fail("support is not additive under the Minkowski sum");
            }
        }

        // Symmetric sets double under S ⊕ −S.
        let sym = match rng.random_range(0..3) {
            0 => {
                let h = rng.random_range(1..=5);
                let half = cloud(&mut rng, h);
                let mut all: Vec<Vector> = half.iter().map(|p| p.neg()).collect();
                all.extend(half);
                ConvexBody::points(all)?
            }
            1 => random_shape(&mut rng).ball(rng.random_range(0.05..2.0), 2),
            _ => ConvexBody::ellipsoid(spd(&mut rng), rng.random_range(0.05..2.0))?,
        };
        let doubled = sym.minkowski_sum(&sym.negate())?;
        for _ in 0..8 {
            let d = point(&mut rng, 3.0);
            if (doubled.support(d.as_slice())? - 2.0 * sym.support(d.as_slice())?).abs() > TOL {
                return fail("symmetric set does not double");
            }
        }

        // Balls of one p-norm add centres and radii.
        let norm = random_norm(&mut rng);
        let (c1, c2) = (point(&mut rng, 2.0), point(&mut rng, 2.0));
        let (e1, e2) = (rng.random_range(0.0..2.0), rng.random_range(0.0..2.0));
        let s = ConvexBody::lp_ball(norm.p(), e1, c1.clone())?
            .minkowski_sum(&ConvexBody::lp_ball(norm.p(), e2, c2.clone())?)?;
        match &s {
            ConvexBody::LpBall { norm: n, radius, center }
                if n.p() == norm.p()
                    && (radius - (e1 + e2)).abs() <= TOL
                    && center.max_abs_diff(&c1.add(&c2)) <= TOL => {}
            other => return fail(format!("p-ball sum is not a p-ball: {other:?}")),
        }
        for _ in 0..8 {
            let d = point(&mut rng, 3.0);
            let want = c1.add(&c2).dot(d.as_slice()) + (e1 + e2) * norm.dual().eval(d.as_slice());
            if (s.support(d.as_slice())? - want).abs() > TOL {
                return fail("p-ball sum support differs from the closed form");
            }
        }
    }
    Ok("4 x 1000 polar monotonicity cases, 1000 cases of each support identity".into())
}

fn lattice() -> Outcome {
    let mut rng = stream(8);
    const SITES: usize = 30;
    const K: usize = 3;
    for case in 0..1000 {
        // Gradients of every class at every site; all smoothness data is
        // derived from them, so the three modes describe one classifier.
        let grads: Vec<Vec<Vector>> = (0..SITES).map(|_| cloud(&mut rng, K)).collect();
        let per_class: Vec<Vec<Vector>> =
            (0..K).map(|i| grads.iter().map(|g| g[i].clone()).collect()).collect();
        let all: Vec<Vector> = per_class.concat();
        let mut pairs = BTreeMap::new();
        for i in 0..K {
            for j in (0..K).filter(|&j| j != i) {
                let d: Vec<Vector> = grads.iter().map(|g| g[i].sub(&g[j])).collect();
                pairs.insert((i, j), ConvexBody::points(d)?);
            }
        }
        let logits = simplex(K, &mut rng);
        let class_bodies = per_class.iter().map(|p| ConvexBody::points(p.clone())).collect::<Result<Vec<_>, _>>()?;
        let u = ClassifierAtPoint::new(logits.clone(), Smoothness::Uniform(ConvexBody::points(all.clone())?))?;
        let cw = ClassifierAtPoint::new(logits.clone(), Smoothness::ClassWise(class_bodies))?;
        let cd = ClassifierAtPoint::new(logits.clone(), Smoothness::ClassDiff(pairs))?;
        let qu = s_certificate(&u, Mode::Uniform)?.region;
        let qcw = s_certificate(&cw, Mode::ClassWise)?.region;
        let qcd = s_certificate(&cd, Mode::ClassDiff)?.region;
        must_contain(&qu, &qcw, &format!("case {case}: uniform in class-wise"))?;
        must_contain(&qcw, &qcd, &format!("case {case}: class-wise in class-difference"))?;

        let g = u.gaps();
        for norm in [Norm::L1, Norm::L2, Norm::LInf] {
            let q = norm.dual();
            let ball = |l: f64| ConvexBody::lp_ball(q.p(), l, Vector::zeros(2));
            let l = lipschitz_constant_from_gradients(&all, q)?;
            let lu = ClassifierAtPoint::new(logits.clone(), Smoothness::Uniform(ball(l)?))?;
            let cert = lipschitz_certificate(&lu, Mode::Uniform)?;
            let want = g.margin() / (2.0 * l);
            if cert.radius().is_none_or(|r| (r - want).abs() > 1e-9) {
                return fail(format!("case {case}: uniform Lipschitz radius {:?} vs {want}", cert.radius()));
            }
            must_contain(&cert.region, &qu, &format!("case {case}: l{} Lipschitz in uniform", norm.p()))?;

            let ls: Vec<f64> = per_class
                .iter()
                .map(|p| lipschitz_constant_from_gradients(p, q))
                .collect::<Result<_, _>>()?;
            let lcw = ClassifierAtPoint::new(
                logits.clone(),
                Smoothness::ClassWise(ls.iter().map(|&l| ball(l)).collect::<Result<_, _>>()?),
            )?;
            let cert = lipschitz_certificate(&lcw, Mode::ClassWise)?;
            let want = (0..K)
                .filter(|&i| i != g.top)
                .map(|i| g.gaps[i] / (ls[i] + ls[g.top]))
                .fold(f64::INFINITY, f64::min);
            if cert.radius().is_none_or(|r| (r - want).abs() > 1e-9) {
                return fail(format!("case {case}: class-wise Lipschitz radius {:?} vs {want}", cert.radius()));
            }
            must_contain(&cert.region, &qcw, &format!("case {case}: l{} Lipschitz in class-wise", norm.p()))?;
        }
    }
    Ok("1000 instances, 8 exact containments each".into())
}

fn tightness() -> Outcome {
    let mut rng = stream(9);
    let mut done = 0;
    while done < 1000 {
        let s = random_body(&mut rng);
        let u = direction(&mut rng);
        let spread = s.support(u.as_slice())? + s.support(u.neg().as_slice())?;
        if spread <= 1e-6 {
            continue;
        }
        let r = rng.random_range(0.05..2.0);
        let edge = r / spread;
        let cert = Region::polar(&s.minkowski_sum(&s.negate())?, r)?;
        if (cert.radial(u.as_slice()) - edge).abs() > 1e-9 * edge.max(1.0) {
            return fail(format!("certificate boundary {} vs {edge}", cert.radial(u.as_slice())));
        }
        let x = point(&mut rng, 5.0);
        let delta = u.scaled(1.01 * edge);
        let w = adversarial_witness(&s, r, &x, &delta)?;
        let [top, runner] = w.logits_at(x.as_slice());
        if (top - runner - r).abs() > 1e-12 {
            return fail("witness does not have the stated gap at x");
        }
        let [top, runner] = w.logits_at(x.add(&delta).as_slice());
        if runner <= top {
            return fail(format!("no flip at 1.01 x boundary: {top} vs {runner}"));
        }
        if adversarial_witness(&s, r, &x, &u.scaled(0.99 * edge)).is_ok() {
            return fail("a witness was built inside the certificate");
        }
        done += 1;
    }
    Ok("1000 flips just outside the boundary".into())
}

/// Two same-top members whose class-difference sets are balls of one shape.
fn ball_pair(
    logits: [Vec<f64>; 2],
    eps: [Vec<f64>; 2],
    shape: &BallShape,
) -> Result<EnsembleSpec, Failure> {
    let members = logits
        .into_iter()
        .zip(eps)
        .map(|(f, e)| {
            let bodies = (1..f.len()).map(|i| ((i, 0), shape.ball(e[i], 2))).collect();
            ClassifierAtPoint::new(f, Smoothness::ClassDiff(bodies))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EnsembleSpec::uniform(members)?)
}

fn radius_bound() -> Outcome {
    let mut rng = stream(10);
    let mut statement_violations = 0;
    let mut worst_slack = f64::INFINITY;
    let mut gains = 0;
    for case in 0..1000 {
        let k = rng.random_range(3..=5);
        let shape = random_shape(&mut rng);
        let logits = [with_top(simplex(k, &mut rng), 0), with_top(simplex(k, &mut rng), 0)];
        let mut eps = || (0..k).map(|_| rng.random_range(0.2..2.0)).collect::<Vec<f64>>();
        let eps = [eps(), eps()];
        let spec = ball_pair(logits, eps, &shape)?;
        let (gain, _) = best_radius_gain(&spec, 1000)?;
        let b = radius_improvement_bound(&spec)?;
        if gain > 0.0 {
            gains += 1;
        }
        worst_slack = worst_slack.min(b.proof - gain);
        if gain > b.proof + 1e-9 {
            return fail(format!("case {case}: gain {gain} above bound {}", b.proof));
        }
        if gain > b.statement + 1e-9 {
            statement_violations += 1;
        }
    }
    Ok(format!(
        "1000 instances, {gains} with a gain, smallest slack {worst_slack:.3e}, \
         {statement_violations} above the minimum-pair-radius form (logged only)"
    ))
}

struct ConditionCase {
    spec: EnsembleSpec,
    satisfied: bool,
}

/// Same-top pair with runner-ups 1 and 2 and one pair radius per member.
/// Per-class ratios `gap / ε` decide everything; instances are kept only
/// when every relevant ratio difference clears `SLACK`.
fn condition_case(rng: &mut ChaCha8Rng) -> Result<Option<ConditionCase>, Failure> {
    const SLACK: f64 = 0.05;
    let k = rng.random_range(3..=5);
    let f1 = ordered_top_two(k, rng);
    let mut f2 = ordered_top_two(k, rng);
    f2.swap(1, 2);
    if f2[1] >= f2[2] {
        return Ok(None);
    }
    let floor = [f1[1], f1[2], f2[1], f2[2]].into_iter().fold(f64::INFINITY, f64::min);
    if (3..k).any(|c| f1[c] >= floor || f2[c] >= floor) {
        return Ok(None);
    }
    let (e1, e2) = (rng.random_range(0.2..2.0), rng.random_range(0.2..2.0));
    let ratio = |f: &[f64], e: f64, i: usize| (f[0] - f[i]) / e;
    let (r1, r2) = (ratio(&f1, e1, 1), ratio(&f2, e2, 2));
    let first = ratio(&f1, e1, 2) - r2;
    let second = ratio(&f2, e2, 1) - r1;
    let separated = ratio(&f1, e1, 2) - r1 >= SLACK && ratio(&f2, e2, 1) - r2 >= SLACK;
    let satisfied = if first >= SLACK && second >= SLACK && separated {
        true
    } else if first.min(second) <= -SLACK {
        false
    } else {
        return Ok(None);
    };
    let shape = random_shape(rng);
    let spec = ball_pair([f1, f2], [vec![e1; k], vec![e2; k]], &shape)?;
    Ok(Some(ConditionCase { spec, satisfied }))
}

fn conditions() -> Outcome {
    let mut rng = stream(11);
    let (mut yes, mut no) = (0, 0);
    let (mut least_gain, mut most_gain) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut tries = 0;
    while yes < 200 || no < 200 {
        tries += 1;
        if tries > 2_000_000 {
            return fail(format!("generator stalled at {yes} satisfying, {no} violating"));
        }
        let Some(c) = condition_case(&mut rng)? else { continue };
        if (c.satisfied && yes >= 200) || (!c.satisfied && no >= 200) {
            continue;
        }
        if improvement_conditions(&c.spec)? != c.satisfied {
            return fail(format!("condition check disagrees with the ratio oracle ({})", c.satisfied));
        }
        let (gain, a) = best_radius_gain(&c.spec, 1000)?;
        if c.satisfied {
            yes += 1;
            least_gain = least_gain.min(gain);
            if gain < 1e-6 {
                return fail(format!("satisfying instance gains only {gain:e} (best weight {a})"));
            }
        } else {
            no += 1;
            most_gain = most_gain.max(gain);
            if gain > 1e-9 {
                return fail(format!("violating instance gains {gain:e} at weight {a}"));
            }
        }
    }
    Ok(format!(
        "200 satisfying (smallest gain {least_gain:.3e}), 200 violating (largest gain {most_gain:.1e})"
    ))
}
