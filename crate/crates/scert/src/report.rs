//! Plain-text reports.
//!
//! Numbers print with at most ten decimals. One-dimensional certificates
//! print as intervals such as `(-inf, 2]`; higher-dimensional ones as a
//! ball radius and/or a list of halfspaces.

use std::fmt::Write;

use scert_core::certificates::{Certificate, ClassifierAtPoint, Continuity};
use scert_core::ensemble::{Evidence, RegimeReport};
use scert_core::geometry::{BallShape, Containment, HalfspaceRegion, Region};
use scert_core::Norm;

use crate::Certified;

/// `x` with at most ten decimals, trailing zeros removed.
pub fn num(x: f64) -> String {
    if x == f64::INFINITY {
        return "inf".into();
    }
    if x == f64::NEG_INFINITY {
        return "-inf".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    let s = format!("{x:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

pub fn list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| num(*x)).collect();
    format!("[{}]", parts.join(", "))
}

/// `[a, b]`, with open ends at infinity.
pub fn interval(lo: f64, hi: f64) -> String {
    let l = if lo == f64::NEG_INFINITY { "(" } else { "[" };
    let r = if hi == f64::INFINITY { ")" } else { "]" };
    format!("{l}{}, {}{r}", num(lo), num(hi))
}

pub fn norm_name(n: Norm) -> String {
    match n {
        Norm::L1 => "l1".into(),
        Norm::L2 => "l2".into(),
        Norm::LInf => "l-inf".into(),
        Norm::Lp(p) => format!("l{}", num(p)),
    }
}

/// Halfspaces scaled to offset 1 where the offset is positive.
pub fn display_rows(h: &HalfspaceRegion) -> Vec<(Vec<f64>, f64)> {
    h.halfspaces()
        .iter()
        .map(|hs| {
            let a = hs.normal.as_slice();
            if hs.offset > 0.0 {
                (a.iter().map(|v| v / hs.offset).collect(), 1.0)
            } else {
                (a.to_vec(), hs.offset)
            }
        })
        .collect()
}

fn hrep_lines(out: &mut String, h: &HalfspaceRegion) {
    for (a, b) in display_rows(h) {
        let _ = writeln!(out, "  {} . x <= {}", list(&a), num(b));
    }
}

/// Multi-line description of a certified region.
pub fn region(r: &Region) -> String {
    let mut out = String::new();
    if r.dim() == 1 {
        if let Some((lo, hi)) = r.interval() {
            let _ = writeln!(out, "interval: {}", interval(lo, hi));
            return out;
        }
    }
    match r {
        Region::Whole { .. } => out.push_str("whole space\n"),
        Region::Ball(b) => {
            match b.shape() {
                BallShape::Lp(n) => {
                    let _ = writeln!(out, "{} ball, radius {}", norm_name(*n), num(b.radius()));
                }
                BallShape::Quadratic(m) => {
                    let rows: Vec<String> = m.rows().iter().map(|row| list(row)).collect();
                    let _ = writeln!(
                        out,
                        "quadratic ball {{x : x' M^-1 x <= R^2}}, M = [{}], radius {}",
                        rows.join(", "),
                        num(b.radius())
                    );
                }
            }
            if r.dim() >= 2 {
                if let Some(h) = r.to_hrep() {
                    let _ = writeln!(out, "halfspaces ({}):", h.halfspaces().len());
                    hrep_lines(&mut out, &h);
                }
            }
        }
        Region::Halfspaces(h) => {
            let bounded = match r.is_bounded() {
                Ok(Some(true)) => "bounded",
                Ok(Some(false)) => "unbounded",
                _ => "boundedness unknown",
            };
            let _ = writeln!(out, "halfspaces ({}, {bounded}):", h.halfspaces().len());
            hrep_lines(&mut out, h);
        }
        Region::Polar { constraints, .. } => {
            let _ = writeln!(
                out,
                "intersection of {} polar sets of curved bodies (no finite halfspace form)",
                constraints.len()
            );
            for (body, level) in constraints {
                let _ = writeln!(out, "  {{x : support_T(x) <= {}}}, T = {}", num(*level), body_summary(body));
            }
        }
    }
    out
}

fn body_summary(b: &scert_core::geometry::ConvexBody) -> String {
    use scert_core::geometry::ConvexBody;
    match b {
        ConvexBody::Points(p) => format!("hull of {} points", p.len()),
        ConvexBody::LpBall { norm, radius, .. } => format!("{} ball of radius {}", norm_name(*norm), num(*radius)),
        ConvexBody::Ellipsoid { radius, .. } => format!("ellipsoid of radius {}", num(*radius)),
        ConvexBody::Combination(t) => format!("Minkowski combination of {} bodies", t.len()),
    }
}

pub fn classifier(out: &mut String, c: &ClassifierAtPoint) {
    let g = c.gaps();
    let _ = writeln!(out, "logits: {}", list(c.logits()));
    let _ = writeln!(out, "top class: {}  runner-up: {}  margin: {}", g.top, g.runner_up, num(g.margin()));
    let _ = writeln!(out, "gaps: {}", list(&g.gaps));
}

pub fn certificate(out: &mut String, cert: &Certificate) {
    let kind = match cert.continuity {
        Continuity::Lipschitz => "Lipschitz",
        Continuity::S => "S",
    };
    let _ = writeln!(out, "certificate: {} ({kind})", cert.mode);
    out.push_str(&region(&cert.region));
    if cert.trivial {
        out.push_str("trivial: only the unperturbed input is certified\n");
    }
}

pub fn certified(c: &Certified) -> String {
    let mut out = String::new();
    classifier(&mut out, &c.classifier);
    certificate(&mut out, &c.certificate);
    out
}

fn containment(c: &Containment) -> String {
    let v = if c.holds {
        "yes"
    } else if c.strictly_fails {
        "no"
    } else {
        "within tolerance"
    };
    if c.exact {
        v.into()
    } else {
        format!("{v} (sampled)")
    }
}

pub fn evidence(out: &mut String, e: &Evidence) {
    if e.from_margins {
        out.push_str("evidence: shared gradient set, compared through margins\n");
    }
    let _ = writeln!(out, "  every member certificate inside ensemble: {}", containment(&e.members_in_ensemble));
    let _ = writeln!(out, "  ensemble inside union of members: {}", containment(&e.ensemble_in_union));
    let _ = writeln!(out, "  intersection of members inside ensemble: {}", containment(&e.intersection_in_ensemble));
    let _ = writeln!(out, "  ensemble inside every member: {}", containment(&e.ensemble_in_members));
}

pub fn regime(r: &RegimeReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "gap regime: {}", r.gap_regime.label());
    let _ = writeln!(out, "certificate regime: {}", r.cert_regime.label());
    let _ = writeln!(out, "ensemble margin: {}", num(r.ensemble_margin));
    let _ = writeln!(out, "best member margin: {}", num(r.best_member_margin));
    let _ = writeln!(out, "worst member margin: {}", num(r.worst_member_margin));
    evidence(&mut out, &r.evidence);
    if !r.folded.is_empty() {
        let labels: Vec<&str> = r.folded.iter().map(|c| c.label()).collect();
        let _ = writeln!(out, "folded pairs: {}", labels.join(", "));
    }
    out
}
