//! Bundled worked examples and the checks run against them.
//!
//! Expected values live in `expected.json`, keyed by fixture name; every
//! numeric comparison uses an absolute tolerance of 1e-9.

use std::collections::BTreeMap;
use std::path::Path;

use scert_core::ensemble::{
    best_radius_gain, classify_regimes, damning_alpha, improvement_conditions, member_radius,
    radius_profile, Damning, EnsembleSpec, LogitEnsemble,
};
use scert_core::geometry::{subset, Region};
use scert_core::tol;
use scert_core::Norm;
use serde::Deserialize;

use crate::problem::{parse_problem, Problem, Real, Window};
use crate::report::display_rows;
use crate::{certify, AppError, CertMode};

pub const TOLERANCE: f64 = 1e-9;

/// `(name, problem JSON)` for every bundled fixture.
pub const BUNDLED: [(&str, &str); 9] = [
    ("fig1", include_str!("../fixtures/fig1.json")),
    ("example-3-11", include_str!("../fixtures/example-3-11.json")),
    ("appendix-c2", include_str!("../fixtures/appendix-c2.json")),
    ("appendix-c3", include_str!("../fixtures/appendix-c3.json")),
    ("appendix-c4", include_str!("../fixtures/appendix-c4.json")),
    ("fig5a", include_str!("../fixtures/fig5a.json")),
    ("fig5b", include_str!("../fixtures/fig5b.json")),
    ("fig5c", include_str!("../fixtures/fig5c.json")),
    ("fig6", include_str!("../fixtures/fig6.json")),
];

pub const EXPECTED: &str = include_str!("../fixtures/expected.json");

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum Check {
    /// One-dimensional certificate endpoints.
    Interval {
        mode: String,
        lo: Real,
        hi: Real,
        #[serde(default)]
        norm: Option<Real>,
    },
    /// Radius of a ball certificate.
    Radius {
        mode: String,
        value: f64,
        #[serde(default)]
        norm: Option<Real>,
    },
    /// The certificate is exactly these halfspaces `a·x <= b`, rows `[a…, b]`.
    Halfplanes { mode: String, rows: Vec<Vec<f64>> },
    /// `inner ⊆ outer` and not the reverse.
    StrictlyContains {
        outer: String,
        inner: String,
        #[serde(default)]
        norm: Option<Real>,
    },
    MemberRadii { values: Vec<f64> },
    /// Ensemble radius strictly between the member radii at weights
    /// `(α, 1 − α)`.
    RadiusBetween { alphas: Vec<f64> },
    /// Ensemble margin at the file's weights.
    Margin { value: f64 },
    Trivial { mode: String, value: bool },
    GapRegime { label: String },
    CertRegime { label: String },
    Conditions { value: bool },
    /// Best radius gain over a 10⁻³ weight grid is at least `min`.
    RadiusGain { min: f64 },
    /// Weight of the first member at which the two tops tie.
    Damning { value: f64 },
    /// Ensemble uniform certificate agrees with direct support evaluation
    /// on an `n × n` grid over the window.
    GridOracle { mode: String, n: usize },
}

impl Check {
    pub fn name(&self) -> String {
        match self {
            Check::Interval { mode, .. } => format!("interval {mode}"),
            Check::Radius { mode, norm, .. } => format!("radius {mode}{}", norm_suffix(norm)),
            Check::Halfplanes { mode, .. } => format!("halfplanes {mode}"),
            Check::StrictlyContains { outer, inner, norm } => {
                format!("{inner}{} strictly inside {outer}", norm_suffix(norm))
            }
            Check::MemberRadii { .. } => "member radii".into(),
            Check::RadiusBetween { .. } => "ensemble radius between members".into(),
            Check::Margin { .. } => "ensemble margin".into(),
            Check::Trivial { mode, .. } => format!("trivial {mode}"),
            Check::GapRegime { .. } => "gap regime".into(),
            Check::CertRegime { .. } => "certificate regime".into(),
            Check::Conditions { .. } => "improvement conditions".into(),
            Check::RadiusGain { .. } => "radius gain".into(),
            Check::Damning { .. } => "damning weight".into(),
            Check::GridOracle { mode, n } => format!("grid oracle {mode} {n}x{n}"),
        }
    }
}

fn norm_suffix(n: &Option<Real>) -> String {
    n.map_or_else(String::new, |r| format!(" p={}", crate::report::num(r.0)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub fixture: String,
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= TOLERANCE
}

fn mode(s: &str) -> Result<CertMode, AppError> {
    s.parse().map_err(AppError::Usage)
}

fn norm(n: &Option<Real>) -> Result<Option<Norm>, AppError> {
    n.map(|r| Norm::from_p(r.0)).transpose().map_err(AppError::from)
}

fn spec(p: &Problem) -> Result<EnsembleSpec, AppError> {
    p.ensemble(p.resolve_mode(None)?, None)
}

/// Runs one check; `Ok((passed, detail))`.
pub fn run_check(p: &Problem, check: &Check) -> Result<(bool, String), AppError> {
    Ok(match check {
        Check::Interval { mode: m, lo, hi, norm: n } => {
            let c = certify(p, mode(m)?, norm(n)?, None)?;
            match c.certificate.region.interval() {
                Some((a, b)) => (
                    close(a, lo.0) && close(b, hi.0),
                    crate::report::interval(a, b),
                ),
                None => (false, "not an interval".into()),
            }
        }
        Check::Radius { mode: m, value, norm: n } => {
            let c = certify(p, mode(m)?, norm(n)?, None)?;
            match c.certificate.radius() {
                Some(r) => (close(r, *value), crate::report::num(r)),
                None => (false, "not a ball".into()),
            }
        }
        Check::Halfplanes { mode: m, rows } => {
            let c = certify(p, mode(m)?, None, None)?;
            let Region::Halfspaces(h) = &c.certificate.region else {
                return Ok((false, "not a halfspace region".into()));
            };
            let mut got: Vec<Vec<f64>> = display_rows(h)
                .into_iter()
                .map(|(mut a, b)| {
                    a.push(b);
                    a
                })
                .collect();
            let detail = format!("{got:?}");
            let mut ok = got.len() == rows.len();
            for want in rows {
                match got
                    .iter()
                    .position(|g| g.len() == want.len() && g.iter().zip(want).all(|(x, y)| close(*x, *y)))
                {
                    Some(i) => {
                        got.swap_remove(i);
                    }
                    None => ok = false,
                }
            }
            (ok, detail)
        }
        Check::StrictlyContains { outer, inner, norm: n } => {
            let n = norm(n)?;
            let o = certify(p, mode(outer)?, n, None)?.certificate.region;
            let i = certify(p, mode(inner)?, n, None)?.certificate.region;
            let fwd = subset(&i, &o)?;
            let back = subset(&o, &i)?;
            (
                fwd.holds && back.strictly_fails,
                format!("inner in outer: {}, outer escapes inner: {}", fwd.holds, back.strictly_fails),
            )
        }
        Check::MemberRadii { values } => {
            let s = spec(p)?;
            let radii = s.members().iter().map(member_radius).collect::<Result<Vec<_>, _>>()?;
            (
                radii.len() == values.len() && radii.iter().zip(values).all(|(a, b)| close(*a, *b)),
                format!("{radii:?}"),
            )
        }
        Check::RadiusBetween { alphas } => {
            let s = spec(p)?;
            let (radii, profile) = radius_profile(&s)?;
            let lo = radii.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = radii.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut ok = true;
            let mut seen = Vec::new();
            for &a in alphas {
                let rg = profile(&[a, 1.0 - a]);
                ok &= rg > lo + tol::STRICT && rg < hi - tol::STRICT;
                seen.push(rg);
            }
            (ok, format!("radii {radii:?}, ensemble {seen:?}"))
        }
        Check::Margin { value } => {
            let e = LogitEnsemble::new(
                p.members.iter().map(|m| m.logits.clone()).collect(),
                &p.weights_or_uniform(),
            )?;
            (close(e.margin(), *value), crate::report::num(e.margin()))
        }
        Check::Trivial { mode: m, value } => {
            let c = certify(p, mode(m)?, None, None)?;
            (c.certificate.trivial == *value, c.certificate.trivial.to_string())
        }
        Check::GapRegime { label } => {
            let r = classify_regimes(&spec(p)?)?;
            (r.gap_regime.label() == label, r.gap_regime.label().into())
        }
        Check::CertRegime { label } => {
            let r = classify_regimes(&spec(p)?)?;
            (r.cert_regime.label() == label, r.cert_regime.label().into())
        }
        Check::Conditions { value } => {
            let v = improvement_conditions(&spec(p)?)?;
            (v == *value, v.to_string())
        }
        Check::RadiusGain { min } => {
            let (gain, a) = best_radius_gain(&spec(p)?, 1000)?;
            (gain >= *min, format!("gain {gain} at weight {a}"))
        }
        Check::Damning { value } => {
            if p.members.len() != 2 {
                return Err(AppError::Usage("damning weight needs two members".into()));
            }
            match damning_alpha(&p.members[0].logits, &p.members[1].logits)? {
                Damning::Alpha(a) => (close(a, *value), crate::report::num(a)),
                Damning::AllAlphaTrivial => (false, "every weight is trivial".into()),
            }
        }
        Check::GridOracle { mode: m, n } => grid_oracle(p, mode(m)?, *n)?,
    })
}

/// Membership of the ensemble uniform certificate against
/// `Σⱼ αⱼ (ρⱼ(x) + ρⱼ(−x)) <= r^g`, evaluated member by member.
fn grid_oracle(p: &Problem, m: CertMode, n: usize) -> Result<(bool, String), AppError> {
    if m != CertMode::U || p.dimension != 2 || n < 2 {
        return Err(AppError::Usage("grid oracle supports the uniform mode in the plane".into()));
    }
    let cert = certify(p, m, None, None)?.certificate;
    let s = spec(p)?;
    let level = s.logit_view().margin();
    let bodies: Vec<_> = s
        .members()
        .iter()
        .map(|c| match c.smoothness() {
            scert_core::certificates::Smoothness::Uniform(b) => b.clone(),
            _ => unreachable!("uniform mode"),
        })
        .collect();
    let w = p.window.unwrap_or_default();
    let mut mismatches = 0usize;
    let mut inside = 0usize;
    for i in 0..n {
        for j in 0..n {
            let x = [
                w.x[0] + (w.x[1] - w.x[0]) * i as f64 / (n - 1) as f64,
                w.y[0] + (w.y[1] - w.y[0]) * j as f64 / (n - 1) as f64,
            ];
            let neg = [-x[0], -x[1]];
            let rho: f64 = s
                .weights()
                .iter()
                .zip(&bodies)
                .map(|(a, b)| a * (b.support_unchecked(&x) + b.support_unchecked(&neg)))
                .sum();
            if (rho - level).abs() <= 1e-7 {
                continue;
            }
            let want = rho <= level;
            inside += want as usize;
            if cert.contains(&x) != want {
                mismatches += 1;
            }
        }
    }
    Ok((mismatches == 0, format!("{mismatches} mismatches, {inside} inside points")))
}

pub fn parse_expected(text: &str) -> Result<BTreeMap<String, Vec<Check>>, AppError> {
    serde_json::from_str(text).map_err(|e| AppError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Runs every check of every fixture; errors become failed outcomes.
pub fn run_all(
    fixtures: &[(String, String)],
    expected: &BTreeMap<String, Vec<Check>>,
) -> Vec<Outcome> {
    let mut out = Vec::new();
    for (name, text) in fixtures {
        let fail = |check: String, detail: String| Outcome {
            fixture: name.clone(),
            check,
            passed: false,
            detail,
        };
        let problem = match parse_problem(text) {
            Ok(p) => p,
            Err(e) => {
                out.push(fail("parse".into(), e.to_string()));
                continue;
            }
        };
        let Some(checks) = expected.get(name) else {
            out.push(fail("expected values".into(), "no stored expectations".into()));
            continue;
        };
        for c in checks {
            out.push(match run_check(&problem, c) {
                Ok((passed, detail)) => Outcome {
                    fixture: name.clone(),
                    check: c.name(),
                    passed,
                    detail,
                },
                Err(e) => fail(c.name(), e.to_string()),
            });
        }
    }
    for name in expected.keys() {
        if !fixtures.iter().any(|(n, _)| n == name) {
            out.push(Outcome {
                fixture: name.clone(),
                check: "fixture file".into(),
                passed: false,
                detail: "expectations without a fixture".into(),
            });
        }
    }
    out
}

pub fn run_bundled() -> Result<Vec<Outcome>, AppError> {
    let fixtures: Vec<(String, String)> =
        BUNDLED.iter().map(|(n, t)| (n.to_string(), t.to_string())).collect();
    Ok(run_all(&fixtures, &parse_expected(EXPECTED)?))
}

/// Runs the fixtures of a directory laid out like the bundled one.
pub fn run_dir(dir: &Path) -> Result<Vec<Outcome>, AppError> {
    let expected = parse_expected(&std::fs::read_to_string(dir.join("expected.json"))?)?;
    let mut fixtures = Vec::new();
    let mut entries: Vec<_> = std::fs::read_dir(dir)?.collect::<Result<_, _>>()?;
    entries.sort_by_key(|e| e.file_name());
    for e in entries {
        let path = e.path();
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else { continue };
        if path.extension().is_some_and(|x| x == "json") && stem != "expected" {
            fixtures.push((stem.to_string(), std::fs::read_to_string(&path)?));
        }
    }
    Ok(run_all(&fixtures, &expected))
}

/// Writes the bundled fixtures and expectations into `dir`.
pub fn write_bundled(dir: &Path) -> Result<(), AppError> {
    std::fs::create_dir_all(dir)?;
    for (name, text) in BUNDLED {
        std::fs::write(dir.join(format!("{name}.json")), text)?;
    }
    std::fs::write(dir.join("expected.json"), EXPECTED)?;
    Ok(())
}

/// Default window of a problem, overridden by `flag`.
pub fn window_of(p: &Problem, flag: Option<Window>) -> Window {
    flag.or(p.window).unwrap_or_default()
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_fixtures_pass() {
        let out = run_bundled().unwrap();
        let failed: Vec<_> = out.iter().filter(|o| !o.passed).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert!(out.len() >= 25);
    }

    #[test]
    fn every_fixture_round_trips() {
        for (name, text) in BUNDLED {
            let p = parse_problem(text).unwrap();
            assert_eq!(parse_problem(&p.to_json().unwrap()).unwrap(), p, "{name}");
        }
    }

    #[test]
    fn wrong_expectation_fails() {
        let fixtures = vec![("fig1".to_string(), bundled("fig1").unwrap().to_string())];
        let expected = parse_expected(
            r#"{"fig1": [{"check": "radius", "mode": "lipschitz-u", "norm": "inf", "value": 0.3334}]}"#,
        )
        .unwrap();
        let out = run_all(&fixtures, &expected);
        assert_eq!(out.len(), 1);
        assert!(!out[0].passed);
    }
}
