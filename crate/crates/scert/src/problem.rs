//! The JSON problem file: one classifier or an ensemble of classifiers at a
//! point, each with one or more blocks of gradient-set data.
//!
//! ```json
//! {
//!   "dimension": 1,
//!   "classes": 2,
//!   "members": [
//!     {
//!       "logits": [0.9, 0.7],
//!       "smoothness": [
//!         {"mode": "cw", "bodies": [
//!           {"type": "points", "points": [[0.1], [1.1]]},
//!           {"type": "points", "points": [[0.3], [1.3]]}
//!         ]},
//!         {"mode": "cd", "bodies": [
//!           {"pair": [1, 0], "body": {"type": "points", "points": [[0.2]]}}
//!         ]}
//!       ]
//!     }
//!   ],
//!   "weights": [1.0],
//!   "window": {"x": [-3, 3], "y": [-3, 3]}
//! }
//! ```
//!
//! `smoothness` is a single block or an array of blocks with distinct
//! modes. A `cd` entry with `"pair": [i, j]` is the gradient set of
//! `f_i − f_j`. Classes are numbered from 0.

use std::collections::BTreeMap;
use std::fmt;

use scert_core::certificates::{ClassifierAtPoint, Mode, Smoothness};
use scert_core::ensemble::EnsembleSpec;
use scert_core::geometry::ConvexBody;
use scert_core::{Matrix, Norm, Vector};
use serde::de::{self, MapAccess, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::AppError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dimension: usize,
    pub classes: usize,
    pub members: Vec<MemberFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
}

/// Axis-aligned drawing window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl Default for Window {
    fn default() -> Self {
        Window {
            x: [-3.0, 3.0],
            y: [-3.0, 3.0],
        }
    }
}

impl Window {
    pub fn validate(&self) -> Result<(), String> {
        let ok = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] < r[1];
        if ok(self.x) && ok(self.y) {
            Ok(())
        } else {
            Err("window ranges must be finite and increasing".into())
        }
    }
}

impl std::str::FromStr for Window {
    type Err = String;

    /// `xmin,xmax,ymin,ymax`.
    fn from_str(s: &str) -> Result<Self, String> {
        let v = parse_list(s)?;
        if v.len() != 4 {
            return Err(format!("expected xmin,xmax,ymin,ymax, got {} values", v.len()));
        }
        let w = Window {
            x: [v[0], v[1]],
            y: [v[2], v[3]],
        };
        w.validate()?;
        Ok(w)
    }
}

/// Comma-separated reals.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>().map_err(|_| format!("not a number: {t:?}"))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberFile {
    pub logits: Vec<f64>,
    pub smoothness: Blocks,
}

/// One block, or an array of blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Blocks(pub Vec<SmoothnessFile>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", deny_unknown_fields)]
pub enum SmoothnessFile {
    #[serde(rename = "u", alias = "uniform")]
    Uniform { bodies: Vec<BodyFile> },
    #[serde(rename = "cw", alias = "classwise")]
    ClassWise { bodies: Vec<BodyFile> },
    #[serde(rename = "cd", alias = "classdiff")]
    ClassDiff { bodies: Vec<PairBody> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairBody {
    pub pair: [usize; 2],
    pub body: BodyFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodyFile {
    Points {
        points: Vec<Vec<f64>>,
    },
    LpBall {
        p: Real,
        eps: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    Ellipsoid {
        sigma: Vec<Vec<f64>>,
        eps: f64,
    },
}

/// A real number that may also be written `"inf"` or `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Real, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Real;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, \"inf\" or \"-inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                match v {
                    "inf" | "infinity" | "+inf" => Ok(Real(f64::INFINITY)),
                    "-inf" | "-infinity" => Ok(Real(f64::NEG_INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

impl Serialize for Blocks {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.as_slice() {
            [one] => one.serialize(s),
            many => many.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Blocks {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Blocks, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Blocks;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a smoothness block or an array of blocks")
            }
            fn visit_map<A: MapAccess<'de>>(self, map: A) -> Result<Blocks, A::Error> {
                let one = SmoothnessFile::deserialize(de::value::MapAccessDeserializer::new(map))?;
                Ok(Blocks(vec![one]))
            }
            fn visit_seq<A: SeqAccess<'de>>(self, seq: A) -> Result<Blocks, A::Error> {
                Vec::deserialize(de::value::SeqAccessDeserializer::new(seq)).map(Blocks)
            }
        }
        d.deserialize_any(V)
    }
}

/// A validated problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub dimension: usize,
    pub classes: usize,
    pub members: Vec<Member>,
    pub weights: Option<Vec<f64>>,
    pub window: Option<Window>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub logits: Vec<f64>,
    /// One entry per mode, in file order.
    pub smoothness: Vec<Smoothness>,
}

/// Parses and validates a problem file.
pub fn parse_problem(text: &str) -> Result<Problem, AppError> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| AppError::Parse {
        line: e.line(),
        column: e.column(),
        message: {
            let m = e.to_string();
            m.rsplit_once(" at line ").map_or(m.clone(), |(head, _)| head.to_string())
        },
    })?;
    file.validate()
}

fn invalid(path: impl Into<String>, message: impl fmt::Display) -> AppError {
    AppError::Invalid {
        path: path.into(),
        message: message.to_string(),
    }
}

impl ProblemFile {
    pub fn validate(&self) -> Result<Problem, AppError> {
        let d = self.dimension;
        let k = self.classes;
        if d == 0 {
            return Err(invalid("dimension", "must be positive"));
        }
        if k < 2 {
            return Err(invalid("classes", "at least two classes are required"));
        }
        if self.members.is_empty() {
            return Err(invalid("members", "at least one member is required"));
        }
        let mut members = Vec::with_capacity(self.members.len());
        for (j, m) in self.members.iter().enumerate() {
            let at = format!("members[{j}]");
            if m.logits.len() != k {
                return Err(invalid(
                    format!("{at}.logits"),
                    format_args!("expected {k} logits, found {}", m.logits.len()),
                ));
            }
            if m.smoothness.0.is_empty() {
                return Err(invalid(format!("{at}.smoothness"), "no smoothness block"));
            }
            let mut blocks = Vec::new();
            for (b, block) in m.smoothness.0.iter().enumerate() {
                let at = format!("{at}.smoothness[{b}]");
                let s = block.to_smoothness(d, k, &at)?;
                if blocks.iter().any(|o: &Smoothness| o.mode() == s.mode()) {
                    return Err(invalid(at, format_args!("second {} block", s.mode())));
                }
                ClassifierAtPoint::new(m.logits.clone(), s.clone()).map_err(|e| invalid(&at, e))?;
                blocks.push(s);
            }
            members.push(Member {
                logits: m.logits.clone(),
                smoothness: blocks,
            });
        }
        if let Some(w) = &self.weights {
            if w.len() != members.len() {
                return Err(invalid(
                    "weights",
                    format_args!("expected {} weights, found {}", members.len(), w.len()),
                ));
            }
            if w.iter().any(|v| !v.is_finite() || *v < 0.0) || w.iter().sum::<f64>() <= 0.0 {
                return Err(invalid("weights", "weights must be nonnegative with a positive sum"));
            }
        }
        if let Some(win) = &self.window {
            win.validate().map_err(|e| invalid("window", e))?;
        }
        Ok(Problem {
            dimension: d,
            classes: k,
            members,
            weights: self.weights.clone(),
            window: self.window,
        })
    }
}

impl SmoothnessFile {
    fn to_smoothness(&self, d: usize, k: usize, at: &str) -> Result<Smoothness, AppError> {
        let body = |b: &BodyFile, at: String| -> Result<ConvexBody, AppError> {
            let body = b.to_body(d).map_err(|e| invalid(&at, e))?;
            if body.dim() != d {
                return Err(invalid(
                    at,
                    format_args!("body has dimension {}, expected {d}", body.dim()),
                ));
            }
            Ok(body)
        };
        Ok(match self {
            SmoothnessFile::Uniform { bodies } => {
                if bodies.len() != 1 {
                    return Err(invalid(
                        format!("{at}.bodies"),
                        format_args!("uniform mode takes one body, found {}", bodies.len()),
                    ));
                }
                Smoothness::Uniform(body(&bodies[0], format!("{at}.bodies[0]"))?)
            }
            SmoothnessFile::ClassWise { bodies } => {
                if bodies.len() != k {
                    return Err(invalid(
                        format!("{at}.bodies"),
                        format_args!("class-wise mode takes {k} bodies, found {}", bodies.len()),
                    ));
                }
                Smoothness::ClassWise(
                    bodies
                        .iter()
                        .enumerate()
                        .map(|(i, b)| body(b, format!("{at}.bodies[{i}]")))
                        .collect::<Result<_, _>>()?,
                )
            }
            SmoothnessFile::ClassDiff { bodies } => {
                let mut map = BTreeMap::new();
                for (n, pb) in bodies.iter().enumerate() {
                    let at = format!("{at}.bodies[{n}]");
                    let [i, j] = pb.pair;
                    if i >= k || j >= k || i == j {
                        return Err(invalid(
                            format!("{at}.pair"),
                            format_args!("pair [{i}, {j}] must name two distinct classes below {k}"),
                        ));
                    }
                    if map.insert((i, j), body(&pb.body, format!("{at}.body"))?).is_some() {
                        return Err(invalid(format!("{at}.pair"), format_args!("duplicate pair [{i}, {j}]")));
                    }
                }
                Smoothness::ClassDiff(map)
            }
        })
    }

    pub fn from_smoothness(s: &Smoothness) -> Result<SmoothnessFile, AppError> {
        Ok(match s {
            Smoothness::Uniform(b) => SmoothnessFile::Uniform {
                bodies: vec![BodyFile::from_body(b)?],
            },
            Smoothness::ClassWise(v) => SmoothnessFile::ClassWise {
                bodies: v.iter().map(BodyFile::from_body).collect::<Result<_, _>>()?,
            },
            Smoothness::ClassDiff(m) => SmoothnessFile::ClassDiff {
                bodies: m
                    .iter()
                    .map(|(&(i, j), b)| {
                        Ok(PairBody {
                            pair: [i, j],
                            body: BodyFile::from_body(b)?,
                        })
                    })
                    .collect::<Result<_, AppError>>()?,
            },
        })
    }
}

impl BodyFile {
    pub fn to_body(&self, d: usize) -> Result<ConvexBody, scert_core::Error> {
        match self {
            BodyFile::Points { points } => {
                ConvexBody::points(points.iter().map(|p| Vector::from(p.as_slice())).collect())
            }
            BodyFile::LpBall { p, eps, center } => {
                let c = center.as_ref().map_or_else(|| Vector::zeros(d), |c| Vector::from(c.as_slice()));
                ConvexBody::lp_ball(p.0, *eps, c)
            }
            BodyFile::Ellipsoid { sigma, eps } => ConvexBody::ellipsoid(Matrix::from_rows(sigma)?, *eps),
        }
    }

    pub fn from_body(b: &ConvexBody) -> Result<BodyFile, AppError> {
        Ok(match b {
            ConvexBody::Points(p) => BodyFile::Points {
                points: p.iter().map(|v| v.as_slice().to_vec()).collect(),
            },
            ConvexBody::LpBall {
                norm,
                radius,
                center,
            } => BodyFile::LpBall {
                p: Real(norm.p()),
                eps: *radius,
                center: Some(center.as_slice().to_vec()),
            },
            ConvexBody::Ellipsoid { sigma, radius } => BodyFile::Ellipsoid {
                sigma: sigma.rows(),
                eps: *radius,
            },
            ConvexBody::Combination(_) => {
                return Err(AppError::Usage(
                    "Minkowski combinations have no file representation".into(),
                ))
            }
        })
    }
}

impl Problem {
    /// The file form of this problem; parsing it gives back `self`.
    pub fn to_file(&self) -> Result<ProblemFile, AppError> {
        Ok(ProblemFile {
            dimension: self.dimension,
            classes: self.classes,
            members: self
                .members
                .iter()
                .map(|m| {
                    Ok(MemberFile {
                        logits: m.logits.clone(),
                        smoothness: Blocks(
                            m.smoothness
                                .iter()
                                .map(SmoothnessFile::from_smoothness)
                                .collect::<Result<_, AppError>>()?,
                        ),
                    })
                })
                .collect::<Result<_, AppError>>()?,
            weights: self.weights.clone(),
            window: self.window,
        })
    }

    pub fn to_json(&self) -> Result<String, AppError> {
        serde_json::to_string_pretty(&self.to_file()?).map_err(|e| AppError::Usage(e.to_string()))
    }

    /// Modes present in every member, in the first member's order.
    pub fn common_modes(&self) -> Vec<Mode> {
        self.members[0]
            .smoothness
            .iter()
            .map(Smoothness::mode)
            .filter(|m| self.members.iter().all(|mem| mem.block(*m).is_some()))
            .collect()
    }

    /// `requested`, or the only mode shared by all members.
    pub fn resolve_mode(&self, requested: Option<Mode>) -> Result<Mode, AppError> {
        let common = self.common_modes();
        match requested {
            Some(m) if common.contains(&m) => Ok(m),
            Some(m) => Err(AppError::Mode(format!("not every member has {m} smoothness data"))),
            None => match common.as_slice() {
                [one] => Ok(*one),
                [] => Err(AppError::Mode("members share no smoothness mode".into())),
                _ => Err(AppError::Mode(
                    "several smoothness modes present; choose one with --mode".into(),
                )),
            },
        }
    }

    pub fn weights_or_uniform(&self) -> Vec<f64> {
        self.weights
            .clone()
            .unwrap_or_else(|| vec![1.0 / self.members.len() as f64; self.members.len()])
    }

    pub fn ensemble(&self, mode: Mode, weights: Option<&[f64]>) -> Result<EnsembleSpec, AppError> {
        let members = self
            .members
            .iter()
            .map(|m| m.classifier(mode))
            .collect::<Result<Vec<_>, _>>()?;
        let w = weights.map_or_else(|| self.weights_or_uniform(), <[f64]>::to_vec);
        Ok(EnsembleSpec::new(members, &w)?)
    }

    /// The single member, or the weighted ensemble of all members.
    pub fn classifier(&self, mode: Mode, weights: Option<&[f64]>) -> Result<ClassifierAtPoint, AppError> {
        if self.members.len() == 1 && weights.is_none() {
            return self.members[0].classifier(mode);
        }
        Ok(self.ensemble(mode, weights)?.ensemble_classifier()?)
    }
}

impl Member {
    pub fn block(&self, mode: Mode) -> Option<&Smoothness> {
        self.smoothness.iter().find(|s| s.mode() == mode)
    }

    pub fn classifier(&self, mode: Mode) -> Result<ClassifierAtPoint, AppError> {
        let s = self
            .block(mode)
            .ok_or_else(|| AppError::Mode(format!("no {mode} smoothness data")))?;
        Ok(ClassifierAtPoint::new(self.logits.clone(), s.clone())?)
    }
}

/// `1`, `2`, `inf` or any `p >= 1`.
pub fn parse_norm(s: &str) -> Result<Norm, String> {
    let p = match s.trim() {
        "inf" | "infinity" | "max" => f64::INFINITY,
        t => t.parse::<f64>().map_err(|_| format!("not a norm: {s:?}"))?,
    };
    Norm::from_p(p).map_err(|e| e.to_string())
}
