//! File formats, text reports, CSV and SVG output, and the bundled worked
//! examples for `scert_core`.

pub mod fixtures;
pub mod problem;
pub mod report;
pub mod sim;
pub mod svg;

use std::fmt;
use std::str::FromStr;

use scert_core::certificates::{
    lipschitz_certificate, s_certificate, Certificate, ClassifierAtPoint, Mode, Smoothness,
};
use scert_core::Norm;

pub use problem::{parse_problem, Problem, Window};

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid problem at {path}: {message}")]
    Invalid { path: String, message: String },
    #[error("mode mismatch: {0}")]
    Mode(String),
    #[error(transparent)]
    Core(scert_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Mismatch(String),
}

impl AppError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Parse { .. } | AppError::Invalid { .. } | AppError::Usage(_) => 2,
            AppError::Mode(_) => 3,
            AppError::Core(_) | AppError::Io(_) | AppError::Mismatch(_) => 1,
        }
    }
}

impl From<scert_core::Error> for AppError {
    fn from(e: scert_core::Error) -> Self {
        match e {
            scert_core::Error::ModeMismatch(m) => AppError::Mode(m),
            scert_core::Error::MissingPair(..) => AppError::Mode(e.to_string()),
            e => AppError::Core(e),
        }
    }
}

/// Certificate kinds selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CertMode {
    U,
    Cw,
    Cd,
    LipschitzU,
    LipschitzCw,
}

impl CertMode {
    pub const ALL: [CertMode; 5] = [
        CertMode::U,
        CertMode::Cw,
        CertMode::Cd,
        CertMode::LipschitzU,
        CertMode::LipschitzCw,
    ];

    pub fn mode(self) -> Mode {
        match self {
            CertMode::U | CertMode::LipschitzU => Mode::Uniform,
            CertMode::Cw | CertMode::LipschitzCw => Mode::ClassWise,
            CertMode::Cd => Mode::ClassDiff,
        }
    }

    pub fn is_lipschitz(self) -> bool {
        matches!(self, CertMode::LipschitzU | CertMode::LipschitzCw)
    }

    pub fn name(self) -> &'static str {
        match self {
            CertMode::U => "u",
            CertMode::Cw => "cw",
            CertMode::Cd => "cd",
            CertMode::LipschitzU => "lipschitz-u",
            CertMode::LipschitzCw => "lipschitz-cw",
        }
    }

    pub fn from_mode(mode: Mode) -> CertMode {
        match mode {
            Mode::Uniform => CertMode::U,
            Mode::ClassWise => CertMode::Cw,
            Mode::ClassDiff => CertMode::Cd,
        }
    }
}

impl fmt::Display for CertMode {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CertMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        CertMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown certificate mode {s:?}"))
    }
}

/// A classifier (single member or weighted ensemble) and its certificate.
#[derive(Debug, Clone)]
pub struct Certified {
    pub classifier: ClassifierAtPoint,
    pub certificate: Certificate,
}

/// Certifies the problem's classifier in `mode`.
///
/// Lipschitz modes replace every gradient set by the `ℓq` ball with `q`
/// dual to `norm`; without `norm`, data that already consists of centred
/// balls is used as is and anything else falls back to `ℓ2`.
pub fn certify(
    problem: &Problem,
    mode: CertMode,
    norm: Option<Norm>,
    weights: Option<&[f64]>,
) -> Result<Certified, AppError> {
    let source = if mode == CertMode::LipschitzU && problem.resolve_mode(Some(Mode::Uniform)).is_err() {
        Mode::ClassWise
    } else {
        mode.mode()
    };
    problem.resolve_mode(Some(source))?;
    let classifier = problem.classifier(source, weights)?;
    if !mode.is_lipschitz() {
        let certificate = s_certificate(&classifier, mode.mode())?;
        return Ok(Certified {
            classifier,
            certificate,
        });
    }
    let classifier = match norm {
        Some(n) => classifier.to_lipschitz(n)?,
        None if all_centred_balls(classifier.smoothness()) => classifier,
        None => classifier.to_lipschitz(Norm::L2)?,
    };
    let certificate = lipschitz_certificate(&classifier, mode.mode())?;
    Ok(Certified {
        classifier,
        certificate,
    })
}

fn all_centred_balls(s: &Smoothness) -> bool {
    match s {
        Smoothness::Uniform(b) => b.as_centered_ball().is_some(),
        Smoothness::ClassWise(v) => v.iter().all(|b| b.as_centered_ball().is_some()),
        Smoothness::ClassDiff(m) => m.values().all(|b| b.as_centered_ball().is_some()),
    }
}

/// Reads and parses a problem file.
pub fn load_problem(path: &std::path::Path) -> Result<Problem, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    parse_problem(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let parse = parse_problem("{").unwrap_err();
        assert_eq!(parse.exit_code(), 2);
        let mode: AppError = scert_core::Error::ModeMismatch("x".into()).into();
        assert_eq!(mode.exit_code(), 3);
        let pair: AppError = scert_core::Error::MissingPair(1, 0).into();
        assert_eq!(pair.exit_code(), 3);
    }

    #[test]
    fn mode_names_round_trip() {
        for m in CertMode::ALL {
            assert_eq!(m.name().parse::<CertMode>().unwrap(), m);
        }
    }
}
