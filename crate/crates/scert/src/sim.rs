//! Parallel experiment runner and CSV output.

use std::io;

use rayon::prelude::*;
use scert_core::simulate::{simulate_draw, DrawRecord, ExperimentConfig};

use crate::AppError;

pub const CSV_HEADER: [&str; 10] = [
    "n",
    "draw",
    "r_bar",
    "r_under",
    "rg_uniform",
    "rg_opt",
    "gap_regime",
    "same_ca",
    "bound",
    "slack",
];

/// Environment variable that overrides the seed given on the command line.
pub const SEED_ENV: &str = "SCERT_SEED";

/// `SCERT_SEED` if set, else `flag`, else 0.
pub fn effective_seed(flag: Option<u64>, env: Option<&str>) -> Result<u64, AppError> {
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| AppError::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        None => Ok(flag.unwrap_or(0)),
    }
}

/// Every draw, evaluated in parallel and returned in `(n, draw)` order.
pub fn run_parallel(config: &ExperimentConfig) -> Result<Vec<DrawRecord>, AppError> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = config
        .member_counts
        .iter()
        .flat_map(|&n| (0..config.draws).map(move |d| (n, d)))
        .collect();
    let mut records = jobs
        .par_iter()
        .map(|&(n, d)| simulate_draw(config, n, d))
        .collect::<Result<Vec<_>, _>>()?;
    records.sort_by_key(|r| (r.n, r.draw));
    Ok(records)
}

pub fn write_csv<W: io::Write>(records: &[DrawRecord], out: W) -> Result<(), AppError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let err = |e: csv::Error| AppError::Io(io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(err)?;
    for r in records {
        w.write_record([
            r.n.to_string(),
            r.draw.to_string(),
            r.best_member_margin.to_string(),
            r.worst_member_margin.to_string(),
            r.uniform_margin.to_string(),
            r.optimized_margin.map_or_else(String::new, |v| v.to_string()),
            r.gap_regime.label().to_string(),
            r.same_top.to_string(),
            r.bound.to_string(),
            r.slack.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use scert_core::simulate::run_experiment;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            draws: 25,
            seed: 7,
            resolution: Some(20),
            ..Default::default()
        }
    }

    #[test]
    fn parallel_matches_serial() {
        let c = small();
        assert_eq!(run_parallel(&c).unwrap(), run_experiment(&c).unwrap());
    }

    #[test]
    fn csv_shape() {
        let recs = run_parallel(&small()).unwrap();
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!text.contains('\r'));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines.len(), 1 + 75);
        assert!(lines[1].starts_with("2,0,"));
        assert!(lines[75].starts_with("4,24,"));
    }

    #[test]
    fn env_seed_overrides_flag() {
        assert_eq!(effective_seed(Some(3), Some("11")).unwrap(), 11);
        assert_eq!(effective_seed(Some(3), None).unwrap(), 3);
        assert_eq!(effective_seed(None, None).unwrap(), 0);
        assert!(effective_seed(None, Some("x")).is_err());
    }
}
