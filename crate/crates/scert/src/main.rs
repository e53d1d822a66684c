use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use scert::problem::{parse_list, parse_norm, Window};
use scert::report::{self, list, num};
use scert::sim::{effective_seed, run_parallel, write_csv, SEED_ENV};
use scert::{certify, fixtures, load_problem, svg, AppError, CertMode};
use scert_core::certificates::{s_certificate, Mode};
use scert_core::ensemble::{
    best_radius_gain, classify_regimes, damning_alpha, gap_gain_bound, improvement_conditions,
    optimize_weights, radius_improvement_bound, Damning, LogitEnsemble,
};
use scert_core::simulate::{summarize, ExperimentConfig};
use scert_core::Norm;

/// Robustness certificates for classifiers and weighted ensembles.
///
/// Exit status: 0 on success, 1 on a failed check or runtime error, 2 on an
/// unreadable or invalid problem file or bad flags, 3 when the requested
/// mode does not match the smoothness data.
#[derive(Parser)]
#[command(name = "scert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the classifier of a problem file (the weighted ensemble when
    /// the file has several members).
    Certify {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: CertMode,
        /// Perturbation norm for the Lipschitz modes: 1, 2, inf or any p >= 1.
        #[arg(long, value_parser = parse_norm)]
        norm: Option<Norm>,
        #[command(flatten)]
        weights: WeightsArg,
    },
    /// Member and ensemble logits, margins and certificates.
    Ensemble {
        file: PathBuf,
        #[command(flatten)]
        mode: ModeArg,
        #[command(flatten)]
        weights: WeightsArg,
        /// Also search for the weights maximizing the ensemble margin.
        #[arg(long)]
        optimize: bool,
        /// Grid steps per axis for the weight search.
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Gap and certificate regimes of an ensemble.
    Regime {
        file: PathBuf,
        #[command(flatten)]
        mode: ModeArg,
        #[command(flatten)]
        weights: WeightsArg,
    },
    /// Closed-form bounds.
    Bound {
        #[command(subcommand)]
        kind: BoundKind,
    },
    /// Monte Carlo statistics over random probability vectors, as CSV.
    Simulate {
        /// Number of classes.
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// Ensemble sizes, comma separated.
        #[arg(long, default_value = "2,3,4", value_delimiter = ',')]
        n: Vec<usize>,
        /// Draws per ensemble size.
        #[arg(long, default_value_t = 1000)]
        draws: usize,
        /// Seed; the SCERT_SEED environment variable overrides it.
        #[arg(long)]
        seed: Option<u64>,
        /// Grid steps per axis for the weight search.
        #[arg(long)]
        resolution: Option<usize>,
        /// Skip the weight search (leaves rg_opt empty).
        #[arg(long)]
        uniform_only: bool,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print a summary to standard error.
        #[arg(long)]
        summary: bool,
    },
    /// Draw the certificates of a planar problem as SVG.
    Render {
        file: PathBuf,
        /// SVG destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// xmin,xmax,ymin,ymax (default: the file's window, else -3,3,-3,3).
        #[arg(long, allow_hyphen_values = true)]
        window: Option<Window>,
    },
    /// Run every bundled worked example against its stored expected values.
    Examples {
        /// Run the fixtures of this directory instead of the bundled ones.
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Write the bundled fixtures into this directory and exit.
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BoundKind {
    /// Largest ensemble margin reachable from best member margin r̄ with K classes.
    GapGain {
        #[arg(long)]
        rbar: f64,
        #[arg(long)]
        k: usize,
    },
    /// Weight of the first member at which two members with different top
    /// classes tie, leaving a trivial ensemble certificate.
    Damning {
        /// First member's logits, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        f1: String,
        /// Second member's logits, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        f2: String,
    },
    /// Bound on the certified-radius gain of a two-member ball ensemble.
    Radius {
        file: PathBuf,
        #[command(flatten)]
        mode: ModeArg,
    },
    /// Sufficient conditions for a strict radius gain.
    Conditions {
        file: PathBuf,
        #[command(flatten)]
        mode: ModeArg,
    },
}

#[derive(Args)]
struct ModeArg {
    /// Smoothness mode: u, cw or cd (needed when the file has several).
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
}

#[derive(Args)]
struct WeightsArg {
    /// Ensemble weights, comma separated (overrides the file).
    #[arg(long)]
    weights: Option<String>,
}

impl WeightsArg {
    fn get(&self) -> Result<Option<Vec<f64>>, AppError> {
        self.weights
            .as_deref()
            .map(|w| parse_list(w).map_err(AppError::Usage))
            .transpose()
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "u" | "uniform" => Ok(Mode::Uniform),
        "cw" | "classwise" => Ok(Mode::ClassWise),
        "cd" | "classdiff" => Ok(Mode::ClassDiff),
        _ => Err(format!("unknown mode {s:?} (expected u, cw or cd)")),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), AppError> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Certify {
            file,
            mode,
            norm,
            weights,
        } => {
            let p = load_problem(&file)?;
            let c = certify(&p, mode, norm, weights.get()?.as_deref())?;
            print!("{}", report::certified(&c));
        }
        Command::Ensemble {
            file,
            mode,
            weights,
            optimize,
            resolution,
        } => {
            let p = load_problem(&file)?;
            let m = p.resolve_mode(mode.mode)?;
            let w = weights.get()?;
            let spec = p.ensemble(m, w.as_deref())?;
            let mut out = String::new();
            for (j, member) in spec.members().iter().enumerate() {
                out.push_str(&format!("member {}:\n", j + 1));
                report::classifier(&mut out, member);
                report::certificate(&mut out, &s_certificate(member, m)?);
            }
            out.push_str(&format!("ensemble, weights {}:\n", list(spec.weights())));
            let ens = spec.ensemble_classifier()?;
            report::classifier(&mut out, &ens);
            report::certificate(&mut out, &s_certificate(&ens, m)?);
            if optimize {
                let best = optimize_weights(&spec.logit_view(), resolution)?;
                out.push_str(&format!(
                    "margin-maximizing weights: {} (margin {})\n",
                    list(&best.weights),
                    num(best.value)
                ));
            }
            print!("{out}");
        }
        Command::Regime { file, mode, weights } => {
            let p = load_problem(&file)?;
            let m = p.resolve_mode(mode.mode)?;
            let spec = p.ensemble(m, weights.get()?.as_deref())?;
            print!("{}", report::regime(&classify_regimes(&spec)?));
        }
        Command::Bound { kind } => bound(kind)?,
        Command::Simulate {
            k,
            n,
            draws,
            seed,
            resolution,
            uniform_only,
            out,
            summary,
        } => {
            let env = std::env::var(SEED_ENV).ok();
            let config = ExperimentConfig {
                classes: k,
                member_counts: n,
                draws,
                seed: effective_seed(seed, env.as_deref())?,
                optimize: !uniform_only,
                resolution,
            };
            let records = run_parallel(&config)?;
            match &out {
                Some(path) => write_csv(&records, io::BufWriter::new(fs::File::create(path)?))?,
                None => write_csv(&records, io::stdout().lock())?,
            }
            if summary {
                let s = summarize(&records)?;
                eprintln!("draws: {}", s.draws);
                eprintln!(
                    "gap regimes: gain {}, inconclusive {}, loss {}, zero {}",
                    num(s.gain_fraction),
                    num(s.inconclusive_fraction),
                    num(s.loss_fraction),
                    num(s.zero_gap_fraction)
                );
                if let Some(f) = s.optimized_above_best {
                    eprintln!("optimized margin above best member: {}", num(f));
                }
                eprintln!(
                    "mean margins: best member {}, worst member {}, uniform ensemble {}",
                    num(s.mean_best_member_margin),
                    num(s.mean_worst_member_margin),
                    num(s.mean_uniform_margin)
                );
                eprintln!("bound violations: {}", s.bound_violations);
            }
        }
        Command::Render { file, out, window } => {
            let p = load_problem(&file)?;
            let layers = svg::certificate_layers(&p)?;
            let text = svg::render(&layers, fixtures::window_of(&p, window))?;
            emit(out.as_deref(), &text)?;
        }
        Command::Examples { dir, write } => {
            if let Some(d) = write {
                fixtures::write_bundled(&d)?;
                println!("wrote {} fixtures to {}", fixtures::BUNDLED.len(), d.display());
                return Ok(());
            }
            let outcomes = match dir {
                Some(d) => fixtures::run_dir(&d)?,
                None => fixtures::run_bundled()?,
            };
            let width = outcomes.iter().map(|o| o.fixture.len()).max().unwrap_or(0);
            for o in &outcomes {
                println!(
                    "{}  {:width$}  {}  ({})",
                    if o.passed { "pass" } else { "FAIL" },
                    o.fixture,
                    o.check,
                    o.detail
                );
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!("{} checks, {failed} failed", outcomes.len());
            if failed > 0 {
                return Err(AppError::Mismatch(format!("{failed} fixture checks failed")));
            }
        }
    }
    Ok(())
}

fn bound(kind: BoundKind) -> Result<(), AppError> {
    match kind {
        BoundKind::GapGain { rbar, k } => {
            println!("{}", num(gap_gain_bound(rbar, k)?));
        }
        BoundKind::Damning { f1, f2 } => {
            let f1 = parse_list(&f1).map_err(AppError::Usage)?;
            let f2 = parse_list(&f2).map_err(AppError::Usage)?;
            match damning_alpha(&f1, &f2)? {
                Damning::Alpha(a) => {
                    let e = LogitEnsemble::new(vec![f1, f2], &[a, 1.0 - a])?;
                    println!("weight of first member: {}", num(a));
                    println!("ensemble logits: {}", list(&e.logits()));
                    println!("ensemble margin: {}", num(e.margin()));
                }
                Damning::AllAlphaTrivial => println!("every weighting has zero margin"),
            }
        }
        BoundKind::Radius { file, mode } => {
            let p = load_problem(&file)?;
            let spec = p.ensemble(p.resolve_mode(mode.mode)?, None)?;
            let b = radius_improvement_bound(&spec)?;
            let (gain, a) = best_radius_gain(&spec, 1000)?;
            println!("member radii: {}", list(&b.member_radii));
            println!("bound (statement form): {}", num(b.statement));
            println!("bound (proof form): {}", num(b.proof));
            println!("best gain on a 1e-3 weight grid: {} at first weight {}", num(gain), num(a));
        }
        BoundKind::Conditions { file, mode } => {
            let p = load_problem(&file)?;
            let spec = p.ensemble(p.resolve_mode(mode.mode)?, None)?;
            let holds = improvement_conditions(&spec)?;
            let (gain, a) = best_radius_gain(&spec, 1000)?;
            println!("conditions hold: {holds}");
            println!("best gain on a 1e-3 weight grid: {} at first weight {}", num(gain), num(a));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
