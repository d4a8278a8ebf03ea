//! Command-line wiring: JSON in, JSON out, deterministic given `--seed`.
//!
//! Exit codes: 0 success (including a `not_retrievable` verdict), 2 on
//! validation errors, 3 on an inconclusive certification, 64 on unknown
//! commands or flags (usage goes to stderr).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use framestab::io::{
    CertificateDocument, FrameDocument, FrameMetadata, GeodesicDocument, LocalBoundsDocument,
    MatrixDocument,
};
use framestab::{
    certify, estimate_b0, generate_frame, geodesic, global_upper_bounds, local_bounds,
    GeneratorKind, MetricKind, SearchConfig, Verdict,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser)]
#[command(
    name = "framestab",
    version,
    about = "Stability bounds for matrix-frame phase retrieval",
    disable_help_subcommand = true
)]
struct Cli {
    /// Worker threads for the multistart searches (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GeneratorArg {
    Pauli,
    RandomHermitian,
    RandomRank1,
}

impl From<GeneratorArg> for GeneratorKind {
    fn from(g: GeneratorArg) -> Self {
        match g {
            GeneratorArg::Pauli => GeneratorKind::Pauli,
            GeneratorArg::RandomHermitian => GeneratorKind::RandomHermitian,
            GeneratorArg::RandomRank1 => GeneratorKind::RandomRank1,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    /// min over U of ||x - yU|| times ||x + yU||.
    #[value(name = "d")]
    Product,
    /// min over U of ||x - yU||.
    #[value(name = "D")]
    Min,
    /// max over U of ||x - yU||.
    #[value(name = "Dprime")]
    Max,
}

impl From<MetricArg> for MetricKind {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Product => MetricKind::AlignProduct,
            MetricArg::Min => MetricKind::AlignMin,
            MetricArg::Max => MetricKind::AlignMax,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a measurement frame and write it as JSON.
    GenFrame {
        #[arg(long = "type", value_enum)]
        kind: GeneratorArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Quotient distance between two representatives.
    Dist {
        #[arg(long, value_enum)]
        metric: MetricArg,
        x: PathBuf,
        y: PathBuf,
    },
    /// Local Lipschitz bounds of the analysis maps at a point.
    Analyze {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        z: PathBuf,
    },
    /// Phase-retrievability certification.
    Certify {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Bures-Wasserstein geodesic between two PSD matrices.
    Geodesic {
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(long = "B")]
        b: PathBuf,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Global upper constants of the analysis maps.
    Upper {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Configuration echo carried by every report.
#[derive(Serialize)]
struct Echo {
    version: &'static str,
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    starts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    threads: Option<usize>,
}

impl Echo {
    fn new(command: &'static str) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed: None,
            starts: None,
            tol: None,
            threads: None,
        }
    }
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    config: Echo,
    #[serde(flatten)]
    body: T,
}

enum Failure {
    Validation(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Validation(e.to_string())
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Validation(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn emit<W: Write, T: Serialize>(out: &mut W, report: &T) {
    let text = serde_json::to_string_pretty(report).expect("reports serialize");
    // Tolerate closed pipes on the consumer side.
    let _ = writeln!(out, "{text}");
}

fn search_config(starts: usize, seed: u64, tol: f64) -> SearchConfig {
    SearchConfig {
        starts,
        seed,
        grad_tol: tol,
        ..SearchConfig::default()
    }
}

#[cfg(feature = "parallel")]
fn install_thread_pool(threads: Option<usize>) {
    if let Some(t) = threads {
        // Ignore the error when a global pool already exists (repeat calls
        // in one process, e.g. from tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn install_thread_pool(_threads: Option<usize>) {}

fn dispatch<W: Write>(cli: Cli, out: &mut W) -> Result<i32, Failure> {
    install_thread_pool(cli.threads);
    let threads = cli.threads;
    match cli.command {
        Command::GenFrame {
            kind,
            n,
            r,
            m,
            seed,
            output,
        } => {
            let generator = match kind {
                GeneratorArg::Pauli => "pauli",
                GeneratorArg::RandomHermitian => "random-hermitian",
                GeneratorArg::RandomRank1 => "random-rank1",
            };
            let frame = generate_frame(kind.into(), n, r, m, seed)?;
            let doc = FrameDocument::from_frame(
                &frame,
                FrameMetadata {
                    generator: generator.to_string(),
                    seed,
                },
            );
            write_json(&output, &doc)?;
            #[derive(Serialize)]
            struct Body {
                output: String,
                n: usize,
                r: usize,
                m: usize,
                psd: bool,
                spans_sym: bool,
            }
            let mut config = Echo::new("gen-frame");
            config.seed = Some(seed);
            config.threads = threads;
            emit(
                out,
                &Report {
                    config,
                    body: Body {
                        output: output.display().to_string(),
                        n,
                        r,
                        m,
                        psd: frame.is_psd(),
                        spans_sym: frame.spans_sym(),
                    },
                },
            );
            Ok(EXIT_OK)
        }
        Command::Dist { metric, x, y } => {
            let xd: MatrixDocument = read_json(&x)?;
            let yd: MatrixDocument = read_json(&y)?;
            let xm = xd.to_complex()?;
            let ym = yd.to_complex()?;
            let d = framestab::distance(&xm, &ym, metric.into())?;
            #[derive(Serialize)]
            struct Body {
                distance: f64,
            }
            let mut config = Echo::new("dist");
            config.threads = threads;
            emit(
                out,
                &Report {
                    config,
                    body: Body { distance: d },
                },
            );
            Ok(EXIT_OK)
        }
        Command::Analyze { frame, z } => {
            let frame = read_json::<FrameDocument>(&frame)?.to_frame()?;
            let zm = read_json::<MatrixDocument>(&z)?.to_complex()?;
            if zm.norm() == 0.0 {
                return Err(Failure::Validation("z must be nonzero".into()));
            }
            let bounds = local_bounds(&frame, &zm)?;
            let mut config = Echo::new("analyze");
            config.threads = threads;
            emit(
                out,
                &Report {
                    config,
                    body: LocalBoundsDocument::from(&bounds),
                },
            );
            Ok(EXIT_OK)
        }
        Command::Certify {
            frame,
            starts,
            seed,
            tol,
        } => {
            let frame = read_json::<FrameDocument>(&frame)?.to_frame()?;
            let cfg = search_config(starts, seed, tol);
            let cert = certify(&frame, &cfg)?;
            let mut config = Echo::new("certify");
            config.seed = Some(seed);
            config.starts = Some(starts);
            config.tol = Some(tol);
            config.threads = threads;
            emit(
                out,
                &Report {
                    config,
                    body: CertificateDocument::from(&cert),
                },
            );
            Ok(if cert.verdict == Verdict::Inconclusive {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            })
        }
        Command::Geodesic {
            a,
            b,
            samples,
            output,
        } => {
            if samples < 2 {
                return Err(Failure::Validation("need at least 2 samples".into()));
            }
            let am = read_json::<MatrixDocument>(&a)?.to_matrix()?;
            let bm = read_json::<MatrixDocument>(&b)?.to_matrix()?;
            let ap = framestab::PsdPoint::new(am)?;
            let bp = framestab::PsdPoint::new(bm)?;
            let ts: Vec<f64> = (0..samples)
                .map(|i| i as f64 / (samples - 1) as f64)
                .collect();
            let path = geodesic(&ap, &bp, &ts)?;
            write_json(&output, &GeodesicDocument::from(&path))?;
            #[derive(Serialize)]
            struct Body {
                output: String,
                samples: usize,
                rank_x: usize,
                rank_y: usize,
            }
            let mut config = Echo::new("geodesic");
            config.threads = threads;
            emit(
                out,
                &Report {
                    config,
                    body: Body {
                        output: output.display().to_string(),
                        samples,
                        rank_x: ap.rank(),
                        rank_y: bp.rank(),
                    },
                },
            );
            Ok(EXIT_OK)
        }
        Command::Upper {
            frame,
            starts,
            seed,
        } => {
            let frame = read_json::<FrameDocument>(&frame)?.to_frame()?;
            let cfg = search_config(starts, seed, SearchConfig::default().grad_tol);
            let bounds = global_upper_bounds(&frame, &cfg);
            let b0 = estimate_b0(&frame, &cfg)?;
            #[derive(Serialize)]
            struct Body {
                b0: f64,
                b01: f64,
                upper_frame_bound: f64,
                alpha_interpretation: bool,
            }
            let mut config = Echo::new("upper");
            config.seed = Some(seed);
            config.starts = Some(starts);
            config.threads = threads;
            emit(
                out,
                &Report {
                    config,
                    body: Body {
                        b0: b0.b0,
                        b01: bounds.b01,
                        upper_frame_bound: bounds.upper_frame_bound,
                        alpha_interpretation: bounds.alpha_interpretation,
                    },
                },
            );
            Ok(EXIT_OK)
        }
    }
}

/// Parses and runs a command line; returns the process exit code. JSON
/// reports go to `out`, diagnostics to stderr.
pub fn run<W: Write>(args: Vec<String>, out: &mut W) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    EXIT_OK
                }
                _ => {
                    eprintln!("{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            EXIT_VALIDATION
        }
    }
}
