mod commands;
mod config;
mod manifest;

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use config::{Mode, RunConfig};
use manifest::Manifest;
use wallx::WallxError;

#[derive(Parser, Debug)]
#[command(name = "wallx", version, about = "Exact wall-crossing and Hall algebra computations")]
struct Cli {
    /// TOML file with defaults for height, q, cutoff, mode, output, seed and threads.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the JSON document to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Ray decomposition and factorization check of stability data.
    Factorize {
        /// JSON file, or `-` for stdin.
        #[arg(long)]
        input: String,
        /// Sector `start,end` in units of π.
        #[arg(long, allow_hyphen_values = true)]
        sector: Option<String>,
    },
    /// Move stability data to its `new_charge`.
    Wallcross {
        #[arg(long)]
        input: String,
        /// Realize ray factors as n×n matrices.
        #[arg(long)]
        matrix: Option<usize>,
    },
    /// Classify an A_2 point.
    A2Classify {
        /// `θ01,θ12,θ02`.
        #[arg(long, conflicts_with = "alphas", allow_hyphen_values = true)]
        theta: Option<String>,
        /// `α1,α2`.
        #[arg(long, allow_hyphen_values = true)]
        alphas: Option<String>,
    },
    /// Check the Hall wall-crossing identity on interval splits.
    WcfVerify {
        #[arg(long, value_delimiter = ',')]
        q: Vec<u64>,
        #[arg(long)]
        cutoff: Option<String>,
        /// `θ1,θ2,θ3`; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        thetas: Vec<String>,
        /// `θ01,θ12,θ02` of the stability condition.
        #[arg(long, default_value = "0,3/5,3/10", allow_hyphen_values = true)]
        point: String,
        /// ALL, I, II or III; defaults to the first admissible type.
        #[arg(long = "type")]
        stype: Option<String>,
        /// Indecomposable cones only, symbolic in L.
        #[arg(long)]
        restricted: bool,
        #[arg(long)]
        ascending: bool,
    },
    /// Classify a grid of A_2 points against the oracle.
    Regions {
        #[arg(long, default_value_t = 100)]
        grid: usize,
        #[arg(long, default_value = "-3", allow_hyphen_values = true)]
        lo: String,
        #[arg(long, default_value = "3", allow_hyphen_values = true)]
        hi: String,
    },
    /// Compare the symbolic Hom/Ext and Hall calculus with F_q counts.
    HallOracle {
        #[arg(long, value_delimiter = ',')]
        q: Vec<u64>,
        /// Largest n of A_n.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Random associativity triples in A_2.
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
}

pub struct Outcome {
    pub pass: bool,
    pub arguments: serde_json::Value,
    pub input: Vec<u8>,
    pub result: serde_json::Value,
    pub text: String,
}

pub enum Failure {
    Usage(String),
    Engine(WallxError),
}

impl From<WallxError> for Failure {
    fn from(e: WallxError) -> Self {
        match e {
            WallxError::Parse(_) => Failure::Usage(e.to_string()),
            e => Failure::Engine(e),
        }
    }
}

pub fn read_input(path: &str) -> Result<Vec<u8>, Failure> {
    if path == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf).map_err(|e| Failure::Usage(e.to_string()))?;
        return Ok(buf);
    }
    std::fs::read(Path::new(path)).map_err(|e| Failure::Usage(format!("{path}: {e}")))
}

fn init_threads(cfg: &RunConfig) {
    let env = std::env::var("WALLX_THREADS").ok().and_then(|v| v.parse::<usize>().ok());
    if let Some(n) = env.or(cfg.threads).filter(|n| *n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(p) => match RunConfig::load(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => RunConfig::default(),
    };
    init_threads(&cfg);
    let mode = cli.mode.or(cfg.mode).unwrap_or_default();
    let out = cli.out.clone().or(cfg.output.clone());
    let (name, res) = match cli.cmd {
        Cmd::Factorize { input, sector } => ("factorize", commands::factorize(&input, sector.as_deref(), &cfg, mode)),
        Cmd::Wallcross { input, matrix } => ("wallcross", commands::wallcross(&input, matrix, &cfg, mode)),
        Cmd::A2Classify { theta, alphas } => ("a2-classify", commands::a2_classify(theta.as_deref(), alphas.as_deref(), mode)),
        Cmd::WcfVerify { q, cutoff, thetas, point, stype, restricted, ascending } => (
            "wcf-verify",
            commands::wcf_verify(
                commands::WcfArgs { q, cutoff, thetas, point, stype, restricted, ascending },
                &cfg,
                mode,
            ),
        ),
        Cmd::Regions { grid, lo, hi } => ("regions", commands::regions(grid, &lo, &hi)),
        Cmd::HallOracle { q, n, samples } => ("hall-oracle", commands::hall_oracle(q, n, samples, &cfg)),
    };
    match res {
        Ok(o) => {
            let manifest = Manifest::new(name, o.arguments.clone(), &o.input, &o.result, mode);
            let doc = json!({ "pass": o.pass, "result": o.result, "manifest": manifest });
            let pretty = serde_json::to_string_pretty(&doc).expect("document serializes");
            if let Some(p) = &out {
                if let Err(e) = std::fs::write(p, format!("{pretty}\n")) {
                    eprintln!("error: {}: {e}", p.display());
                    return ExitCode::from(3);
                }
            }
            if cli.json {
                println!("{pretty}");
            } else {
                print!("{}", o.text);
                println!("{}", if o.pass { "PASS" } else { "FAIL" });
                println!("input sha256 {}", manifest.input_sha256);
            }
            ExitCode::from(if o.pass { 0 } else { 1 })
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Engine(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
