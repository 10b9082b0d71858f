//! Command-line front end.
//!
//! ```text
//! longroot find-long-root descriptor.json --seed 7 --verify --out run.jsonl
//! longroot check-pcore   descriptor.json --epsilon 0.05
//! longroot verify        descriptor.json
//! longroot stats         descriptor.json --workers 4
//! longroot bench         descriptors.json --out bench.jsonl
//! ```
//!
//! A descriptor is a JSON object {"family", "n", "p", "k", ...}; `bench`
//! also accepts a JSON array of descriptors. Arguments starting with `{`
//! are treated as inline JSON instead of a path.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use longroot::cli::{self, RunConfig, EXIT_BAD_INPUT};

#[derive(Parser, Debug)]
#[command(name = "longroot", version, about = "Monte-Carlo long root SL2(q) construction and p-core recognition in black-box matrix groups")]
struct Args {
    /// One of: find-long-root, check-pcore, verify, stats, bench.
    command: String,
    /// Path to a JSON group descriptor (or inline JSON).
    descriptor: String,
    /// Master seed; all randomness derives from it through named streams.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Target error probability in (0, 1).
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Parallel sampling workers for the estimators.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Product-replacement slot count override.
    #[arg(long)]
    slots: Option<usize>,
    /// Product-replacement burn-in moves.
    #[arg(long, default_value_t = 100)]
    burn_in: usize,
    /// Run the white-box verifier on the output of find-long-root.
    #[arg(long, default_value_t = false)]
    verify: bool,
    /// zeta outputs collected per centralizer.
    #[arg(long)]
    samples_centralizer: Option<usize>,
    /// zeta-1 samples per pseudo-involution acceptance trial.
    #[arg(long)]
    samples_zeta: Option<usize>,
    /// Accepted pseudo-involution trials (error <= (23/24)^m).
    #[arg(long)]
    samples_pseudo_m: Option<usize>,
    /// Restart budget for the main construction.
    #[arg(long)]
    max_restarts: Option<usize>,
    /// Transcript output path (JSON lines).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_descriptor(arg: &str) -> Result<String, String> {
    if arg.trim_start().starts_with('{') || arg.trim_start().starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| format!("cannot read {arg}: {e}"))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let rc = RunConfig {
        seed: args.seed,
        epsilon: args.epsilon,
        workers: args.workers,
        slots: args.slots,
        burn_in: args.burn_in,
        verify: args.verify,
        samples_centralizer: args.samples_centralizer,
        samples_zeta: args.samples_zeta,
        samples_pseudo_m: args.samples_pseudo_m,
        max_restarts: args.max_restarts,
        out: args.out.clone(),
    };
    let text = match read_descriptor(&args.descriptor) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_BAD_INPUT as u8);
        }
    };

    // bench over a list
    if args.command == "bench" && text.trim_start().starts_with('[') {
        let specs: Vec<longroot::matgrp::GroupSpec> = match serde_json::from_str(&text) {
            Ok(v) => v,
            Err(e) => {
                eprintln!("bad descriptor list: {e}");
                return ExitCode::from(EXIT_BAD_INPUT as u8);
            }
        };
        let mut worst = 0i32;
        let mut lines = Vec::new();
        let mut jsonl = String::new();
        for spec in &specs {
            let out = cli::dispatch("bench", spec, &rc);
            lines.push(out.summary.clone());
            jsonl.push_str(&out.transcript.to_jsonl());
            worst = worst.max(out.exit_code);
        }
        for l in &lines {
            println!("{l}");
        }
        if let Some(path) = &args.out {
            if let Err(e) = std::fs::write(path, jsonl) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_BAD_INPUT as u8);
            }
        }
        return ExitCode::from(worst as u8);
    }

    let spec = match cli::parse_descriptor(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("bad descriptor: {e}");
            return ExitCode::from(EXIT_BAD_INPUT as u8);
        }
    };
    let out = cli::dispatch(&args.command, &spec, &rc);
    println!("{}", out.summary);
    if let Some(path) = &args.out {
        if let Err(e) = std::fs::write(path, out.transcript.to_jsonl()) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_BAD_INPUT as u8);
        }
    }
    ExitCode::from(out.exit_code as u8)
}
