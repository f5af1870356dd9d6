//! Batch experiment front end: one subcommand per pipeline, JSON/CSV
//! reports that embed their full configuration and input hashes, and
//! deterministic output byte-for-byte reproducible from the embedded
//! configuration via `rerun`.
//!
//! Exit codes: 0 success, 1 algorithmic guarantee unmet (the report is
//! still written), 2 usage or I/O errors.

mod commands;
mod report;

use clap::{Parser, Subcommand};

use commands::{CmdResult, RunConfig};

#[derive(Parser)]
#[command(
    name = "sosround",
    version,
    about = "Moment-based rounding toolkit for sum-of-squares relaxations"
)]
struct Cli {
    /// Print the central table of default tolerances and constants and exit.
    #[arg(long, global = true, default_value_t = false)]
    show_defaults: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Maximize a nonnegative-coefficient form over the sphere.
    Nonneg {
        /// Variable count of a randomly generated form.
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Half the form's degree (the form has degree 2t).
        #[arg(long, default_value_t = 2)]
        t: usize,
        /// Additive accuracy parameter.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Polynomial text file (one `coeff e1 .. en` term per line)
        /// instead of a random instance.
        #[arg(long)]
        input: Option<String>,
        /// Write the per-iteration trace as JSON lines.
        #[arg(long)]
        emit_trace: Option<String>,
        #[arg(long)]
        out: Option<String>,
        /// Collect wall-clock timings (breaks byte-reproducibility).
        #[arg(long, default_value_t = false)]
        timings: bool,
    },
    /// Planted-sparse-vector recovery phase sweep.
    Planted {
        #[arg(long, default_value_t = 256)]
        n: usize,
        /// Subspace dimensions, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "10")]
        d_list: Vec<usize>,
        /// Sparsity fractions, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.02,0.1,0.4")]
        mu_list: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Planted pattern: boolean or signed.
        #[arg(long, default_value = "boolean")]
        pattern: String,
        #[arg(long)]
        out: Option<String>,
        #[arg(long, default_value_t = false)]
        timings: bool,
    },
    /// Analytically-sparse-vector search on a planted instance or a
    /// basis file.
    Asvp {
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        d: usize,
        #[arg(long, default_value_t = 0.02)]
        mu: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Basis matrix file (float64 format with a JSON header line);
        /// columns span the subspace and are orthonormalized on load.
        #[arg(long)]
        basis: Option<String>,
        #[arg(long)]
        out: Option<String>,
        #[arg(long, default_value_t = false)]
        timings: bool,
    },
    /// Epsilon-net maximization of a random sum-of-squares-of-quadratics.
    Lowrank {
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
        #[arg(long, default_value_t = false)]
        timings: bool,
    },
    /// Small-set-expansion certification on a noisy hypercube.
    Sse {
        #[arg(long, default_value_t = 8)]
        cayley_l: usize,
        #[arg(long, default_value_t = 0.9)]
        rho: f64,
        /// Make the first k bits sticky, planting a non-expanding subcube.
        #[arg(long, default_value_t = 0)]
        heavy_bits: usize,
        /// Edge-list file (`u v weight` per line) instead of a hypercube;
        /// requires --graph-n.
        #[arg(long)]
        graph: Option<String>,
        #[arg(long, default_value_t = 0)]
        graph_n: usize,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, default_value_t = 0.2)]
        delta: f64,
        #[arg(long, default_value_t = 0.125)]
        mu: f64,
        /// `cayley-nonneg` or `asvp`.
        #[arg(long, default_value = "asvp")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
        #[arg(long, default_value_t = false)]
        timings: bool,
    },
    /// Re-run the configuration embedded in a report file.
    Rerun {
        /// Path of a previously written JSON report.
        config: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Print the central table of default tolerances and constants.
    ShowDefaults,
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(CmdResult {
            guarantee_met: true,
            ..
        }) => 0,
        Ok(CmdResult {
            guarantee_met: false,
            ..
        }) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}

/// Solver overrides from the environment (`SOSROUND_SOLVER_TOL`,
/// `SOSROUND_SOLVER_MAX_ITER`), resolved into the embedded configuration so
/// that `rerun` reproduces the run regardless of the environment.
fn resolved_solver() -> (f64, usize) {
    let d = sos_core::Defaults::default();
    let tol = std::env::var("SOSROUND_SOLVER_TOL")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(d.solver_tol);
    let max_iter = std::env::var("SOSROUND_SOLVER_MAX_ITER")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(d.solver_max_iter);
    (tol, max_iter)
}

fn print_defaults() -> CmdResult {
    let defaults = sos_core::Defaults::default();
    println!(
        "{}",
        serde_json::to_string_pretty(&defaults).expect("defaults serialize")
    );
    CmdResult {
        guarantee_met: true,
        report: String::new(),
    }
}

fn dispatch(cli: Cli) -> Result<CmdResult, String> {
    let (solver_tol, solver_max_iter) = resolved_solver();
    if cli.show_defaults {
        return Ok(print_defaults());
    }
    let command = cli
        .command
        .ok_or_else(|| "no subcommand given (try --help or --show-defaults)".to_string())?;
    match command {
        Command::Nonneg {
            n,
            t,
            eps,
            seed,
            input,
            emit_trace,
            out,
            timings,
        } => {
            let cfg = RunConfig::Nonneg {
                n,
                t,
                eps,
                seed,
                input,
                emit_trace,
                timings,
            };
            commands::run(&cfg, out.as_deref())
        }
        Command::Planted {
            n,
            d_list,
            mu_list,
            seeds,
            seed,
            pattern,
            out,
            timings,
        } => {
            let cfg = RunConfig::Planted {
                n,
                d_list,
                mu_list,
                seeds,
                seed,
                pattern,
                timings,
                solver_tol,
                solver_max_iter,
            };
            commands::run(&cfg, out.as_deref())
        }
        Command::Asvp {
            n,
            d,
            mu,
            seed,
            basis,
            out,
            timings,
        } => {
            let cfg = RunConfig::Asvp {
                n,
                d,
                mu,
                seed,
                basis,
                timings,
            };
            commands::run(&cfg, out.as_deref())
        }
        Command::Lowrank {
            r,
            n,
            eps,
            seed,
            out,
            timings,
        } => {
            let cfg = RunConfig::Lowrank {
                r,
                n,
                eps,
                seed,
                timings,
            };
            commands::run(&cfg, out.as_deref())
        }
        Command::Sse {
            cayley_l,
            rho,
            heavy_bits,
            graph,
            graph_n,
            lambda,
            delta,
            mu,
            mode,
            seed,
            out,
            timings,
        } => {
            let cfg = RunConfig::Sse {
                cayley_l,
                rho,
                heavy_bits,
                graph,
                graph_n,
                lambda,
                delta,
                mu,
                mode,
                seed,
                timings,
                solver_tol,
                solver_max_iter,
            };
            commands::run(&cfg, out.as_deref())
        }
        Command::Rerun { config, out } => {
            let bytes = std::fs::read(&config).map_err(|e| format!("{config}: {e}"))?;
            let envelope: serde_json::Value =
                serde_json::from_slice(&bytes).map_err(|e| format!("{config}: {e}"))?;
            let cfg_value = envelope
                .get("config")
                .ok_or_else(|| format!("{config}: no embedded config"))?;
            let cfg: RunConfig = serde_json::from_value(cfg_value.clone())
                .map_err(|e| format!("{config}: bad embedded config: {e}"))?;
            commands::run(&cfg, out.as_deref())
        }
        Command::ShowDefaults => Ok(print_defaults()),
    }
}
