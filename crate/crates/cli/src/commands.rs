use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use sos_core::asvp::{asvp_search, AsvpConfig, Subroutine};
use sos_core::graph::RegularGraph;
use sos_core::io::{content_hash, polynomial_from_text};
use sos_core::lowrank::{lowrank_norm, sphere_grid_max, LowRankForm};
use sos_core::nonneg::{
    equal_value_two_point_source, maximize_nonneg, LoopStatus, MomentSource, NonnegMaxConfig,
};
use sos_core::planted::{phase_sweep, Pattern, PlantedConfig};
use sos_core::seeds;
use sos_core::sse::{sse_certify, SseCertifyConfig, SseMode, SseVerdict};
use sos_core::subspace::{Measure, Subspace};
use sos_core::tensor::TensorForm;
use sos_core::Defaults;

use crate::report::{render, Envelope};

/// Fully resolved run configuration; a report embeds it and `rerun`
/// reproduces the report from it byte-for-byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    Nonneg {
        n: usize,
        t: usize,
        eps: f64,
        seed: u64,
        input: Option<String>,
        emit_trace: Option<String>,
        timings: bool,
    },
    Planted {
        n: usize,
        d_list: Vec<usize>,
        mu_list: Vec<f64>,
        seeds: usize,
        seed: u64,
        pattern: String,
        timings: bool,
        solver_tol: f64,
        solver_max_iter: usize,
    },
    Asvp {
        n: usize,
        d: usize,
        mu: f64,
        seed: u64,
        basis: Option<String>,
        timings: bool,
    },
    Lowrank {
        r: usize,
        n: usize,
        eps: f64,
        seed: u64,
        timings: bool,
    },
    Sse {
        cayley_l: usize,
        rho: f64,
        heavy_bits: usize,
        graph: Option<String>,
        graph_n: usize,
        lambda: f64,
        delta: f64,
        mu: f64,
        mode: String,
        seed: u64,
        timings: bool,
        solver_tol: f64,
        solver_max_iter: usize,
    },
}

pub struct CmdResult {
    pub guarantee_met: bool,
    pub report: String,
}

pub fn run(cfg: &RunConfig, out: Option<&str>) -> Result<CmdResult, String> {
    let result = match cfg {
        RunConfig::Nonneg { .. } => cmd_nonneg(cfg),
        RunConfig::Planted { .. } => cmd_planted(cfg, out),
        RunConfig::Asvp { .. } => cmd_asvp(cfg),
        RunConfig::Lowrank { .. } => cmd_lowrank(cfg),
        RunConfig::Sse { .. } => cmd_sse(cfg),
    }?;
    match out {
        Some(path) => {
            std::fs::write(path, result.report.as_bytes()).map_err(|e| format!("{path}: {e}"))?
        }
        None => print!("{}", result.report),
    }
    Ok(result)
}

fn config_hash(cfg: &RunConfig, extra: &[u8]) -> String {
    let mut bytes = serde_json::to_vec(cfg).expect("config serializes");
    bytes.extend_from_slice(extra);
    content_hash(&bytes)
}

#[derive(Serialize)]
struct NonnegResults {
    value: f64,
    source_value: f64,
    spectral_norm: f64,
    margin: f64,
    margin_ok: bool,
    status: LoopStatus,
    conditioning_steps: usize,
    iterations: usize,
    budget: usize,
    candidate: Vec<f64>,
    t_total_ms: Option<f64>,
}

fn cmd_nonneg(cfg: &RunConfig) -> Result<CmdResult, String> {
    let RunConfig::Nonneg {
        n,
        t,
        eps,
        seed,
        input,
        emit_trace,
        timings,
    } = cfg
    else {
        unreachable!()
    };
    let t0 = std::time::Instant::now();
    let (form, extra_hash) = match input {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
            let poly = polynomial_from_text(&text, *n).map_err(|e| e.to_string())?;
            let form = TensorForm::new(poly, Measure::Counting).map_err(|e| e.to_string())?;
            (form, text.into_bytes())
        }
        None => {
            let mut rng = seeds::rng(*seed, seeds::STREAM_INSTANCE);
            let poly = seeds::random_nonneg_form(&mut rng, *n, 2 * t, 4 * n);
            let form = TensorForm::new(poly, Measure::Counting).map_err(|e| e.to_string())?;
            (form, Vec::new())
        }
    };
    let norm = form.spectral_norm().map_err(|e| e.to_string())?;
    if norm <= 0.0 {
        return Err("degenerate zero form".into());
    }
    let form = TensorForm::new(form.poly().scale(1.0 / norm), Measure::Counting)
        .map_err(|e| e.to_string())?;
    let mut rng = seeds::rng(*seed, seeds::STREAM_ROUNDING);
    let (dist, c) = equal_value_two_point_source(&form, &mut rng).map_err(|e| e.to_string())?;
    let config = NonnegMaxConfig::new(*eps);
    let (x, trace) = maximize_nonneg(&form, MomentSource::Empirical(dist), &config)
        .map_err(|e| e.to_string())?;
    let value = form.evaluate(x.as_slice()).map_err(|e| e.to_string())?;
    let margin = value - (c - 4.0 * eps * 1.0);
    let margin_ok = margin >= -1e-9;

    if let Some(path) = emit_trace {
        let mut lines = String::new();
        for rec in &trace.records {
            lines.push_str(&serde_json::to_string(rec).expect("trace record serializes"));
            lines.push('\n');
        }
        std::fs::write(path, lines).map_err(|e| format!("{path}: {e}"))?;
    }

    let results = NonnegResults {
        value,
        source_value: c,
        spectral_norm: 1.0,
        margin,
        margin_ok,
        status: trace.status,
        conditioning_steps: trace.conditioning_steps,
        iterations: trace.records.len(),
        budget: trace.budget,
        candidate: x.as_slice().to_vec(),
        t_total_ms: timings.then(|| t0.elapsed().as_secs_f64() * 1e3),
    };
    let envelope = Envelope {
        schema: 1,
        command: "nonneg",
        config: cfg.clone(),
        input_hash: config_hash(cfg, &extra_hash),
        guarantee_met: margin_ok,
        results,
    };
    Ok(CmdResult {
        guarantee_met: margin_ok,
        report: render(&envelope),
    })
}

#[derive(Serialize)]
struct PlantedResults {
    cells: serde_json::Value,
    mu0_echo: Vec<(usize, f64)>,
    monotonicity_violations: Vec<(usize, f64, f64)>,
    csv: String,
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

fn cmd_planted(cfg: &RunConfig, out: Option<&str>) -> Result<CmdResult, String> {
    let RunConfig::Planted {
        n,
        d_list,
        mu_list,
        seeds: per_cell,
        seed,
        pattern,
        timings,
        solver_tol,
        solver_max_iter,
    } = cfg
    else {
        unreachable!()
    };
    let pattern = match pattern.as_str() {
        "boolean" => Pattern::Boolean,
        "signed" => Pattern::Signed,
        other => return Err(format!("unknown pattern {other:?} (boolean|signed)")),
    };
    let mut pcfg = PlantedConfig::default();
    pcfg.solver_tol = *solver_tol;
    pcfg.solver_max_iter = *solver_max_iter;
    let table = phase_sweep(
        *n, d_list, mu_list, *per_cell, *seed, pattern, &pcfg, *timings,
    )
    .map_err(|e| e.to_string())?;

    let mut csv = String::from("d,mu,n,seed,stage1_corr,stage2_corr,success,t_sdp_ms,t_lp_ms\n");
    for r in &table.records {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.d,
            r.mu,
            r.n,
            r.seed,
            r.stage1_corr,
            r.stage2_corr,
            r.success,
            fmt_opt(r.t_sdp_ms),
            fmt_opt(r.t_lp_ms),
        ));
    }
    if let Some(path) = out {
        let csv_path = format!("{path}.csv");
        std::fs::write(&csv_path, csv.as_bytes()).map_err(|e| format!("{csv_path}: {e}"))?;
    }

    let guarantee_met = table.monotonicity_violations.is_empty();
    let results = PlantedResults {
        cells: serde_json::to_value(&table.cells).expect("cells serialize"),
        mu0_echo: table.mu0_echo.clone(),
        monotonicity_violations: table.monotonicity_violations.clone(),
        csv,
    };
    let envelope = Envelope {
        schema: 1,
        command: "planted",
        config: cfg.clone(),
        input_hash: config_hash(cfg, &[]),
        guarantee_met,
        results,
    };
    Ok(CmdResult {
        guarantee_met,
        report: render(&envelope),
    })
}

#[derive(Serialize)]
struct AsvpResults {
    ratio: f64,
    winner: Subroutine,
    per_subroutine: Vec<(Subroutine, f64)>,
    threshold: f64,
    threshold_met: bool,
    membership_residual: f64,
    t_total_ms: Option<f64>,
}

fn cmd_asvp(cfg: &RunConfig) -> Result<CmdResult, String> {
    let RunConfig::Asvp {
        n,
        d,
        mu,
        seed,
        basis,
        timings,
    } = cfg
    else {
        unreachable!()
    };
    let t0 = std::time::Instant::now();
    let (space, extra_hash) = match basis {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| format!("{path}: {e}"))?;
            let raw =
                sos_core::io::read_matrix(&mut bytes.as_slice()).map_err(|e| e.to_string())?;
            let space =
                Subspace::from_spanning(&raw, Measure::Expectation).map_err(|e| e.to_string())?;
            (space, bytes)
        }
        None => {
            let inst = sos_core::planted::generate_instance(*n, *d, *mu, Pattern::Boolean, *seed)
                .map_err(|e| e.to_string())?;
            (inst.space, Vec::new())
        }
    };
    let acfg = AsvpConfig::new(*seed);
    let res = asvp_search(&space, *mu, &acfg).map_err(|e| e.to_string())?;
    let c0 = Defaults::default().asvp_c0;
    let rank = space.dim() as f64;
    let threshold = c0 / (mu * rank.powf(1.0 / 3.0));
    let threshold_met = res.ratio >= threshold;
    let results = AsvpResults {
        ratio: res.ratio,
        winner: res.winner,
        per_subroutine: res.per_subroutine,
        threshold,
        threshold_met,
        membership_residual: res.membership_residual,
        t_total_ms: timings.then(|| t0.elapsed().as_secs_f64() * 1e3),
    };
    let envelope = Envelope {
        schema: 1,
        command: "asvp",
        config: cfg.clone(),
        input_hash: config_hash(cfg, &extra_hash),
        guarantee_met: threshold_met,
        results,
    };
    Ok(CmdResult {
        guarantee_met: threshold_met,
        report: render(&envelope),
    })
}

#[derive(Serialize)]
struct LowrankResults {
    value: f64,
    grid_oracle: f64,
    relative_gap: f64,
    gap_ok: bool,
    lambda: Vec<f64>,
    t_total_ms: Option<f64>,
}

fn cmd_lowrank(cfg: &RunConfig) -> Result<CmdResult, String> {
    let RunConfig::Lowrank {
        r,
        n,
        eps,
        seed,
        timings,
    } = cfg
    else {
        unreachable!()
    };
    let t0 = std::time::Instant::now();
    let mut rng = seeds::rng(*seed, seeds::STREAM_INSTANCE);
    let quads: Vec<DMatrix<f64>> = (0..*r)
        .map(|_| {
            let g = DMatrix::from_fn(*n, *n, |_, _| seeds::standard_normal(&mut rng));
            (&g + g.transpose()) * 0.5
        })
        .collect();
    let form = LowRankForm::new(quads).map_err(|e| e.to_string())?;
    let result = lowrank_norm(&form, *eps).map_err(|e| e.to_string())?;
    let grid = sphere_grid_max(|x: &DVector<f64>| form.evaluate(x), *n, 10_000, *seed);
    let relative_gap = (result.value - grid).abs() / grid.max(1e-12);
    let gap_ok = relative_gap <= 0.15;
    let results = LowrankResults {
        value: result.value,
        grid_oracle: grid,
        relative_gap,
        gap_ok,
        lambda: result.lambda.as_slice().to_vec(),
        t_total_ms: timings.then(|| t0.elapsed().as_secs_f64() * 1e3),
    };
    let envelope = Envelope {
        schema: 1,
        command: "lowrank",
        config: cfg.clone(),
        input_hash: config_hash(cfg, &[]),
        guarantee_met: gap_ok,
        results,
    };
    Ok(CmdResult {
        guarantee_met: gap_ok,
        report: render(&envelope),
    })
}

#[derive(Serialize)]
struct SseResults {
    verdict: SseVerdict,
    upper_bound_ratio: Option<f64>,
    witness_ratio: Option<f64>,
    set: Option<Vec<usize>>,
    set_measure: Option<f64>,
    expansion: Option<f64>,
    collision_probability: Option<f64>,
    delta_used: Option<f64>,
    t_total_ms: Option<f64>,
}

fn cmd_sse(cfg: &RunConfig) -> Result<CmdResult, String> {
    let RunConfig::Sse {
        cayley_l,
        rho,
        heavy_bits,
        graph: graph_file,
        graph_n,
        lambda,
        delta,
        mu,
        mode,
        seed,
        timings,
        solver_tol,
        solver_max_iter,
    } = cfg
    else {
        unreachable!()
    };
    let t0 = std::time::Instant::now();
    let (graph, extra_hash) = match graph_file {
        Some(path) => {
            if *graph_n == 0 {
                return Err("--graph requires --graph-n".into());
            }
            let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
            let g = RegularGraph::from_edge_list(&text, *graph_n).map_err(|e| e.to_string())?;
            (g, text.into_bytes())
        }
        None => {
            if *heavy_bits > *cayley_l {
                return Err("heavy_bits exceeds the cube dimension".into());
            }
            let mut flips = vec![(1.0 - rho) / 2.0; *cayley_l];
            for f in flips.iter_mut().take(*heavy_bits) {
                *f = 0.005;
            }
            let g = RegularGraph::cayley_weighted_hypercube(*cayley_l, &flips)
                .map_err(|e| e.to_string())?;
            (g, Vec::new())
        }
    };
    let mode = match mode.as_str() {
        "asvp" => SseMode::Asvp,
        "cayley-nonneg" => SseMode::CayleyNonneg,
        other => return Err(format!("unknown mode {other:?} (asvp|cayley-nonneg)")),
    };
    let mut ccfg = SseCertifyConfig::new(*mu, *seed);
    ccfg.solver_tol = *solver_tol;
    ccfg.solver_max_iter = *solver_max_iter;
    let rep = sse_certify(&graph, *delta, *lambda, mode, &ccfg).map_err(|e| e.to_string())?;
    let guarantee_met = rep.verdict != SseVerdict::Inconclusive;
    let results = SseResults {
        verdict: rep.verdict,
        upper_bound_ratio: rep.upper_bound_ratio,
        witness_ratio: rep.witness.as_ref().map(|w| w.1),
        set: rep.extracted.as_ref().map(|e| e.set.clone()),
        set_measure: rep.extracted.as_ref().map(|e| e.measure),
        expansion: rep.extracted.as_ref().map(|e| e.expansion),
        collision_probability: rep.extracted.as_ref().map(|e| e.collision_probability),
        delta_used: rep.delta_used,
        t_total_ms: timings.then(|| t0.elapsed().as_secs_f64() * 1e3),
    };
    let envelope = Envelope {
        schema: 1,
        command: "sse",
        config: cfg.clone(),
        input_hash: config_hash(cfg, &extra_hash),
        guarantee_met,
        results,
    };
    Ok(CmdResult {
        guarantee_met,
        report: render(&envelope),
    })
}
