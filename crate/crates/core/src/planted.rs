//! Two-stage recovery of a sparse vector planted in a random subspace:
//! a degree-4 moment relaxation with Gaussian rounding produces a vector
//! correlated with the hidden one, then an L1 program snaps it to the exact
//! direction.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::poly::Polynomial;
use crate::relax::{build_moment_relaxation, solve_l1_lp, sphere_constraint, ConicSolution};
use crate::seeds;
use crate::subspace::{inner, norm_p, ratio_4_2, Measure, Subspace};
use crate::{Defaults, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pattern {
    Boolean,
    Signed,
}

/// A planted-sparse-vector instance.  `space` is what the recovery pipeline
/// sees (the rotated basis); `f0` and `vprime` stay hidden from it and feed
/// the per-instance diagnostics only.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub n: usize,
    pub d: usize,
    pub mu: f64,
    pub mu_actual: f64,
    pub pattern: Pattern,
    pub seed: u64,
    pub f0: DVector<f64>,
    pub space: Subspace,
    pub vprime: Option<Subspace>,
}

/// Generate an instance: V' spanned by `d` iid standard Gaussian vectors,
/// `f0` a uniformly supported 0/1 (or random-sign) vector with `floor(mu n)`
/// nonzeros, and the returned basis a random rotation of an orthonormal
/// basis of `span(V' + f0)`.
pub fn generate_instance(
    n: usize,
    d: usize,
    mu: f64,
    pattern: Pattern,
    seed: u64,
) -> Result<PlantedInstance> {
    let k = (mu * n as f64).floor() as usize;
    if k < 1 {
        return Err(Error::Guard(format!(
            "floor(mu n) = {k} must be at least 1"
        )));
    }
    if d + 1 > n {
        return Err(Error::Guard(format!("d + 1 = {} exceeds n = {n}", d + 1)));
    }
    let mut rng = seeds::rng(seed, seeds::STREAM_INSTANCE);

    // uniformly random support of size k
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        idx.swap(i, j);
    }
    let mut f0 = DVector::zeros(n);
    for &u in idx.iter().take(k) {
        f0[u] = match pattern {
            Pattern::Boolean => 1.0,
            Pattern::Signed => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        };
    }

    let mut raw = DMatrix::zeros(n, d + 1);
    raw.column_mut(0).copy_from(&f0);
    for j in 0..d {
        raw.column_mut(j + 1)
            .copy_from(&seeds::normal_vector(&mut rng, n));
    }
    let plain = Subspace::from_spanning(&raw, Measure::Expectation)?;
    if plain.dim() != d + 1 {
        return Err(Error::Guard("spanning set degenerated".into()));
    }
    let vprime = if d > 0 {
        let vraw = raw.columns(1, d).clone_owned();
        Some(Subspace::from_spanning(&vraw, Measure::Expectation)?)
    } else {
        None
    };

    // random orthogonal mix so no basis column is f0 itself
    let q = random_orthogonal(&mut rng, d + 1);
    let basis = plain.basis() * q;
    let space = Subspace::new(basis, Measure::Expectation)?;

    Ok(PlantedInstance {
        n,
        d,
        mu,
        mu_actual: k as f64 / n as f64,
        pattern,
        seed,
        f0,
        space,
        vprime,
    })
}

fn random_orthogonal(rng: &mut ChaCha8Rng, k: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(k, k, |_, _| seeds::standard_normal(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // fix signs so the factorization is unique given the Gaussian draw
    for j in 0..k {
        if r[(j, j)] < 0.0 {
            for i in 0..k {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Squared correlation `<u,v>^2 / (||u||^2 ||v||^2)` under the expectation
/// measure.
pub fn correlation_sq(u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let m = Measure::Expectation;
    let i = inner(m, u, v);
    let nu = inner(m, u, u);
    let nv = inner(m, v, v);
    if nu <= 0.0 || nv <= 0.0 {
        return 0.0;
    }
    (i * i / (nu * nv)).min(1.0)
}

#[derive(Debug, Clone)]
pub struct PlantedConfig {
    pub level: usize,
    pub trials: usize,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
    pub lp_tol: f64,
    pub lp_max_iter: usize,
    pub exact_tol: f64,
    /// Run the per-instance hypothesis measurement (alpha via the L1/Linf
    /// programs, eta via the projector norm).
    pub measure_hypothesis: bool,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        let d = Defaults::default();
        PlantedConfig {
            level: d.planted_level,
            trials: d.planted_trials,
            solver_tol: d.solver_tol,
            solver_max_iter: d.solver_max_iter,
            lp_tol: 1e-9,
            lp_max_iter: d.solver_max_iter,
            exact_tol: d.exact_tol,
            measure_hypothesis: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ApproxReport {
    pub objective_value: f64,
    pub solver_iterations: usize,
    pub psd_violation: f64,
    pub equality_residual: f64,
    pub best_ratio: f64,
}

/// Stage one: maximize `||f||_4^4` over unit `f` in the span via a moment
/// relaxation over the basis coefficients, then return the best Gaussian
/// sample matching the solution's first two moments.
pub fn approx_recover(
    space: &Subspace,
    config: &PlantedConfig,
    seed: u64,
) -> Result<(DVector<f64>, ApproxReport)> {
    let sol = solve_stage_one(space, config, seed)?;
    let mut rng = seeds::rng(seed, seeds::STREAM_ROUNDING);
    // solver output carries PSD error up to the solver tolerance
    let samples =
        sol.oracle
            .gaussian_sample_with_tol(&mut rng, config.trials, 10.0 * config.solver_tol)?;
    let mut best: Option<(DVector<f64>, f64)> = None;
    for a in &samples {
        let f = space.lift(a);
        let r = ratio_4_2(space.measure(), &f);
        if best.as_ref().map_or(true, |b| r > b.1) {
            best = Some((f, r));
        }
    }
    let (f, best_ratio) = best.ok_or(Error::EmptySamples)?;
    let nrm = norm_p(space.measure(), &f, 2);
    if nrm <= 1e-12 {
        return Err(Error::Guard("stage-one sample degenerated to zero".into()));
    }
    Ok((
        f / nrm,
        ApproxReport {
            objective_value: sol.objective_value,
            solver_iterations: sol.iterations,
            psd_violation: sol.psd_violation,
            equality_residual: sol.equality_residual,
            best_ratio,
        },
    ))
}

fn solve_stage_one(space: &Subspace, config: &PlantedConfig, seed: u64) -> Result<ConicSolution> {
    let d1 = space.dim();
    let n = space.n();
    let w = 1.0 / n as f64;
    // objective: E_u (B a)(u)^4 over the coefficients a
    let mut objective = Polynomial::zero(d1);
    for u in 0..n {
        let row: Vec<f64> = (0..d1).map(|j| space.basis()[(u, j)]).collect();
        let lin = Polynomial::linear(&row);
        let sq = lin.square();
        objective = objective.add(&sq.square().scale(w));
    }
    let relax = build_moment_relaxation(
        d1,
        config.level,
        vec![sphere_constraint(d1, d1)],
        objective,
        vec![],
    )?;
    relax.solve_sdp(config.solver_tol, config.solver_max_iter, seed)
}

#[derive(Debug, Clone)]
pub struct ExactReport {
    pub constraint_residual: f64,
    pub membership_residual: f64,
    pub l1_objective: f64,
    pub iterations: usize,
}

/// Stage two: `argmin ||y||_1 over y in V with <y, f> = 1`, returned both raw
/// (feasible) and normalized to a unit vector.
pub fn exact_recover(
    space: &Subspace,
    f: &DVector<f64>,
    config: &PlantedConfig,
) -> Result<(DVector<f64>, DVector<f64>, ExactReport)> {
    let sol = solve_l1_lp(space, f, config.lp_tol, config.lp_max_iter)?;
    let constraint_residual = (inner(space.measure(), &sol.y, f) - 1.0).abs();
    let membership_residual = space.membership_residual(&sol.y);
    let nrm = norm_p(space.measure(), &sol.y, 2);
    if nrm <= 1e-14 {
        return Err(Error::Solver("L1 program returned the zero vector".into()));
    }
    let unit = &sol.y / nrm;
    Ok((
        sol.y.clone(),
        unit,
        ExactReport {
            constraint_residual,
            membership_residual,
            l1_objective: sol.objective,
            iterations: sol.iterations,
        },
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct KashinReport {
    pub trials: usize,
    /// Monte-Carlo `min ||f'||_1 / ||f'||_2` over random unit directions.
    pub mc_min_ratio: f64,
    /// Exact `min_i min{||f'||_1 : f'(i) = 1}` via the coordinate LPs
    /// (equals `min ||f'||_1/||f'||_inf`); present when `d` is small.
    pub exact_min_l1_linf: Option<f64>,
    /// Upper bound on `max ||f'||_2/||f'||_1` derived from the exact LP via
    /// `||f||_2^2 <= ||f||_inf ||f||_1`.
    pub alpha_upper: Option<f64>,
}

/// Empirical flatness of a subspace: how far its vectors sit from the L1/L2
/// corner (almost-spherical sections have ratio bounded below).
pub fn measure_kashin_ratio(space: &Subspace, trials: usize, seed: u64) -> Result<KashinReport> {
    assert!(trials >= 1);
    let mut rng = seeds::rng(seed, seeds::STREAM_VALIDATE);
    let m = space.measure();
    let mut mc_min = f64::INFINITY;
    for _ in 0..trials {
        let xi = seeds::unit_vector(&mut rng, space.dim());
        let f = space.lift(&xi);
        let r = norm_p(m, &f, 1) / norm_p(m, &f, 2);
        mc_min = mc_min.min(r);
    }
    let (exact, alpha_upper) = if space.dim() <= 24 {
        let w = m.weight(space.n());
        let weights = DVector::from_element(space.n(), w);
        let mut best = f64::INFINITY;
        for i in 0..space.n() {
            let lin = space.basis().row(i).transpose();
            if lin.norm() <= 1e-12 {
                continue;
            }
            // the minimum feeds a threshold comparison; 1e-7 is plenty
            let sol = crate::solver::l1_admm(space.basis(), &weights, &lin, 1e-7, 8_000)?;
            best = best.min(sol.objective);
        }
        if best.is_finite() && best > 0.0 {
            (Some(best), Some(1.0 / best.sqrt()))
        } else {
            (None, None)
        }
    } else {
        (None, None)
    };
    Ok(KashinReport {
        trials,
        mc_min_ratio: mc_min,
        exact_min_l1_linf: exact,
        alpha_upper,
    })
}

/// Per-instance recovery diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct RecoveryReport {
    pub d: usize,
    pub mu: f64,
    pub n: usize,
    pub seed: u64,
    pub stage1_corr: f64,
    pub stage2_corr: f64,
    pub success: bool,
    pub t_sdp_ms: Option<f64>,
    pub t_lp_ms: Option<f64>,
    pub hypothesis: Option<HypothesisRecord>,
}

/// Measured quantities of the exact-recovery theorem's hypotheses.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisRecord {
    pub mu: f64,
    pub alpha: f64,
    pub eps: f64,
    pub eta: f64,
    /// `1/(alpha sqrt(mu)) - 2 - eta/(1 - eps)`; the theorem promises exact
    /// recovery when this margin is positive.
    pub margin: f64,
}

/// Run both stages on one instance and measure everything the acceptance
/// checks need.
pub fn run_instance(
    inst: &PlantedInstance,
    config: &PlantedConfig,
    collect_timings: bool,
) -> Result<RecoveryReport> {
    let t0 = std::time::Instant::now();
    let (f, _approx) = approx_recover(&inst.space, config, inst.seed)?;
    let t_sdp = t0.elapsed().as_secs_f64() * 1e3;

    // orient f toward f0 (the objective is sign-symmetric)
    let mut f = f;
    if inner(Measure::Expectation, &f, &inst.f0) < 0.0 {
        f = -f;
    }
    let stage1_corr = correlation_sq(&f, &inst.f0).sqrt();

    let t1 = std::time::Instant::now();
    let (_y_raw, y_unit, _exact) = exact_recover(&inst.space, &f, config)?;
    let t_lp = t1.elapsed().as_secs_f64() * 1e3;

    let stage2_corr = correlation_sq(&y_unit, &inst.f0).sqrt();
    let success = stage2_corr >= 1.0 - config.exact_tol;

    let hypothesis = if config.measure_hypothesis {
        match &inst.vprime {
            Some(vp) => {
                let kashin = measure_kashin_ratio(vp, 0x100, inst.seed)?;
                let alpha = kashin.alpha_upper.unwrap_or(f64::INFINITY);
                let eps = 1.0 - correlation_sq(&f, &inst.f0).sqrt();
                let eta = {
                    let proj = vp.project(&f);
                    norm_p(Measure::Expectation, &proj, 2) / norm_p(Measure::Expectation, &f, 2)
                };
                let margin = 1.0 / (alpha * inst.mu_actual.sqrt()) - 2.0 - eta / (1.0 - eps);
                Some(HypothesisRecord {
                    mu: inst.mu_actual,
                    alpha,
                    eps,
                    eta,
                    margin,
                })
            }
            None => None,
        }
    } else {
        None
    };

    Ok(RecoveryReport {
        d: inst.d,
        mu: inst.mu,
        n: inst.n,
        seed: inst.seed,
        stage1_corr,
        stage2_corr,
        success,
        t_sdp_ms: collect_timings.then_some(t_sdp),
        t_lp_ms: collect_timings.then_some(t_lp),
        hypothesis,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CellStats {
    pub d: usize,
    pub mu: f64,
    pub success_rate: f64,
    pub mean_stage1_corr: f64,
    pub mean_stage2_corr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    pub n: usize,
    pub records: Vec<RecoveryReport>,
    pub cells: Vec<CellStats>,
    /// `mu0(d) = 1 for d <= sqrt(n), n/d^2 otherwise` echoed per grid row.
    pub mu0_echo: Vec<(usize, f64)>,
    /// Cells `(d, mu_low, mu_high)` where the success rate increased in mu
    /// beyond the two-seed noise allowance.
    pub monotonicity_violations: Vec<(usize, f64, f64)>,
}

pub fn mu0(n: usize, d: usize) -> f64 {
    if (d * d) as f64 <= n as f64 {
        1.0
    } else {
        n as f64 / (d * d) as f64
    }
}

/// Sweep the `(d, mu)` grid with `seeds_per_cell` instances per cell.
/// Instances run in parallel; every instance derives its own seed from the
/// master seed and grid position, so results do not depend on scheduling.
pub fn phase_sweep(
    n: usize,
    d_list: &[usize],
    mu_list: &[f64],
    seeds_per_cell: usize,
    master_seed: u64,
    pattern: Pattern,
    config: &PlantedConfig,
    collect_timings: bool,
) -> Result<SweepTable> {
    if d_list.is_empty() || mu_list.is_empty() || seeds_per_cell == 0 {
        return Err(Error::Guard("empty sweep grid".into()));
    }
    let mut jobs = Vec::new();
    for (di, &d) in d_list.iter().enumerate() {
        for (mi, &mu) in mu_list.iter().enumerate() {
            for s in 0..seeds_per_cell {
                let seed = mix_seed(master_seed, di as u64, mi as u64, s as u64);
                jobs.push((d, mu, seed));
            }
        }
    }
    let results: Vec<Result<RecoveryReport>> = jobs
        .par_iter()
        .map(|&(d, mu, seed)| {
            let inst = generate_instance(n, d, mu, pattern, seed)?;
            run_instance(&inst, config, collect_timings)
        })
        .collect();
    let mut records = Vec::with_capacity(results.len());
    for r in results {
        // per-instance failures are recorded as unsuccessful, not fatal
        match r {
            Ok(rep) => records.push(rep),
            Err(e) => {
                return Err(Error::Solver(format!("instance failed fatally: {e}")));
            }
        }
    }

    let mut cells = Vec::new();
    for &d in d_list {
        for &mu in mu_list {
            let cell: Vec<&RecoveryReport> =
                records.iter().filter(|r| r.d == d && r.mu == mu).collect();
            let k = cell.len() as f64;
            cells.push(CellStats {
                d,
                mu,
                success_rate: cell.iter().filter(|r| r.success).count() as f64 / k,
                mean_stage1_corr: cell.iter().map(|r| r.stage1_corr).sum::<f64>() / k,
                mean_stage2_corr: cell.iter().map(|r| r.stage2_corr).sum::<f64>() / k,
            });
        }
    }

    let allowance = 2.0 / seeds_per_cell as f64;
    let mut violations = Vec::new();
    for &d in d_list {
        let mut row: Vec<&CellStats> = cells.iter().filter(|c| c.d == d).collect();
        row.sort_by(|a, b| a.mu.partial_cmp(&b.mu).unwrap());
        for pair in row.windows(2) {
            if pair[1].success_rate > pair[0].success_rate + allowance {
                violations.push((d, pair[0].mu, pair[1].mu));
            }
        }
    }

    Ok(SweepTable {
        n,
        records,
        cells,
        mu0_echo: d_list.iter().map(|&d| (d, mu0(n, d))).collect(),
        monotonicity_violations: violations,
    })
}

fn mix_seed(master: u64, a: u64, b: u64, c: u64) -> u64 {
    let mut x = master
        .wrapping_mul(0x9e3779b97f4a7c15)
        .wrapping_add(a.wrapping_mul(0xbf58476d1ce4e5b9))
        .wrapping_add(b.wrapping_mul(0x94d049bb133111eb))
        .wrapping_add(c.wrapping_add(1));
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58476d1ce4e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d049bb133111eb);
    x ^= x >> 31;
    x
}

/// Make a unit-norm stage-one surrogate with prescribed correlation to f0,
/// mixing in a fixed perpendicular direction from the instance's own space.
pub fn surrogate_with_correlation(
    inst: &PlantedInstance,
    corr: f64,
    seed: u64,
) -> Result<DVector<f64>> {
    let m = Measure::Expectation;
    let f0n = &inst.f0 / norm_p(m, &inst.f0, 2);
    let mut rng = seeds::rng(seed, seeds::STREAM_ROUNDING + 3);
    for _ in 0..64 {
        let xi = seeds::unit_vector(&mut rng, inst.space.dim());
        let g = inst.space.lift(&xi);
        let along = inner(m, &g, &f0n);
        let perp = &g - &f0n * along;
        let pn = norm_p(m, &perp, 2);
        if pn > 1e-9 {
            let dir = &perp / pn;
            let mixed = &f0n * corr + dir * (1.0 - corr * corr).sqrt();
            return Ok(mixed);
        }
    }
    Err(Error::Guard(
        "could not build a perpendicular direction".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_identities_and_determinism() {
        let a = generate_instance(64, 5, 1.0 / 16.0, Pattern::Boolean, 11).unwrap();
        // floor(mu n) = 4 ones; ratio identity 1/mu exactly
        let ones = a.f0.iter().filter(|&&v| v != 0.0).count();
        assert_eq!(ones, 4);
        let r = ratio_4_2(Measure::Expectation, &a.f0);
        assert!((r - 16.0).abs() < 1e-10);
        // f0 lies in the rotated span exactly
        assert!(a.space.membership_residual(&a.f0) <= 1e-9);
        // determinism
        let b = generate_instance(64, 5, 1.0 / 16.0, Pattern::Boolean, 11).unwrap();
        assert_eq!(a.f0, b.f0);
        assert_eq!(a.space.basis(), b.space.basis());
        // signed pattern keeps the identity
        let s = generate_instance(64, 5, 0.25, Pattern::Signed, 3).unwrap();
        let r = ratio_4_2(Measure::Expectation, &s.f0);
        assert!((r - 1.0 / s.mu_actual).abs() < 1e-10);
    }

    #[test]
    fn instance_guards() {
        assert!(generate_instance(64, 64, 0.1, Pattern::Boolean, 0).is_err());
        assert!(generate_instance(64, 5, 0.001, Pattern::Boolean, 0).is_err());
    }

    #[test]
    fn d0_stage_one_returns_f0() {
        let inst = generate_instance(64, 0, 1.0 / 16.0, Pattern::Boolean, 5).unwrap();
        let cfg = PlantedConfig::default();
        let (f, _) = approx_recover(&inst.space, &cfg, inst.seed).unwrap();
        let corr = correlation_sq(&f, &inst.f0);
        assert!(corr >= 1.0 - 1e-8, "corr^2 = {corr}");
    }

    #[test]
    fn stage_one_relaxation_dominates_the_planted_value() {
        // the planted point mass is feasible, so the relaxation value is at
        // least (1 - 0.05) / mu
        let inst = generate_instance(64, 3, 1.0 / 16.0, Pattern::Boolean, 41).unwrap();
        let cfg = PlantedConfig::default();
        let (_, rep) = approx_recover(&inst.space, &cfg, inst.seed).unwrap();
        let floor = 0.95 / inst.mu_actual;
        assert!(
            rep.objective_value >= floor,
            "value {} < {floor}",
            rep.objective_value
        );
    }

    #[test]
    fn exact_recovery_from_f0_itself() {
        let inst = generate_instance(128, 6, 0.05, Pattern::Boolean, 17).unwrap();
        let cfg = PlantedConfig::default();
        let f0n = &inst.f0 / norm_p(Measure::Expectation, &inst.f0, 2);
        let (y, y_unit, rep) = exact_recover(&inst.space, &f0n, &cfg).unwrap();
        assert!(rep.constraint_residual <= 1e-8);
        assert!(rep.membership_residual <= 1e-8);
        let corr = correlation_sq(&y_unit, &inst.f0);
        assert!(corr >= 1.0 - 1e-10, "corr^2 = {corr}");
        // the raw vector meets the constraint exactly
        assert!((inner(Measure::Expectation, &y, &f0n) - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn exact_recovery_from_noisy_surrogate() {
        let inst = generate_instance(256, 10, 0.02, Pattern::Boolean, 23).unwrap();
        let cfg = PlantedConfig::default();
        let f = surrogate_with_correlation(&inst, 0.9, 1).unwrap();
        assert!((correlation_sq(&f, &inst.f0).sqrt() - 0.9).abs() < 1e-9);
        let (_, y_unit, rep) = exact_recover(&inst.space, &f, &cfg).unwrap();
        let corr = correlation_sq(&y_unit, &inst.f0).sqrt();
        assert!(corr >= 1.0 - 1e-6, "stage-2 corr = {corr}");
        // the known feasible point f0/<f0,f> dominates the optimum's 1-norm
        let m = Measure::Expectation;
        let reference = &inst.f0 / inner(m, &inst.f0, &f);
        assert!(
            rep.l1_objective <= norm_p(m, &reference, 1) + 1e-8,
            "1-norm {} above the reference point {}",
            rep.l1_objective,
            norm_p(m, &reference, 1)
        );
    }

    #[test]
    fn exact_recovery_rejects_orthogonal_f() {
        let inst = generate_instance(64, 3, 0.1, Pattern::Boolean, 29).unwrap();
        // build f orthogonal to the whole space V
        let mut rng = seeds::rng(30, seeds::STREAM_VALIDATE);
        let mut f = seeds::normal_vector(&mut rng, 64);
        let p = inst.space.project(&f);
        f -= &p;
        let cfg = PlantedConfig::default();
        assert!(matches!(
            exact_recover(&inst.space, &f, &cfg),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn kashin_examples() {
        // span{all-ones}: every vector is flat, ratio 1.
        let raw = DMatrix::from_element(32, 1, 1.0);
        let space = Subspace::from_spanning(&raw, Measure::Expectation).unwrap();
        let rep = measure_kashin_ratio(&space, 64, 0).unwrap();
        assert!((rep.mc_min_ratio - 1.0).abs() < 1e-10);

        // span{e1} in R^64: ratio (1/64)/(1/8) = 1/8.
        let mut raw = DMatrix::zeros(64, 1);
        raw[(0, 0)] = 1.0;
        let space = Subspace::from_spanning(&raw, Measure::Expectation).unwrap();
        let rep = measure_kashin_ratio(&space, 16, 0).unwrap();
        assert!((rep.mc_min_ratio - 0.125).abs() < 1e-10);
        // the exact LP bound is valid: alpha_upper >= true max ||f||2/||f||1 = 8
        assert!(rep.alpha_upper.unwrap() >= 8.0 - 1e-6);
    }

    #[test]
    fn mu0_crossover_echo() {
        assert_eq!(mu0(256, 16), 1.0);
        assert!((mu0(256, 32) - 0.25).abs() < 1e-12);
    }
}
