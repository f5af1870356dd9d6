//! Search for an analytically sparse vector (large `L4/L2` ratio) in a
//! subspace via four candidate-generating subroutines: coordinate
//! projections, random Gaussian functions, fourth-power conditioning of a
//! moment oracle, and Gaussian rounding of its first two moments.

use nalgebra::DVector;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::pseudo::MomentOracle;
use crate::relax::{build_moment_relaxation, AuxBlock, MomentRelaxation};
use crate::subspace::{ratio_4_2, Measure, Subspace};
use crate::{Defaults, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Subroutine {
    CoordinateProjection,
    RandomFunction,
    GaussianRounding,
}

/// A candidate vector with its recomputed sparsity ratio.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub g: DVector<f64>,
    pub ratio: f64,
    pub tag: Subroutine,
}

/// Result of the combined search.
#[derive(Debug, Clone)]
pub struct AsvpResult {
    pub g: DVector<f64>,
    pub ratio: f64,
    pub winner: Subroutine,
    pub per_subroutine: Vec<(Subroutine, f64)>,
    /// `||Pi g - g|| / ||g||` under the measure.
    pub membership_residual: f64,
}

/// Try `g_u = Pi delta_u` for every coordinate; deterministic lowest-index
/// tie-break.
pub fn coordinate_projection_round(space: &Subspace) -> Candidate {
    let mut best_ratio = f64::NEG_INFINITY;
    let mut best_g = DVector::zeros(space.n());
    for u in 0..space.n() {
        let g = space.project_delta(u);
        let r = ratio_4_2(space.measure(), &g);
        if r > best_ratio {
            best_ratio = r;
            best_g = g;
        }
    }
    Candidate {
        g: best_g,
        ratio: best_ratio,
        tag: Subroutine::CoordinateProjection,
    }
}

/// Monte-Carlo statistics reported by the random-function subroutine.
#[derive(Debug, Clone, Serialize)]
pub struct RandomFunctionStats {
    pub trials: usize,
    pub mean_norm4_pow4: f64,
    pub sd_norm4_pow4: f64,
    pub mean_norm2_sq: f64,
    pub var_norm2_sq: f64,
    pub mean_norm2_pow4: f64,
    pub sd_norm2_pow4: f64,
}

/// Project standard Gaussian functions and keep the best ratio.
///
/// `Pi t` for a standard Gaussian function `t` is distributed as `B xi` with
/// iid standard normal coefficients `xi` over the orthonormal basis, which is
/// how the samples are drawn.
pub fn random_function_round(
    space: &Subspace,
    rng: &mut ChaCha8Rng,
    trials: usize,
) -> (Candidate, RandomFunctionStats) {
    assert!(trials >= 1);
    let mut best: Option<(DVector<f64>, f64)> = None;
    let mut s4 = 0.0;
    let mut s4_sq = 0.0;
    let mut s2 = 0.0;
    let mut s2_sq = 0.0;
    let mut s2_pow4 = 0.0;
    let mut s2_pow4_sq = 0.0;
    for _ in 0..trials {
        let xi = crate::seeds::normal_vector(rng, space.dim());
        let g = space.lift(&xi);
        let r = ratio_4_2(space.measure(), &g);
        if best.as_ref().map_or(true, |b| r > b.1) {
            best = Some((g.clone(), r));
        }
        let w = space.measure().weight(space.n());
        let n4: f64 = g.iter().map(|&x| x * x * x * x).sum::<f64>() * w;
        let n2: f64 = g.iter().map(|&x| x * x).sum::<f64>() * w;
        s4 += n4;
        s4_sq += n4 * n4;
        s2 += n2;
        s2_sq += n2 * n2;
        s2_pow4 += n2 * n2;
        s2_pow4_sq += n2 * n2 * n2 * n2;
    }
    let t = trials as f64;
    let mean4 = s4 / t;
    let mean2 = s2 / t;
    let mean2_sq = s2_sq / t;
    let stats = RandomFunctionStats {
        trials,
        mean_norm4_pow4: mean4,
        sd_norm4_pow4: ((s4_sq / t - mean4 * mean4).max(0.0) / t).sqrt(),
        mean_norm2_sq: mean2,
        var_norm2_sq: (mean2_sq - mean2 * mean2).max(0.0),
        mean_norm2_pow4: s2_pow4 / t,
        sd_norm2_pow4: ((s2_pow4_sq / t - (s2_pow4 / t).powi(2)).max(0.0) / t).sqrt(),
    };
    let (g, ratio) = best.expect("trials >= 1");
    (
        Candidate {
            g,
            ratio,
            tag: Subroutine::RandomFunction,
        },
        stats,
    )
}

/// Candidate tuple sets for the fourth-power conditioning search.
#[derive(Debug, Clone, Copy)]
pub enum TupleCandidates {
    /// All `n^4` coordinate 4-tuples (guarded to n <= 24).
    All,
    /// All 4-tuples over the top-k coordinates by `pE f(u)^4`.
    TopK(usize),
}

/// Outcome of the conditioning subroutine.
#[derive(Debug, Clone)]
pub struct ConditioningOutcome {
    pub tuple: [usize; 4],
    pub oracle: MomentOracle,
    /// `pE'_{f,f'} <f^2, f'^2>` achieved by the returned reweighing.
    pub achieved: f64,
    /// `(pE_{f,f'} <f^2, f'^2>^4)^(1/4)` of the input oracle, the lemma's
    /// guaranteed floor when every tuple is searched.
    pub floor: f64,
}

/// Reweigh the oracle by `f(u1)^2 ... f(u4)^2` over the candidate tuples and
/// return the tuple maximizing `pE'_{f,f'} <f^2, f'^2>`.
///
/// The oracle lives over the subspace coefficients; `f(u) = <b_u, a>` is the
/// evaluation linear form.  Empirical-provenance oracles are reweighed at
/// sample level; others go through the moment route and need level >= 10.
pub fn condition_fourth_power(
    oracle: &MomentOracle,
    space: &Subspace,
    candidates: TupleCandidates,
) -> Result<ConditioningOutcome> {
    if oracle.n() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: oracle.n(),
        });
    }
    if oracle.level() < 8 {
        return Err(Error::DegreeOverflow {
            needed: 8,
            level: oracle.level(),
        });
    }
    let n = space.n();
    let dist = oracle.empirical().ok_or_else(|| {
        Error::Guard("conditioning needs an empirical-backed oracle at this level".into())
    })?;
    let k = dist.len();
    let wmeasure = space.measure().weight(n);

    // fsq[s][u] = f_s(u)^2 for each sample s.
    let mut fsq = vec![vec![0.0f64; n]; k];
    for (s, a) in dist.samples().iter().enumerate() {
        let f = space.lift(a);
        for u in 0..n {
            fsq[s][u] = f[u] * f[u];
        }
    }
    let weights = dist.weights();

    // floor = (pE <f^2, f'^2>^4)^(1/4) with independent copies
    let inner_ff = |s: usize, s2: usize| -> f64 {
        let mut acc = 0.0;
        for u in 0..n {
            acc += fsq[s][u] * fsq[s2][u];
        }
        acc * wmeasure
    };
    let mut floor4 = 0.0;
    for s in 0..k {
        for s2 in 0..k {
            floor4 += weights[s] * weights[s2] * inner_ff(s, s2).powi(4);
        }
    }
    let floor = floor4.max(0.0).powf(0.25);

    let universe: Vec<usize> = match candidates {
        TupleCandidates::All => {
            if n > 24 {
                return Err(Error::Guard(format!(
                    "full tuple enumeration guarded to n <= 24, got {n}"
                )));
            }
            (0..n).collect()
        }
        TupleCandidates::TopK(kk) => {
            let mut fourth: Vec<(usize, f64)> = (0..n)
                .map(|u| {
                    let v: f64 = (0..k).map(|s| weights[s] * fsq[s][u] * fsq[s][u]).sum();
                    (u, v)
                })
                .collect();
            fourth.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
            fourth.into_iter().take(kk.max(1)).map(|(u, _)| u).collect()
        }
    };

    let mass_tol = oracle.reweigh_mass_tolerance();
    let mut best: Option<([usize; 4], f64)> = None;
    let mut rw = vec![0.0f64; k];
    for &u1 in &universe {
        for &u2 in &universe {
            for &u3 in &universe {
                for &u4 in &universe {
                    let mut mass = 0.0;
                    for s in 0..k {
                        let w = weights[s] * fsq[s][u1] * fsq[s][u2] * fsq[s][u3] * fsq[s][u4];
                        rw[s] = w;
                        mass += w;
                    }
                    if mass <= mass_tol {
                        continue;
                    }
                    // score = E_u (sum_s rw_s/mass * f_s(u)^2)^2
                    let mut score = 0.0;
                    for u in 0..n {
                        let mut m = 0.0;
                        for s in 0..k {
                            m += rw[s] * fsq[s][u];
                        }
                        m /= mass;
                        score += m * m;
                    }
                    score *= wmeasure;
                    if best.as_ref().map_or(true, |b| score > b.1) {
                        best = Some(([u1, u2, u3, u4], score));
                    }
                }
            }
        }
    }

    let (tuple, achieved) =
        best.ok_or_else(|| Error::Guard("all candidate tuples below mass tolerance".into()))?;
    let reweighed = dist.reweighed(
        |a| {
            let f = space.lift(a);
            tuple.iter().map(|&u| f[u] * f[u]).product()
        },
        mass_tol,
    )?;
    let oracle = MomentOracle::from_samples(&reweighed, oracle.level())?;
    Ok(ConditioningOutcome {
        tuple,
        oracle,
        achieved,
        floor,
    })
}

/// Monte-Carlo reports from the Gaussian rounding subroutine.
#[derive(Debug, Clone, Serialize)]
pub struct GaussianRoundStats {
    pub trials: usize,
    pub mean_norm4_pow4: f64,
    pub sd_norm4_pow4: f64,
    /// Exact `3 E_u (pE f(u)^2)^2` from the oracle's second moments; the
    /// sampled `mean_norm4_pow4` matches it for mean-zero oracles.
    pub identity_rhs: f64,
    pub mean_norm2_pow4: f64,
    /// Exact `3 (pE ||f||_2^2)^2` upper bound for the second-norm fourth moment.
    pub norm2_pow4_bound: f64,
}

/// Sample Gaussians matching the oracle's first two moments, lift into the
/// subspace, and keep the best ratio.
pub fn gaussian_round(
    oracle: &MomentOracle,
    space: &Subspace,
    rng: &mut ChaCha8Rng,
    trials: usize,
) -> Result<(Candidate, GaussianRoundStats)> {
    if oracle.n() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: oracle.n(),
        });
    }
    let n = space.n();
    let w = space.measure().weight(n);
    let samples = oracle.gaussian_sample(rng, trials)?;
    let mut best: Option<(DVector<f64>, f64)> = None;
    let mut s4 = 0.0;
    let mut s4_sq = 0.0;
    let mut s2p4 = 0.0;
    for a in &samples {
        let g = space.lift(a);
        let r = ratio_4_2(space.measure(), &g);
        if best.as_ref().map_or(true, |b| r > b.1) {
            best = Some((g.clone(), r));
        }
        let n4: f64 = g.iter().map(|&x| x * x * x * x).sum::<f64>() * w;
        let n2: f64 = g.iter().map(|&x| x * x).sum::<f64>() * w;
        s4 += n4;
        s4_sq += n4 * n4;
        s2p4 += n2 * n2;
    }
    let t = trials as f64;

    // second-moment matrix of the coefficients
    let d = space.dim();
    let mut second = nalgebra::DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut e = vec![0u32; d];
            e[i] += 1;
            e[j] += 1;
            second[(i, j)] = oracle.moment(&Monomial::new(e))?;
        }
    }
    let mut identity_rhs = 0.0;
    let mut trace_norm2 = 0.0;
    for u in 0..n {
        let row = space.basis().row(u).transpose();
        let m = (row.transpose() * &second * &row)[(0, 0)];
        identity_rhs += m * m;
        trace_norm2 += m;
    }
    identity_rhs = 3.0 * identity_rhs * w;
    let norm2_pow4_bound = 3.0 * (trace_norm2 * w).powi(2);

    let mean4 = s4 / t;
    let stats = GaussianRoundStats {
        trials,
        mean_norm4_pow4: mean4,
        sd_norm4_pow4: ((s4_sq / t - mean4 * mean4).max(0.0) / t).sqrt(),
        identity_rhs,
        mean_norm2_pow4: s2p4 / t,
        norm2_pow4_bound,
    };
    let (g, ratio) = best.ok_or(Error::EmptySamples)?;
    Ok((
        Candidate {
            g,
            ratio,
            tag: Subroutine::GaussianRounding,
        },
        stats,
    ))
}

/// Truncation witness of a function against a projector: `fbar = (Pi f) *
/// 1_{|Pi f| >= tau}`.
pub fn truncate_function(space: &Subspace, f: &DVector<f64>, tau: f64) -> DVector<f64> {
    let pf = space.project(f);
    pf.map(|v| if v.abs() >= tau { v } else { 0.0 })
}

/// Relaxation for the near-containment search: variables are the subspace
/// coefficients of `f` plus the truncation witness block `fbar` with the
/// truncation conclusions as polynomial constraints.
///
/// Inequalities are absorbed by squared slack variables; `|fbar(u)|` is
/// expressed through `s_u` with `s_u -+ fbar(u)` both squares.
pub fn build_asvp_relaxation(
    space: &Subspace,
    mu: f64,
    eps: f64,
    level: usize,
) -> Result<MomentRelaxation> {
    let defaults = Defaults::default();
    build_asvp_relaxation_with(space, mu, eps, level, defaults.trunc_c1, defaults.trunc_c2)
}

pub fn build_asvp_relaxation_with(
    space: &Subspace,
    mu: f64,
    eps: f64,
    level: usize,
    c1: f64,
    c2: f64,
) -> Result<MomentRelaxation> {
    if !(0.0 < mu && mu < 1.0) {
        return Err(Error::Guard(format!("mu must lie in (0,1), got {mu}")));
    }
    if eps >= 1.0 / 400.0 {
        return Err(Error::Guard(format!(
            "containment slack eps = {eps} violates the eps < 1/400 hypothesis"
        )));
    }
    if space.measure() != Measure::Expectation {
        return Err(Error::Guard(
            "the search relaxation expects expectation-measure subspaces".into(),
        ));
    }
    let n = space.n();
    let d = space.dim();
    // variable layout: a (d) | fbar (n) | s (n) | p (n) | q (n) | w (n) | r (1)
    let total = d + 5 * n + 1;
    let a_at = |j: usize| j;
    let fbar_at = |u: usize| d + u;
    let s_at = |u: usize| d + n + u;
    let p_at = |u: usize| d + 2 * n + u;
    let q_at = |u: usize| d + 3 * n + u;
    let w_at = |u: usize| d + 4 * n + u;
    let r_at = d + 5 * n;

    let mut constraints = Vec::new();

    // ||f||_2^2 pinned at the Boolean scale mu (E f^2 = E f = mu).
    let mut sphere = Polynomial::zero(total);
    for j in 0..d {
        sphere.add_term(Monomial::var_pow(total, a_at(j), 2), 1.0);
    }
    sphere.add_term(Monomial::one(total), -mu);
    constraints.push(sphere);

    // Boolean surrogate: f(u)^2 = f(u) for every u, and E f = mu.
    let eval_form = |u: usize| -> Polynomial {
        let mut p = Polynomial::zero(total);
        for j in 0..d {
            p.add_term(Monomial::var(total, a_at(j)), space.basis()[(u, j)]);
        }
        p
    };
    for u in 0..n {
        let f_u = eval_form(u);
        let mut c = f_u.square();
        c = c.add(&f_u.scale(-1.0));
        constraints.push(c);
    }
    let mut mean = Polynomial::zero(total);
    for u in 0..n {
        for j in 0..d {
            mean.add_term(
                Monomial::var(total, a_at(j)),
                space.basis()[(u, j)] / n as f64,
            );
        }
    }
    mean.add_term(Monomial::one(total), -mu);
    constraints.push(mean);

    // |fbar| split: s_u - fbar_u = p_u^2, s_u + fbar_u = q_u^2.
    for u in 0..n {
        let mut c = Polynomial::zero(total);
        c.add_term(Monomial::var(total, s_at(u)), 1.0);
        c.add_term(Monomial::var(total, fbar_at(u)), -1.0);
        c.add_term(Monomial::var_pow(total, p_at(u), 2), -1.0);
        constraints.push(c);
        let mut c = Polynomial::zero(total);
        c.add_term(Monomial::var(total, s_at(u)), 1.0);
        c.add_term(Monomial::var(total, fbar_at(u)), 1.0);
        c.add_term(Monomial::var_pow(total, q_at(u), 2), -1.0);
        constraints.push(c);
    }

    // Link: f(u)^2 - c2 s_u = w_u^2.
    for u in 0..n {
        let f_u = eval_form(u);
        let mut c = f_u.square();
        c.add_term(Monomial::var(total, s_at(u)), -c2);
        c.add_term(Monomial::var_pow(total, w_at(u), 2), -1.0);
        constraints.push(c);
    }

    // Fourth-moment floor: ||Pi fbar||_4^4 - c1 mu = r^2.
    let proj_fbar_norm4 = projected_fourth_moment(space, total, fbar_at);
    let mut c = proj_fbar_norm4.clone();
    c.add_term(Monomial::one(total), -c1 * mu);
    c.add_term(Monomial::var_pow(total, r_at, 2), -1.0);
    constraints.push(c);

    // Objective: the truncation witness's projected fourth moment.
    let objective = proj_fbar_norm4;

    build_moment_relaxation(
        d,
        level,
        constraints,
        objective,
        vec![
            AuxBlock {
                name: "fbar".into(),
                size: n,
            },
            AuxBlock {
                name: "s".into(),
                size: n,
            },
            AuxBlock {
                name: "p".into(),
                size: n,
            },
            AuxBlock {
                name: "q".into(),
                size: n,
            },
            AuxBlock {
                name: "w".into(),
                size: n,
            },
            AuxBlock {
                name: "r".into(),
                size: 1,
            },
        ],
    )
}

/// `E_u (Pi fbar)(u)^4` as a polynomial over the full variable ring.
fn projected_fourth_moment(
    space: &Subspace,
    total: usize,
    fbar_at: impl Fn(usize) -> usize,
) -> Polynomial {
    let n = space.n();
    let w = 1.0 / n as f64;
    let mut acc = Polynomial::zero(total);
    for u in 0..n {
        // (Pi fbar)(u) = sum_v Pi[u,v] fbar_v with Pi = B B^T W
        let mut lin = Polynomial::zero(total);
        let row_u = space.basis().row(u).transpose();
        for v in 0..n {
            let row_v = space.basis().row(v).transpose();
            let piuv = row_u.dot(&row_v) * w;
            if piuv.abs() > 1e-14 {
                lin.add_term(Monomial::var(total, fbar_at(v)), piuv);
            }
        }
        let sq = lin.square();
        acc = acc.add(&sq.square().scale(w));
    }
    acc
}

/// Derive the slack values completing a `(f coefficients, fbar)` assignment
/// into a full feasible point of the relaxation; errors when a slack would
/// need a negative square (infeasible assignment).
pub fn complete_assignment(
    space: &Subspace,
    mu: f64,
    c1: f64,
    c2: f64,
    a: &DVector<f64>,
    fbar: &DVector<f64>,
) -> Result<Vec<f64>> {
    let n = space.n();
    let d = space.dim();
    let total = d + 5 * n + 1;
    let mut point = vec![0.0; total];
    for j in 0..d {
        point[j] = a[j];
    }
    let f = space.lift(a);
    for u in 0..n {
        point[d + u] = fbar[u];
        let s = fbar[u].abs();
        point[d + n + u] = s;
        point[d + 2 * n + u] = (s - fbar[u]).max(0.0).sqrt();
        point[d + 3 * n + u] = (s + fbar[u]).max(0.0).sqrt();
        let link = f[u] * f[u] - c2 * s;
        if link < -1e-12 {
            return Err(Error::Guard(format!(
                "assignment violates the link constraint at u={u}: {link:.3e}"
            )));
        }
        point[d + 4 * n + u] = link.max(0.0).sqrt();
    }
    let pf = space.project(fbar);
    let norm4: f64 = pf.iter().map(|&x| x * x * x * x).sum::<f64>() / n as f64;
    let head = norm4 - c1 * mu;
    if head < -1e-12 {
        return Err(Error::Guard(format!(
            "assignment violates the fourth-moment floor: {head:.3e}"
        )));
    }
    point[total - 1] = head.max(0.0).sqrt();
    Ok(point)
}

#[derive(Debug, Clone)]
pub struct AsvpConfig {
    pub seed: u64,
    pub trials_random: usize,
    pub trials_gaussian: usize,
    /// Moment oracle over the subspace coefficients enabling the
    /// conditioning + Gaussian-rounding route.
    pub oracle: Option<MomentOracle>,
}

impl AsvpConfig {
    pub fn new(seed: u64) -> Self {
        let d = Defaults::default();
        AsvpConfig {
            seed,
            trials_random: d.random_function_trials,
            trials_gaussian: d.gaussian_round_trials,
            oracle: None,
        }
    }
}

/// Run every configured subroutine and keep the best-ratio candidate.
pub fn asvp_search(space: &Subspace, mu: f64, config: &AsvpConfig) -> Result<AsvpResult> {
    if !(0.0 < mu && mu < 1.0) {
        return Err(Error::Guard(format!("mu must lie in (0,1), got {mu}")));
    }
    let mut candidates = Vec::new();
    candidates.push(coordinate_projection_round(space));

    let mut rng = crate::seeds::rng(config.seed, crate::seeds::STREAM_ROUNDING);
    let (rand_cand, _) = random_function_round(space, &mut rng, config.trials_random);
    candidates.push(rand_cand);

    if let Some(oracle) = &config.oracle {
        let tuples = if space.n() <= 24 {
            TupleCandidates::All
        } else {
            TupleCandidates::TopK(16)
        };
        let conditioned = condition_fourth_power(oracle, space, tuples)?;
        let mut grng = crate::seeds::rng(config.seed, crate::seeds::STREAM_ROUNDING + 10);
        let (gauss, _) = gaussian_round(
            &conditioned.oracle,
            space,
            &mut grng,
            config.trials_gaussian,
        )?;
        candidates.push(gauss);
    }

    let best = candidates
        .iter()
        .max_by(|a, b| a.ratio.partial_cmp(&b.ratio).unwrap())
        .expect("at least two candidates")
        .clone();
    let per: Vec<(Subroutine, f64)> = candidates.iter().map(|c| (c.tag, c.ratio)).collect();
    let membership_residual = space.membership_residual(&best.g);
    let recomputed = ratio_4_2(space.measure(), &best.g);
    debug_assert!((recomputed - best.ratio).abs() <= 1e-10 * recomputed.max(1.0));
    Ok(AsvpResult {
        g: best.g,
        ratio: best.ratio,
        winner: best.tag,
        per_subroutine: per,
        membership_residual,
    })
}
