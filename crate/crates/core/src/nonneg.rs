//! Maximization of a nonnegative-coefficient form over the unit sphere by
//! direct rounding plus entropy-guided conditioning.
//!
//! The loop alternates two moves on a moment source: read off the entrywise
//! square root of the second moments as a candidate (direct rounding), and
//! when its value falls short, reweigh the source by a product of squared
//! coordinates chosen to shrink the entropy of the index marginal.  The
//! entropy potential lives in `[0, log2 n]` bits and each conditioning step
//! removes at least `drop_threshold` bits, which caps the loop length.

use nalgebra::DVector;
use serde::Serialize;

use crate::empirical::EmpiricalDistribution;
use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::pseudo::{entropy_of_probs, hellinger, MomentOracle};
use crate::relax::MomentRelaxation;
use crate::tensor::TensorForm;
use crate::{Defaults, Error, Result};

/// Where the moments come from.
pub enum MomentSource {
    /// A finitely supported distribution; conditioning reweighs the samples
    /// and rebuilds moments at the same level.
    Empirical(EmpiricalDistribution),
    /// A standalone oracle; conditioning consumes `2(t-1)` levels per step.
    Oracle(MomentOracle),
    /// A relaxation to solve first, with (tol, max_iter, seed).
    Relaxation(Box<MomentRelaxation>, f64, usize, u64),
}

#[derive(Debug, Clone, Copy)]
pub enum Strategy {
    /// Search all `n^(t-1)` index tuples.
    Exhaustive,
    /// Pick indices one at a time by largest marginal-entropy drop, falling
    /// back to exhaustive when no single-index progress is found.
    Greedy,
}

#[derive(Debug, Clone)]
pub struct NonnegMaxConfig {
    pub eps: f64,
    /// Required entropy drop per conditioning step, in bits.  Default
    /// `eps^2 / t^2` (half the guaranteed average drop, margin for noise).
    pub drop_threshold: Option<f64>,
    pub strategy: Strategy,
    pub seed: u64,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
}

impl NonnegMaxConfig {
    pub fn new(eps: f64) -> Self {
        let d = Defaults::default();
        NonnegMaxConfig {
            eps,
            drop_threshold: None,
            strategy: Strategy::Exhaustive,
            seed: 0,
            solver_tol: d.solver_tol,
            solver_max_iter: d.solver_max_iter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LoopStatus {
    Rounded,
    IterationBudgetExhausted,
    /// No conditioning tuple achieved the drop while the value test failed
    /// (cannot happen on valid sources beyond the 4-eps margin).
    NoProgress,
    /// An oracle source ran out of levels for further conditioning.
    LevelExhausted,
}

/// One loop iteration record.
#[derive(Debug, Clone, Serialize)]
pub struct TraceRecord {
    pub iterate: usize,
    pub candidate: Vec<f64>,
    pub value: f64,
    pub hellinger_gap: f64,
    pub psi_before: f64,
    pub psi_after: Option<f64>,
    pub tuple: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NonnegMaxTrace {
    pub records: Vec<TraceRecord>,
    pub status: LoopStatus,
    pub conditioning_steps: usize,
    pub budget: usize,
    pub spectral_norm: f64,
    /// `pE M` of the initial source.
    pub target_value: f64,
}

/// Entrywise square root of the second moments, normalized to the unit
/// sphere.  Tiny negative second moments are clamped; ones below -1e-8
/// signal an invalid oracle.
pub fn direct_round(oracle: &MomentOracle) -> Result<DVector<f64>> {
    direct_round_with_tol(oracle, 1e-8)
}

/// [`direct_round`] with a caller-chosen clamp floor, for solver-produced
/// oracles whose PSD error is bounded by a tolerance above 1e-8.
pub fn direct_round_with_tol(oracle: &MomentOracle, clamp_tol: f64) -> Result<DVector<f64>> {
    let n = oracle.n();
    if oracle.level() < 2 {
        return Err(Error::DegreeOverflow {
            needed: 2,
            level: oracle.level(),
        });
    }
    let mut v = DVector::zeros(n);
    for i in 0..n {
        let m = oracle.moment(&Monomial::var_pow(n, i, 2))?;
        if m < -clamp_tol {
            return Err(Error::Guard(format!(
                "negative second moment {m:.3e} at {i}"
            )));
        }
        v[i] = m.max(0.0).sqrt();
    }
    let norm = v.norm();
    if norm < 1e-12 {
        return Err(Error::Guard("all second moments vanish".into()));
    }
    Ok(v / norm)
}

/// Hellinger distance between the joint distribution of `t` correlated
/// indices and the `t`-fold product of the marginal.
pub fn hellinger_product_gap(oracle: &MomentOracle, t: usize) -> Result<f64> {
    let joint = oracle.joint_index_distribution(t)?;
    let marg = oracle.marginal()?;
    let n = oracle.n();
    let cells = n.pow(t as u32);
    let mut product = vec![0.0; cells];
    for (cell, p) in product.iter_mut().enumerate() {
        let mut rest = cell;
        let mut prob = 1.0;
        for _ in 0..t {
            prob *= marg.probs()[rest % n];
            rest /= n;
        }
        *p = prob;
    }
    Ok(hellinger(joint.probs(), &product))
}

/// Entropy (bits) of the conditioned index marginal for a candidate
/// `(t-1)`-tuple, computed from degree-`2t` moments without reweighing.
/// `None` when the tuple's mass is below the reweighing tolerance.
fn conditioned_entropy(oracle: &MomentOracle, tuple: &[usize]) -> Result<Option<f64>> {
    let n = oracle.n();
    let mut probs = Vec::with_capacity(n);
    let mut total = 0.0;
    for i in 0..n {
        let mut e = vec![0u32; n];
        for &j in tuple {
            e[j] += 2;
        }
        e[i] += 2;
        let v = oracle.moment(&Monomial::new(e))?.max(0.0);
        probs.push(v);
        total += v;
    }
    if total <= oracle.reweigh_mass_tolerance() {
        return Ok(None);
    }
    for p in &mut probs {
        *p /= total;
    }
    Ok(Some(entropy_of_probs(&probs)))
}

/// Search for a conditioning tuple dropping the marginal entropy by at least
/// `drop_threshold` bits; return it with the reweighed oracle.  Failure to
/// find one comes back as [`Error::NoProgress`] carrying the best drop.
pub fn condition_step(
    oracle: &MomentOracle,
    t: usize,
    strategy: Strategy,
    drop_threshold: f64,
) -> Result<(Vec<usize>, MomentOracle)> {
    if t < 2 {
        return Err(Error::Guard("conditioning needs t >= 2".into()));
    }
    let needed = 2 * t + 2;
    if oracle.level() < needed && oracle.empirical().is_none() {
        return Err(Error::DegreeOverflow {
            needed,
            level: oracle.level(),
        });
    }
    let psi = entropy_of_probs(oracle.marginal()?.probs());
    let best = match strategy {
        Strategy::Exhaustive => best_tuple_exhaustive(oracle, t, psi)?,
        Strategy::Greedy => match best_tuple_greedy(oracle, t, psi)? {
            Some(found) if found.1 >= drop_threshold => Some(found),
            _ => best_tuple_exhaustive(oracle, t, psi)?,
        },
    };
    let (tuple, drop) = best.ok_or(Error::NoProgress {
        best: 0.0,
        needed: drop_threshold,
    })?;
    if drop < drop_threshold {
        return Err(Error::NoProgress {
            best: drop,
            needed: drop_threshold,
        });
    }
    let factors: Vec<Polynomial> = tuple
        .iter()
        .map(|&i| Polynomial::monomial(oracle.n(), Monomial::var(oracle.n(), i), 1.0))
        .collect();
    let reweighed = condition_by(oracle, &factors)?;
    Ok((tuple, reweighed))
}

/// Reweigh by `prod f_i^2`, rebuilding from samples at the same level for
/// empirical-provenance oracles.
fn condition_by(oracle: &MomentOracle, factors: &[Polynomial]) -> Result<MomentOracle> {
    if let Some(dist) = oracle.empirical() {
        let weight = |s: &DVector<f64>| {
            factors
                .iter()
                .map(|f| {
                    let v = f.evaluate(s.as_slice()).expect("factor dimension");
                    v * v
                })
                .product::<f64>()
        };
        let tol = oracle.reweigh_mass_tolerance();
        let reweighed = dist.reweighed(weight, tol)?;
        return MomentOracle::from_samples(&reweighed, oracle.level());
    }
    oracle.reweigh(factors)
}

fn best_tuple_exhaustive(
    oracle: &MomentOracle,
    t: usize,
    psi: f64,
) -> Result<Option<(Vec<usize>, f64)>> {
    let n = oracle.n();
    let k = t - 1;
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut tuple = vec![0usize; k];
    loop {
        if let Some(h) = conditioned_entropy(oracle, &tuple)? {
            let drop = psi - h;
            if best.as_ref().map_or(true, |b| drop > b.1) {
                best = Some((tuple.clone(), drop));
            }
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(best);
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < n {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

fn best_tuple_greedy(
    oracle: &MomentOracle,
    t: usize,
    psi: f64,
) -> Result<Option<(Vec<usize>, f64)>> {
    let n = oracle.n();
    let mut tuple: Vec<usize> = Vec::new();
    for _ in 0..t - 1 {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..n {
            let mut cand = tuple.clone();
            cand.push(i);
            if let Some(h) = conditioned_entropy(oracle, &cand)? {
                let drop = psi - h;
                if best.map_or(true, |b| drop > b.1) {
                    best = Some((i, drop));
                }
            }
        }
        match best {
            Some((i, _)) => tuple.push(i),
            None => return Ok(None),
        }
    }
    match conditioned_entropy(oracle, &tuple)? {
        Some(h) => Ok(Some((tuple, psi - h))),
        None => Ok(None),
    }
}

/// The combining/rounding loop for a nonnegative-coefficient form of order
/// `2t`.
///
/// Runs at most `ceil(t^2 log2 n / eps^2)` iterations of direct rounding,
/// value test, and conditioning; returns the best candidate seen.  On a
/// source whose value `pE M = c` is conditioning-invariant (distributions
/// supported on equal-value points, or relaxations consistent with
/// `M(x) = c`), the output satisfies `M(x*) >= c - 4 eps ||M||`.
pub fn maximize_nonneg(
    form: &TensorForm,
    source: MomentSource,
    config: &NonnegMaxConfig,
) -> Result<(DVector<f64>, NonnegMaxTrace)> {
    if !form.has_nonneg_coefficients() {
        return Err(Error::Guard("form has negative coefficients".into()));
    }
    if form.order() == 0 || form.order() % 2 != 0 {
        return Err(Error::OddOrder(form.order()));
    }
    if config.eps <= 0.0 {
        return Err(Error::Guard("eps must be positive".into()));
    }
    let t = form.order() / 2;
    let n = form.n();
    let spectral = form.spectral_norm()?;
    let eps = config.eps;
    let drop_threshold = config.drop_threshold.unwrap_or(eps * eps / (t * t) as f64);
    let budget = ((t * t) as f64 * (n as f64).log2().max(1.0) / (eps * eps)).ceil() as usize;

    let mut oracle = match source {
        MomentSource::Empirical(d) => MomentOracle::from_samples(&d, 2 * t)?,
        MomentSource::Oracle(o) => o,
        MomentSource::Relaxation(r, tol, max_iter, seed) => {
            r.solve_sdp(tol, max_iter, seed)?.oracle
        }
    };
    // solver-produced moments carry PSD error up to the solver tolerance
    let clamp_tol = match oracle.provenance() {
        crate::pseudo::Provenance::Empirical => 1e-8,
        _ => (10.0 * config.solver_tol).max(1e-8),
    };
    if oracle.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: oracle.n(),
        });
    }
    if oracle.level() < 2 * t {
        return Err(Error::DegreeOverflow {
            needed: 2 * t,
            level: oracle.level(),
        });
    }

    let target_value = oracle.pe_evaluate(form.poly())?;

    let mut records = Vec::new();
    let mut best: Option<(DVector<f64>, f64)> = None;
    let mut conditioning_steps = 0usize;
    let mut status = LoopStatus::IterationBudgetExhausted;

    for iterate in 0..budget {
        let candidate = direct_round_with_tol(&oracle, clamp_tol)?;
        let value = form.evaluate(candidate.as_slice())?;
        if best.as_ref().map_or(true, |b| value > b.1) {
            best = Some((candidate.clone(), value));
        }
        let gap = hellinger_product_gap(&oracle, t)?;
        let psi_before = entropy_of_probs(oracle.marginal()?.probs());
        let c_current = oracle.pe_evaluate(form.poly())?;

        let mut record = TraceRecord {
            iterate,
            candidate: candidate.as_slice().to_vec(),
            value,
            hellinger_gap: gap,
            psi_before,
            psi_after: None,
            tuple: None,
        };

        if value >= c_current - 4.0 * eps * spectral - 1e-12 {
            records.push(record);
            status = LoopStatus::Rounded;
            break;
        }

        if oracle.empirical().is_none() && oracle.level() < 2 * t + 2 {
            records.push(record);
            status = LoopStatus::LevelExhausted;
            break;
        }

        match condition_step(&oracle, t, config.strategy, drop_threshold) {
            Ok((tuple, next)) => {
                let psi_after = entropy_of_probs(next.marginal()?.probs());
                record.psi_after = Some(psi_after);
                record.tuple = Some(tuple);
                records.push(record);
                conditioning_steps += 1;
                oracle = next;
            }
            Err(Error::NoProgress { .. }) => {
                records.push(record);
                status = LoopStatus::NoProgress;
                break;
            }
            Err(e) => return Err(e),
        }
    }

    let (vector, _) = best.expect("at least one direct round");
    Ok((
        vector,
        NonnegMaxTrace {
            records,
            status,
            conditioning_steps,
            budget,
            spectral_norm: spectral,
            target_value,
        },
    ))
}

/// Maximize a not-necessarily-homogeneous polynomial with nonnegative
/// coefficients over the unit sphere by routing through the even
/// homogenization.
///
/// Odd-degree monomials are absorbed by a pinned auxiliary variable; the
/// constraint set `{x_aux = 1/2, ||x||  = 1}` is rescaled onto the unit
/// sphere of the extended space so the rounding guarantee applies verbatim,
/// and the returned vector satisfies the pin after undoing the rescaling
/// (asserted on the output).
pub fn maximize_nonneg_poly(
    p: &Polynomial,
    config: &NonnegMaxConfig,
    level: usize,
) -> Result<(DVector<f64>, f64, NonnegMaxTrace)> {
    if !p.has_nonneg_coefficients() {
        return Err(Error::Guard("polynomial has negative coefficients".into()));
    }
    let form = crate::tensor::homogenize_even(p, None)?;
    let total = form.n();
    let (aux, pin) = match form.fixed_var() {
        Some((idx, v)) => (Some(idx), v),
        None => (None, 0.0),
    };

    // constraint-set radius: sphere part unit plus the pinned coordinate
    let radius = match aux {
        Some(_) => (1.0 + pin * pin).sqrt(),
        None => 1.0,
    };
    let mut constraints = Vec::new();
    let mut sphere = Polynomial::zero(total);
    let start = usize::from(aux.is_some());
    for i in start..total {
        sphere.add_term(Monomial::var_pow(total, i, 2), 1.0);
    }
    sphere.add_term(Monomial::one(total), -1.0 / (radius * radius));
    constraints.push(sphere);
    if let Some(idx) = aux {
        let mut pinc = Polynomial::monomial(total, Monomial::var(total, idx), 1.0);
        pinc.add_term(Monomial::one(total), -pin / radius);
        constraints.push(pinc);
    }

    let relax = crate::relax::build_moment_relaxation(
        total,
        level,
        constraints,
        form.poly().clone(),
        vec![],
    )?;
    let source = MomentSource::Relaxation(
        Box::new(relax),
        config.solver_tol,
        config.solver_max_iter,
        config.seed,
    );
    let (z, trace) = maximize_nonneg(&form, source, config)?;

    // undo the rescaling: the output lands on {x_aux = 1/2, sphere part unit}
    let x = &z * radius;
    if let Some(idx) = aux {
        let drift = (x[idx] - pin).abs();
        if drift > 1e-3 {
            return Err(Error::Guard(format!(
                "rounded output misses the pinned auxiliary value by {drift:.3e}"
            )));
        }
    }
    let out = DVector::from_fn(total - start, |i, _| x[start + i]);
    let nrm = out.norm();
    let out = if nrm > 1e-12 { out / nrm } else { out };
    let value = p.evaluate(out.as_slice())?;
    Ok((out, value, trace))
}

/// Build a two-point uniform mixture on the sphere whose support points share
/// one value of the form (so `pE M = c` is conditioning-invariant): bisection
/// along the normalized chord between a bracketing pair.
pub fn equal_value_two_point_source(
    form: &TensorForm,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<(EmpiricalDistribution, f64)> {
    let n = form.n();
    let anchor = crate::seeds::unit_vector(rng, n);
    let target = form.evaluate(anchor.as_slice())?;
    for _ in 0..200 {
        let lo = crate::seeds::unit_vector(rng, n);
        let hi = crate::seeds::unit_vector(rng, n);
        let vlo = form.evaluate(lo.as_slice())?;
        let vhi = form.evaluate(hi.as_slice())?;
        let (a, b, va, vb) = if vlo <= vhi {
            (lo, hi, vlo, vhi)
        } else {
            (hi, lo, vhi, vlo)
        };
        if !(va <= target && target <= vb) {
            continue;
        }
        // bisect on the normalized chord
        let mut s_lo = 0.0f64;
        let mut s_hi = 1.0f64;
        let path = |a: &DVector<f64>, b: &DVector<f64>, s: f64| -> Option<DVector<f64>> {
            let v = a * (1.0 - s) + b * s;
            let nrm = v.norm();
            if nrm < 1e-9 {
                None
            } else {
                Some(v / nrm)
            }
        };
        let mut valid = true;
        for _ in 0..200 {
            let mid = 0.5 * (s_lo + s_hi);
            match path(&a, &b, mid) {
                Some(p) => {
                    if form.evaluate(p.as_slice())? <= target {
                        s_lo = mid;
                    } else {
                        s_hi = mid;
                    }
                }
                None => {
                    valid = false;
                    break;
                }
            }
        }
        if !valid {
            continue;
        }
        let point = match path(&a, &b, 0.5 * (s_lo + s_hi)) {
            Some(p) => p,
            None => continue,
        };
        let err = (form.evaluate(point.as_slice())? - target).abs();
        if err > 1e-10 * target.abs().max(1.0) {
            continue;
        }
        if (&point - &anchor).norm() < 1e-6 {
            continue;
        }
        let dist = EmpiricalDistribution::uniform(vec![anchor, point])?;
        return Ok((dist, target));
    }
    Err(Error::Guard("no equal-value bracket found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds;
    use crate::subspace::Measure;

    fn e(n: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v
    }

    fn oracle_of(points: Vec<DVector<f64>>, level: usize) -> MomentOracle {
        MomentOracle::from_samples(&EmpiricalDistribution::uniform(points).unwrap(), level).unwrap()
    }

    #[test]
    fn direct_round_examples() {
        let o = oracle_of(vec![e(3, 0)], 2);
        assert_eq!(direct_round(&o).unwrap(), e(3, 0));

        let o = oracle_of(vec![e(2, 0), e(2, 1)], 2);
        let x = direct_round(&o).unwrap();
        let r = 0.5f64.sqrt();
        assert!((x[0] - r).abs() < 1e-12 && (x[1] - r).abs() < 1e-12);

        // sign information is lost by design
        let o = oracle_of(vec![e(2, 0), -e(2, 0)], 2);
        let x = direct_round(&o).unwrap();
        assert_eq!(x, e(2, 0));
        assert!(x.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn gap_examples() {
        let o = oracle_of(vec![e(2, 0)], 4);
        assert!(hellinger_product_gap(&o, 2).unwrap() < 1e-12);

        let o = oracle_of(vec![e(2, 0), e(2, 1)], 4);
        let g = hellinger_product_gap(&o, 2).unwrap();
        let want = (1.0 - 2.0 * (1.0f64 / 8.0).sqrt()).sqrt();
        assert!((g - want).abs() < 1e-12, "gap {g} vs {want}");
        assert!((g - 0.5411961001461971).abs() < 1e-9);
    }

    #[test]
    fn condition_collapses_two_point_mixture() {
        let o = oracle_of(vec![e(2, 0), e(2, 1)], 4);
        let psi0 = entropy_of_probs(o.marginal().unwrap().probs());
        assert!((psi0 - 1.0).abs() < 1e-12);
        let (tuple, next) = condition_step(&o, 2, Strategy::Exhaustive, 0.5).unwrap();
        assert_eq!(tuple.len(), 1);
        let psi1 = entropy_of_probs(next.marginal().unwrap().probs());
        assert!(psi1 < 1e-12);
        let hit = next.moment(&Monomial::var_pow(2, tuple[0], 2)).unwrap();
        assert_eq!(hit, 1.0);
    }

    #[test]
    fn greedy_matches_exhaustive_on_achieved_drop() {
        let mut rng = seeds::rng(50, seeds::STREAM_ROUNDING);
        for _ in 0..10 {
            let pts: Vec<DVector<f64>> = (0..3).map(|_| seeds::unit_vector(&mut rng, 4)).collect();
            let o = oracle_of(pts, 4);
            let psi = entropy_of_probs(o.marginal().unwrap().probs());
            let ex = best_tuple_exhaustive(&o, 2, psi).unwrap();
            let gr = best_tuple_greedy(&o, 2, psi).unwrap();
            if let (Some((_, de)), Some((_, dg))) = (ex, gr) {
                // for t = 2 greedy and exhaustive search the same candidate set
                assert!((de - dg).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn maximize_point_mass_needs_no_conditioning() {
        let p = Polynomial::monomial(2, Monomial::var_pow(2, 0, 4), 1.0);
        let form = TensorForm::new(p, Measure::Counting).unwrap();
        let src = MomentSource::Empirical(EmpiricalDistribution::point_mass(e(2, 0)));
        let (x, trace) = maximize_nonneg(&form, src, &NonnegMaxConfig::new(0.1)).unwrap();
        assert_eq!(x, e(2, 0));
        assert_eq!(trace.status, LoopStatus::Rounded);
        assert_eq!(trace.conditioning_steps, 0);
        assert!((trace.records[0].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximize_norm4_any_oracle_is_optimal() {
        let form = TensorForm::new(
            Polynomial::sum_of_squares_of_vars(3).square(),
            Measure::Counting,
        )
        .unwrap();
        let mut rng = seeds::rng(51, seeds::STREAM_ROUNDING);
        let pts: Vec<DVector<f64>> = (0..4).map(|_| seeds::unit_vector(&mut rng, 3)).collect();
        let src = MomentSource::Empirical(EmpiricalDistribution::uniform(pts).unwrap());
        let (x, trace) = maximize_nonneg(&form, src, &NonnegMaxConfig::new(0.1)).unwrap();
        assert!((form.evaluate(x.as_slice()).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(trace.status, LoopStatus::Rounded);
    }

    #[test]
    fn rejects_negative_coefficients() {
        let p = Polynomial::monomial(2, Monomial::var_pow(2, 0, 4), -1.0);
        let form = TensorForm::new(p, Measure::Counting).unwrap();
        let src = MomentSource::Empirical(EmpiricalDistribution::point_mass(e(2, 0)));
        assert!(maximize_nonneg(&form, src, &NonnegMaxConfig::new(0.1)).is_err());
    }

    #[test]
    fn odd_degree_routing_maximizes_on_the_circle() {
        // max of x1^3 over the unit circle is 1 at e1; the homogenized form
        // carries the pinned auxiliary variable through the relaxation
        let p = Polynomial::monomial(2, Monomial::var_pow(2, 0, 3), 1.0);
        let cfg = NonnegMaxConfig::new(0.1);
        let (x, value, _trace) = maximize_nonneg_poly(&p, &cfg, 4).unwrap();
        assert_eq!(x.len(), 2);
        assert!((x.norm() - 1.0).abs() < 1e-9);
        assert!(value >= 0.6, "value {value}");

        // even non-homogeneous input takes the same route without the pin
        let mut q = Polynomial::monomial(2, Monomial::var_pow(2, 0, 2), 1.0);
        q.add_term(Monomial::new(vec![2, 2]), 0.5);
        let (y, v, _) = maximize_nonneg_poly(&q, &cfg, 4).unwrap();
        assert_eq!(y.len(), 2);
        // max of x1^2 + x1^2 x2^2 / 2 on the circle is 9/8 at x1^2 = 3/4
        assert!(v >= 9.0 / 8.0 - 0.45, "value {v}");
    }

    #[test]
    fn equal_value_source_supports_share_the_value() {
        let mut rng = seeds::rng(53, seeds::STREAM_INSTANCE);
        for _ in 0..5 {
            let p = seeds::random_nonneg_form(&mut rng, 5, 4, 10);
            if p.is_zero() {
                continue;
            }
            let form = TensorForm::new(p, Measure::Counting).unwrap();
            let (dist, c) = equal_value_two_point_source(&form, &mut rng).unwrap();
            assert_eq!(dist.len(), 2);
            for s in dist.samples() {
                assert!((s.norm() - 1.0).abs() < 1e-10);
                let v = form.evaluate(s.as_slice()).unwrap();
                assert!((v - c).abs() <= 1e-9 * c.abs().max(1.0), "{v} vs {c}");
            }
        }
    }

    #[test]
    fn equal_value_mixture_keeps_margin_end_to_end() {
        // the §3 guarantee in its acceptance form: value >= c - 4 eps ||M||
        let mut rng = seeds::rng(54, seeds::STREAM_INSTANCE);
        let p = seeds::random_nonneg_form(&mut rng, 8, 4, 20);
        let norm = TensorForm::new(p.clone(), Measure::Counting)
            .unwrap()
            .spectral_norm()
            .unwrap();
        let form = TensorForm::new(p.scale(1.0 / norm), Measure::Counting).unwrap();
        let (dist, c) = equal_value_two_point_source(&form, &mut rng).unwrap();
        let (x, trace) = maximize_nonneg(
            &form,
            MomentSource::Empirical(dist),
            &NonnegMaxConfig::new(0.1),
        )
        .unwrap();
        let value = form.evaluate(x.as_slice()).unwrap();
        assert!(
            value >= c - 4.0 * 0.1 * 1.0 - 1e-9,
            "value {value} < c - margin with c = {c}"
        );
        assert!(trace.records.len() <= trace.budget);
    }

    #[test]
    fn trace_psi_strictly_decreases_and_termination_bound_holds() {
        let mut rng = seeds::rng(52, seeds::STREAM_ROUNDING);
        let p = seeds::random_nonneg_form(&mut rng, 4, 4, 8);
        let form = TensorForm::new(p, Measure::Counting).unwrap();
        let pts: Vec<DVector<f64>> = (0..5).map(|_| seeds::unit_vector(&mut rng, 4)).collect();
        let src = MomentSource::Empirical(EmpiricalDistribution::uniform(pts).unwrap());
        let cfg = NonnegMaxConfig::new(0.15);
        let (_, trace) = maximize_nonneg(&form, src, &cfg).unwrap();
        let drop_threshold = 0.15f64.powi(2) / 4.0;
        let mut prev_after: Option<f64> = None;
        for r in &trace.records {
            if let Some(pa) = prev_after {
                // psi_before of the next iterate equals psi_after of the
                // conditioning step that produced it
                assert!((r.psi_before - pa).abs() < 1e-12);
            }
            if let Some(after) = r.psi_after {
                assert!(after <= r.psi_before - drop_threshold + 1e-12);
            }
            prev_after = r.psi_after;
        }
        let psi0 = trace.records[0].psi_before;
        assert!(trace.conditioning_steps as f64 <= (psi0 / drop_threshold).ceil());
        assert!(trace.records.len() <= trace.budget);
    }
}
