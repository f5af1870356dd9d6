use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::empirical::EmpiricalDistribution;
use crate::monomial::{Monomial, MonomialTable};
use crate::poly::Polynomial;
use crate::{Defaults, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Empirical,
    Sdp,
    Product,
    Reweighed,
}

/// A level-`l` pseudoexpectation: the linear functional on polynomials of
/// degree at most `l` determined by a moment for every monomial, normalized
/// and with a positive semidefinite moment matrix.
#[derive(Clone)]
pub struct MomentOracle {
    table: Arc<MonomialTable>,
    moments: Vec<f64>,
    provenance: Provenance,
    /// Kept for empirical-provenance oracles so that conditioning pipelines
    /// can rebuild exact moments of the reweighed sample distribution at any
    /// level.
    empirical: Option<EmpiricalDistribution>,
}

impl std::fmt::Debug for MomentOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MomentOracle")
            .field("n", &self.n())
            .field("level", &self.level())
            .field("provenance", &self.provenance)
            .field("moments", &self.moments.len())
            .finish()
    }
}

/// Probabilities `p_i = pE x_i^2 / sum_j pE x_j^2` over the variable indices.
#[derive(Debug, Clone)]
pub struct MarginalDistribution {
    probs: Vec<f64>,
}

impl MarginalDistribution {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Joint distribution over `[n]^t` with cell `(i_1..i_t)` proportional to
/// `pE x_{i_1}^2 ... x_{i_t}^2`, stored flat in row-major order.
#[derive(Debug, Clone)]
pub struct JointIndexDistribution {
    pub n: usize,
    pub t: usize,
    probs: Vec<f64>,
}

impl JointIndexDistribution {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Diagnostic output of [`MomentOracle::validate`].
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub min_eigenvalue: f64,
    pub normalization_residual: f64,
    /// Values `pE P^2` for random polynomials `P` of degree <= level/2,
    /// paired with the squared coefficient scale of `P`.
    pub square_checks: Vec<(f64, f64)>,
    /// On a positivity failure, a polynomial witnessing `pE P^2 < 0`.
    pub witness: Option<Polynomial>,
    pub passed: bool,
}

/// Outcome of the pseudoexpectation Holder check.
#[derive(Debug, Clone)]
pub struct HolderReport {
    /// `pE p^{r'} - (pE p^r)^{r'/r}`; nonnegative (to tolerance) on valid oracles.
    pub residual: f64,
    /// True when the oracle level is below the lemma's `10 d c k` requirement;
    /// the inequality is still evaluated, the flag just marks sub-threshold use.
    pub below_lemma_level: bool,
}

impl MomentOracle {
    pub fn from_parts(
        table: Arc<MonomialTable>,
        moments: Vec<f64>,
        provenance: Provenance,
    ) -> Result<Self> {
        if moments.len() != table.len() {
            return Err(Error::DimensionMismatch {
                expected: table.len(),
                got: moments.len(),
            });
        }
        Ok(MomentOracle {
            table,
            moments,
            provenance,
            empirical: None,
        })
    }

    /// Exact moments of a finitely supported distribution.
    pub fn from_samples(dist: &EmpiricalDistribution, level: usize) -> Result<Self> {
        if level % 2 != 0 {
            return Err(Error::Guard(format!("level must be even, got {level}")));
        }
        let defaults = Defaults::default();
        let table = MonomialTable::new(dist.dim(), level, defaults.moment_guard)?;
        let mut moments: Vec<f64> = table.monomials.iter().map(|m| dist.moment(m)).collect();
        moments[0] = 1.0;
        Ok(MomentOracle {
            table,
            moments,
            provenance: Provenance::Empirical,
            empirical: Some(dist.clone()),
        })
    }

    pub fn n(&self) -> usize {
        self.table.n
    }

    pub fn level(&self) -> usize {
        self.table.level
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn table(&self) -> &Arc<MonomialTable> {
        &self.table
    }

    pub fn moments(&self) -> &[f64] {
        &self.moments
    }

    /// The backing sample distribution, present on empirical-provenance oracles.
    pub fn empirical(&self) -> Option<&EmpiricalDistribution> {
        self.empirical.as_ref()
    }

    pub fn moment(&self, m: &Monomial) -> Result<f64> {
        if m.degree() > self.level() {
            return Err(Error::DegreeOverflow {
                needed: m.degree(),
                level: self.level(),
            });
        }
        self.table
            .index_of(m)
            .map(|i| self.moments[i])
            .ok_or(Error::DimensionMismatch {
                expected: self.n(),
                got: m.nvars(),
            })
    }

    /// `pE P = sum_alpha c_alpha moment(alpha)`.
    pub fn pe_evaluate(&self, p: &Polynomial) -> Result<f64> {
        if p.degree() > self.level() {
            return Err(Error::DegreeOverflow {
                needed: p.degree(),
                level: self.level(),
            });
        }
        let mut acc = 0.0;
        for (m, &c) in p.terms() {
            acc += c * self.moment(m)?;
        }
        Ok(acc)
    }

    /// The moment matrix over the degree `<= level/2` monomial basis:
    /// entry `(alpha, beta) = moment(alpha + beta)`.
    pub fn moment_matrix(&self) -> DMatrix<f64> {
        let basis: Vec<&Monomial> = self
            .table
            .monomials
            .iter()
            .take_while(|m| m.degree() <= self.level() / 2)
            .collect();
        let k = basis.len();
        DMatrix::from_fn(k, k, |i, j| {
            let prod = basis[i].mul(basis[j]);
            self.moments[self.table.index_of(&prod).expect("product stays in table")]
        })
    }

    /// Diagnostic validation: moment-matrix eigenvalue floor, normalization
    /// drift, and `pE P^2 >= -tol * scale(P)` for 20 random polynomials.
    pub fn validate(&self, tol_psd: f64, tol_norm: f64, rng: &mut ChaCha8Rng) -> ValidationReport {
        let mm = self.moment_matrix();
        let eig = mm.clone().symmetric_eigen();
        let mut min_eig = f64::INFINITY;
        let mut min_idx = 0;
        for (i, &l) in eig.eigenvalues.iter().enumerate() {
            if l < min_eig {
                min_eig = l;
                min_idx = i;
            }
        }
        let normalization_residual = (self.moments[0] - 1.0).abs();

        let mut square_checks = Vec::new();
        let mut ok = true;
        for _ in 0..20 {
            let p = crate::seeds::random_poly(rng, self.n(), self.level() / 2, 4);
            let scale: f64 = p.terms().map(|(_, &c)| c * c).sum::<f64>().max(1e-30);
            let v = self.pe_evaluate(&p.square()).unwrap_or(f64::NAN);
            if !(v >= -tol_psd * scale) {
                ok = false;
            }
            square_checks.push((v, scale));
        }

        let scale = eig
            .eigenvalues
            .iter()
            .fold(0.0f64, |a, &l| a.max(l.abs()))
            .max(1.0);
        let psd_ok = min_eig >= -tol_psd * scale;
        let witness = if psd_ok {
            None
        } else {
            // The eigenvector of the most negative eigenvalue, read as a
            // polynomial over the moment-matrix basis, has pE P^2 = min_eig.
            let basis: Vec<&Monomial> = self
                .table
                .monomials
                .iter()
                .take_while(|m| m.degree() <= self.level() / 2)
                .collect();
            let v = eig.eigenvectors.column(min_idx);
            let mut w = Polynomial::zero(self.n());
            for (b, &c) in basis.iter().zip(v.iter()) {
                w.add_term((*b).clone(), c);
            }
            Some(w)
        };

        ValidationReport {
            min_eigenvalue: min_eig,
            normalization_residual,
            square_checks,
            witness,
            passed: psd_ok && ok && normalization_residual <= tol_norm,
        }
    }

    /// Condition on the square-product weight `w = prod_i factors_i^2`.
    ///
    /// The output has level `l - deg w` and moments `pE[w x^alpha] / pE[w]`.
    /// Positivity is preserved because `w P^2 = (prod factors * P)^2`.
    pub fn reweigh(&self, factors: &[Polynomial]) -> Result<MomentOracle> {
        let mut w = Polynomial::constant(self.n(), 1.0);
        for f in factors {
            w = w.mul(&f.square());
        }
        let degw = w.degree();
        if degw + 2 > self.level() {
            return Err(Error::DegreeOverflow {
                needed: degw + 2,
                level: self.level(),
            });
        }
        let mass = self.pe_evaluate(&w)?;
        let tol = self.reweigh_mass_tolerance();
        if mass <= tol {
            return Err(Error::MassBelowTolerance { mass, tol });
        }
        let new_level = self.level() - degw;
        let defaults = Defaults::default();
        let table = MonomialTable::new(self.n(), new_level, defaults.moment_guard)?;
        let mut moments = Vec::with_capacity(table.len());
        for m in &table.monomials {
            let shifted = w.mul_monomial(m);
            moments.push(self.pe_evaluate(&shifted)? / mass);
        }
        moments[0] = 1.0;
        let empirical = match &self.empirical {
            Some(d) => {
                let weight = |s: &DVector<f64>| {
                    factors
                        .iter()
                        .map(|f| {
                            let v = f.evaluate(s.as_slice()).expect("factor dimension");
                            v * v
                        })
                        .product::<f64>()
                };
                d.reweighed(weight, 0.0).ok()
            }
            None => None,
        };
        Ok(MomentOracle {
            table,
            moments,
            provenance: Provenance::Reweighed,
            empirical,
        })
    }

    /// `1e-12 * (largest second moment)` — conditioning candidates with
    /// smaller mass are skipped.
    pub fn reweigh_mass_tolerance(&self) -> f64 {
        let mut largest: f64 = 0.0;
        for i in 0..self.n() {
            if let Ok(v) = self.moment(&Monomial::var_pow(self.n(), i, 2)) {
                largest = largest.max(v);
            }
        }
        Defaults::default().tol_reweigh_factor * largest.max(1e-300)
    }

    /// The index marginal `Pr[A = i] proportional to pE x_i^2`.
    pub fn marginal(&self) -> Result<MarginalDistribution> {
        if self.level() < 2 {
            return Err(Error::DegreeOverflow {
                needed: 2,
                level: self.level(),
            });
        }
        let mut probs = Vec::with_capacity(self.n());
        for i in 0..self.n() {
            probs.push(self.moment(&Monomial::var_pow(self.n(), i, 2))?.max(0.0));
        }
        let total: f64 = probs.iter().sum();
        if total < 1e-14 {
            return Err(Error::Guard("all second moments below 1e-14".into()));
        }
        for p in &mut probs {
            *p /= total;
        }
        Ok(MarginalDistribution { probs })
    }

    /// Joint distribution of `t` correlated indices with cell probability
    /// `pE x_{i_1}^2 ... x_{i_t}^2`, normalized by the total mass.
    pub fn joint_index_distribution(&self, t: usize) -> Result<JointIndexDistribution> {
        if 2 * t > self.level() {
            return Err(Error::DegreeOverflow {
                needed: 2 * t,
                level: self.level(),
            });
        }
        let n = self.n();
        let cells = n.pow(t as u32);
        let mut probs = vec![0.0; cells];
        let mut idx = vec![0usize; t];
        for (cell, p) in probs.iter_mut().enumerate() {
            let mut rest = cell;
            for j in (0..t).rev() {
                idx[j] = rest % n;
                rest /= n;
            }
            let mut e = vec![0u32; n];
            for &i in &idx {
                e[i] += 2;
            }
            *p = self.moment(&Monomial::new(e))?.max(0.0);
        }
        let total: f64 = probs.iter().sum();
        if total < 1e-14 {
            return Err(Error::Guard("joint table has no mass".into()));
        }
        for p in &mut probs {
            *p /= total;
        }
        Ok(JointIndexDistribution { n, t, probs })
    }

    /// Draw from the multivariate normal matching the oracle's first two
    /// moments.  Covariance eigenvalues in `[-1e-8, 0]` are zeroed; smaller
    /// ones signal an invalid oracle.
    pub fn gaussian_sample(&self, rng: &mut ChaCha8Rng, count: usize) -> Result<Vec<DVector<f64>>> {
        self.gaussian_sample_with_tol(rng, count, 1e-8)
    }

    /// [`MomentOracle::gaussian_sample`] with a caller-chosen repair
    /// threshold, for oracles whose PSD error is bounded by a solver
    /// tolerance above 1e-8.
    pub fn gaussian_sample_with_tol(
        &self,
        rng: &mut ChaCha8Rng,
        count: usize,
        clip_tol: f64,
    ) -> Result<Vec<DVector<f64>>> {
        if self.level() < 2 {
            return Err(Error::DegreeOverflow {
                needed: 2,
                level: self.level(),
            });
        }
        let n = self.n();
        let mean = DVector::from_fn(n, |i, _| {
            self.moment(&Monomial::var(n, i))
                .expect("first moments present")
        });
        let mut cov = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut e = vec![0u32; n];
                e[i] += 1;
                e[j] += 1;
                cov[(i, j)] = self.moment(&Monomial::new(e))? - mean[i] * mean[j];
            }
        }
        let eig = cov.symmetric_eigen();
        let mut scales = Vec::with_capacity(n);
        for &l in eig.eigenvalues.iter() {
            if l < -clip_tol {
                return Err(Error::InvalidCovariance(l));
            }
            scales.push(l.max(0.0).sqrt());
        }
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let xi = DVector::from_fn(n, |i, _| scales[i] * crate::seeds::standard_normal(rng));
            out.push(&mean + &eig.eigenvectors * xi);
        }
        Ok(out)
    }

    /// The pseudoexpectation of two independent copies: moments of the
    /// concatenated variables factor across the blocks.
    pub fn product_oracle(a: &MomentOracle, b: &MomentOracle) -> Result<MomentOracle> {
        if a.level() != b.level() {
            return Err(Error::Guard(format!(
                "level mismatch: {} vs {}",
                a.level(),
                b.level()
            )));
        }
        let n = a.n() + b.n();
        let level = a.level();
        let defaults = Defaults::default();
        let table = MonomialTable::new(n, level, defaults.moment_guard)?;
        let mut moments = Vec::with_capacity(table.len());
        for m in &table.monomials {
            let e = m.exponents();
            let ma = Monomial::new(e[..a.n()].to_vec());
            let mb = Monomial::new(e[a.n()..].to_vec());
            moments.push(a.moment(&ma)? * b.moment(&mb)?);
        }
        let empirical = match (&a.empirical, &b.empirical) {
            (Some(da), Some(db)) => product_empirical(da, db).ok(),
            _ => None,
        };
        Ok(MomentOracle {
            table,
            moments,
            provenance: Provenance::Product,
            empirical,
        })
    }

    /// Pseudo Cauchy-Schwarz residual `sqrt(pE p^2) sqrt(pE q^2) - pE pq`;
    /// nonnegative (to tolerance) on any valid oracle.
    pub fn check_cauchy_schwarz(&self, p: &Polynomial, q: &Polynomial) -> Result<f64> {
        let p2 = self.pe_evaluate(&p.square())?.max(0.0);
        let q2 = self.pe_evaluate(&q.square())?.max(0.0);
        let pq = self.pe_evaluate(&p.mul(q))?;
        Ok(p2.sqrt() * q2.sqrt() - pq)
    }

    /// Pseudoexpectation Holder: for a sum-of-squares `p` and `r = c k`,
    /// `r' = (c+1) k`, the residual `pE p^{r'} - (pE p^r)^{r'/r}`.
    pub fn check_holder(&self, p: &Polynomial, c: u32, k: u32) -> Result<HolderReport> {
        let r = (c * k) as usize;
        let rp = ((c + 1) * k) as usize;
        let needed = p.degree() * rp;
        if needed > self.level() {
            return Err(Error::DegreeOverflow {
                needed,
                level: self.level(),
            });
        }
        let below = self.level() < 10 * p.degree() * (c as usize) * (k as usize);
        let mut pr = Polynomial::constant(self.n(), 1.0);
        for _ in 0..r {
            pr = pr.mul(p);
        }
        let mut prp = pr.clone();
        for _ in r..rp {
            prp = prp.mul(p);
        }
        let lhs = self.pe_evaluate(&prp)?;
        let rhs = self.pe_evaluate(&pr)?.max(0.0).powf(rp as f64 / r as f64);
        Ok(HolderReport {
            residual: lhs - rhs,
            below_lemma_level: below,
        })
    }
}

fn product_empirical(
    a: &EmpiricalDistribution,
    b: &EmpiricalDistribution,
) -> Result<EmpiricalDistribution> {
    let mut samples = Vec::with_capacity(a.len() * b.len());
    let mut weights = Vec::with_capacity(a.len() * b.len());
    for (sa, &wa) in a.samples().iter().zip(a.weights()) {
        for (sb, &wb) in b.samples().iter().zip(b.weights()) {
            let mut v = DVector::zeros(sa.len() + sb.len());
            v.rows_mut(0, sa.len()).copy_from(sa);
            v.rows_mut(sa.len(), sb.len()).copy_from(sb);
            samples.push(v);
            weights.push(wa * wb);
        }
    }
    EmpiricalDistribution::new(samples, weights)
}

/// Shannon entropy of a marginal, in bits.  Zero-probability cells
/// contribute zero.
pub fn entropy_bits(m: &MarginalDistribution) -> f64 {
    entropy_of_probs(m.probs())
}

pub fn entropy_of_probs(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

/// Hellinger distance `(1 - sum_i sqrt(p_i q_i))^(1/2)` between two
/// distributions on a common index set.
pub fn hellinger(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "hellinger needs a common index set");
    let bc: f64 = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| (a.max(0.0) * b.max(0.0)).sqrt())
        .sum();
    (1.0 - bc).clamp(0.0, 1.0).sqrt()
}
