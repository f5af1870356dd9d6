use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::monomial::{Monomial, MonomialTable};
use crate::poly::Polynomial;
use crate::pseudo::{MomentOracle, Provenance};
use crate::solver::{l1_admm, psd_project, MomentStructure, SdpAdmm, SolveStatus, SparseRow};
use crate::subspace::Subspace;
use crate::{Defaults, Error, Result};

/// Named block of auxiliary variables appended after the base variables.
#[derive(Debug, Clone)]
pub struct AuxBlock {
    pub name: String,
    pub size: usize,
}

/// A moment relaxation: maximize a polynomial objective over level-`l`
/// pseudoexpectations consistent with a list of polynomial equalities.
///
/// Consistency with `q(x) = 0` is imposed in localized-product form:
/// `pE[q * m] = 0` for every monomial `m` with `deg(q m) <= l`.
#[derive(Debug, Clone)]
pub struct MomentRelaxation {
    base_n: usize,
    n: usize,
    level: usize,
    table: Arc<MonomialTable>,
    objective: Polynomial,
    constraints: Vec<Polynomial>,
    aux_blocks: Vec<AuxBlock>,
    structure: MomentStructure,
    eq_rows: Vec<SparseRow>,
    eq_rhs: Vec<f64>,
    tie_count: usize,
}

/// Solver output: the oracle plus recomputed residual diagnostics.
#[derive(Debug, Clone)]
pub struct ConicSolution {
    pub oracle: MomentOracle,
    pub objective_value: f64,
    pub psd_violation: f64,
    pub equality_residual: f64,
    pub duality_gap_estimate: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

/// Build the relaxation.  `constraints` are polynomials set identically to
/// zero; `objective` is maximized.
pub fn build_moment_relaxation(
    n: usize,
    level: usize,
    constraints: Vec<Polynomial>,
    objective: Polynomial,
    aux_blocks: Vec<AuxBlock>,
) -> Result<MomentRelaxation> {
    if level == 0 || level % 2 != 0 {
        return Err(Error::Guard(format!(
            "level must be even and positive, got {level}"
        )));
    }
    let mut seen = HashSet::new();
    for b in &aux_blocks {
        if !seen.insert(b.name.clone()) {
            return Err(Error::Guard(format!(
                "duplicate aux block name {:?}",
                b.name
            )));
        }
    }
    let total_n = n + aux_blocks.iter().map(|b| b.size).sum::<usize>();
    if objective.nvars() != total_n {
        return Err(Error::DimensionMismatch {
            expected: total_n,
            got: objective.nvars(),
        });
    }
    if objective.degree() > level {
        return Err(Error::DegreeOverflow {
            needed: objective.degree(),
            level,
        });
    }
    for q in &constraints {
        if q.nvars() != total_n {
            return Err(Error::DimensionMismatch {
                expected: total_n,
                got: q.nvars(),
            });
        }
        if q.degree() > level {
            return Err(Error::DegreeOverflow {
                needed: q.degree(),
                level,
            });
        }
    }

    let defaults = Defaults::default();
    let table = MonomialTable::new(total_n, level, defaults.moment_guard)?;
    let basis_len = table
        .monomials
        .iter()
        .take_while(|m| m.degree() <= level / 2)
        .count();

    // Moment-matrix structure: cell (a, b) holds y[index(a + b)].
    let mut cell_to_y = Vec::with_capacity(basis_len * (basis_len + 1) / 2);
    let mut pair_count: BTreeMap<usize, usize> = BTreeMap::new();
    for r in 0..basis_len {
        for c in r..basis_len {
            let prod = table.monomials[r].mul(&table.monomials[c]);
            let idx = table.index_of(&prod).expect("basis product within level");
            cell_to_y.push(idx);
            *pair_count.entry(idx).or_insert(0) += 1;
        }
    }
    let tie_count = cell_to_y.len() - pair_count.len();
    let structure = MomentStructure {
        side: basis_len,
        cell_to_y,
        dim_y: table.len(),
    };

    // Equalities: normalization plus localized constraint products.
    let mut eq_rows = Vec::new();
    let mut eq_rhs = Vec::new();
    eq_rows.push(SparseRow {
        entries: vec![(0, 1.0)],
    });
    eq_rhs.push(1.0);
    let mut dedupe: HashSet<Vec<(usize, u64)>> = HashSet::new();
    for q in &constraints {
        let dq = q.degree();
        for m in &table.monomials {
            if m.degree() + dq > level {
                continue;
            }
            let shifted = q.mul_monomial(m);
            let mut entries: Vec<(usize, f64)> = shifted
                .terms()
                .map(|(mm, &c)| (table.index_of(mm).expect("within level"), c))
                .collect();
            entries.sort_by_key(|&(j, _)| j);
            if entries.is_empty() {
                continue;
            }
            let key: Vec<(usize, u64)> = entries.iter().map(|&(j, v)| (j, v.to_bits())).collect();
            if dedupe.insert(key) {
                eq_rows.push(SparseRow { entries });
                eq_rhs.push(0.0);
            }
        }
    }

    Ok(MomentRelaxation {
        base_n: n,
        n: total_n,
        level,
        table,
        objective,
        constraints,
        aux_blocks,
        structure,
        eq_rows,
        eq_rhs,
        tie_count,
    })
}

impl MomentRelaxation {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base_n(&self) -> usize {
        self.base_n
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn objective(&self) -> &Polynomial {
        &self.objective
    }

    pub fn constraints(&self) -> &[Polynomial] {
        &self.constraints
    }

    pub fn aux_blocks(&self) -> &[AuxBlock] {
        &self.aux_blocks
    }

    /// Number of duplicate-monomial tie equalities an unreduced moment-matrix
    /// formulation would carry: (unordered basis pairs sharing a sum) minus
    /// (distinct sums).  The solver's parametrization eliminates them.
    pub fn tie_count(&self) -> usize {
        self.tie_count
    }

    pub fn equality_count(&self) -> usize {
        self.eq_rows.len()
    }

    /// Largest violation of the constraint polynomials at a point
    /// (feasibility check by direct substitution).
    pub fn max_constraint_violation(&self, point: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for q in &self.constraints {
            worst = worst.max(q.evaluate(point)?.abs());
        }
        Ok(worst)
    }

    /// Solve with the embedded splitting solver.  The iteration is seed-free
    /// and deterministic; `_seed` stays in the signature for the
    /// reproducibility contract of callers that log it.
    pub fn solve_sdp(&self, tol: f64, max_iter: usize, _seed: u64) -> Result<ConicSolution> {
        let mut c = DVector::zeros(self.table.len());
        for (m, &v) in self.objective.terms() {
            c[self.table.index_of(m).expect("objective within level")] += v;
        }
        let rhs = DVector::from_vec(self.eq_rhs.clone());
        let admm = SdpAdmm {
            structure: &self.structure,
            objective: &c,
            eq_rows: &self.eq_rows,
            eq_rhs: &rhs,
        };
        let sol = admm.solve(tol, max_iter)?;
        if sol.status == SolveStatus::InfeasibleSignal {
            return Err(Error::Infeasible(format!(
                "equality system inconsistent: least-squares residual {:.3e}",
                sol.equality_residual
            )));
        }
        let mut moments = sol.y.as_slice().to_vec();
        if moments[0] != 0.0 {
            let inv = 1.0 / moments[0];
            for v in &mut moments {
                *v *= inv;
            }
        }
        let oracle = MomentOracle::from_parts(self.table.clone(), moments, Provenance::Sdp)?;
        Ok(ConicSolution {
            oracle,
            objective_value: sol.objective,
            psd_violation: sol.psd_violation,
            equality_residual: sol.equality_residual,
            duality_gap_estimate: sol.duality_gap_estimate,
            iterations: sol.iterations,
            status: sol.status,
        })
    }

    /// Debug/golden dump: objective and equalities in coordinate triplets.
    pub fn dump(&self) -> RelaxationDump {
        RelaxationDump {
            n: self.n,
            level: self.level,
            monomials: self
                .table
                .monomials
                .iter()
                .map(|m| format!("{m:?}"))
                .collect(),
            objective: {
                let mut v: Vec<(usize, f64)> = self
                    .objective
                    .terms()
                    .map(|(m, &c)| (self.table.index_of(m).unwrap(), c))
                    .collect();
                v.sort_by_key(|&(j, _)| j);
                v
            },
            equalities: self
                .eq_rows
                .iter()
                .zip(&self.eq_rhs)
                .map(|(row, &rhs)| EqualityDump {
                    entries: row.entries.clone(),
                    rhs,
                })
                .collect(),
            tie_count: self.tie_count,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EqualityDump {
    pub entries: Vec<(usize, f64)>,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelaxationDump {
    pub n: usize,
    pub level: usize,
    pub monomials: Vec<String>,
    pub objective: Vec<(usize, f64)>,
    pub equalities: Vec<EqualityDump>,
    pub tie_count: usize,
}

/// The sphere constraint `sum_{i<n} x_i^2 - 1` inside a `total`-variable ring.
pub fn sphere_constraint(total: usize, n: usize) -> Polynomial {
    let mut p = Polynomial::zero(total);
    for i in 0..n {
        p.add_term(Monomial::var_pow(total, i, 2), 1.0);
    }
    p.add_term(Monomial::one(total), -1.0);
    p
}

/// `argmin_{y in V} ||y||_1  s.t.  <y, f> = 1` under the subspace's measure.
pub fn solve_l1_lp(
    space: &Subspace,
    f: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<crate::solver::L1Solution> {
    if f.len() != space.n() {
        return Err(Error::DimensionMismatch {
            expected: space.n(),
            got: f.len(),
        });
    }
    let lin = space.coefficients(f);
    if lin.norm() <= 1e-12 * crate::subspace::norm_p(space.measure(), f, 2).max(1e-300) {
        return Err(Error::Infeasible(
            "<f, Pi f> = 0: constraint unattainable in V".into(),
        ));
    }
    let w = space.measure().weight(space.n());
    let weights = DVector::from_element(space.n(), w);
    l1_admm(space.basis(), &weights, &lin, tol, max_iter)
}

/// One square in an SOS decomposition: `weight * quadratic^2`.
#[derive(Debug, Clone)]
pub struct SosSquare {
    pub weight: f64,
    pub quadratic: Polynomial,
}

#[derive(Debug, Clone)]
pub struct SosCertificate {
    pub squares: Vec<SosSquare>,
    /// Largest coefficient mismatch between `c ||x||^4 - p` and the Gram
    /// reconstruction.
    pub residual: f64,
}

/// Outcome of [`certify_spectral_bound`].
#[derive(Debug, Clone)]
pub enum CertifyOutcome {
    Certificate(SosCertificate),
    /// No feasible Gram matrix was reached; the residual is the best
    /// coefficient mismatch attained.
    Refusal {
        residual: f64,
    },
}

/// Search for a degree-4 SOS decomposition of `c ||x||_2^4 - p`, certifying
/// that the spectral norm of `p` (minimized over quadratic representations)
/// is at most `c`.
pub fn certify_spectral_bound(
    p: &Polynomial,
    c: f64,
    tol: f64,
    max_iter: usize,
) -> Result<CertifyOutcome> {
    if !p.is_homogeneous(4) || p.is_zero() {
        return Err(Error::Guard(
            "certify_spectral_bound needs a nonzero homogeneous degree-4 polynomial".into(),
        ));
    }
    let n = p.nvars();
    let target = Polynomial::sum_of_squares_of_vars(n)
        .square()
        .scale(c)
        .add(&p.scale(-1.0));

    // Gram basis: monomials of degree exactly 2.
    let basis: Vec<Monomial> = crate::monomial::monomials_up_to(n, 2)
        .into_iter()
        .filter(|m| m.degree() == 2)
        .collect();
    let k = basis.len();

    // Group the Gram cells by the degree-4 monomial they feed.  Cells of
    // different groups are disjoint, so the affine projection is closed-form
    // per group.
    let mut groups: BTreeMap<Monomial, Vec<(usize, usize)>> = BTreeMap::new();
    for a in 0..k {
        for b in a..k {
            groups
                .entry(basis[a].mul(&basis[b]))
                .or_default()
                .push((a, b));
        }
    }

    // Row m over the full symmetric matrix reads sum over ordered cells; the
    // Euclidean projection onto {A(G)=b} adds deficit * A^T / ||row||^2 where
    // each unordered off-diagonal cell carries weight 2 split over two
    // symmetric entries.
    let project_affine = |g: &DMatrix<f64>| -> DMatrix<f64> {
        let mut out = g.clone();
        for (m, cells) in &groups {
            let want = target.coefficient(m);
            let mut current = 0.0;
            let mut norm2 = 0.0;
            for &(a, b) in cells {
                if a == b {
                    current += g[(a, b)];
                    norm2 += 1.0;
                } else {
                    current += 2.0 * g[(a, b)];
                    norm2 += 2.0;
                }
            }
            let deficit = (want - current) / norm2;
            for &(a, b) in cells {
                out[(a, b)] += deficit;
                if a != b {
                    out[(b, a)] += deficit;
                }
            }
        }
        out
    };

    let residual_of = |g: &DMatrix<f64>| -> f64 {
        let mut worst: f64 = 0.0;
        for (m, cells) in &groups {
            let want = target.coefficient(m);
            let mut current = 0.0;
            for &(a, b) in cells {
                current += if a == b { g[(a, b)] } else { 2.0 * g[(a, b)] };
            }
            worst = worst.max((current - want).abs());
        }
        worst
    };

    let mut z = DMatrix::<f64>::zeros(k, k);
    let mut u = DMatrix::<f64>::zeros(k, k);
    for it in 0..max_iter {
        let g = project_affine(&(&z - &u));
        z = psd_project(&(&g + &u));
        u += &g - &z;
        if it % 25 == 24 && residual_of(&z) <= tol {
            break;
        }
    }

    let res = residual_of(&z);
    if res > tol {
        return Ok(CertifyOutcome::Refusal { residual: res });
    }

    let eig = z.symmetric_eigen();
    let mut squares = Vec::new();
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > 1e-12 {
            let mut q = Polynomial::zero(n);
            for (a, m) in basis.iter().enumerate() {
                q.add_term(m.clone(), eig.eigenvectors[(a, i)]);
            }
            squares.push(SosSquare {
                weight: l,
                quadratic: q,
            });
        }
    }
    Ok(CertifyOutcome::Certificate(SosCertificate {
        squares,
        residual: res,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds;
    use crate::tensor::TensorForm;

    #[test]
    fn univariate_sphere_forces_second_moment() {
        let r = build_moment_relaxation(
            1,
            2,
            vec![sphere_constraint(1, 1)],
            Polynomial::zero(1),
            vec![],
        )
        .unwrap();
        let sol = r.solve_sdp(1e-8, 20_000, 0).unwrap();
        let m2 = sol.oracle.moment(&Monomial::var_pow(1, 0, 2)).unwrap();
        assert!((m2 - 1.0).abs() < 1e-7, "m2 = {m2}");
        assert!(sol.psd_violation <= 1e-7);
    }

    #[test]
    fn maximize_x1_fourth_on_circle() {
        let obj = Polynomial::monomial(2, Monomial::var_pow(2, 0, 4), 1.0);
        let r = build_moment_relaxation(2, 4, vec![sphere_constraint(2, 2)], obj, vec![]).unwrap();
        let sol = r.solve_sdp(1e-8, 30_000, 0).unwrap();
        assert!(
            (sol.objective_value - 1.0).abs() < 1e-6,
            "value {}",
            sol.objective_value
        );
    }

    #[test]
    fn maximize_x1_squared_on_circle_level2() {
        let obj = Polynomial::monomial(2, Monomial::var_pow(2, 0, 2), 1.0);
        let r = build_moment_relaxation(2, 2, vec![sphere_constraint(2, 2)], obj, vec![]).unwrap();
        let sol = r.solve_sdp(1e-8, 20_000, 0).unwrap();
        assert!((sol.objective_value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sphere_consistent_oracle_norm_moment() {
        let obj = Polynomial::monomial(3, Monomial::var_pow(3, 0, 4), 1.0);
        let r = build_moment_relaxation(3, 4, vec![sphere_constraint(3, 3)], obj, vec![]).unwrap();
        let sol = r.solve_sdp(1e-8, 30_000, 0).unwrap();
        let norm2 = Polynomial::sum_of_squares_of_vars(3);
        let v = sol.oracle.pe_evaluate(&norm2).unwrap();
        assert!((v - 1.0).abs() <= 1e-8, "pE ||x||^2 = {v}");
    }

    #[test]
    fn tie_count_matches_enumeration() {
        let r = build_moment_relaxation(3, 4, vec![], Polynomial::zero(3), vec![]).unwrap();
        let basis = crate::monomial::monomials_up_to(3, 2);
        let mut sums = std::collections::HashSet::new();
        let mut pairs = 0usize;
        for i in 0..basis.len() {
            for j in i..basis.len() {
                pairs += 1;
                sums.insert(basis[i].mul(&basis[j]));
            }
        }
        assert_eq!(r.tie_count(), pairs - sums.len());
    }

    #[test]
    fn infeasible_system_signals() {
        let mut q1 = Polynomial::monomial(1, Monomial::var_pow(1, 0, 2), 1.0);
        q1.add_term(Monomial::one(1), -1.0);
        let mut q2 = Polynomial::monomial(1, Monomial::var_pow(1, 0, 2), 1.0);
        q2.add_term(Monomial::one(1), -2.0);
        let r = build_moment_relaxation(1, 2, vec![q1, q2], Polynomial::zero(1), vec![]).unwrap();
        assert!(matches!(
            r.solve_sdp(1e-8, 5_000, 0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn duplicate_aux_names_rejected() {
        let err = build_moment_relaxation(
            1,
            2,
            vec![],
            Polynomial::zero(3),
            vec![
                AuxBlock {
                    name: "fbar".into(),
                    size: 1,
                },
                AuxBlock {
                    name: "fbar".into(),
                    size: 1,
                },
            ],
        );
        assert!(err.is_err());
    }

    #[test]
    fn solved_oracle_validates_and_weak_duality_holds() {
        let mut rng = seeds::rng(40, seeds::STREAM_VALIDATE);
        let obj = seeds::random_nonneg_form(&mut rng, 3, 4, 6);
        let r = build_moment_relaxation(3, 4, vec![sphere_constraint(3, 3)], obj.clone(), vec![])
            .unwrap();
        let tol = 1e-7;
        let sol = r.solve_sdp(tol, 50_000, 0).unwrap();
        let report = sol.oracle.validate(10.0 * tol, 10.0 * tol, &mut rng);
        assert!(report.passed, "validate: {report:?}");
        let mut best = f64::NEG_INFINITY;
        for _ in 0..1000 {
            let x = seeds::unit_vector(&mut rng, 3);
            best = best.max(obj.evaluate(x.as_slice()).unwrap());
        }
        assert!(
            sol.objective_value >= best - 1e-5,
            "sdp {} < sphere max {best}",
            sol.objective_value
        );
    }

    #[test]
    fn determinism_bitwise() {
        let obj = Polynomial::monomial(2, Monomial::var_pow(2, 0, 4), 1.0);
        let r = build_moment_relaxation(2, 4, vec![sphere_constraint(2, 2)], obj, vec![]).unwrap();
        let a = r.solve_sdp(1e-7, 5_000, 7).unwrap();
        let b = r.solve_sdp(1e-7, 5_000, 7).unwrap();
        assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits());
        assert_eq!(a.iterations, b.iterations);
        for (x, y) in a.oracle.moments().iter().zip(b.oracle.moments()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn l1_span_e1_e2_prefers_sparse_direction() {
        // V = span{e1, e2} in R^8 (expectation measure), f = e1: adding any
        // e2 mass only increases the 1-norm, so y = n * e1 (so <y, f> = 1).
        let n = 8;
        let mut raw = nalgebra::DMatrix::zeros(n, 2);
        raw[(0, 0)] = 1.0;
        raw[(1, 1)] = 1.0;
        let space = Subspace::from_spanning(&raw, crate::Measure::Expectation).unwrap();
        let mut f = DVector::zeros(n);
        f[0] = 1.0;
        let sol = solve_l1_lp(&space, &f, 1e-9, 30_000).unwrap();
        let inner = crate::subspace::inner(crate::Measure::Expectation, &sol.y, &f);
        assert!((inner - 1.0).abs() < 1e-8);
        assert!((sol.y[0] - n as f64).abs() < 1e-6, "y = {:?}", sol.y);
        assert!(sol.y[1].abs() < 1e-7);
    }

    #[test]
    fn l1_orthogonal_f_errors() {
        let n = 6;
        let mut raw = nalgebra::DMatrix::zeros(n, 1);
        raw[(0, 0)] = 1.0;
        let space = Subspace::from_spanning(&raw, crate::Measure::Expectation).unwrap();
        let mut f = DVector::zeros(n);
        f[1] = 1.0;
        assert!(matches!(
            solve_l1_lp(&space, &f, 1e-9, 1000),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn certify_x1_fourth_at_one() {
        // 1 * ||x||^4 - x1^4 = x2^4 + 2 x1^2 x2^2, an explicit SOS.
        let p = Polynomial::monomial(2, Monomial::var_pow(2, 0, 4), 1.0);
        let out = certify_spectral_bound(&p, 1.0, 1e-8, 20_000).unwrap();
        match out {
            CertifyOutcome::Certificate(cert) => {
                assert!(cert.residual <= 1e-8);
                assert!(cert.squares.iter().all(|s| s.weight >= 0.0));
                let mut rng = seeds::rng(41, seeds::STREAM_VALIDATE);
                for _ in 0..20 {
                    let x = seeds::unit_vector(&mut rng, 2);
                    let want = 1.0 - p.evaluate(x.as_slice()).unwrap();
                    let got: f64 = cert
                        .squares
                        .iter()
                        .map(|s| {
                            let v = s.quadratic.evaluate(x.as_slice()).unwrap();
                            s.weight * v * v
                        })
                        .sum();
                    assert!((got - want).abs() < 1e-6);
                }
            }
            CertifyOutcome::Refusal { residual } => panic!("refused with residual {residual}"),
        }
    }

    #[test]
    fn certify_norm4_at_one_gives_zero_sos() {
        let p = Polynomial::sum_of_squares_of_vars(2).square();
        let out = certify_spectral_bound(&p, 1.0, 1e-8, 20_000).unwrap();
        match out {
            CertifyOutcome::Certificate(cert) => {
                let total: f64 = cert.squares.iter().map(|s| s.weight).sum();
                assert!(total < 1e-6, "total weight {total}");
            }
            CertifyOutcome::Refusal { residual } => panic!("refused with residual {residual}"),
        }
    }

    #[test]
    fn certify_succeeds_above_flattening_norm() {
        let mut rng = seeds::rng(42, seeds::STREAM_VALIDATE);
        for n in 2..=5 {
            let p = seeds::random_nonneg_form(&mut rng, n, 4, 2 * n);
            if p.is_zero() {
                continue;
            }
            let norm = TensorForm::new(p.clone(), crate::Measure::Counting)
                .unwrap()
                .spectral_norm()
                .unwrap();
            let out = certify_spectral_bound(&p, norm + 0.1, 1e-7, 30_000).unwrap();
            match out {
                CertifyOutcome::Certificate(cert) => assert!(cert.residual <= 1e-6),
                CertifyOutcome::Refusal { residual } => {
                    panic!("n={n}: refused with residual {residual}")
                }
            }
        }
    }

    #[test]
    fn certify_rejects_non_homogeneous() {
        let p = Polynomial::monomial(2, Monomial::var_pow(2, 0, 2), 1.0);
        assert!(certify_spectral_bound(&p, 1.0, 1e-7, 100).is_err());
    }

    #[test]
    fn certify_refuses_below_true_norm() {
        // the spectral norm of x1^4 is 1 in every representation; c = 0.5
        // must come back as a refusal with a residual.
        let p = Polynomial::monomial(2, Monomial::var_pow(2, 0, 4), 1.0);
        match certify_spectral_bound(&p, 0.5, 1e-9, 4_000).unwrap() {
            CertifyOutcome::Refusal { residual } => assert!(residual > 1e-6),
            CertifyOutcome::Certificate(_) => panic!("certified an impossible bound"),
        }
    }

    #[test]
    fn dump_snapshot_univariate() {
        let r = build_moment_relaxation(
            1,
            2,
            vec![sphere_constraint(1, 1)],
            Polynomial::zero(1),
            vec![],
        )
        .unwrap();
        let json = serde_json::to_string(&r.dump()).unwrap();
        assert_eq!(
            json,
            "{\"n\":1,\"level\":2,\"monomials\":[\"1\",\"x1\",\"x1^2\"],\"objective\":[],\
             \"equalities\":[{\"entries\":[[0,1.0]],\"rhs\":1.0},{\"entries\":[[0,-1.0],[2,1.0]],\"rhs\":0.0}],\
             \"tie_count\":0}"
        );
    }
}
