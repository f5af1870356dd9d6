use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Norm/inner-product convention attached to a vector space `R^U`.
///
/// Counting: `<u,v> = sum_x u(x) v(x)`.  Expectation: `<u,v> = E_x u(x) v(x)`
/// with the uniform measure `1/|U|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Measure {
    Counting,
    Expectation,
}

impl Measure {
    pub fn weight(&self, n: usize) -> f64 {
        match self {
            Measure::Counting => 1.0,
            Measure::Expectation => 1.0 / n as f64,
        }
    }
}

/// Inner product under the measure.
pub fn inner(measure: Measure, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    measure.weight(a.len()) * a.dot(b)
}

/// p-norm under the measure.
pub fn norm_p(measure: Measure, v: &DVector<f64>, p: u32) -> f64 {
    let w = measure.weight(v.len());
    let s: f64 = v.iter().map(|&x| x.abs().powi(p as i32)).sum();
    (w * s).powf(1.0 / p as f64)
}

/// `||v||_4^4 / ||v||_2^4` under the measure (the analytic sparsity ratio).
pub fn ratio_4_2(measure: Measure, v: &DVector<f64>) -> f64 {
    let w = measure.weight(v.len());
    let m4: f64 = v.iter().map(|&x| x * x * x * x).sum::<f64>() * w;
    let m2: f64 = v.iter().map(|&x| x * x).sum::<f64>() * w;
    if m2 == 0.0 {
        return 0.0;
    }
    m4 / (m2 * m2)
}

/// A `d`-dimensional subspace of `R^n` with an orthonormal basis under the
/// declared measure, kept as the columns of an `n x d` matrix.  The projector
/// is applied as `B (B^T W v)` without materializing the `n x n` matrix.
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: DMatrix<f64>,
    measure: Measure,
}

impl Subspace {
    /// Wrap an already-orthonormal basis, verifying `B^T W B = I` to 1e-10.
    pub fn new(basis: DMatrix<f64>, measure: Measure) -> Result<Self> {
        let w = measure.weight(basis.nrows());
        let gram = basis.transpose() * &basis * w;
        let d = basis.ncols();
        for i in 0..d {
            for j in 0..d {
                let want = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - want).abs() > 1e-10 {
                    return Err(Error::Guard(format!(
                        "basis not orthonormal under the declared measure: gram[{i},{j}] = {}",
                        gram[(i, j)]
                    )));
                }
            }
        }
        Ok(Subspace { basis, measure })
    }

    /// Orthonormalize the columns of `raw` under the measure (modified
    /// Gram-Schmidt, dropping near-dependent columns below `1e-10` residual).
    pub fn from_spanning(raw: &DMatrix<f64>, measure: Measure) -> Result<Self> {
        let n = raw.nrows();
        let w = measure.weight(n);
        let mut cols: Vec<DVector<f64>> = Vec::new();
        for j in 0..raw.ncols() {
            let mut v = raw.column(j).clone_owned();
            for _ in 0..2 {
                for b in &cols {
                    let c = w * b.dot(&v);
                    v -= b * c;
                }
            }
            let nrm = (w * v.dot(&v)).sqrt();
            if nrm > 1e-10 {
                cols.push(v / nrm);
            }
        }
        if cols.is_empty() {
            return Err(Error::Guard("spanning set is numerically empty".into()));
        }
        let basis = DMatrix::from_columns(&cols);
        Subspace::new(basis, measure)
    }

    pub fn n(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Coefficients of the projection of `v` onto the subspace: `B^T W v`.
    pub fn coefficients(&self, v: &DVector<f64>) -> DVector<f64> {
        let w = self.measure.weight(self.n());
        (self.basis.transpose() * v) * w
    }

    /// Apply the projector onto the subspace.
    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis * self.coefficients(v)
    }

    /// Map a coefficient vector back to `R^n`.
    pub fn lift(&self, coeffs: &DVector<f64>) -> DVector<f64> {
        &self.basis * coeffs
    }

    /// `Pi delta_u`, the projection of the coordinate functional at `u`
    /// (`<f, delta_u> = f(u)` under the declared measure).  Equals `B b_u^T`
    /// where `b_u` is the `u`-th row of the basis, for either measure.
    pub fn project_delta(&self, u: usize) -> DVector<f64> {
        let row = self.basis.row(u).transpose();
        &self.basis * row
    }

    /// Residual `||Pi v - v||_2 / ||v||_2` measuring membership in the subspace.
    pub fn membership_residual(&self, v: &DVector<f64>) -> f64 {
        let p = self.project(v);
        let diff = norm_p(self.measure, &(v - &p), 2);
        let nrm = norm_p(self.measure, v, 2);
        if nrm == 0.0 {
            0.0
        } else {
            diff / nrm
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds;

    #[test]
    fn projector_is_idempotent_and_rank_d() {
        let mut rng = seeds::rng(11, seeds::STREAM_INSTANCE);
        let raw = DMatrix::from_fn(24, 5, |_, _| seeds::standard_normal(&mut rng));
        let sub = Subspace::from_spanning(&raw, Measure::Expectation).unwrap();
        assert_eq!(sub.dim(), 5);
        for _ in 0..10 {
            let v = seeds::normal_vector(&mut rng, 24);
            let p1 = sub.project(&v);
            let p2 = sub.project(&p1);
            assert!((&p1 - &p2).norm() <= 1e-8 * p1.norm().max(1.0));
        }
    }

    #[test]
    fn delta_projection_matches_row_formula() {
        let mut rng = seeds::rng(12, seeds::STREAM_INSTANCE);
        let raw = DMatrix::from_fn(16, 3, |_, _| seeds::standard_normal(&mut rng));
        let sub = Subspace::from_spanning(&raw, Measure::Expectation).unwrap();
        // <f, delta_u> = f(u): check the defining property for f in V.
        for u in 0..4 {
            let delta = {
                let mut e = DVector::zeros(16);
                e[u] = 16.0; // n * e_u under the expectation measure
                e
            };
            let f = sub.lift(&seeds::normal_vector(&mut rng, 3));
            let lhs = inner(Measure::Expectation, &f, &delta);
            assert!((lhs - f[u]).abs() <= 1e-10 * f[u].abs().max(1.0));
            let pd = sub.project_delta(u);
            let pd2 = sub.project(&delta);
            assert!((&pd - &pd2).norm() <= 1e-8 * pd.norm().max(1.0));
        }
    }

    #[test]
    fn span_e1_ratio_is_n() {
        // V = span{e1} under the expectation measure: Pi delta_1 has ratio n.
        let n = 64;
        let mut raw = DMatrix::zeros(n, 1);
        raw[(0, 0)] = 1.0;
        let sub = Subspace::from_spanning(&raw, Measure::Expectation).unwrap();
        let g = sub.project_delta(0);
        assert!((ratio_4_2(Measure::Expectation, &g) - n as f64).abs() < 1e-9);
    }
}
