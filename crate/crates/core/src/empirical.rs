use nalgebra::DVector;

use crate::monomial::Monomial;
use crate::{Error, Result};

/// A finitely supported distribution over points of `R^n`.
#[derive(Debug, Clone)]
pub struct EmpiricalDistribution {
    samples: Vec<DVector<f64>>,
    weights: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(samples: Vec<DVector<f64>>, weights: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySamples);
        }
        if samples.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: samples.len(),
                got: weights.len(),
            });
        }
        let n = samples[0].len();
        if samples.iter().any(|s| s.len() != n) {
            return Err(Error::Guard("samples of unequal dimension".into()));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::Guard("negative weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Guard(format!("weights sum to {total}, not 1")));
        }
        Ok(EmpiricalDistribution { samples, weights })
    }

    pub fn uniform(samples: Vec<DVector<f64>>) -> Result<Self> {
        let k = samples.len();
        if k == 0 {
            return Err(Error::EmptySamples);
        }
        let w = vec![1.0 / k as f64; k];
        // Re-normalize exactly against accumulated rounding.
        EmpiricalDistribution::new(samples, normalize(w))
    }

    pub fn point_mass(point: DVector<f64>) -> Self {
        EmpiricalDistribution {
            samples: vec![point],
            weights: vec![1.0],
        }
    }

    pub fn dim(&self) -> usize {
        self.samples[0].len()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[DVector<f64>] {
        &self.samples
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weighted moment of the monomial: `sum_k w_k sample_k^alpha`.
    pub fn moment(&self, m: &Monomial) -> f64 {
        self.samples
            .iter()
            .zip(&self.weights)
            .map(|(s, &w)| w * m.eval(s.as_slice()))
            .sum()
    }

    /// Weighted mean of an arbitrary function of the sample.
    pub fn expect(&self, f: impl Fn(&DVector<f64>) -> f64) -> f64 {
        self.samples
            .iter()
            .zip(&self.weights)
            .map(|(s, &w)| w * f(s))
            .sum()
    }

    /// Reweigh each sample by a nonnegative factor and renormalize.
    pub fn reweighed(&self, factor: impl Fn(&DVector<f64>) -> f64, mass_tol: f64) -> Result<Self> {
        let raw: Vec<f64> = self
            .samples
            .iter()
            .zip(&self.weights)
            .map(|(s, &w)| w * factor(s))
            .collect();
        if raw.iter().any(|&w| w < 0.0) {
            return Err(Error::Guard(
                "reweighing factor produced a negative weight".into(),
            ));
        }
        let total: f64 = raw.iter().sum();
        if total <= mass_tol {
            return Err(Error::MassBelowTolerance {
                mass: total,
                tol: mass_tol,
            });
        }
        Ok(EmpiricalDistribution {
            samples: self.samples.clone(),
            weights: raw.into_iter().map(|w| w / total).collect(),
        })
    }
}

fn normalize(mut w: Vec<f64>) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    w
}
