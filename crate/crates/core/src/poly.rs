use std::collections::BTreeMap;
use std::fmt;

use crate::monomial::Monomial;
use crate::{Error, Result};

/// Sparse multivariate polynomial with real coefficients.
///
/// Terms are keyed by monomial in a `BTreeMap` so iteration order (and hence
/// floating-point accumulation order) is deterministic.  Zero coefficients
/// are never stored.
#[derive(Clone, PartialEq)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        let mut p = Polynomial::zero(n);
        p.add_term(Monomial::one(n), c);
        p
    }

    pub fn monomial(n: usize, m: Monomial, c: f64) -> Self {
        let mut p = Polynomial::zero(n);
        assert_eq!(m.nvars(), n, "monomial variable count mismatch");
        p.add_term(m, c);
        p
    }

    /// The linear form `<coeffs, x>`.
    pub fn linear(coeffs: &[f64]) -> Self {
        let n = coeffs.len();
        let mut p = Polynomial::zero(n);
        for (i, &c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(n, i), c);
        }
        p
    }

    /// `sum_i x_i^2` over n variables.
    pub fn sum_of_squares_of_vars(n: usize) -> Self {
        let mut p = Polynomial::zero(n);
        for i in 0..n {
            p.add_term(Monomial::var_pow(n, i, 2), 1.0);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &f64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    /// Add `c * m` to the polynomial, dropping the term if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: f64) {
        debug_assert_eq!(m.nvars(), self.n);
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(m).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            let key = self
                .terms
                .iter()
                .find(|(_, &v)| v == 0.0)
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (m, &c) in other.terms.iter() {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        for (m, &c) in self.terms.iter() {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.n, other.n);
        let mut out = Polynomial::zero(self.n);
        for (ma, &ca) in self.terms.iter() {
            for (mb, &cb) in other.terms.iter() {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn square(&self) -> Polynomial {
        self.mul(self)
    }

    /// Multiply by a single monomial.
    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        for (ma, &ca) in self.terms.iter() {
            out.add_term(ma.mul(m), ca);
        }
        out
    }

    /// True when every stored coefficient is nonnegative.
    pub fn has_nonneg_coefficients(&self) -> bool {
        self.terms.values().all(|&c| c >= 0.0)
    }

    /// True when every term has the same total degree `d`.
    pub fn is_homogeneous(&self, d: usize) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    /// Evaluate at a point: `sum_alpha c_alpha x^alpha`.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.terms.iter().map(|(m, &c)| c * m.eval(x)).sum())
    }

    /// Extend to `n_new >= n` variables (existing variables keep their index).
    pub fn extend_vars(&self, n_new: usize) -> Polynomial {
        assert!(n_new >= self.n);
        let mut out = Polynomial::zero(n_new);
        for (m, &c) in self.terms.iter() {
            let mut e = m.exponents().to_vec();
            e.resize(n_new, 0);
            out.add_term(Monomial::new(e), c);
        }
        out
    }

    /// Shift all variable indices up by `offset` inside an `n_new`-variable ring.
    pub fn shift_vars(&self, n_new: usize, offset: usize) -> Polynomial {
        assert!(self.n + offset <= n_new);
        let mut out = Polynomial::zero(n_new);
        for (m, &c) in self.terms.iter() {
            let mut e = vec![0u32; n_new];
            e[offset..offset + self.n].copy_from_slice(m.exponents());
            out.add_term(Monomial::new(e), c);
        }
        out
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*{m:?}")?;
        }
        Ok(())
    }
}

/// `L_q/L_p` analytic sparsity of a vector: the `mu` for which the vector's
/// q-vs-p norm ratio matches a 0/1 vector of relative support `mu`.
///
/// With `(E|v|^q)^(1/q) / (E|v|^p)^(1/p) = mu^(1/q - 1/p)`, the returned
/// value is `ratio^(qp/(p-q))`.  Scale invariant.
pub fn lq_lp_sparsity(v: &[f64], q: u32, p: u32, measure: crate::Measure) -> Result<f64> {
    if v.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroVector);
    }
    assert!(q > p && p >= 1 && q % 2 == 0, "need even q > p >= 1");
    let w = match measure {
        crate::Measure::Counting => 1.0,
        crate::Measure::Expectation => 1.0 / v.len() as f64,
    };
    let mq: f64 = v.iter().map(|&x| w * x.abs().powi(q as i32)).sum();
    let mp: f64 = v.iter().map(|&x| w * x.abs().powi(p as i32)).sum();
    let ratio = mq.powf(1.0 / q as f64) / mp.powf(1.0 / p as f64);
    let exponent = (q * p) as f64 / (p as f64 - q as f64);
    Ok(ratio.powf(exponent))
}
