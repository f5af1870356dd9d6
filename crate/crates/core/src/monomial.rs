use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A monomial `x^alpha` given by its exponent multi-index.
///
/// Ordering is graded: first by total degree, then lexicographically on the
/// exponent vector.  This is also the serialization order of moment arrays.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    exponents: Vec<u32>,
}

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial { exponents }
    }

    /// The constant monomial over `n` variables.
    pub fn one(n: usize) -> Self {
        Monomial {
            exponents: vec![0; n],
        }
    }

    /// The monomial `x_i` over `n` variables.
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial { exponents: e }
    }

    /// `x_i^k` over `n` variables.
    pub fn var_pow(n: usize, i: usize, k: u32) -> Self {
        let mut e = vec![0; n];
        e[i] = k;
        Monomial { exponents: e }
    }

    pub fn nvars(&self) -> usize {
        self.exponents.len()
    }

    pub fn degree(&self) -> usize {
        self.exponents.iter().map(|&e| e as usize).sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        Monomial {
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Evaluate `x^alpha` at a point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut v = 1.0;
        for (i, &e) in self.exponents.iter().enumerate() {
            for _ in 0..e {
                v *= x[i];
            }
        }
        v
    }

    /// Number of distinct orderings of the multiset of variable indices:
    /// `degree! / prod(alpha_i!)`.
    pub fn permutation_count(&self) -> f64 {
        let mut num = 1.0;
        let mut k = 0u32;
        for &e in &self.exponents {
            for j in 1..=e {
                k += 1;
                num *= k as f64 / j as f64;
            }
        }
        num
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exponents.cmp(&other.exponents))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.exponents.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        Ok(())
    }
}

/// Enumerate all monomials over `n` variables with degree at most `max_deg`,
/// in graded order (degree, then lexicographic on the exponent vector).
pub fn monomials_up_to(n: usize, max_deg: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    for d in 0..=max_deg {
        let mut buf = vec![0u32; n];
        push_exact(n, d, 0, &mut buf, &mut out);
    }
    out
}

fn push_exact(n: usize, d: usize, pos: usize, buf: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    if pos == n {
        if d == 0 {
            out.push(Monomial::new(buf.clone()));
        }
        return;
    }
    if pos + 1 == n {
        buf[pos] = d as u32;
        out.push(Monomial::new(buf.clone()));
        buf[pos] = 0;
        return;
    }
    for e in 0..=d {
        buf[pos] = e as u32;
        push_exact(n, d - e, pos + 1, buf, out);
    }
    buf[pos] = 0;
}

/// Binomial coefficient as f64 (sizes here stay far below 2^53).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut v = 1.0;
    for j in 0..k {
        v = v * (n - j) as f64 / (j + 1) as f64;
    }
    v.round()
}

/// Count of monomials over `n` variables of degree at most `d`.
pub fn monomial_count(n: usize, d: usize) -> f64 {
    binomial(n + d, d)
}

/// Index table over the graded monomial basis of degree <= level.
#[derive(Debug)]
pub struct MonomialTable {
    pub n: usize,
    pub level: usize,
    pub monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl MonomialTable {
    pub fn new(n: usize, level: usize, guard: usize) -> Result<Arc<Self>> {
        let count = monomial_count(n, level);
        if count > guard as f64 {
            return Err(Error::Guard(format!(
                "moment table would hold {count:.3e} entries, above the guard of {guard}"
            )));
        }
        let monomials = monomials_up_to(n, level);
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        Ok(Arc::new(MonomialTable {
            n,
            level,
            monomials,
            index,
        }))
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }
}
