//! Seeded RNG streams.
//!
//! One master 64-bit seed; each component derives its own ChaCha8 stream by
//! a fixed stream id, so parallel subroutines never perturb each other's
//! randomness.  Stream ids are allocated here as constants.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::monomial::monomials_up_to;
use crate::poly::Polynomial;

pub const STREAM_INSTANCE: u64 = 1;
pub const STREAM_SOLVER: u64 = 2;
pub const STREAM_ROUNDING: u64 = 3;
pub const STREAM_VALIDATE: u64 = 4;
pub const STREAM_SWEEP: u64 = 5;

/// Derive the `stream`-th RNG from a master seed.
pub fn rng(master: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(master);
    r.set_stream(stream);
    r
}

pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen::<f64>()
}

pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// iid standard normal vector.
pub fn normal_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| standard_normal(rng))
}

/// Uniform point on the unit sphere of R^n (counting measure).
pub fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    loop {
        let v = normal_vector(rng, n);
        let nrm = v.norm();
        if nrm > 1e-12 {
            return v / nrm;
        }
    }
}

/// Random polynomial with `terms` monomials of degree <= max_deg and
/// coefficients uniform in [-1, 1].
pub fn random_poly(rng: &mut ChaCha8Rng, n: usize, max_deg: usize, terms: usize) -> Polynomial {
    let basis = monomials_up_to(n, max_deg);
    let mut p = Polynomial::zero(n);
    for _ in 0..terms {
        let idx = rng.gen_range(0..basis.len());
        p.add_term(basis[idx].clone(), 2.0 * uniform(rng) - 1.0);
    }
    p
}

/// Random homogeneous degree-`deg` polynomial with nonnegative coefficients.
pub fn random_nonneg_form(rng: &mut ChaCha8Rng, n: usize, deg: usize, terms: usize) -> Polynomial {
    let basis: Vec<_> = monomials_up_to(n, deg)
        .into_iter()
        .filter(|m| m.degree() == deg)
        .collect();
    let mut p = Polynomial::zero(n);
    for _ in 0..terms {
        let idx = rng.gen_range(0..basis.len());
        p.add_term(basis[idx].clone(), uniform(rng));
    }
    p
}
