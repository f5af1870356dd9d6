//! Maximization of a sum-of-squares-of-quadratics form over the sphere via
//! an epsilon net over the coefficient ball, and the Frobenius-norm variant
//! via eigenvalue truncation.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::{Defaults, Error, Result};

/// `P(x) = sum_i Q_i(x)^2` for symmetric matrices `Q_i`.
#[derive(Debug, Clone)]
pub struct LowRankForm {
    quadratics: Vec<DMatrix<f64>>,
    n: usize,
}

impl LowRankForm {
    pub fn new(quadratics: Vec<DMatrix<f64>>) -> Result<Self> {
        if quadratics.is_empty() {
            return Err(Error::Guard("need at least one quadratic".into()));
        }
        let n = quadratics[0].nrows();
        for q in &quadratics {
            if q.nrows() != n || q.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: q.nrows(),
                });
            }
            for i in 0..n {
                for j in 0..n {
                    if (q[(i, j)] - q[(j, i)]).abs() > 1e-10 {
                        return Err(Error::Guard("quadratics must be symmetric".into()));
                    }
                }
            }
        }
        Ok(LowRankForm { quadratics, n })
    }

    pub fn r(&self) -> usize {
        self.quadratics.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn quadratics(&self) -> &[DMatrix<f64>] {
        &self.quadratics
    }

    pub fn evaluate(&self, x: &DVector<f64>) -> f64 {
        self.quadratics
            .iter()
            .map(|q| {
                let v = (x.transpose() * q * x)[(0, 0)];
                v * v
            })
            .sum()
    }

    /// `Q_lambda = sum_i lambda_i Q_i`.
    pub fn combination(&self, lambda: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (q, &l) in self.quadratics.iter().zip(lambda) {
            m += q * l;
        }
        m
    }
}

/// Deterministic epsilon net of the unit sphere in `R^r` covering every unit
/// vector within Euclidean `eps`: a scaled integer lattice intersected with a
/// shell around the ball and radially normalized.
///
/// The lattice step is `eps / (2 sqrt(r))` for `r <= 3` (denser than needed,
/// still inside the `(3/eps)^r` covering budget) and `eps / sqrt(r)` above.
pub fn epsilon_net(r: usize, eps: f64) -> Result<Vec<DVector<f64>>> {
    if r < 1 || !(0.0 < eps && eps < 1.0) {
        return Err(Error::Guard(format!(
            "need r >= 1 and eps in (0,1), got r={r} eps={eps}"
        )));
    }
    let guard = Defaults::default().net_guard;
    let h = if r <= 3 {
        eps / (2.0 * (r as f64).sqrt())
    } else {
        eps / (r as f64).sqrt()
    };
    // rounding a unit vector to the lattice moves it by at most h*sqrt(r)/2,
    // so lattice points with |norm - 1| <= h*sqrt(r)/2 cover after normalizing
    let slack = h * (r as f64).sqrt() / 2.0;
    let kmax = ((1.0 + slack) / h).ceil() as i64;

    // shell population estimate: surface area of S^(r-1) times shell width
    // over cell volume; refuse oversized nets before enumerating
    let surface = 2.0 * std::f64::consts::PI.powf(r as f64 / 2.0) / gamma_half(r);
    let estimate = surface * (2.0 * slack + h) / h.powi(r as i32);
    let cube = (2.0 * kmax as f64 + 1.0).powi(r as i32);
    if estimate > guard as f64 || cube > 2e8 {
        return Err(Error::Guard(format!(
            "net size estimate {estimate:.3e} exceeds the guard of {guard}"
        )));
    }

    let mut points = Vec::new();
    let mut coord = vec![0i64; r];
    build_lattice(r, 0, kmax, h, slack, 0.0, &mut coord, &mut points, guard)?;
    if points.is_empty() {
        return Err(Error::Guard("empty net".into()));
    }
    Ok(points)
}

/// Gamma(r/2) for integer r >= 1.
fn gamma_half(r: usize) -> f64 {
    if r % 2 == 0 {
        let mut v = 1.0;
        for k in 1..r / 2 {
            v *= k as f64;
        }
        v
    } else {
        // Gamma(1/2) = sqrt(pi), Gamma(x+1) = x Gamma(x)
        let mut v = std::f64::consts::PI.sqrt();
        let mut x = 0.5;
        while x + 1.0 <= r as f64 / 2.0 + 1e-9 {
            v *= x;
            x += 1.0;
        }
        v
    }
}

#[allow(clippy::too_many_arguments)]
fn build_lattice(
    r: usize,
    pos: usize,
    kmax: i64,
    h: f64,
    slack: f64,
    partial_sq: f64,
    coord: &mut Vec<i64>,
    out: &mut Vec<DVector<f64>>,
    guard: usize,
) -> Result<()> {
    let hi = 1.0 + slack;
    if partial_sq > hi * hi {
        return Ok(());
    }
    if pos == r {
        let nrm = partial_sq.sqrt();
        if (nrm - 1.0).abs() <= slack && nrm > 0.0 {
            if out.len() >= guard {
                return Err(Error::Guard(format!(
                    "net size exceeds the guard of {guard}"
                )));
            }
            let v = DVector::from_fn(r, |i, _| coord[i] as f64 * h / nrm);
            out.push(v);
        }
        return Ok(());
    }
    for k in -kmax..=kmax {
        coord[pos] = k;
        let x = k as f64 * h;
        build_lattice(
            r,
            pos + 1,
            kmax,
            h,
            slack,
            partial_sq + x * x,
            coord,
            out,
            guard,
        )?;
    }
    Ok(())
}

/// Certificate-carrying output of [`lowrank_norm`].
#[derive(Debug, Clone)]
pub struct LowRankNorm {
    pub value: f64,
    pub lambda: DVector<f64>,
    pub x: DVector<f64>,
}

/// `(max over the net of ||Q_lambda||)^2`: a `1 - O(eps)` multiplicative
/// approximation of `max_{||x||=1} P(x)`, with the certifying direction and
/// top eigenvector.
pub fn lowrank_norm(form: &LowRankForm, eps: f64) -> Result<LowRankNorm> {
    let net = epsilon_net(form.r(), eps)?;
    let best = net
        .par_iter()
        .map(|lambda| {
            let q = form.combination(lambda.as_slice());
            let eig = q.symmetric_eigen();
            let mut top = 0.0f64;
            let mut idx = 0usize;
            for (i, &l) in eig.eigenvalues.iter().enumerate() {
                if l.abs() > top {
                    top = l.abs();
                    idx = i;
                }
            }
            (
                top,
                lambda.clone(),
                eig.eigenvectors.column(idx).clone_owned(),
            )
        })
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .expect("non-empty net");
    let (norm, lambda, x) = best;
    Ok(LowRankNorm {
        value: norm * norm,
        lambda,
        x,
    })
}

/// `max_{||x||=1} <M, x tensor 4>` for a PSD `n^2 x n^2` matrix of Frobenius
/// norm at most 1, to additive error `2 eps`: eigenvalues below `eps` are
/// truncated (rank at most `1/eps^2` survives) and the rest feed
/// [`lowrank_norm`].
pub fn frobenius_norm_max(m: &DMatrix<f64>, eps: f64) -> Result<LowRankNorm> {
    let side = m.nrows();
    let n = (side as f64).sqrt().round() as usize;
    if n * n != side || m.ncols() != side {
        return Err(Error::Guard(format!(
            "matrix side {side} is not a perfect square"
        )));
    }
    let fro = m.norm();
    if fro > 1.0 + 1e-8 {
        return Err(Error::Guard(format!("Frobenius norm {fro} above 1")));
    }
    let eig = m.clone().symmetric_eigen();
    let min = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if min < -1e-8 {
        return Err(Error::Guard(format!(
            "matrix not PSD: min eigenvalue {min:.3e}"
        )));
    }
    let mut quads = Vec::new();
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l >= eps {
            let v = eig.eigenvectors.column(i);
            let mut q = DMatrix::zeros(n, n);
            for a in 0..n {
                for b in 0..n {
                    q[(a, b)] = v[a * n + b];
                }
            }
            // x^T mat(v) x only probes the symmetric part
            let sym = (&q + q.transpose()) * 0.5;
            quads.push(sym * l.sqrt());
        }
    }
    if quads.is_empty() {
        // everything truncated: the maximum is within 2*eps of zero
        return Ok(LowRankNorm {
            value: 0.0,
            lambda: DVector::zeros(1),
            x: DVector::from_fn(n, |i, _| if i == 0 { 1.0 } else { 0.0 }),
        });
    }
    let form = LowRankForm::new(quads)?;
    lowrank_norm(&form, eps)
}

/// Brute-force oracle: dense scan over `points` unit vectors (Fibonacci
/// sphere for n = 3, random otherwise) plus local coordinate refinement.
pub fn sphere_grid_max(
    evaluate: impl Fn(&DVector<f64>) -> f64 + Sync,
    n: usize,
    points: usize,
    seed: u64,
) -> f64 {
    let candidates: Vec<DVector<f64>> = if n == 3 {
        (0..points)
            .map(|i| {
                let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
                let theta = 2.0 * std::f64::consts::PI * (i as f64 / golden).fract();
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / points as f64;
                let r = (1.0 - z * z).sqrt();
                DVector::from_vec(vec![r * theta.cos(), r * theta.sin(), z])
            })
            .collect()
    } else {
        let mut rng = crate::seeds::rng(seed, crate::seeds::STREAM_VALIDATE);
        (0..points)
            .map(|_| crate::seeds::unit_vector(&mut rng, n))
            .collect()
    };
    let mut best_x = candidates
        .par_iter()
        .max_by(|a, b| evaluate(a).partial_cmp(&evaluate(b)).unwrap())
        .expect("points >= 1")
        .clone();
    let mut best = evaluate(&best_x);
    // local refinement: shrinking coordinate steps
    let mut step = 0.1;
    while step > 1e-5 {
        let mut improved = false;
        for i in 0..n {
            for sgn in [-1.0, 1.0] {
                let mut cand = best_x.clone();
                cand[i] += sgn * step;
                let nrm = cand.norm();
                if nrm == 0.0 {
                    continue;
                }
                cand /= nrm;
                let v = evaluate(&cand);
                if v > best {
                    best = v;
                    best_x = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds;

    #[test]
    fn net_examples() {
        // r=1, eps=0.5: unit vectors of R^1 are {-1, 1}, both covered.
        let net = epsilon_net(1, 0.5).unwrap();
        for target in [-1.0f64, 1.0] {
            assert!(net.iter().any(|p| (p[0] - target).abs() <= 0.5));
        }
        // r=2, eps=0.1: size within the documented (3/eps)^r bound.
        let net = epsilon_net(2, 0.1).unwrap();
        assert!(net.len() <= 900, "net size {}", net.len());
        assert!(net.iter().all(|p| (p.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn net_covering_monte_carlo() {
        let mut rng = seeds::rng(70, seeds::STREAM_VALIDATE);
        for (r, eps) in [(2usize, 0.2), (3, 0.3)] {
            let net = epsilon_net(r, eps).unwrap();
            let eps2 = (eps + 1e-12) * (eps + 1e-12);
            for _ in 0..100_000 {
                let v = seeds::unit_vector(&mut rng, r);
                let ok = net.iter().any(|p| {
                    let mut d2 = 0.0;
                    for i in 0..r {
                        let d = p[i] - v[i];
                        d2 += d * d;
                    }
                    d2 <= eps2
                });
                assert!(ok, "uncovered vector {v:?} at r={r} eps={eps}");
            }
        }
    }

    #[test]
    fn net_guards() {
        assert!(epsilon_net(0, 0.5).is_err());
        assert!(epsilon_net(2, 1.5).is_err());
        // refuses enormous nets
        assert!(epsilon_net(6, 0.01).is_err());
    }

    #[test]
    fn lowrank_identity_and_diagonal() {
        // Q1 = I on R^2: P = ||x||^4, norm 1.
        let form = LowRankForm::new(vec![DMatrix::identity(2, 2)]).unwrap();
        let out = lowrank_norm(&form, 0.1).unwrap();
        assert!((out.value - 1.0).abs() <= 0.1, "value {}", out.value);

        // Q1 = diag(1, 1/2): ||P|| = 1 at e1.
        let q = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.5]));
        let form = LowRankForm::new(vec![q]).unwrap();
        let out = lowrank_norm(&form, 0.1).unwrap();
        assert!((out.value - 1.0).abs() <= 0.1, "value {}", out.value);
    }

    #[test]
    fn lowrank_matches_grid_oracle() {
        let mut rng = seeds::rng(71, seeds::STREAM_VALIDATE);
        for _ in 0..5 {
            let quads: Vec<DMatrix<f64>> = (0..2)
                .map(|_| {
                    let g = DMatrix::from_fn(3, 3, |_, _| seeds::standard_normal(&mut rng));
                    (&g + g.transpose()) * 0.5
                })
                .collect();
            let form = LowRankForm::new(quads).unwrap();
            let out = lowrank_norm(&form, 0.1).unwrap();
            let grid = sphere_grid_max(|x| form.evaluate(x), 3, 10_000, 1);
            let rel = (out.value - grid).abs() / grid.max(1e-12);
            assert!(
                rel <= 0.15,
                "lowrank {} vs grid {grid}, rel {rel}",
                out.value
            );
        }
    }

    #[test]
    fn certificate_consistency() {
        let mut rng = seeds::rng(72, seeds::STREAM_VALIDATE);
        for _ in 0..5 {
            let quads: Vec<DMatrix<f64>> = (0..2)
                .map(|_| {
                    let g = DMatrix::from_fn(4, 4, |_, _| seeds::standard_normal(&mut rng));
                    (&g + g.transpose()) * 0.5
                })
                .collect();
            let form = LowRankForm::new(quads).unwrap();
            let eps = 0.1;
            let out = lowrank_norm(&form, eps).unwrap();
            // P(x) >= (1 - 3 eps) * value at the certificate x (Cauchy-Schwarz
            // makes it >= value exactly; the slack covers fp noise)
            let px = form.evaluate(&out.x);
            assert!(
                px >= (1.0 - 3.0 * eps) * out.value,
                "P(x) {px} vs {}",
                out.value
            );
        }
    }

    #[test]
    fn refinement_is_monotone_on_halving_nets() {
        let mut rng = seeds::rng(73, seeds::STREAM_VALIDATE);
        let quads: Vec<DMatrix<f64>> = (0..2)
            .map(|_| {
                let g = DMatrix::from_fn(3, 3, |_, _| seeds::standard_normal(&mut rng));
                (&g + g.transpose()) * 0.5
            })
            .collect();
        let form = LowRankForm::new(quads).unwrap();
        // lattice(h/2) contains lattice(h), so halving eps never shrinks the max
        let mut prev = f64::NEG_INFINITY;
        for eps in [0.4, 0.2, 0.1] {
            let v = lowrank_norm(&form, eps).unwrap().value;
            assert!(v >= prev - 1e-12, "eps {eps}: {v} < {prev}");
            prev = v;
        }
    }

    #[test]
    fn grid_identity_between_lambda_and_x_views() {
        // max_lambda ||Q_lambda||^2 == max_x P(x), instantiated on grids.
        let mut rng = seeds::rng(74, seeds::STREAM_VALIDATE);
        let quads: Vec<DMatrix<f64>> = (0..2)
            .map(|_| {
                let g = DMatrix::from_fn(3, 3, |_, _| seeds::standard_normal(&mut rng));
                (&g + g.transpose()) * 0.5
            })
            .collect();
        let form = LowRankForm::new(quads).unwrap();
        let x_view = sphere_grid_max(|x| form.evaluate(x), 3, 10_000, 2);
        // dense lambda grid on the circle
        let mut lam_view = 0.0f64;
        for k in 0..2000 {
            let th = std::f64::consts::PI * k as f64 / 1000.0;
            let q = form.combination(&[th.cos(), th.sin()]);
            let top = q
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .fold(0.0f64, |a, &l| a.max(l.abs()));
            lam_view = lam_view.max(top * top);
        }
        let rel = (x_view - lam_view).abs() / x_view.max(1e-12);
        assert!(rel <= 0.02, "x view {x_view} vs lambda view {lam_view}");
    }

    #[test]
    fn frobenius_rank_one_and_truncation() {
        // M = vv^T with v = vec(e1 e1^T): max = 1 at e1.
        let n = 3;
        let mut v = DVector::zeros(n * n);
        v[0] = 1.0;
        let m = &v * v.transpose();
        let out = frobenius_norm_max(&m, 0.1).unwrap();
        assert!((out.value - 1.0).abs() <= 0.2, "value {}", out.value);

        // eps = 0.5 truncates everything below 0.5: a matrix with eigenvalues
        // {0.4, ...} collapses to value 0
        let m = &v * v.transpose() * 0.4;
        let out = frobenius_norm_max(&m, 0.5).unwrap();
        assert_eq!(out.value, 0.0);
    }

    #[test]
    fn frobenius_rank_two_matches_grid() {
        let mut rng = seeds::rng(75, seeds::STREAM_VALIDATE);
        let n = 3;
        // two random symmetric "directions" with unit total Frobenius mass
        let mut mats = Vec::new();
        for _ in 0..2 {
            let g = DMatrix::from_fn(n, n, |_, _| seeds::standard_normal(&mut rng));
            let s = (&g + g.transpose()) * 0.5;
            mats.push(s);
        }
        let mut m = DMatrix::zeros(n * n, n * n);
        for s in &mats {
            let mut v = DVector::zeros(n * n);
            for a in 0..n {
                for b in 0..n {
                    v[a * n + b] = s[(a, b)];
                }
            }
            m += &v * v.transpose() * (0.5 / (s.norm() * s.norm()));
        }
        let eps = 0.1;
        let out = frobenius_norm_max(&m, eps).unwrap();
        let grid = sphere_grid_max(
            |x| {
                mats.iter()
                    .map(|s| {
                        let q = (x.transpose() * s * x)[(0, 0)];
                        q * q * 0.5 / (s.norm() * s.norm())
                    })
                    .sum()
            },
            n,
            10_000,
            3,
        );
        assert!(
            (out.value - grid).abs() <= 2.0 * eps + 0.02,
            "{} vs {grid}",
            out.value
        );
    }

    #[test]
    fn frobenius_guards() {
        let m = DMatrix::identity(9, 9) * 2.0; // Frobenius norm 6
        assert!(frobenius_norm_max(&m, 0.1).is_err());
        let mut bad = DMatrix::identity(9, 9) * 0.1;
        bad[(0, 0)] = -0.5;
        assert!(frobenius_norm_max(&bad, 0.1).is_err());
    }
}
