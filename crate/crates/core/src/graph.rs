//! Regular graphs as normalized random-walk operators with a cached
//! spectral decomposition, plus Cayley graphs over GF(2)^l.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;

use crate::subspace::{Measure, Subspace};
use crate::{Error, Result};

/// Cayley structure over GF(2)^l: the generator weight of each group element.
#[derive(Debug, Clone)]
pub struct CayleyInfo {
    pub ell: usize,
    /// `weights[z]` = probability of stepping by `z`; sums to 1.
    pub weights: Vec<f64>,
}

/// A regular graph identified with its normalized adjacency (random-walk)
/// matrix.
#[derive(Debug, Clone)]
pub struct RegularGraph {
    n: usize,
    transition: DMatrix<f64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    cayley: Option<CayleyInfo>,
}

impl RegularGraph {
    /// Wrap a symmetric transition matrix with unit row sums.
    pub fn from_transition(transition: DMatrix<f64>) -> Result<Self> {
        Self::build(transition, None)
    }

    fn build(transition: DMatrix<f64>, cayley: Option<CayleyInfo>) -> Result<Self> {
        let n = transition.nrows();
        if transition.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: transition.ncols(),
            });
        }
        for i in 0..n {
            let row: f64 = transition.row(i).iter().sum();
            if (row - 1.0).abs() > 1e-10 {
                return Err(Error::Guard(format!("row {i} sums to {row}, not 1")));
            }
            for j in 0..n {
                if (transition[(i, j)] - transition[(j, i)]).abs() > 1e-10 {
                    return Err(Error::Guard("transition matrix not symmetric".into()));
                }
                if transition[(i, j)] < -1e-14 {
                    return Err(Error::Guard("negative transition weight".into()));
                }
            }
        }
        let eig = transition.clone().symmetric_eigen();
        for &l in eig.eigenvalues.iter() {
            if l < -1.0 - 1e-8 || l > 1.0 + 1e-8 {
                return Err(Error::Guard(format!("eigenvalue {l} outside [-1, 1]")));
            }
        }
        Ok(RegularGraph {
            n,
            transition,
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            cayley,
        })
    }

    /// Parse a `u v weight` edge list (weights are walk probabilities and
    /// must already be row-normalized; the matrix is symmetrized by entry).
    pub fn from_edge_list(text: &str, n: usize) -> Result<Self> {
        let mut t = DMatrix::zeros(n, n);
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!(
                    "line {}: expected `u v weight`",
                    ln + 1
                )));
            }
            let u: usize = parts[0]
                .parse()
                .map_err(|_| Error::Parse(format!("line {}", ln + 1)))?;
            let v: usize = parts[1]
                .parse()
                .map_err(|_| Error::Parse(format!("line {}", ln + 1)))?;
            let w: f64 = parts[2]
                .parse()
                .map_err(|_| Error::Parse(format!("line {}", ln + 1)))?;
            if u >= n || v >= n {
                return Err(Error::Parse(format!(
                    "line {}: vertex out of range",
                    ln + 1
                )));
            }
            t[(u, v)] += w;
            if u != v {
                t[(v, u)] += w;
            }
        }
        Self::from_transition(t)
    }

    /// The rho-noisy Boolean hypercube on `2^l` vertices: each bit flips
    /// independently with probability `(1 - rho)/2`; eigenfunctions are the
    /// characters `chi_alpha` with eigenvalue `rho^(|alpha|)`.
    pub fn cayley_noisy_hypercube(ell: usize, rho: f64) -> Result<Self> {
        Self::cayley_weighted_hypercube(ell, &vec![(1.0 - rho) / 2.0; ell])
    }

    /// Product-measure Cayley graph over GF(2)^l with per-bit flip
    /// probabilities; eigenvalue of `chi_alpha` is `prod_{i in alpha} (1 - 2 p_i)`.
    pub fn cayley_weighted_hypercube(ell: usize, flip_probs: &[f64]) -> Result<Self> {
        if ell > 14 {
            return Err(Error::Guard(format!("dense 2^l guard: l = {ell} > 14")));
        }
        if flip_probs.len() != ell {
            return Err(Error::DimensionMismatch {
                expected: ell,
                got: flip_probs.len(),
            });
        }
        if flip_probs.iter().any(|&p| !(0.0..=0.5).contains(&p)) {
            return Err(Error::Guard(
                "flip probabilities must lie in [0, 1/2]".into(),
            ));
        }
        let n = 1usize << ell;
        let mut weights = vec![0.0f64; n];
        for (z, w) in weights.iter_mut().enumerate() {
            let mut prob = 1.0;
            for (i, &p) in flip_probs.iter().enumerate() {
                prob *= if (z >> i) & 1 == 1 { p } else { 1.0 - p };
            }
            *w = prob;
        }
        let mut t = DMatrix::zeros(n, n);
        for x in 0..n {
            for (z, &w) in weights.iter().enumerate() {
                t[(x, x ^ z)] += w;
            }
        }
        Self::build(t, Some(CayleyInfo { ell, weights }))
    }

    /// Complete graph with self-loops: the walk jumps to a uniform vertex.
    pub fn complete_with_self_loops(n: usize) -> Result<Self> {
        Self::from_transition(DMatrix::from_element(n, n, 1.0 / n as f64))
    }

    /// Two disjoint cliques (with self-loops) of the given sizes.
    pub fn two_cliques(a: usize, b: usize) -> Result<Self> {
        let n = a + b;
        let mut t = DMatrix::zeros(n, n);
        for i in 0..a {
            for j in 0..a {
                t[(i, j)] = 1.0 / a as f64;
            }
        }
        for i in 0..b {
            for j in 0..b {
                t[(a + i, a + j)] = 1.0 / b as f64;
            }
        }
        Self::from_transition(t)
    }

    /// Random `deg`-regular graph as a union of `deg` uniform perfect
    /// matchings (n even), retried until simple; deterministic given seed.
    pub fn random_regular(n: usize, deg: usize, seed: u64) -> Result<Self> {
        if n % 2 != 0 {
            return Err(Error::Guard("random regular graph needs even n".into()));
        }
        let mut rng = crate::seeds::rng(seed, crate::seeds::STREAM_INSTANCE);
        let mut adj = DMatrix::<f64>::zeros(n, n);
        let mut placed = 0usize;
        let mut attempts = 0usize;
        while placed < deg {
            attempts += 1;
            if attempts > 200 * deg {
                return Err(Error::Guard("failed to sample disjoint matchings".into()));
            }
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let ok = perm
                .chunks(2)
                .all(|p| adj[(p[0], p[1])] == 0.0 && p[0] != p[1]);
            if !ok {
                continue;
            }
            for p in perm.chunks(2) {
                adj[(p[0], p[1])] = 1.0;
                adj[(p[1], p[0])] = 1.0;
            }
            placed += 1;
        }
        Self::from_transition(adj / deg as f64)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn transition(&self) -> &DMatrix<f64> {
        &self.transition
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn cayley(&self) -> Option<&CayleyInfo> {
        self.cayley.as_ref()
    }

    /// Exact character eigenvalue `sum_z w(z) (-1)^(alpha . z)` of a Cayley
    /// graph.
    pub fn character_eigenvalue(&self, alpha: usize) -> Result<f64> {
        let info = self
            .cayley
            .as_ref()
            .ok_or_else(|| Error::Guard("not a Cayley graph".into()))?;
        Ok(info
            .weights
            .iter()
            .enumerate()
            .map(|(z, &w)| w * chi_sign(alpha, z))
            .sum())
    }

    /// The neighbor distribution of a random element of `S`: start uniform in
    /// `S` and take one walk step.
    pub fn neighbor_distribution(&self, set: &[usize]) -> Result<DVector<f64>> {
        if set.is_empty() {
            return Err(Error::Guard("empty vertex set".into()));
        }
        let mut q = DVector::zeros(self.n);
        for &x in set {
            if x >= self.n {
                return Err(Error::Guard(format!("vertex {x} out of range")));
            }
            for y in 0..self.n {
                q[y] += self.transition[(x, y)];
            }
        }
        Ok(q / set.len() as f64)
    }

    /// `bd_G(S) = Pr[walk step from a random element of S leaves S]`.
    pub fn expansion(&self, set: &[usize]) -> Result<f64> {
        let q = self.neighbor_distribution(set)?;
        let stay: f64 = set.iter().map(|&x| q[x]).sum();
        Ok((1.0 - stay).clamp(0.0, 1.0))
    }

    /// Collision probability of the neighbor distribution `G(S)`.
    pub fn collision_probability(&self, set: &[usize]) -> Result<f64> {
        let q = self.neighbor_distribution(set)?;
        Ok(q.iter().map(|&p| p * p).sum())
    }

    /// Orthonormal (expectation-measure) basis of the span of eigenvectors
    /// with eigenvalue at least `lambda`.
    pub fn top_eigenspace(&self, lambda: f64) -> Result<Subspace> {
        let mut cols = Vec::new();
        for (i, &l) in self.eigenvalues.iter().enumerate() {
            if l >= lambda - 1e-9 {
                // counting-orthonormal eigenvector, rescaled to the
                // expectation measure
                cols.push(self.eigenvectors.column(i) * (self.n as f64).sqrt());
            }
        }
        if cols.is_empty() {
            return Err(Error::Guard(format!("no eigenvalues at or above {lambda}")));
        }
        Subspace::new(DMatrix::from_columns(&cols), Measure::Expectation)
    }

    /// Measure `|S|/n` of a vertex set.
    pub fn set_measure(&self, set: &[usize]) -> f64 {
        set.len() as f64 / self.n as f64
    }
}

/// `chi_alpha(x) = (-1)^(alpha . x)` over GF(2)^l bitmasks.
pub fn chi_sign(alpha: usize, x: usize) -> f64 {
    if (alpha & x).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_expansion() {
        // walk matrix J/4: a single vertex keeps only 1/4 of its mass
        let g = RegularGraph::complete_with_self_loops(4).unwrap();
        // oracle: direct enumeration of the 4-vertex walk matrix
        let q = g.neighbor_distribution(&[0]).unwrap();
        let direct_leave: f64 = (1..4).map(|y| q[y]).sum();
        assert!((direct_leave - 0.75).abs() < 1e-12);
        assert!((g.expansion(&[0]).unwrap() - 0.75).abs() < 1e-12);
        // the whole vertex set never expands
        assert_eq!(g.expansion(&[0, 1, 2, 3]).unwrap(), 0.0);
    }

    #[test]
    fn disconnected_clique_has_zero_expansion() {
        let g = RegularGraph::two_cliques(3, 5).unwrap();
        let clique: Vec<usize> = (0..3).collect();
        assert!(g.expansion(&clique).unwrap() < 1e-12);
    }

    #[test]
    fn collision_probability_examples() {
        // single vertex with only a self-loop
        let mut t = DMatrix::zeros(2, 2);
        t[(0, 0)] = 1.0;
        t[(1, 1)] = 1.0;
        let g = RegularGraph::from_transition(t).unwrap();
        assert_eq!(g.collision_probability(&[0]).unwrap(), 1.0);

        // uniform neighborhoods over m vertices -> 1/m
        let g = RegularGraph::complete_with_self_loops(8).unwrap();
        assert!((g.collision_probability(&[2]).unwrap() - 0.125).abs() < 1e-12);

        // random set: matches the brute-force distribution computation
        let g = RegularGraph::cayley_noisy_hypercube(4, 0.7).unwrap();
        let set = [1usize, 5, 9];
        let q = g.neighbor_distribution(&set).unwrap();
        let brute: f64 = q.iter().map(|&p| p * p).sum();
        assert!((g.collision_probability(&set).unwrap() - brute).abs() < 1e-12);
    }

    #[test]
    fn hypercube_single_bit_matrix() {
        let rho = 0.6;
        let g = RegularGraph::cayley_noisy_hypercube(1, rho).unwrap();
        let t = g.transition();
        assert!((t[(0, 0)] - (1.0 + rho) / 2.0).abs() < 1e-12);
        assert!((t[(0, 1)] - (1.0 - rho) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn hypercube_spectrum_matches_closed_form() {
        let ell = 5;
        let rho = 0.8;
        let g = RegularGraph::cayley_noisy_hypercube(ell, rho).unwrap();
        // eigenvalue multiset {rho^k with multiplicity C(l, k)}
        let mut want: Vec<f64> = (0..1usize << ell)
            .map(|alpha| rho.powi(alpha.count_ones() as i32))
            .collect();
        let mut got: Vec<f64> = g.eigenvalues().iter().cloned().collect();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (w, g) in want.iter().zip(&got) {
            assert!((w - g).abs() < 1e-9, "{w} vs {g}");
        }
        // the analytic character eigenvalues agree
        for alpha in 0..1usize << ell {
            let l = g.character_eigenvalue(alpha).unwrap();
            assert!((l - rho.powi(alpha.count_ones() as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn top_eigenspace_dimensions() {
        let g = RegularGraph::cayley_noisy_hypercube(3, 0.6).unwrap();
        // lambda = -1 captures everything
        assert_eq!(g.top_eigenspace(-1.0).unwrap().dim(), 8);
        // between rho^2 and rho: degree <= 1 characters, dimension 4
        assert_eq!(g.top_eigenspace(0.5).unwrap().dim(), 4);
        // just above the second eigenvalue: constants only
        assert_eq!(g.top_eigenspace(0.9).unwrap().dim(), 1);
        // above 1: empty
        assert!(g.top_eigenspace(1.5).is_err());
    }

    #[test]
    fn random_regular_is_regular_and_connected_enough() {
        let g = RegularGraph::random_regular(64, 8, 5).unwrap();
        for i in 0..64 {
            let row: f64 = g.transition().row(i).iter().sum();
            assert!((row - 1.0).abs() < 1e-12);
        }
        // determinism
        let h = RegularGraph::random_regular(64, 8, 5).unwrap();
        assert_eq!(g.transition(), h.transition());
        // spectral gap of a random 8-regular graph is comfortably large
        let mut eigs: Vec<f64> = g.eigenvalues().iter().cloned().collect();
        eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((eigs[0] - 1.0).abs() < 1e-9);
        assert!(eigs[1] < 0.9);
    }

    #[test]
    fn edge_list_roundtrip() {
        let text = "0 1 0.5\n0 0 0.5\n1 1 0.5\n";
        let g = RegularGraph::from_edge_list(text, 2).unwrap();
        assert!((g.transition()[(0, 1)] - 0.5).abs() < 1e-12);
        assert!(RegularGraph::from_edge_list("0 5 1.0", 2).is_err());
    }
}
