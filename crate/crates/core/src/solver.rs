//! First-order operator-splitting solvers.
//!
//! `SdpAdmm` solves  max <c,y>  s.t.  G y = h,  X(y) >= 0  where `X(y)` is a
//! symmetric matrix whose entries are selected coordinates of `y` (the moment
//! matrix of a moment vector: duplicate-monomial ties are eliminated by the
//! parametrization itself).  The splitting introduces Z = X(y) with a PSD
//! indicator on Z; the y-update is an equality-constrained quadratic program
//! with a diagonal Hessian, so one small factorization of `G D^-1 G^T` is
//! precomputed and reused, and the PSD projection is a dense
//! eigendecomposition per iteration.  Over-relaxation and residual balancing
//! follow standard ADMM practice.
//!
//! `l1_admm` solves  min sum w_i |y_i|  over an affine slice of a subspace,
//! by alternating a soft-threshold with an affine projection, then polishing
//! the detected support with an equality-constrained least squares.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::{Error, Result};

/// Sparse row of an equality system over the y coordinates.
#[derive(Debug, Clone, Default)]
pub struct SparseRow {
    pub entries: Vec<(usize, f64)>,
}

impl SparseRow {
    pub fn dot(&self, y: &DVector<f64>) -> f64 {
        self.entries.iter().map(|&(j, v)| v * y[j]).sum()
    }
}

/// Structure of the matrix-valued map `X(y)`: for every upper-triangle cell
/// `(r, c)` the index of the y-coordinate that fills it.
#[derive(Debug, Clone)]
pub struct MomentStructure {
    pub side: usize,
    /// Upper-triangle cell -> y index, row-major over `r <= c`.
    pub cell_to_y: Vec<usize>,
    pub dim_y: usize,
}

impl MomentStructure {
    #[inline]
    fn cell_index(&self, r: usize, c: usize) -> usize {
        debug_assert!(r <= c);
        r * self.side - r * (r + 1) / 2 + c
    }

    /// Number of ordered matrix cells mapping to each y coordinate.
    fn multiplicity(&self) -> DVector<f64> {
        let mut d = DVector::zeros(self.dim_y);
        for r in 0..self.side {
            for c in r..self.side {
                let w = if r == c { 1.0 } else { 2.0 };
                d[self.cell_to_y[self.cell_index(r, c)]] += w;
            }
        }
        d
    }

    pub fn assemble(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let mut x = DMatrix::zeros(self.side, self.side);
        for r in 0..self.side {
            for c in r..self.side {
                let v = y[self.cell_to_y[self.cell_index(r, c)]];
                x[(r, c)] = v;
                x[(c, r)] = v;
            }
        }
        x
    }

    /// Adjoint of `assemble`: w_gamma = sum over ordered cells mapping to gamma.
    fn collect(&self, m: &DMatrix<f64>) -> DVector<f64> {
        let mut w = DVector::zeros(self.dim_y);
        for r in 0..self.side {
            for c in r..self.side {
                let f = if r == c { 1.0 } else { 2.0 };
                w[self.cell_to_y[self.cell_index(r, c)]] += f * m[(r, c)];
            }
        }
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SolveStatus {
    Optimal,
    MaxIter,
    InfeasibleSignal,
}

/// Raw solver output with honestly recomputed residuals.
#[derive(Debug, Clone)]
pub struct AdmmSolution {
    pub y: DVector<f64>,
    pub objective: f64,
    pub psd_violation: f64,
    pub equality_residual: f64,
    pub duality_gap_estimate: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

pub struct SdpAdmm<'a> {
    pub structure: &'a MomentStructure,
    pub objective: &'a DVector<f64>,
    pub eq_rows: &'a [SparseRow],
    pub eq_rhs: &'a DVector<f64>,
}

struct EqualityProjector {
    g: DMatrix<f64>,
    d_inv: DVector<f64>,
    chol: Option<Cholesky<f64, nalgebra::Dyn>>,
    pinv: Option<(DMatrix<f64>, DVector<f64>)>,
}

impl EqualityProjector {
    fn new(rows: &[SparseRow], dim_y: usize, d: &DVector<f64>) -> Self {
        let m = rows.len();
        let mut g = DMatrix::zeros(m, dim_y);
        for (i, row) in rows.iter().enumerate() {
            for &(j, v) in &row.entries {
                g[(i, j)] += v;
            }
        }
        let d_inv = d.map(|v| 1.0 / v);
        // K = G D^-1 G^T; m stays small compared to dim_y.
        let mut gd = g.clone();
        for j in 0..dim_y {
            let s = d_inv[j];
            for i in 0..m {
                gd[(i, j)] *= s;
            }
        }
        let k: DMatrix<f64> = &gd * g.transpose();
        let chol = Cholesky::new(k.clone());
        let pinv = if chol.is_none() {
            let eig = k.symmetric_eigen();
            let max = eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
            let cut = 1e-12 * max.max(1e-300);
            let inv = eig.eigenvalues.map(|l| if l > cut { 1.0 / l } else { 0.0 });
            Some((eig.eigenvectors, inv))
        } else {
            None
        };
        EqualityProjector {
            g,
            d_inv,
            chol,
            pinv,
        }
    }

    fn solve_k(&self, rhs: &DVector<f64>) -> DVector<f64> {
        if let Some(ch) = &self.chol {
            ch.solve(rhs)
        } else {
            let (v, inv) = self.pinv.as_ref().unwrap();
            let t = v.transpose() * rhs;
            v * t.component_mul(inv)
        }
    }

    /// argmin_y 1/2 ||y - target||_D^2  s.t. G y = h, with `target` already
    /// divided by D.
    fn solve(&self, target: &DVector<f64>, h: &DVector<f64>) -> DVector<f64> {
        let gy = &self.g * target;
        let nu = self.solve_k(&(gy - h));
        let correction = self.g.transpose() * nu;
        target - correction.component_mul(&self.d_inv)
    }

    /// Residual of the least-squares solution of `G y = h` (infeasibility test).
    fn feasibility_residual(&self, h: &DVector<f64>) -> f64 {
        let nu = self.solve_k(h);
        let gt = self.g.transpose() * nu;
        let y = gt.component_mul(&self.d_inv);
        (&self.g * y - h).amax()
    }
}

impl SdpAdmm<'_> {
    pub fn solve(&self, tol: f64, max_iter: usize) -> Result<AdmmSolution> {
        let st = self.structure;
        let dim_y = st.dim_y;
        let d = st.multiplicity();
        if d.iter().any(|&v| v == 0.0) {
            return Err(Error::Solver(
                "moment coordinate unused by the matrix".into(),
            ));
        }
        let proj = EqualityProjector::new(self.eq_rows, dim_y, &d);

        let h = self.eq_rhs;
        let scale_h = h.amax().max(1.0);
        if proj.feasibility_residual(h) > 1e-8 * scale_h {
            return Ok(AdmmSolution {
                y: DVector::zeros(dim_y),
                objective: 0.0,
                psd_violation: 0.0,
                equality_residual: proj.feasibility_residual(h),
                duality_gap_estimate: f64::INFINITY,
                iterations: 0,
                status: SolveStatus::InfeasibleSignal,
            });
        }

        let obj_scale = self.objective.amax().max(1.0);
        let c_scaled = self.objective / obj_scale;

        let side = st.side;
        let mut z = DMatrix::<f64>::zeros(side, side);
        let mut u = DMatrix::<f64>::zeros(side, side);
        let mut rho = 1.0f64;
        let alpha = 1.6;

        let mut y = DVector::zeros(dim_y);
        let mut status = SolveStatus::MaxIter;
        let mut iterations = max_iter;
        for it in 0..max_iter {
            let w = st.collect(&(&z - &u));
            let target = (&w + &c_scaled * (1.0 / rho)).component_mul(&proj.d_inv);
            y = proj.solve(&target, h);
            let x = st.assemble(&y);

            let x_hat = &x * alpha + &z * (1.0 - alpha);
            let z_prev = z.clone();
            z = psd_project(&(&x_hat + &u));
            u += &x_hat - &z;

            let r_primal = (&x - &z).norm();
            let r_dual = rho * (&z - &z_prev).norm();
            let norm_scale = x.norm().max(z.norm()).max(1.0);
            if r_primal <= tol * norm_scale && r_dual <= tol * norm_scale {
                status = SolveStatus::Optimal;
                iterations = it + 1;
                break;
            }
            if (it + 1) % 50 == 0 {
                if r_primal > 10.0 * r_dual {
                    rho *= 2.0;
                    u /= 2.0;
                } else if r_dual > 10.0 * r_primal {
                    rho /= 2.0;
                    u *= 2.0;
                }
            }
        }

        // Honest residuals, recomputed from the returned y.
        let x = st.assemble(&y);
        let eig = x.clone().symmetric_eigen();
        let min_eig = eig
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let psd_violation = (-min_eig).max(0.0);
        let mut eq_res: f64 = 0.0;
        for (row, &hv) in self.eq_rows.iter().zip(h.iter()) {
            eq_res = eq_res.max((row.dot(&y) - hv).abs());
        }
        let objective = self.objective.dot(&y);
        let gap = (rho * obj_scale * (&x - &z).dot(&u)).abs();

        Ok(AdmmSolution {
            y,
            objective,
            psd_violation,
            equality_residual: eq_res,
            duality_gap_estimate: gap,
            iterations,
            status,
        })
    }
}

/// Project a symmetric matrix onto the PSD cone by eigenvalue clipping.
pub fn psd_project(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let side = m.nrows();
    let mut out = DMatrix::zeros(side, side);
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > 0.0 {
            let v = eig.eigenvectors.column(i);
            out += (v * v.transpose()) * l;
        }
    }
    out
}

/// Solution of the weighted L1 program.
#[derive(Debug, Clone)]
pub struct L1Solution {
    /// Coefficients over the subspace basis.
    pub coeffs: DVector<f64>,
    pub y: DVector<f64>,
    pub objective: f64,
    pub split_residual: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

/// min sum_i w_i |y_i|  over  y = B z  with  <lin, z> = 1.
///
/// `basis` must be orthonormal under the weights (`B^T W B = I`), which makes
/// the affine projection closed-form.
pub fn l1_admm(
    basis: &DMatrix<f64>,
    weights: &DVector<f64>,
    lin: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<L1Solution> {
    let n = basis.nrows();
    let _d = basis.ncols();
    let lin_norm2 = lin.dot(lin);
    if lin_norm2 <= 1e-24 {
        return Err(Error::Infeasible(
            "constraint functional vanishes on the subspace".into(),
        ));
    }

    let mut wv = DVector::zeros(n);
    let mut project = |v: &DVector<f64>| -> DVector<f64> {
        wv.copy_from(v);
        wv.component_mul_assign(weights);
        let z = basis.tr_mul(&wv);
        let t = (1.0 - lin.dot(&z)) / lin_norm2;
        z + lin * t
    };

    let obj = |v: &DVector<f64>| -> f64 {
        v.iter()
            .zip(weights.iter())
            .map(|(&a, &w)| w * a.abs())
            .sum()
    };

    let mut y = DVector::zeros(n);
    let mut u = DVector::zeros(n);
    let rho = 1.0;
    let mut x = DVector::zeros(n);
    let mut status = SolveStatus::MaxIter;
    let mut iterations = max_iter;
    for it in 0..max_iter {
        let z = project(&(&y - &u));
        x = basis * z;
        let y_prev = y.clone();
        y = (&x + &u).map(|v| soft_threshold(v, 1.0 / rho));
        u += &x - &y;
        let r_primal = (&x - &y).norm();
        let r_dual = rho * (&y - &y_prev).norm();
        let scale = x.norm().max(y.norm()).max(1.0);
        if r_primal <= tol * scale && r_dual <= tol * scale {
            status = SolveStatus::Optimal;
            iterations = it + 1;
            break;
        }
    }

    let z = project(&x);
    let x = basis * &z;

    // Support polish: least squares on the off-support rows, kept only when
    // feasible and at least as good in objective.
    let max_abs = x.amax();
    let support: Vec<usize> = (0..n).filter(|&i| x[i].abs() > 1e-3 * max_abs).collect();
    let mut best_z = z.clone();
    let mut best_obj = obj(&x);
    if support.len() < n {
        if let Some(zp) = polish(basis, weights, lin, &support) {
            let yp = basis * &zp;
            let o = obj(&yp);
            if o <= best_obj && (lin.dot(&zp) - 1.0).abs() <= 1e-9 {
                best_obj = o;
                best_z = zp;
            }
        }
    }
    let y_out = basis * &best_z;
    let split_residual = (&y_out - &y).norm();
    Ok(L1Solution {
        coeffs: best_z,
        y: y_out,
        objective: best_obj,
        split_residual,
        iterations,
        status,
    })
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Least-squares of the weighted off-support rows subject to `<lin, z> = 1`.
fn polish(
    basis: &DMatrix<f64>,
    weights: &DVector<f64>,
    lin: &DVector<f64>,
    support: &[usize],
) -> Option<DVector<f64>> {
    let n = basis.nrows();
    let d = basis.ncols();
    let mut ata = DMatrix::zeros(d, d);
    for i in 0..n {
        if support.contains(&i) {
            continue;
        }
        let row = basis.row(i);
        for a in 0..d {
            for b in 0..d {
                ata[(a, b)] += weights[i] * row[a] * row[b];
            }
        }
    }
    let mut kkt = DMatrix::zeros(d + 1, d + 1);
    kkt.view_mut((0, 0), (d, d)).copy_from(&ata);
    for a in 0..d {
        kkt[(a, d)] = lin[a];
        kkt[(d, a)] = lin[a];
    }
    let mut rhs = DVector::zeros(d + 1);
    rhs[d] = 1.0;
    kkt.lu().solve(&rhs).map(|sol| sol.rows(0, d).clone_owned())
}
