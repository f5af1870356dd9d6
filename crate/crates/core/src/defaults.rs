use serde::Serialize;

/// Central table of default tolerances and constants.  Every tunable that a
/// pipeline relies on lives here so that `--show-defaults` can print the
/// whole configuration in one place.
#[derive(Debug, Clone, Serialize)]
pub struct Defaults {
    /// Solver convergence tolerance (primal/dual residuals).
    pub solver_tol: f64,
    /// Solver iteration cap.
    pub solver_max_iter: usize,
    /// Oracle validation PSD tolerance for empirical sources.
    pub tol_psd_empirical: f64,
    /// Oracle validation PSD tolerance for solver sources, as a multiple of
    /// the solver tolerance.
    pub tol_psd_solver_factor: f64,
    /// Reweighing mass floor, as a multiple of the largest second moment.
    pub tol_reweigh_factor: f64,
    /// Moment-count guard: construction refuses above this many stored moments.
    pub moment_guard: usize,
    /// Entropy-drop threshold for one conditioning step, in bits, as a
    /// multiple of `eps^2 / t^2`.
    pub drop_threshold_factor: f64,
    /// Trials for the random-function rounding subroutine.
    pub random_function_trials: usize,
    /// Trials for the Gaussian rounding subroutine.
    pub gaussian_round_trials: usize,
    /// Truncation threshold tau.
    pub trunc_tau: f64,
    /// Truncation fourth-moment constant c1 (`||P fbar||_4^4 >= c1 * mu`).
    pub trunc_c1: f64,
    /// Truncation linking constant c2 (`(P f)(u)^2 >= c2 * |fbar(u)|`).
    pub trunc_c2: f64,
    /// Near-containment slack for analytically-sparse search instances.
    pub asvp_containment_eps: f64,
    /// Acceptance constant c0 in `ratio >= c0 / (mu * d^(1/3))`.
    pub asvp_c0: f64,
    /// Relaxation level for planted-vector stage one.
    pub planted_level: usize,
    /// Gaussian rounding trials for planted-vector stage one.
    pub planted_trials: usize,
    /// Stage-two success threshold: correlation >= 1 - exact_tol.
    pub exact_tol: f64,
    /// Small-set expansion eigenvalue constant C (lambda = 1 - C*eps).
    pub sse_c: f64,
    /// Level-set constant in the sparse-set extraction.
    pub extract_c: f64,
    /// Iteration cap for the extraction's g-update loop.
    pub extract_rounds: usize,
    /// Whether low-rank certificates run a local refinement pass.
    pub lowrank_refine: bool,
    /// Epsilon-net size guard.
    pub net_guard: usize,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            solver_tol: 1e-7,
            solver_max_iter: 50_000,
            tol_psd_empirical: 1e-10,
            tol_psd_solver_factor: 10.0,
            tol_reweigh_factor: 1e-12,
            moment_guard: 5_000_000,
            drop_threshold_factor: 0.5,
            random_function_trials: 256,
            gaussian_round_trials: 1024,
            trunc_tau: 0.5,
            trunc_c1: 1.0 / 32.0,
            trunc_c2: 0.5,
            asvp_containment_eps: 0.01,
            asvp_c0: 0.1,
            planted_level: 4,
            planted_trials: 512,
            exact_tol: 1e-6,
            sse_c: 4.0,
            extract_c: 100.0,
            extract_rounds: 50,
            lowrank_refine: false,
            net_guard: 10_000_000,
        }
    }
}
