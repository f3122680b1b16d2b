//! Two-parameter Nelder–Mead polish on top of argmin.

use argmin::core::{CostFunction, Error as ArgminError, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;

#[derive(Debug, Clone, Copy)]
pub struct NmResult {
    pub x: [f64; 2],
    pub fx: f64,
    pub iterations: u64,
    pub converged: bool,
}

struct Objective<F>(F);

impl<F: Fn([f64; 2]) -> f64> CostFunction for Objective<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<f64, ArgminError> {
        Ok((self.0)([p[0], p[1]]))
    }
}

/// Minimize `f` from `x0` with an axis-aligned initial simplex of size `step`.
pub fn nelder_mead_2d<F: Fn([f64; 2]) -> f64>(f: F, x0: [f64; 2], step: f64, sd_tol: f64, max_iters: u64) -> NmResult {
    let simplex = vec![
        vec![x0[0], x0[1]],
        vec![x0[0] + step, x0[1]],
        vec![x0[0], x0[1] + step],
    ];
    let fallback = NmResult { x: x0, fx: f(x0), iterations: 0, converged: false };
    let solver = match NelderMead::new(simplex).with_sd_tolerance(sd_tol) {
        Ok(s) => s,
        Err(_) => return fallback,
    };
    let res = match Executor::new(Objective(f), solver).configure(|s| s.max_iters(max_iters)).run() {
        Ok(r) => r,
        Err(_) => return fallback,
    };
    let state = res.state();
    let best = state.get_best_param().cloned().unwrap_or_else(|| vec![x0[0], x0[1]]);
    let converged = matches!(
        state.get_termination_status(),
        TerminationStatus::Terminated(TerminationReason::SolverConverged)
    );
    NmResult { x: [best[0], best[1]], fx: state.get_best_cost(), iterations: state.get_iter(), converged }
}
