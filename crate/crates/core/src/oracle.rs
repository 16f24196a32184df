//! Reference solutions for testing: high-accuracy points on the
//! (re-parameterized) central path and local-norm distances to them.

use nalgebra::DVector;

use crate::barrier::Barrier;
use crate::error::{Error, Result};
use crate::problems::CompositeProblem;
use crate::prox::ProxKind;
use crate::subsolver::{self, QuadraticModel, SubsolverOptions};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_NEWTON_ITERS: usize = 500;
/// Decrement below which full Newton steps are taken.
const FULL_STEP_DECREMENT: f64 = 0.2;
/// In the full-step region a step that fails to halve the decrement means
/// rounding noise has been reached, and the iterate is returned.
const STALL_LIMIT: f64 = FULL_STEP_DECREMENT;

/// Solves `min (⟨c,x⟩ + g(x))/t + f(x) - η⟨ζ₀, x⟩` by damped proximal
/// Newton steps from `x_start`, until the proximal Newton decrement is at
/// most `tol` or stalls below [`STALL_LIMIT`].
pub fn solve_central_point(
    problem: &CompositeProblem,
    zeta0: &DVector<f64>,
    eta: f64,
    t: f64,
    tol: f64,
    x_start: &DVector<f64>,
) -> Result<DVector<f64>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tol must be positive, got {tol}")));
    }
    let barrier = &problem.barrier;
    if !barrier.contains(x_start) {
        return Err(Error::Domain("oracle start point is not interior".into()));
    }
    let mut x = x_start.clone();
    let mut prev = f64::INFINITY;
    for _ in 0..MAX_NEWTON_ITERS {
        let model =
            subsolver::build_model(barrier, &x, zeta0, eta, &problem.c, t, &problem.g)?;
        let z = minimize_model(&model, tol)?;
        let d = &z - &x;
        let lambda = model.metric().local_norm(&d)?;
        if barrier.contains(&z) && (lambda <= tol || (lambda <= STALL_LIMIT && lambda > 0.5 * prev)) {
            return Ok(z);
        }
        prev = lambda;
        let alpha = if lambda <= FULL_STEP_DECREMENT { 1.0 } else { 1.0 / (1.0 + lambda) };
        let next = &x + d * alpha;
        x = if barrier.contains(&next) {
            next
        } else {
            &x + (&z - &x) / (1.0 + lambda)
        };
    }
    Err(Error::NonConvergence {
        what: "central point oracle",
        iterations: MAX_NEWTON_ITERS,
    })
}

fn minimize_model(model: &QuadraticModel, tol: f64) -> Result<DVector<f64>> {
    if matches!(model.g().kind(), ProxKind::AffineDiag { .. }) {
        return subsolver::solve_affine_exact(model);
    }
    let delta = (tol * 0.1).max(1e-9);
    let opts = SubsolverOptions {
        beta: None,
        max_iters: Some(1_000_000),
    };
    Ok(subsolver::solve_with(model, delta, opts)?.z)
}

/// `‖x - x_ref‖_{x_ref}`.
pub fn lambda_distance(x: &DVector<f64>, x_ref: &DVector<f64>, barrier: &Barrier) -> Result<f64> {
    barrier.metric_at(x_ref)?.local_norm(&(x - x_ref))
}

/// Follows the plain (`η = 0`) central path from `t_start` down to `t_end`,
/// shrinking `t` by `factor` and warm-starting each solve. Returns the last
/// point.
pub fn central_path_limit(
    problem: &CompositeProblem,
    x_start: &DVector<f64>,
    t_start: f64,
    t_end: f64,
    factor: f64,
    tol: f64,
) -> Result<DVector<f64>> {
    if !(factor > 0.0 && factor < 1.0 && t_end > 0.0 && t_start >= t_end) {
        return Err(Error::InvalidInput("need 0 < factor < 1 and t_start >= t_end > 0".into()));
    }
    let zero = DVector::zeros(problem.dim());
    let mut x = x_start.clone();
    let mut t = t_start;
    loop {
        x = solve_central_point(problem, &zero, 0.0, t, tol, &x)?;
        if t <= t_end {
            return Ok(x);
        }
        t = (t * factor).max(t_end);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::box_lp;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn one_dim_box_matches_bisection() {
        // optimality: 1/t + 2x/(1-x²) = 0 on (-1, 1)
        let prob = box_lp(v(&[1.0]), v(&[-1.0]), v(&[1.0])).unwrap();
        let t = 1.0;
        let x = solve_central_point(&prob, &v(&[0.0]), 0.0, t, 1e-12, &v(&[0.0])).unwrap();
        let phi = |x: f64| 1.0 / t + 2.0 * x / (1.0 - x * x);
        let (mut lo, mut hi) = (-1.0 + 1e-15, 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phi(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((x[0] - 0.5 * (lo + hi)).abs() < 1e-10, "{} vs {}", x[0], lo);
        assert!((x[0] - (1.0 - 2f64.sqrt())).abs() < 1e-10);
    }

    #[test]
    fn lambda_distance_examples() {
        let b = Barrier::unit_box(2).unwrap();
        let c = v(&[0.0, 0.0]);
        assert_eq!(lambda_distance(&c, &c, &b).unwrap(), 0.0);
        assert!((lambda_distance(&v(&[1.0, 0.0]), &c, &b).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let r = v(&[0.2, -0.1]);
        let d = v(&[0.05, 0.3]);
        let a = lambda_distance(&(&r + &d), &r, &b).unwrap();
        let bb = lambda_distance(&(&r - &d), &r, &b).unwrap();
        assert!((a - bb).abs() <= 1e-15 * a);
    }

    #[test]
    fn halving_tol_is_self_consistent() {
        let prob = box_lp(v(&[1.0, -2.0, 0.5]), v(&[-1.0; 3]), v(&[1.0; 3])).unwrap();
        let zeta = v(&[0.3, -0.2, 0.1]);
        let start = v(&[0.0; 3]);
        let tol = 1e-6;
        let a = solve_central_point(&prob, &zeta, 1.0, 0.3, tol, &start).unwrap();
        let b = solve_central_point(&prob, &zeta, 1.0, 0.3, tol / 2.0, &start).unwrap();
        assert!(lambda_distance(&a, &b, &prob.barrier).unwrap() < tol);
    }

    #[test]
    fn large_t_recovers_anchor() {
        // with ζ₀ = ∇f(x⁰) the η = 1 path passes through x⁰ as t → ∞
        let prob = box_lp(v(&[1.0, -2.0]), v(&[-1.0, -1.0]), v(&[1.0, 1.0])).unwrap();
        let x0 = v(&[0.3, -0.6]);
        let zeta = prob.barrier.gradient(&x0).unwrap();
        let x = solve_central_point(&prob, &zeta, 1.0, 1e9, 1e-12, &v(&[0.0, 0.0])).unwrap();
        assert!((x - x0).amax() < 1e-7);
    }
}
