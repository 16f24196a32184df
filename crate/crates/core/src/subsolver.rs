//! The strongly convex subproblem solved at each path-following step:
//!
//! ```text
//! min_z  ⟨h, z - x_k⟩ + ½‖z - x_k‖²_M + s·g(z)
//! ```
//!
//! solved by FISTA with function-value restart, or in closed form when
//! `g` is zero or the diagonal affine indicator.

use nalgebra::DVector;

use crate::barrier::{Barrier, MetricFactor};
use crate::error::{check_dim, Error, Result};
use crate::prox::{ProxFn, ProxKind};
use crate::sym::diagonal_indices;

pub const POWER_MAX_ITERS: usize = 200;
pub const POWER_REL_TOL: f64 = 1e-8;
/// Iteration cap as a multiple of [`j_max`].
pub const CAP_FACTOR: usize = 100;

#[derive(Debug, Clone)]
pub struct QuadraticModel {
    anchor: DVector<f64>,
    metric: MetricFactor,
    h: DVector<f64>,
    g: ProxFn,
    g_scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubSolution {
    pub z: DVector<f64>,
    /// Upper bound on the model objective gap at `z`.
    pub gap_bound: f64,
    pub iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumBounds {
    pub l: f64,
    pub mu: f64,
}

impl SpectrumBounds {
    pub fn condition(&self) -> f64 {
        self.l / self.mu
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsolverOptions {
    /// Neighborhood size entering `j_max`. Defaults to `16δ`.
    pub beta: Option<f64>,
    /// Overrides the `100·j_max` cap.
    pub max_iters: Option<usize>,
}

impl Default for SubsolverOptions {
    fn default() -> Self {
        Self {
            beta: None,
            max_iters: None,
        }
    }
}

impl QuadraticModel {
    /// Model anchored at `anchor` with linear term `h`, metric `metric` and
    /// nonsmooth part `g_scale·g`.
    pub fn new(
        anchor: DVector<f64>,
        metric: MetricFactor,
        h: DVector<f64>,
        g: ProxFn,
        g_scale: f64,
    ) -> Result<Self> {
        let n = anchor.len();
        check_dim(n, metric.dim())?;
        check_dim(n, h.len())?;
        check_dim(n, g.dim())?;
        if !(g_scale >= 0.0 && g_scale.is_finite()) {
            return Err(Error::InvalidInput(format!("g scale must be >= 0, got {g_scale}")));
        }
        Ok(Self {
            anchor,
            metric,
            h,
            g,
            g_scale,
        })
    }

    pub fn anchor(&self) -> &DVector<f64> {
        &self.anchor
    }

    pub fn metric(&self) -> &MetricFactor {
        &self.metric
    }

    pub fn linear(&self) -> &DVector<f64> {
        &self.h
    }

    pub fn g(&self) -> &ProxFn {
        &self.g
    }

    pub fn g_scale(&self) -> f64 {
        self.g_scale
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    /// Model objective, `+∞` outside `dom g`.
    pub fn objective(&self, z: &DVector<f64>) -> Result<f64> {
        check_dim(self.dim(), z.len())?;
        Ok(self.objective_unchecked(z))
    }

    fn objective_unchecked(&self, z: &DVector<f64>) -> f64 {
        let gv = self.g.value_unchecked(z);
        if gv.is_infinite() {
            return f64::INFINITY;
        }
        let d = z - &self.anchor;
        let g_term = if self.g_scale == 0.0 { 0.0 } else { self.g_scale * gv };
        self.h.dot(&d) + 0.5 * self.metric.mul(&d).dot(&d) + g_term
    }

    /// Smooth part of the objective and its gradient `h + M(z - x_k)`.
    fn smooth_grad(&self, z: &DVector<f64>) -> DVector<f64> {
        &self.h + self.metric.mul(&(z - &self.anchor))
    }

    /// Proximal gradient step `prox_{s/L}(y - ∇q(y)/L)`.
    fn prox_grad(&self, y: &DVector<f64>, l: f64) -> DVector<f64> {
        let u = y - self.smooth_grad(y) / l;
        if self.g_scale == 0.0 {
            u
        } else {
            self.g.prox_unchecked(self.g_scale / l, &u)
        }
    }
}

/// Assembles the model `h = ∇f(x_k) - ηζ₀ + c/t`, `M = ∇²f(x_k)`, `g/t`.
pub fn build_model(
    barrier: &Barrier,
    x_k: &DVector<f64>,
    zeta0: &DVector<f64>,
    eta: f64,
    c: &DVector<f64>,
    t: f64,
    g: &ProxFn,
) -> Result<QuadraticModel> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("t must be positive, got {t}")));
    }
    check_dim(barrier.dim(), zeta0.len())?;
    check_dim(barrier.dim(), c.len())?;
    let metric = barrier.metric_at(x_k)?;
    let mut h = barrier.gradient(x_k)?;
    if eta != 0.0 {
        h.axpy(-eta, zeta0, 1.0);
    }
    h.axpy(1.0 / t, c, 1.0);
    QuadraticModel::new(x_k.clone(), metric, h, g.clone(), 1.0 / t)
}

/// Estimates `L ≥ λ_max` and `μ ≤ λ_min` of the metric.
///
/// Diagonal and log-det metrics have exact closed forms. Dense metrics use
/// the power method on `M` and `M⁻¹` from `(1,…,1)/√n`, taking
/// `L = ρ + ‖r‖` and `μ = 1/(ρ⁻ + ‖r⁻‖)` with Rayleigh quotients `ρ` and
/// residuals `r`.
pub fn spectrum_bounds(metric: &MetricFactor) -> Result<SpectrumBounds> {
    let (l, mu) = match metric.exact_extremes() {
        Some(pair) => pair,
        None => {
            let l = power_bound(metric.dim(), |v| metric.mul(v))?;
            let inv = power_bound(metric.dim(), |v| metric.inv_mul(v))?;
            (l, 1.0 / inv)
        }
    };
    if !(l.is_finite() && mu.is_finite() && mu > 0.0 && l >= mu) {
        return Err(Error::Conditioning(format!(
            "spectrum estimate failed (L = {l}, mu = {mu})"
        )));
    }
    Ok(SpectrumBounds { l, mu })
}

fn power_bound(n: usize, op: impl Fn(&DVector<f64>) -> DVector<f64>) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("empty metric".into()));
    }
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut rho_prev = f64::NAN;
    let mut bound = f64::NAN;
    for _ in 0..POWER_MAX_ITERS {
        let w = op(&v);
        let rho = v.dot(&w);
        let resid = (&w - &v * rho).norm();
        bound = rho + resid;
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::Conditioning("power method lost positivity".into()));
        }
        if (rho - rho_prev).abs() <= POWER_REL_TOL * rho && resid <= POWER_REL_TOL.sqrt() * rho {
            break;
        }
        rho_prev = rho;
        let norm = w.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Conditioning("power method iterate vanished".into()));
        }
        v = w / norm;
    }
    Ok(bound)
}

/// FISTA iteration bound `⌊√κ·log(β(1+κ)/δ)⌋ + 1`, at least 1.
pub fn j_max(kappa: f64, beta: f64, delta: f64) -> usize {
    let arg = beta * (1.0 + kappa) / delta;
    if arg <= 1.0 {
        return 1;
    }
    (kappa.sqrt() * arg.ln()).floor() as usize + 1
}

/// Solves the model to a certified gap `≤ δ²/2`.
pub fn solve(model: &QuadraticModel, delta: f64) -> Result<SubSolution> {
    solve_with(model, delta, SubsolverOptions::default())
}

pub fn solve_with(model: &QuadraticModel, delta: f64, opts: SubsolverOptions) -> Result<SubSolution> {
    if !(delta > 0.0) {
        return Err(Error::InvalidInput(format!("delta must be positive, got {delta}")));
    }
    if model.g.is_zero() || model.g_scale == 0.0 {
        let z = &model.anchor - model.metric.inv_mul(&model.h);
        return Ok(SubSolution {
            z,
            gap_bound: 0.0,
            iters: 0,
        });
    }

    let bounds = spectrum_bounds(&model.metric)?;
    let (l, mu) = (bounds.l, bounds.mu);
    let beta = opts.beta.unwrap_or(16.0 * delta);
    let cap = opts
        .max_iters
        .unwrap_or_else(|| CAP_FACTOR.saturating_mul(j_max(bounds.condition(), beta, delta)));
    let target = 0.5 * delta * delta;

    let mut z = model.prox_grad(&model.anchor, l);
    let mut f_z = model.objective_unchecked(&z);
    let mut y = z.clone();
    let mut theta = 1.0_f64;
    let mut best: Option<SubSolution> = None;

    for iter in 1..=cap {
        // certificate for the prox-gradient image of z
        let z_plus = model.prox_grad(&z, l);
        let gmap = (&z - &z_plus) * l;
        let gap_bound = gmap.norm_squared() / (2.0 * mu);
        if best.as_ref().map_or(true, |b| gap_bound < b.gap_bound) {
            best = Some(SubSolution {
                z: z_plus.clone(),
                gap_bound,
                iters: iter,
            });
        }
        if gap_bound <= target {
            return Ok(SubSolution {
                z: z_plus,
                gap_bound,
                iters: iter,
            });
        }

        let mut z_next = model.prox_grad(&y, l);
        let mut f_next = model.objective_unchecked(&z_next);
        if !(f_next <= f_z) {
            // restart from z with a plain step
            theta = 1.0;
            f_next = model.objective_unchecked(&z_plus);
            z_next = z_plus;
        }
        let theta_next = 0.5 * (1.0 + (1.0 + 4.0 * theta * theta).sqrt());
        y = &z_next + (&z_next - &z) * ((theta - 1.0) / theta_next);
        theta = theta_next;
        z = z_next;
        f_z = f_next;
    }

    let best = best.expect("cap is at least one iteration");
    Err(Error::SubsolverFailure(Box::new(best)))
}

/// Exact minimizer when `g` is the indicator of `diag(X) = e`.
///
/// Solves the KKT system through the `p x p` Schur complement `EᵀM⁻¹E`
/// with one Cholesky factorization.
pub fn solve_affine_exact(model: &QuadraticModel) -> Result<DVector<f64>> {
    let order = match model.g.kind() {
        ProxKind::AffineDiag { order } => *order,
        _ => {
            return Err(Error::InvalidInput(
                "exact affine solve needs the diagonal affine indicator".into(),
            ))
        }
    };
    let metric = &model.metric;
    let idx: Vec<usize> = diagonal_indices(order).collect();
    let w = metric.inv_mul(&model.h);
    let rhs = DVector::from_iterator(
        order,
        idx.iter().map(|&i| model.anchor[i] - w[i] - 1.0),
    );
    let chol = metric
        .diag_schur(order)
        .cholesky()
        .ok_or_else(|| Error::Conditioning("Schur complement is not positive definite".into()))?;
    let nu = chol.solve(&rhs);
    let mut e_nu = DVector::zeros(model.dim());
    for (a, &i) in idx.iter().enumerate() {
        e_nu[i] = nu[a];
    }
    let mut z = &model.anchor - w - metric.inv_mul(&e_nu);
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::Conditioning("exact affine solve produced non-finite values".into()));
    }
    // remove rounding drift from the constraint
    for &i in &idx {
        z[i] = 1.0;
    }
    Ok(z)
}
