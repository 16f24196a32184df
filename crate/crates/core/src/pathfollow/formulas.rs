//! Scalar constants of the path-following scheme.

use crate::error::{Error, Result};

/// Largest admissible `β` for the inexact method.
pub const BETA_MAX: f64 = 1.0 / 9.0;
/// Largest admissible `β` for the exact variant.
pub const BETA_MAX_EXACT: f64 = 0.116764;
/// Maximizer of `c_β` for the inexact method.
pub const DEFAULT_BETA: f64 = 0.042231;
pub const DEFAULT_BETA_EXACT: f64 = 0.045864;

const K_INEXACT: f64 = 0.43;
const K_EXACT: f64 = 0.45;

/// `a₀ = (1-β)/((3+β)n_ν)`.
pub fn a0(beta: f64, n_nu: f64) -> f64 {
    (1.0 - beta) / ((3.0 + beta) * n_nu)
}

/// `½(2a₀ + 1 - √(4a₀² + 1))`, the largest admissible `‖∇f(x⁰)‖*`.
pub fn kappa_max(a0: f64) -> f64 {
    0.5 * (2.0 * a0 + 1.0 - (4.0 * a0 * a0 + 1.0).sqrt())
}

pub fn beta_range(exact_variant: bool) -> f64 {
    if exact_variant {
        BETA_MAX_EXACT
    } else {
        BETA_MAX
    }
}

/// `½(1 + k√β - √((1 - k√β)² + 4β))` with `k = 0.43`, or `0.45` for the
/// exact variant.
pub fn c_beta(beta: f64, exact_variant: bool) -> Result<f64> {
    let hi = beta_range(exact_variant);
    if !(beta > 0.0 && beta <= hi) {
        return Err(Error::Config(format!("beta must lie in (0, {hi}], got {beta}")));
    }
    let k = if exact_variant { K_EXACT } else { K_INEXACT };
    let ks = k * beta.sqrt();
    Ok(0.5 * (1.0 + ks - ((1.0 - ks).powi(2) + 4.0 * beta).sqrt()))
}

/// `c_β/((1 + c_β)√ν)`.
pub fn sigma_beta(c_beta: f64, nu: f64) -> f64 {
    c_beta / ((1.0 + c_beta) * nu.sqrt())
}

/// Smallest `t₀` keeping `m̂₀ < (1-β)/(3+β)`:
///
/// ```text
/// ‖c+ξ₀‖*(1-κ)(3+β)n_ν / ((1-2κ)(1-β) - κ(1-κ)(3+β)n_ν)
/// ```
///
/// At `κ = 0` this is `‖c+ξ₀‖*(3+β)n_ν/(1-β)`.
pub fn t0_lower_bound(c0: f64, kappa: f64, beta: f64, n_nu: f64) -> Result<f64> {
    if c0 == 0.0 {
        return Ok(0.0);
    }
    let num = c0 * (1.0 - kappa) * (3.0 + beta) * n_nu;
    let den = (1.0 - 2.0 * kappa) * (1.0 - beta) - kappa * (1.0 - kappa) * (3.0 + beta) * n_nu;
    if !(den > 0.0) {
        return Err(Error::Initialization(format!(
            "kappa = {kappa} is too large for beta = {beta}, n_nu = {n_nu}: no t0 is admissible"
        )));
    }
    Ok(num / den)
}

/// `m̂₀ = n_ν(1-κ)(κ + ‖c+ξ₀‖*/t₀)/(1-2κ)`. `None` when `κ ≥ ½`.
pub fn m_hat0(kappa: f64, c0: f64, t0: f64, n_nu: f64) -> Option<f64> {
    let den = 1.0 - 2.0 * kappa;
    (den > 0.0).then(|| n_nu * (1.0 - kappa) * (kappa + c0 / t0) / den)
}

/// `(1-m̂₀)β/(1-2m̂₀) + m̂₀/(1-m̂₀)`.
pub fn gamma1(m_hat0: f64, beta: f64) -> f64 {
    (1.0 - m_hat0) * beta / (1.0 - 2.0 * m_hat0) + m_hat0 / (1.0 - m_hat0)
}

/// `0.43√β(1-m̂₀)/(1-2m̂₀) + m̂₀/(1-m̂₀)`.
pub fn gamma_hat0(m_hat0: f64, beta: f64) -> f64 {
    K_INEXACT * beta.sqrt() * (1.0 - m_hat0) / (1.0 - 2.0 * m_hat0) + m_hat0 / (1.0 - m_hat0)
}

/// ```text
/// ψ = ν + √ν γ₁/(1-γ̂₀) + γ̂₀/(1-γ̂₀)² (γ̂₀ + γ₁ + δ) + δ²/2 + m̂₀γ₁
/// ```
pub fn psi_beta(nu: f64, m_hat0: f64, gamma_hat0: f64, gamma1: f64, delta: f64) -> Result<f64> {
    if !(gamma_hat0 < 1.0) {
        return Err(Error::Initialization(format!(
            "gamma_hat0 = {gamma_hat0} must be below 1"
        )));
    }
    let q = 1.0 - gamma_hat0;
    Ok(nu
        + nu.sqrt() * gamma1 / q
        + gamma_hat0 / (q * q) * (gamma_hat0 + gamma1 + delta)
        + 0.5 * delta * delta
        + m_hat0 * gamma1)
}

/// `⌊log(t₀ψ/ε)/(-log(1-σ))⌋ + 1`, or 0 when `t₀ψ/ε ≤ 1`: the first `k`
/// with `(1-σ)^k t₀ ψ ≤ ε`.
pub fn k_max_bound(psi: f64, t0: f64, epsilon: f64, sigma_beta: f64) -> usize {
    let ratio = t0 * psi / epsilon;
    if ratio <= 1.0 {
        return 0;
    }
    let per_step = -(-sigma_beta).ln_1p();
    (ratio.ln() / per_step).floor() as usize + 1
}
