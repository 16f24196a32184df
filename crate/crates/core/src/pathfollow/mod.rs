//! Single-phase proximal path following.
//!
//! The iterates track the re-parameterized path
//! `0 ∈ (c + ∂g(x))/t + ∇f(x) - ηζ₀` with `ζ₀ = ∇f(x⁰) + (c + ξ₀)/t₀`,
//! which passes through `x⁰` at `t₀`. Each iteration shrinks `t` by the
//! factor `1 - σ_β` and takes one inexact proximal Newton step.

mod formulas;

pub use formulas::*;

use std::time::Instant;

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::problems::CompositeProblem;
use crate::prox::ProxKind;
use crate::subsolver::{self, SubSolution, SubsolverOptions};

/// Default `t₀` as a multiple of [`t0_lower_bound`].
pub const DEFAULT_T0_FACTOR: f64 = 1.25;
pub const DEFAULT_MAX_ITERS: usize = 100_000;
/// Target for the Newton decrement when no closed-form center exists.
pub const CENTER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum InitMode {
    /// Start at the analytic center of the barrier with `t₀ = factor ×`
    /// the admissible lower bound.
    Theoretical { t0_factor: f64 },
    /// User-supplied `t₀` and start point. `x0 = None` uses the barrier's
    /// canonical interior point (identity for the PSD cone).
    Manual { t0: f64, x0: Option<DVector<f64>> },
}

/// Stop as soon as `|G(x_k) - f⋆|/|f⋆| ≤ rel_tol` for a known `f⋆`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceStop {
    pub value: f64,
    pub rel_tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// `None` picks [`DEFAULT_BETA`] or [`DEFAULT_BETA_EXACT`].
    pub beta: Option<f64>,
    pub epsilon: f64,
    pub init: InitMode,
    pub exact_variant: bool,
    /// Overrides `δ = β/16`.
    pub delta: Option<f64>,
    pub max_iters: usize,
    pub subsolver_max_iters: Option<usize>,
    pub reference: Option<ReferenceStop>,
    pub record_iterates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            beta: None,
            epsilon: 1e-3,
            init: InitMode::Theoretical {
                t0_factor: DEFAULT_T0_FACTOR,
            },
            exact_variant: false,
            delta: None,
            max_iters: DEFAULT_MAX_ITERS,
            subsolver_max_iters: None,
            reference: None,
            record_iterates: false,
        }
    }
}

impl SolverConfig {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            ..Self::default()
        }
    }

    pub fn manual(epsilon: f64, t0: f64, x0: Option<DVector<f64>>) -> Self {
        Self {
            epsilon,
            init: InitMode::Manual { t0, x0 },
            ..Self::default()
        }
    }

    pub fn effective_beta(&self) -> f64 {
        self.beta.unwrap_or(if self.exact_variant {
            DEFAULT_BETA_EXACT
        } else {
            DEFAULT_BETA
        })
    }

    pub fn validate(&self) -> Result<()> {
        let beta = self.effective_beta();
        c_beta(beta, self.exact_variant)?;
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be positive".into()));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::Config(format!("delta must be positive, got {d}")));
            }
        }
        match &self.init {
            InitMode::Theoretical { t0_factor } if !(*t0_factor > 1.0 && t0_factor.is_finite()) => {
                return Err(Error::Config(format!("t0 factor must exceed 1, got {t0_factor}")));
            }
            InitMode::Manual { t0, .. } if !(*t0 > 0.0 && t0.is_finite()) => {
                return Err(Error::Config(format!("t0 must be positive, got {t0}")));
            }
            _ => {}
        }
        if let Some(r) = &self.reference {
            if !(r.rel_tol > 0.0) || r.value == 0.0 {
                return Err(Error::Config("reference stop needs rel_tol > 0 and a nonzero value".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    Theoretical,
    Manual,
}

/// Every scalar fixed at initialization.
#[derive(Debug, Clone, Serialize)]
pub struct InitCertificate {
    pub mode: InitKind,
    #[serde(skip)]
    pub x0: DVector<f64>,
    #[serde(skip)]
    pub xi0: DVector<f64>,
    #[serde(skip)]
    pub zeta0: DVector<f64>,
    pub eta: f64,
    /// Admissible `η` interval around 1, `1 ± β(1-β)/((1+β)‖ζ₀‖*)`.
    pub eta_interval: (f64, f64),
    pub nu: f64,
    pub n_nu: f64,
    pub kappa: f64,
    pub a0: f64,
    pub kappa_max: f64,
    pub c0: f64,
    pub t0: f64,
    pub t0_lower_bound: Option<f64>,
    pub m_hat0: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma_hat0: Option<f64>,
    pub beta: f64,
    pub delta: f64,
    pub c_beta: f64,
    pub sigma_beta: f64,
    pub psi: f64,
    /// `κ < κ_max` and `m̂₀ < (1-β)/(3+β)`.
    pub theory_preconditions_hold: bool,
    /// False when the preconditions fail and `ψ` falls back to `ν`.
    pub psi_from_theory: bool,
    pub k_max: usize,
    pub exact_variant: bool,
}

pub fn init(problem: &CompositeProblem, config: &SolverConfig) -> Result<InitCertificate> {
    config.validate()?;
    let barrier = &problem.barrier;
    let exact_closed_form = matches!(problem.g.kind(), ProxKind::AffineDiag { .. });
    if config.exact_variant && !(problem.g.is_zero() || exact_closed_form) {
        return Err(Error::Config(
            "the exact variant needs g = 0 or the diagonal affine indicator".into(),
        ));
    }
    let beta = config.effective_beta();
    let nu = barrier.nu();
    let n_nu = barrier.n_nu();
    let a0v = a0(beta, n_nu);
    let kmax = kappa_max(a0v);

    let (mode, x0) = match &config.init {
        InitMode::Theoretical { .. } => {
            if barrier.is_log_homogeneous() {
                return Err(Error::Initialization(
                    "log-homogeneous barrier has no analytic center; use a manual t0 and x0".into(),
                ));
            }
            let x0 = match barrier.analytic_center() {
                Some(x) => x,
                None => barrier.newton_center(&barrier.interior_point(), CENTER_TOL)?,
            };
            (InitKind::Theoretical, x0)
        }
        InitMode::Manual { x0, .. } => (
            InitKind::Manual,
            x0.clone().unwrap_or_else(|| barrier.interior_point()),
        ),
    };
    if !barrier.contains(&x0) {
        return Err(Error::Initialization("x0 is not in the interior of the barrier domain".into()));
    }
    if !problem.g.value(&x0)?.is_finite() {
        return Err(Error::Initialization("x0 is outside dom g".into()));
    }

    let grad0 = barrier.gradient(&x0)?;
    let metric = barrier.metric_at(&x0)?;
    let kappa = metric.dual_norm(&grad0)?;
    let xi0 = problem.g.subgradient(&x0, &problem.c, &metric)?;
    let c_xi = &problem.c + &xi0;
    let c0 = metric.dual_norm(&c_xi)?;

    let (t0, t0_lb) = match &config.init {
        InitMode::Theoretical { t0_factor } => {
            if kappa >= kmax {
                return Err(Error::Initialization(format!(
                    "kappa = {kappa:.3e} is not below kappa_max = {kmax:.3e}"
                )));
            }
            let lb = t0_lower_bound(c0, kappa, beta, n_nu)?;
            let t0 = if lb > 0.0 { t0_factor * lb } else { 1.0 };
            (t0, Some(lb))
        }
        InitMode::Manual { t0, .. } => {
            let lb = (kappa < kmax)
                .then(|| t0_lower_bound(c0, kappa, beta, n_nu).ok())
                .flatten();
            (*t0, lb)
        }
    };

    let eta = 1.0;
    let zeta0 = &grad0 + &c_xi / t0;
    let zeta_norm = metric.dual_norm(&zeta0)?;
    let half_width = if zeta_norm > 0.0 {
        beta * (1.0 - beta) / ((1.0 + beta) * zeta_norm)
    } else {
        f64::INFINITY
    };

    let delta = config.delta.unwrap_or(beta / 16.0);
    let m_hat = m_hat0(kappa, c0, t0, n_nu);
    let m_limit = (1.0 - beta) / (3.0 + beta);
    let holds = kappa < kmax && m_hat.is_some_and(|m| m >= 0.0 && m < m_limit);
    if mode == InitKind::Theoretical && !holds {
        return Err(Error::Initialization(format!(
            "m_hat0 = {:?} is not below {m_limit:.6}; increase t0",
            m_hat
        )));
    }
    let (gamma1v, gamma_hat, psi) = if holds {
        let m = m_hat.expect("checked above");
        let g1 = gamma1(m, beta);
        let gh = gamma_hat0(m, beta);
        (Some(g1), Some(gh), psi_beta(nu, m, gh, g1, delta)?)
    } else {
        (None, None, nu)
    };
    let cb = c_beta(beta, config.exact_variant)?;
    let sigma = sigma_beta(cb, nu);

    Ok(InitCertificate {
        mode,
        x0,
        xi0,
        zeta0,
        eta,
        eta_interval: (1.0 - half_width, 1.0 + half_width),
        nu,
        n_nu,
        kappa,
        a0: a0v,
        kappa_max: kmax,
        c0,
        t0,
        t0_lower_bound: t0_lb,
        m_hat0: m_hat,
        gamma1: gamma1v,
        gamma_hat0: gamma_hat,
        beta,
        delta,
        c_beta: cb,
        sigma_beta: sigma,
        psi,
        theory_preconditions_hold: holds,
        psi_from_theory: holds,
        k_max: k_max_bound(psi, t0, config.epsilon, sigma),
        exact_variant: config.exact_variant,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    IterationCap,
    SubsolverFailure,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::IterationCap => "iteration_cap",
            Self::SubsolverFailure => "subsolver_failure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub k: usize,
    pub t: f64,
    pub objective: f64,
    pub sub_iters: usize,
    pub gap_bound: f64,
    pub wall_ms: f64,
    /// The full Newton step left the domain and was damped.
    #[serde(skip)]
    pub damped: bool,
}

#[derive(Debug, Clone, Default)]
pub struct SolveTrace {
    pub records: Vec<TraceRecord>,
    /// `x_0, x_1, …` when iterate recording is on.
    pub iterates: Vec<DVector<f64>>,
}

impl SolveTrace {
    pub fn damped_steps(&self) -> usize {
        self.records.iter().filter(|r| r.damped).count()
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x: DVector<f64>,
    pub objective: f64,
    pub t_final: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    pub trace: SolveTrace,
    pub cert: InitCertificate,
    pub wall_ms: f64,
    /// Best subproblem iterate when the subsolver gave up.
    pub failed_subproblem: Option<SubSolution>,
}

/// Mutable state of a run: the current `k`, `t_k` and `x_k`.
#[derive(Debug, Clone)]
pub struct PathState {
    pub k: usize,
    pub t: f64,
    pub x: DVector<f64>,
}

impl PathState {
    pub fn start(cert: &InitCertificate) -> Self {
        Self {
            k: 0,
            t: cert.t0,
            x: cert.x0.clone(),
        }
    }
}

/// Outcome of one [`step`].
#[derive(Debug, Clone)]
pub struct StepInfo {
    pub sub_iters: usize,
    pub gap_bound: f64,
    pub damped: bool,
}

/// `t ← (1-σ_β)t`, then one proximal Newton step on the model at the new
/// `t`. Falls back to `x + d/(1 + ‖d‖_x)` if the full step leaves the
/// domain.
pub fn step(
    problem: &CompositeProblem,
    cert: &InitCertificate,
    config: &SolverConfig,
    state: &mut PathState,
) -> Result<StepInfo> {
    let t_next = state.t * (1.0 - cert.sigma_beta);
    let model = subsolver::build_model(
        &problem.barrier,
        &state.x,
        &cert.zeta0,
        cert.eta,
        &problem.c,
        t_next,
        &problem.g,
    )?;
    let sol = if matches!(problem.g.kind(), ProxKind::AffineDiag { .. }) {
        SubSolution {
            z: subsolver::solve_affine_exact(&model)?,
            gap_bound: 0.0,
            iters: 0,
        }
    } else {
        let opts = SubsolverOptions {
            beta: Some(cert.beta),
            max_iters: config.subsolver_max_iters,
        };
        subsolver::solve_with(&model, cert.delta, opts)?
    };

    let mut damped = false;
    let x_next = if problem.barrier.contains(&sol.z) {
        sol.z
    } else {
        let d = &sol.z - &state.x;
        let norm = model.metric().local_norm(&d)?;
        damped = true;
        &state.x + d / (1.0 + norm)
    };
    state.x = x_next;
    state.t = t_next;
    state.k += 1;
    Ok(StepInfo {
        sub_iters: sol.iters,
        gap_bound: sol.gap_bound,
        damped,
    })
}

pub fn solve(problem: &CompositeProblem, config: &SolverConfig) -> Result<SolveResult> {
    let start = Instant::now();
    let cert = init(problem, config)?;
    let mut state = PathState::start(&cert);
    let mut trace = SolveTrace::default();
    if config.record_iterates {
        trace.iterates.push(state.x.clone());
    }

    let stop = |t: f64, obj: f64| {
        t * cert.psi <= config.epsilon
            || config
                .reference
                .is_some_and(|r| ((obj - r.value) / r.value).abs() <= r.rel_tol)
    };

    let mut objective = problem.objective(&state.x)?;
    let mut status = SolveStatus::IterationCap;
    let mut failed = None;
    if stop(state.t, objective) {
        status = SolveStatus::Converged;
    }
    while status != SolveStatus::Converged && state.k < config.max_iters {
        let info = match step(problem, &cert, config, &mut state) {
            Ok(info) => info,
            Err(Error::SubsolverFailure(best)) => {
                failed = Some(*best);
                status = SolveStatus::SubsolverFailure;
                break;
            }
            Err(e) => return Err(e),
        };
        objective = problem.objective(&state.x)?;
        trace.records.push(TraceRecord {
            k: state.k,
            t: state.t,
            objective,
            sub_iters: info.sub_iters,
            gap_bound: info.gap_bound,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
            damped: info.damped,
        });
        if config.record_iterates {
            trace.iterates.push(state.x.clone());
        }
        if stop(state.t, objective) {
            status = SolveStatus::Converged;
        }
    }

    Ok(SolveResult {
        objective,
        t_final: state.t,
        iterations: state.k,
        x: state.x,
        status,
        trace,
        cert,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        failed_subproblem: failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{box_lp, maxcut};
    use nalgebra::DMatrix;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    fn lp() -> CompositeProblem {
        box_lp(v(&[1.0, -2.0]), v(&[-1.0, -1.0]), v(&[1.0, 1.0])).unwrap()
    }

    fn k3() -> CompositeProblem {
        let l = DMatrix::from_fn(3, 3, |i, j| if i == j { 2.0 } else { -1.0 });
        maxcut(&l).unwrap()
    }

    #[test]
    fn box_lp_certificate() {
        let cfg = SolverConfig {
            beta: Some(1.0 / 9.0),
            ..SolverConfig::new(1e-3)
        };
        let cert = init(&lp(), &cfg).unwrap();
        assert_eq!(cert.x0, v(&[0.0, 0.0]));
        assert_eq!(cert.kappa, 0.0);
        assert_eq!(cert.xi0, v(&[0.0, 0.0]));
        assert!((cert.c0 - 2.5f64.sqrt()).abs() < 1e-14);
        assert!(cert.theory_preconditions_hold && cert.psi_from_theory);
        assert_eq!(cert.eta, 1.0);
        assert!(cert.sigma_beta > 0.0 && cert.sigma_beta < 1.0);
    }

    #[test]
    fn tight_t0_factor_passes() {
        let cfg = SolverConfig {
            init: InitMode::Theoretical { t0_factor: 1.01 },
            ..SolverConfig::new(1e-3)
        };
        let cert = init(&lp(), &cfg).unwrap();
        let m = m_hat0(cert.kappa, cert.c0, cert.t0, cert.n_nu).unwrap();
        assert_eq!(Some(m), cert.m_hat0);
        assert!(m < (1.0 - cert.beta) / (3.0 + cert.beta));
    }

    #[test]
    fn manual_sdp_flags_theory_violation() {
        let cert = init(&k3(), &SolverConfig::manual(1e-3, 0.025, None)).unwrap();
        assert_eq!(cert.mode, InitKind::Manual);
        assert!(!cert.theory_preconditions_hold);
        assert_eq!(cert.psi, 3.0);
        assert!((cert.kappa - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn theoretical_mode_refuses_logdet() {
        assert!(matches!(
            init(&k3(), &SolverConfig::new(1e-3)),
            Err(Error::Initialization(_))
        ));
    }

    #[test]
    fn one_step_decreases_objective() {
        let p = lp();
        let cfg = SolverConfig::new(1e-3);
        let cert = init(&p, &cfg).unwrap();
        let mut st = PathState::start(&cert);
        let before = p.objective(&st.x).unwrap();
        step(&p, &cert, &cfg, &mut st).unwrap();
        assert!(p.objective(&st.x).unwrap() < before);
    }

    #[test]
    fn schedule_is_geometric() {
        let p = lp();
        let cfg = SolverConfig::new(1e-3);
        let cert = init(&p, &cfg).unwrap();
        let mut st = PathState::start(&cert);
        for _ in 0..5 {
            step(&p, &cert, &cfg, &mut st).unwrap();
        }
        let want = cert.t0 * (1.0 - cert.sigma_beta).powi(5);
        assert!((st.t - want).abs() <= 4.0 * f64::EPSILON * want);
    }

    #[test]
    fn box_lp_converges() {
        let res = solve(&lp(), &SolverConfig::new(1e-3)).unwrap();
        assert_eq!(res.status, SolveStatus::Converged);
        assert!((res.objective + 3.0).abs() <= 1e-3);
        assert!((res.x[0] + 1.0).abs() < 0.05 && (res.x[1] - 1.0).abs() < 0.05);
        assert!(res.iterations <= res.cert.k_max, "{} > {} ({:?})", res.iterations, res.cert.k_max, res.cert);
    }

    #[test]
    fn loose_epsilon_returns_start() {
        let res = solve(&lp(), &SolverConfig::new(1e12)).unwrap();
        assert_eq!(res.iterations, 0);
        assert_eq!(res.x, res.cert.x0);
        assert_eq!(res.status, SolveStatus::Converged);
    }

    #[test]
    fn k3_reference_stop() {
        let cfg = SolverConfig {
            reference: Some(ReferenceStop {
                value: -2.25,
                rel_tol: 1e-3,
            }),
            ..SolverConfig::manual(1e-3, 0.025, None)
        };
        let res = solve(&k3(), &cfg).unwrap();
        assert_eq!(res.status, SolveStatus::Converged);
        assert!(((res.objective + 2.25) / 2.25).abs() <= 1e-3);
    }

    #[test]
    fn exact_variant_raises_sigma() {
        let beta = 0.04;
        let inexact = SolverConfig {
            beta: Some(beta),
            ..SolverConfig::manual(1e-3, 0.025, None)
        };
        let exact = SolverConfig {
            exact_variant: true,
            ..inexact.clone()
        };
        let a = init(&k3(), &inexact).unwrap();
        let b = init(&k3(), &exact).unwrap();
        assert!(b.sigma_beta > a.sigma_beta);
    }

    #[test]
    fn config_validation() {
        let bad = SolverConfig {
            beta: Some(0.2),
            ..SolverConfig::new(1e-3)
        };
        assert!(matches!(init(&lp(), &bad), Err(Error::Config(_))));
        let ok_exact = SolverConfig {
            beta: Some(0.115),
            exact_variant: true,
            ..SolverConfig::new(1e-3)
        };
        assert!(init(&lp(), &ok_exact).is_ok());
    }
}
