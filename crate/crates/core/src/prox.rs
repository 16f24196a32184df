//! Nonsmooth terms `g` with cheap proximity operators.

use nalgebra::DVector;

use crate::barrier::MetricFactor;
use crate::error::{check_dim, Error, Result};
use crate::subsolver::{self, QuadraticModel};
use crate::sym::{diagonal_indices, packed_len};

/// Constraint residual tolerated by indicator values.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum ProxKind {
    Zero,
    /// `w‖x‖₁`.
    L1 { weight: f64 },
    /// Indicator of `diag(X) = e` on packed `order x order` matrices.
    AffineDiag { order: usize },
    /// Indicator of `diag(X) = e` and `Xᵢⱼ ≥ -1/(k-1)`. The PSD part of the
    /// Max-k-Cut set is left to the barrier.
    ElliptopeK { order: usize, k: usize },
    /// Indicator of `l ≤ x ≤ u`.
    Box {
        lower: DVector<f64>,
        upper: DVector<f64>,
    },
}

/// A proper closed convex function with a Euclidean prox.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxFn {
    kind: ProxKind,
    dim: usize,
}

impl ProxFn {
    pub fn zero(dim: usize) -> Self {
        Self {
            kind: ProxKind::Zero,
            dim,
        }
    }

    pub fn l1(dim: usize, weight: f64) -> Result<Self> {
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(Error::InvalidInput(format!("l1 weight must be >= 0, got {weight}")));
        }
        Ok(Self {
            kind: ProxKind::L1 { weight },
            dim,
        })
    }

    pub fn affine_diag(order: usize) -> Self {
        Self {
            kind: ProxKind::AffineDiag { order },
            dim: packed_len(order),
        }
    }

    pub fn elliptope_k(order: usize, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidInput(format!("k must be at least 2, got {k}")));
        }
        Ok(Self {
            kind: ProxKind::ElliptopeK { order, k },
            dim: packed_len(order),
        })
    }

    pub fn indicator_box(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.iter().zip(upper.iter()).any(|(l, u)| !(l <= u)) {
            return Err(Error::InvalidInput("box indicator needs l <= u".into()));
        }
        Ok(Self {
            dim: lower.len(),
            kind: ProxKind::Box { lower, upper },
        })
    }

    pub fn kind(&self) -> &ProxKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, ProxKind::Zero)
    }

    pub fn is_indicator(&self) -> bool {
        matches!(
            self.kind,
            ProxKind::AffineDiag { .. } | ProxKind::ElliptopeK { .. } | ProxKind::Box { .. }
        )
    }

    /// `g(x)`, `+∞` on indicator violations beyond [`FEASIBILITY_TOL`].
    pub fn value(&self, x: &DVector<f64>) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.value_unchecked(x))
    }

    pub(crate) fn value_unchecked(&self, x: &DVector<f64>) -> f64 {
        let feasible = match &self.kind {
            ProxKind::Zero => return 0.0,
            ProxKind::L1 { weight } => return weight * x.lp_norm(1),
            ProxKind::AffineDiag { order } => diag_ok(x, *order),
            ProxKind::ElliptopeK { order, k } => {
                let floor = off_diag_floor(*k);
                diag_ok(x, *order)
                    && off_diag_positions(*order).all(|i| x[i] >= floor - FEASIBILITY_TOL)
            }
            ProxKind::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper.iter()))
                .all(|(v, (l, u))| *v >= l - FEASIBILITY_TOL && *v <= u + FEASIBILITY_TOL),
        };
        if feasible {
            0.0
        } else {
            f64::INFINITY
        }
    }

    /// `argmin_v τ g(v) + ½‖v - u‖²`.
    pub fn prox_scaled(&self, tau: f64, u: &DVector<f64>) -> Result<DVector<f64>> {
        if !(tau > 0.0) {
            return Err(Error::InvalidInput(format!("tau must be positive, got {tau}")));
        }
        check_dim(self.dim, u.len())?;
        Ok(self.prox_unchecked(tau, u))
    }

    pub(crate) fn prox_unchecked(&self, tau: f64, u: &DVector<f64>) -> DVector<f64> {
        match &self.kind {
            ProxKind::Zero => u.clone(),
            ProxKind::L1 { weight } => {
                let thr = tau * weight;
                u.map(|v| v.signum() * (v.abs() - thr).max(0.0))
            }
            ProxKind::AffineDiag { order } => {
                let mut v = u.clone();
                for i in diagonal_indices(*order) {
                    v[i] = 1.0;
                }
                v
            }
            ProxKind::ElliptopeK { order, k } => {
                let floor = off_diag_floor(*k);
                let mut v = u.clone();
                for i in off_diag_positions(*order) {
                    v[i] = v[i].max(floor);
                }
                for i in diagonal_indices(*order) {
                    v[i] = 1.0;
                }
                v
            }
            ProxKind::Box { lower, upper } => {
                DVector::from_iterator(u.len(), (0..u.len()).map(|i| u[i].clamp(lower[i], upper[i])))
            }
        }
    }

    /// A subgradient `ξ ∈ ∂g(x)` that keeps `‖c + ξ‖*_x` small.
    ///
    /// For the diagonal constraints the normal-cone element `E d` is chosen
    /// by the least-squares fit `(EᵀH⁻¹E) d = -EᵀH⁻¹c`, which minimizes
    /// `‖c + E d‖*_x` over all diagonal `d`. Falls back to `0` if that
    /// system cannot be solved.
    pub fn subgradient(
        &self,
        x: &DVector<f64>,
        c: &DVector<f64>,
        metric: &MetricFactor,
    ) -> Result<DVector<f64>> {
        check_dim(self.dim, x.len())?;
        check_dim(self.dim, c.len())?;
        check_dim(self.dim, metric.dim())?;
        if !self.value_unchecked(x).is_finite() {
            return Err(Error::Domain("subgradient requested outside dom g".into()));
        }
        Ok(match &self.kind {
            ProxKind::Zero | ProxKind::Box { .. } => DVector::zeros(self.dim),
            ProxKind::L1 { weight } => {
                x.map(|v| if v == 0.0 { 0.0 } else { weight * v.signum() })
            }
            ProxKind::AffineDiag { order } | ProxKind::ElliptopeK { order, .. } => {
                diag_normal_fit(*order, c, metric).unwrap_or_else(|| DVector::zeros(self.dim))
            }
        })
    }

    /// `argmin_v g(v) + ½‖v - u‖²_M`, solved by the accelerated subsolver to
    /// a certified gap of `tol²/2`.
    pub fn generalized_prox(
        &self,
        u: &DVector<f64>,
        metric: &MetricFactor,
        tol: f64,
    ) -> Result<DVector<f64>> {
        check_dim(self.dim, u.len())?;
        let model = QuadraticModel::new(
            u.clone(),
            metric.clone(),
            DVector::zeros(self.dim),
            self.clone(),
            1.0,
        )?;
        Ok(subsolver::solve(&model, tol)?.z)
    }
}

fn off_diag_floor(k: usize) -> f64 {
    // packed off-diagonals carry a √2 factor
    -std::f64::consts::SQRT_2 / (k as f64 - 1.0)
}

fn diag_ok(x: &DVector<f64>, order: usize) -> bool {
    diagonal_indices(order).all(|i| (x[i] - 1.0).abs() <= FEASIBILITY_TOL)
}

fn off_diag_positions(order: usize) -> impl Iterator<Item = usize> {
    (0..order).flat_map(move |i| {
        let start = crate::sym::packed_index(order, i, i);
        (start + 1)..(start + order - i)
    })
}

fn diag_normal_fit(order: usize, c: &DVector<f64>, metric: &MetricFactor) -> Option<DVector<f64>> {
    let schur = metric.diag_schur(order);
    let hc = metric.inv_mul(c);
    let idx: Vec<usize> = diagonal_indices(order).collect();
    let rhs = DVector::from_iterator(order, idx.iter().map(|&i| -hc[i]));
    let d = schur.cholesky()?.solve(&rhs);
    if d.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut xi = DVector::zeros(c.len());
    for (a, &i) in idx.iter().enumerate() {
        xi[i] = d[a];
    }
    Some(xi)
}
