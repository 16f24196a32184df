//! Self-concordant barriers for the supported feasible sets.
//!
//! Every barrier works on flat vectors. Matrix-valued sets use the packed
//! symmetric layout from [`crate::sym`], so gradients and Hessians are taken
//! with respect to the trace inner product.

mod metric;

pub use metric::MetricFactor;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{check_dim, Error, Result};
use crate::sym::{pack_sym, pack_sym_unchecked, packed_len, unpack_sym_unchecked};

/// Points closer than this to the boundary are treated as outside.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Iteration cap for [`Barrier::newton_center`].
pub const NEWTON_CENTER_MAX_ITERS: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub enum BarrierKind {
    /// `-Σ log(uᵢ - xᵢ) + log(xᵢ - lᵢ)`, parameter `2p`.
    Box {
        lower: DVector<f64>,
        upper: DVector<f64>,
    },
    /// `-Σ log xᵢ`, parameter `p`.
    NonnegOrthant { dim: usize },
    /// `-log det X` on `p x p` symmetric matrices, parameter `p`.
    LogDet { order: usize },
    /// `-log det X - log det(U - X)` for `0 ⪯ X ⪯ U`, parameter `2p`.
    MatrixInterval { upper: DMatrix<f64> },
}

/// A `ν`-self-concordant barrier. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Barrier {
    kind: BarrierKind,
}

/// Barrier value and gradient at a point. Outside the interior the value is
/// `+∞` and there is no gradient.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: f64,
    pub gradient: Option<DVector<f64>>,
}

impl Evaluation {
    fn outside() -> Self {
        Self {
            value: f64::INFINITY,
            gradient: None,
        }
    }

    pub fn is_interior(&self) -> bool {
        self.gradient.is_some()
    }
}

impl Barrier {
    pub fn boxed(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::InvalidInput("box must have positive dimension".into()));
        }
        for (i, (l, u)) in lower.iter().zip(upper.iter()).enumerate() {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(Error::InvalidInput(format!(
                    "box bounds must satisfy l < u, coordinate {i} has l = {l}, u = {u}"
                )));
            }
        }
        Ok(Self {
            kind: BarrierKind::Box { lower, upper },
        })
    }

    /// The box `[-1, 1]^p`, barrier `-Σ log(1 - xᵢ²)`.
    pub fn unit_box(p: usize) -> Result<Self> {
        Self::boxed(DVector::from_element(p, -1.0), DVector::from_element(p, 1.0))
    }

    pub fn nonneg_orthant(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("orthant must have positive dimension".into()));
        }
        Ok(Self {
            kind: BarrierKind::NonnegOrthant { dim },
        })
    }

    pub fn log_det(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidInput("matrix order must be positive".into()));
        }
        Ok(Self {
            kind: BarrierKind::LogDet { order },
        })
    }

    pub fn matrix_interval(upper: DMatrix<f64>) -> Result<Self> {
        pack_sym(&upper)?;
        if upper.nrows() == 0 || Cholesky::new(upper.clone()).is_none() {
            return Err(Error::InvalidInput(
                "matrix interval upper bound must be positive definite".into(),
            ));
        }
        Ok(Self {
            kind: BarrierKind::MatrixInterval { upper },
        })
    }

    pub fn kind(&self) -> &BarrierKind {
        &self.kind
    }

    /// Flat dimension of the points the barrier acts on.
    pub fn dim(&self) -> usize {
        match &self.kind {
            BarrierKind::Box { lower, .. } => lower.len(),
            BarrierKind::NonnegOrthant { dim } => *dim,
            BarrierKind::LogDet { order } => packed_len(*order),
            BarrierKind::MatrixInterval { upper } => packed_len(upper.nrows()),
        }
    }

    /// Matrix order for matrix-valued sets.
    pub fn matrix_order(&self) -> Option<usize> {
        match &self.kind {
            BarrierKind::LogDet { order } => Some(*order),
            BarrierKind::MatrixInterval { upper } => Some(upper.nrows()),
            _ => None,
        }
    }

    /// Barrier parameter `ν`.
    pub fn nu(&self) -> f64 {
        match &self.kind {
            BarrierKind::Box { lower, .. } => 2.0 * lower.len() as f64,
            BarrierKind::NonnegOrthant { dim } => *dim as f64,
            BarrierKind::LogDet { order } => *order as f64,
            BarrierKind::MatrixInterval { upper } => 2.0 * upper.nrows() as f64,
        }
    }

    pub fn is_log_homogeneous(&self) -> bool {
        matches!(
            self.kind,
            BarrierKind::NonnegOrthant { .. } | BarrierKind::LogDet { .. }
        )
    }

    /// `ν + 2√ν`, or `1` for logarithmically homogeneous barriers.
    pub fn n_nu(&self) -> f64 {
        if self.is_log_homogeneous() {
            1.0
        } else {
            let nu = self.nu();
            nu + 2.0 * nu.sqrt()
        }
    }

    pub fn evaluate(&self, x: &DVector<f64>) -> Result<Evaluation> {
        check_dim(self.dim(), x.len())?;
        Ok(match &self.kind {
            BarrierKind::Box { lower, upper } => eval_box(lower, upper, x),
            BarrierKind::NonnegOrthant { .. } => eval_orthant(x),
            BarrierKind::LogDet { order } => {
                let m = unpack_sym_unchecked(x.as_slice(), *order);
                match LogDetParts::new(m) {
                    Some(parts) => Evaluation {
                        value: parts.value,
                        gradient: Some(-pack_sym_unchecked(&parts.inverse)),
                    },
                    None => Evaluation::outside(),
                }
            }
            BarrierKind::MatrixInterval { upper } => {
                let m = unpack_sym_unchecked(x.as_slice(), upper.nrows());
                let slack = upper - &m;
                match (LogDetParts::new(m), LogDetParts::new(slack)) {
                    (Some(a), Some(b)) => Evaluation {
                        value: a.value + b.value,
                        gradient: Some(pack_sym_unchecked(&(b.inverse - a.inverse))),
                    },
                    _ => Evaluation::outside(),
                }
            }
        })
    }

    pub fn value(&self, x: &DVector<f64>) -> Result<f64> {
        Ok(self.evaluate(x)?.value)
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.evaluate(x).map(|e| e.is_interior()).unwrap_or(false)
    }

    /// Gradient at an interior point.
    pub fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.evaluate(x)?
            .gradient
            .ok_or_else(|| Error::Domain("gradient requested outside the interior".into()))
    }

    pub fn metric_at(&self, x: &DVector<f64>) -> Result<MetricFactor> {
        check_dim(self.dim(), x.len())?;
        let outside = || Error::Domain("metric requested outside the interior".into());
        let anchor = Some(x.clone());
        match &self.kind {
            BarrierKind::Box { lower, upper } => {
                if !box_interior(lower, upper, x) {
                    return Err(outside());
                }
                let diag = DVector::from_iterator(
                    x.len(),
                    x.iter().zip(lower.iter().zip(upper.iter())).map(|(xi, (l, u))| {
                        (u - xi).powi(-2) + (xi - l).powi(-2)
                    }),
                );
                MetricFactor::diagonal_at(anchor, diag)
            }
            BarrierKind::NonnegOrthant { .. } => {
                if x.iter().any(|xi| *xi <= BOUNDARY_TOL) {
                    return Err(outside());
                }
                MetricFactor::diagonal_at(anchor, x.map(|xi| xi.powi(-2)))
            }
            BarrierKind::LogDet { order } => {
                let m = unpack_sym_unchecked(x.as_slice(), *order);
                let parts = LogDetParts::new(m.clone()).ok_or_else(outside)?;
                check_inverse_finite(&parts.inverse)?;
                Ok(MetricFactor::congruence_at(anchor, m, parts.inverse))
            }
            BarrierKind::MatrixInterval { upper } => {
                let p = upper.nrows();
                let m = unpack_sym_unchecked(x.as_slice(), p);
                let a = LogDetParts::new(m.clone()).ok_or_else(outside)?;
                let b = LogDetParts::new(upper - m).ok_or_else(outside)?;
                let h = metric::congruence_matrix(p, &a.inverse)
                    + metric::congruence_matrix(p, &b.inverse);
                MetricFactor::dense_at(anchor, h)
            }
        }
    }

    /// Closed-form analytic center, where one is known.
    ///
    /// Unbounded sets (orthant, PSD cone) have none.
    pub fn analytic_center(&self) -> Option<DVector<f64>> {
        match &self.kind {
            BarrierKind::Box { lower, upper } => Some((lower + upper) * 0.5),
            BarrierKind::MatrixInterval { upper } => Some(pack_sym_unchecked(&(upper * 0.5))),
            BarrierKind::NonnegOrthant { .. } | BarrierKind::LogDet { .. } => None,
        }
    }

    /// A canonical interior point: the center for bounded sets, all-ones for
    /// the orthant, the identity for the PSD cone.
    pub fn interior_point(&self) -> DVector<f64> {
        match &self.kind {
            BarrierKind::NonnegOrthant { dim } => DVector::from_element(*dim, 1.0),
            BarrierKind::LogDet { order } => {
                pack_sym_unchecked(&DMatrix::identity(*order, *order))
            }
            _ => self.analytic_center().expect("bounded kinds have a center"),
        }
    }

    /// Damped Newton iteration on the barrier, step `1/(1 + λ)` with `λ` the
    /// Newton decrement `‖∇f(x)‖*_x`, until `λ ≤ kappa_target`.
    pub fn newton_center(&self, x_start: &DVector<f64>, kappa_target: f64) -> Result<DVector<f64>> {
        if !(kappa_target > 0.0 && kappa_target < 0.5) {
            return Err(Error::InvalidInput(format!(
                "kappa_target must lie in (0, 1/2), got {kappa_target}"
            )));
        }
        let mut x = x_start.clone();
        for _ in 0..NEWTON_CENTER_MAX_ITERS {
            let grad = self.gradient(&x)?;
            let metric = self.metric_at(&x)?;
            let step = metric.solve(&grad)?;
            let decrement = step.dot(&grad).max(0.0).sqrt();
            if decrement <= kappa_target {
                return Ok(x);
            }
            x.axpy(-1.0 / (1.0 + decrement), &step, 1.0);
        }
        Err(Error::NonConvergence {
            what: "analytic center Newton iteration (is the domain unbounded?)",
            iterations: NEWTON_CENTER_MAX_ITERS,
        })
    }
}

fn box_interior(lower: &DVector<f64>, upper: &DVector<f64>, x: &DVector<f64>) -> bool {
    x.iter()
        .zip(lower.iter().zip(upper.iter()))
        .all(|(xi, (l, u))| u - xi > BOUNDARY_TOL && xi - l > BOUNDARY_TOL)
}

fn eval_box(lower: &DVector<f64>, upper: &DVector<f64>, x: &DVector<f64>) -> Evaluation {
    if !box_interior(lower, upper, x) {
        return Evaluation::outside();
    }
    let mut value = 0.0;
    let mut grad = DVector::zeros(x.len());
    for i in 0..x.len() {
        let su = upper[i] - x[i];
        let sl = x[i] - lower[i];
        value -= su.ln() + sl.ln();
        grad[i] = 1.0 / su - 1.0 / sl;
    }
    Evaluation {
        value,
        gradient: Some(grad),
    }
}

fn eval_orthant(x: &DVector<f64>) -> Evaluation {
    if x.iter().any(|xi| *xi <= BOUNDARY_TOL) {
        return Evaluation::outside();
    }
    Evaluation {
        value: -x.iter().map(|xi| xi.ln()).sum::<f64>(),
        gradient: Some(x.map(|xi| -1.0 / xi)),
    }
}

/// `-log det M` and `M⁻¹`, or `None` when `M` is not safely positive definite.
struct LogDetParts {
    value: f64,
    inverse: DMatrix<f64>,
}

impl LogDetParts {
    fn new(m: DMatrix<f64>) -> Option<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let p = m.nrows();
        let shifted = &m - DMatrix::<f64>::identity(p, p) * BOUNDARY_TOL;
        Cholesky::new(shifted)?;
        let chol: Cholesky<f64, Dyn> = Cholesky::new(m)?;
        let value = -2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let mut inverse = chol.inverse();
        // symmetrize against rounding
        inverse = (&inverse + inverse.transpose()) * 0.5;
        Some(Self { value, inverse })
    }
}

fn check_inverse_finite(inv: &DMatrix<f64>) -> Result<()> {
    if inv.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Conditioning("Hessian is numerically singular".into()))
    }
}
