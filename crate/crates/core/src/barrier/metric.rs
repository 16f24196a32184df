use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{check_dim, Error, Result};
use crate::sym::{
    diagonal_indices, pack_sym_unchecked, packed_len, packed_pairs, unpack_sym_unchecked,
};

/// Factorized barrier Hessian `∇²f(x)` at an anchor point.
///
/// Supports Hessian products, solves with the Hessian, and the local norm
/// `‖u‖_x = ⟨∇²f(x)u, u⟩^{1/2}` together with its dual
/// `‖v‖*_x = ⟨∇²f(x)⁻¹v, v⟩^{1/2}`.
#[derive(Debug, Clone)]
pub struct MetricFactor {
    anchor: Option<DVector<f64>>,
    repr: Repr,
}

#[derive(Debug, Clone)]
enum Repr {
    Diagonal(DVector<f64>),
    /// `U ↦ X⁻¹ U X⁻¹` on packed symmetric matrices, the Hessian of `-log det`.
    Congruence {
        order: usize,
        x: DMatrix<f64>,
        x_inv: DMatrix<f64>,
    },
    Dense {
        hessian: DMatrix<f64>,
        chol: Cholesky<f64, Dyn>,
    },
}

impl MetricFactor {
    /// Euclidean metric of dimension `n`.
    pub fn identity(n: usize) -> Self {
        Self {
            anchor: None,
            repr: Repr::Diagonal(DVector::from_element(n, 1.0)),
        }
    }

    pub fn from_diagonal(diag: DVector<f64>) -> Result<Self> {
        Self::diagonal_at(None, diag)
    }

    /// Dense symmetric positive-definite metric.
    pub fn from_dense(hessian: DMatrix<f64>) -> Result<Self> {
        Self::dense_at(None, hessian)
    }

    pub(crate) fn diagonal_at(anchor: Option<DVector<f64>>, diag: DVector<f64>) -> Result<Self> {
        if let Some(bad) = diag.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return Err(Error::Conditioning(format!(
                "diagonal metric entry {bad} is not positive and finite"
            )));
        }
        Ok(Self {
            anchor,
            repr: Repr::Diagonal(diag),
        })
    }

    pub(crate) fn congruence_at(
        anchor: Option<DVector<f64>>,
        x: DMatrix<f64>,
        x_inv: DMatrix<f64>,
    ) -> Self {
        Self {
            anchor,
            repr: Repr::Congruence {
                order: x.nrows(),
                x,
                x_inv,
            },
        }
    }

    pub(crate) fn dense_at(anchor: Option<DVector<f64>>, hessian: DMatrix<f64>) -> Result<Self> {
        if !hessian.is_square() {
            return Err(Error::InvalidInput("metric must be square".into()));
        }
        if hessian.iter().any(|h| !h.is_finite()) {
            return Err(Error::Conditioning("metric has non-finite entries".into()));
        }
        let chol = Cholesky::new(hessian.clone())
            .ok_or_else(|| Error::Conditioning("metric is not positive definite".into()))?;
        Ok(Self {
            anchor,
            repr: Repr::Dense { hessian, chol },
        })
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Diagonal(d) => d.len(),
            Repr::Congruence { order, .. } => packed_len(*order),
            Repr::Dense { hessian, .. } => hessian.nrows(),
        }
    }

    /// Point at which the Hessian was evaluated, if any.
    pub fn anchor(&self) -> Option<&DVector<f64>> {
        self.anchor.as_ref()
    }

    /// `∇²f(x) u`.
    pub fn apply(&self, u: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.dim(), u.len())?;
        Ok(self.mul(u))
    }

    /// `∇²f(x)⁻¹ v`.
    pub fn solve(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.dim(), v.len())?;
        Ok(self.inv_mul(v))
    }

    /// `⟨∇²f(x) u, u⟩`.
    pub fn quad_form(&self, u: &DVector<f64>) -> Result<f64> {
        check_dim(self.dim(), u.len())?;
        Ok(self.mul(u).dot(u))
    }

    pub fn local_norm(&self, u: &DVector<f64>) -> Result<f64> {
        Ok(self.quad_form(u)?.max(0.0).sqrt())
    }

    pub fn dual_norm(&self, v: &DVector<f64>) -> Result<f64> {
        check_dim(self.dim(), v.len())?;
        let q = self.inv_mul(v).dot(v);
        if !q.is_finite() {
            return Err(Error::Conditioning("dual norm is not finite".into()));
        }
        Ok(q.max(0.0).sqrt())
    }

    /// Dense Hessian in the flat coordinates.
    pub fn to_dense(&self) -> DMatrix<f64> {
        match &self.repr {
            Repr::Diagonal(d) => DMatrix::from_diagonal(d),
            Repr::Dense { hessian, .. } => hessian.clone(),
            Repr::Congruence { order, x_inv, .. } => congruence_matrix(*order, x_inv),
        }
    }

    /// `EᵀH⁻¹E` where the columns of `E` pick the diagonal of a packed
    /// `order x order` matrix.
    pub(crate) fn diag_schur(&self, order: usize) -> DMatrix<f64> {
        match &self.repr {
            Repr::Congruence { x, .. } => x.component_mul(x),
            _ => {
                let n = self.dim();
                let idx: Vec<usize> = diagonal_indices(order).collect();
                let mut s = DMatrix::zeros(order, order);
                for (a, &ia) in idx.iter().enumerate() {
                    let mut e = DVector::zeros(n);
                    e[ia] = 1.0;
                    let col = self.inv_mul(&e);
                    for (b, &ib) in idx.iter().enumerate() {
                        s[(b, a)] = col[ib];
                    }
                }
                (&s + s.transpose()) * 0.5
            }
        }
    }

    /// Exact extreme eigenvalues `(λ_max, λ_min)` when the structure makes
    /// them cheap: diagonal entries, or `1/λᵢλⱼ` for the congruence metric.
    pub(crate) fn exact_extremes(&self) -> Option<(f64, f64)> {
        match &self.repr {
            Repr::Diagonal(d) => Some((d.max(), d.min())),
            Repr::Congruence { x, .. } => {
                let eig = x.clone().symmetric_eigenvalues();
                let (lo, hi) = (eig.min(), eig.max());
                Some((1.0 / (lo * lo), 1.0 / (hi * hi)))
            }
            Repr::Dense { .. } => None,
        }
    }

    pub(crate) fn mul(&self, u: &DVector<f64>) -> DVector<f64> {
        match &self.repr {
            Repr::Diagonal(d) => d.component_mul(u),
            Repr::Dense { hessian, .. } => hessian * u,
            Repr::Congruence { order, x_inv, .. } => {
                let m = unpack_sym_unchecked(u.as_slice(), *order);
                pack_sym_unchecked(&(x_inv * m * x_inv))
            }
        }
    }

    pub(crate) fn inv_mul(&self, v: &DVector<f64>) -> DVector<f64> {
        match &self.repr {
            Repr::Diagonal(d) => v.component_div(d),
            Repr::Dense { chol, .. } => chol.solve(v),
            Repr::Congruence { order, x, .. } => {
                let m = unpack_sym_unchecked(v.as_slice(), *order);
                pack_sym_unchecked(&(x * m * x))
            }
        }
    }
}

/// Packed-coordinate matrix of `U ↦ Y U Y` for symmetric `Y`.
///
/// With basis `E_(ij) = s_ij (e_i e_jᵀ + e_j e_iᵀ)`, `s = 1/2` on the diagonal
/// and `1/√2` off it, the entries are `2 s_a s_b (Y_ik Y_jl + Y_il Y_jk)`.
pub(crate) fn congruence_matrix(order: usize, y: &DMatrix<f64>) -> DMatrix<f64> {
    let pairs = packed_pairs(order);
    let scale = |i: usize, j: usize| if i == j { 0.5 } else { std::f64::consts::FRAC_1_SQRT_2 };
    let n = pairs.len();
    let mut h = DMatrix::zeros(n, n);
    for (a, &(i, j)) in pairs.iter().enumerate() {
        let sa = scale(i, j);
        for (b, &(k, l)) in pairs.iter().enumerate().skip(a) {
            let sb = scale(k, l);
            let v = 2.0 * sa * sb * (y[(i, k)] * y[(j, l)] + y[(i, l)] * y[(j, k)]);
            h[(a, b)] = v;
            h[(b, a)] = v;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sym::pack_sym;

    #[test]
    fn congruence_matrix_matches_operator() {
        let y = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, -0.1, 0.3, 1.5, 0.2, -0.1, 0.2, 1.0]);
        let x = y.clone().try_inverse().unwrap();
        let m = MetricFactor::congruence_at(None, x, y.clone());
        let dense = m.to_dense();
        for k in 0..6 {
            let mut e = DVector::zeros(6);
            e[k] = 1.0;
            let diff = (&dense * &e - m.mul(&e)).amax();
            assert!(diff < 1e-12, "column {k}: {diff}");
        }
    }

    #[test]
    fn solve_inverts_apply() {
        let h = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 0.5, 0.0, 0.5, 2.0]);
        let m = MetricFactor::from_dense(h).unwrap();
        let v = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let back = m.apply(&m.solve(&v).unwrap()).unwrap();
        assert!((back - v).amax() < 1e-12);
    }

    #[test]
    fn congruence_at_identity_is_frobenius() {
        let m = MetricFactor::congruence_at(None, DMatrix::identity(3, 3), DMatrix::identity(3, 3));
        let u = pack_sym(&DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 2.0, -1.0, 3.0, 0.0, 3.0, 0.5]))
            .unwrap();
        assert!((m.quad_form(&u).unwrap() - u.norm_squared()).abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite_dense() {
        let h = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(MetricFactor::from_dense(h), Err(Error::Conditioning(_))));
    }

    #[test]
    fn rejects_zero_diagonal() {
        let d = DVector::from_vec(vec![1.0, 0.0]);
        assert!(matches!(MetricFactor::from_diagonal(d), Err(Error::Conditioning(_))));
    }

    #[test]
    fn dimension_checked() {
        let m = MetricFactor::identity(2);
        let u = DVector::zeros(3);
        assert!(matches!(m.local_norm(&u), Err(Error::DimensionMismatch { .. })));
    }
}
