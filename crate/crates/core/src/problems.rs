//! Problem builders: box LPs and the Max-Cut / Max-k-Cut SDP relaxations.
//!
//! Everything is in minimization form, so the relaxations report negative
//! objectives at the optimum.

use nalgebra::{DMatrix, DVector};

use crate::barrier::Barrier;
use crate::error::{check_dim, Error, Result};
use crate::prox::ProxFn;

pub use crate::sym::{pack_sym, unpack_sym};

/// Row-sum tolerance for Laplacian inputs.
pub const LAPLACIAN_TOL: f64 = 1e-9;

/// `min ⟨c, x⟩ + g(x)` over the domain of `barrier`.
#[derive(Debug, Clone)]
pub struct CompositeProblem {
    pub c: DVector<f64>,
    pub g: ProxFn,
    pub barrier: Barrier,
    /// Set when `x` is a packed `p x p` symmetric matrix.
    pub matrix_order: Option<usize>,
    pub known_optimum: Option<f64>,
}

impl CompositeProblem {
    pub fn new(c: DVector<f64>, g: ProxFn, barrier: Barrier) -> Result<Self> {
        check_dim(barrier.dim(), c.len())?;
        check_dim(barrier.dim(), g.dim())?;
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("cost vector has non-finite entries".into()));
        }
        Ok(Self {
            matrix_order: barrier.matrix_order(),
            c,
            g,
            barrier,
            known_optimum: None,
        })
    }

    pub fn with_known_optimum(mut self, value: f64) -> Self {
        self.known_optimum = Some(value);
        self
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    /// `G(x) = ⟨c, x⟩ + g(x)`.
    pub fn objective(&self, x: &DVector<f64>) -> Result<f64> {
        Ok(self.c.dot(x) + self.g.value(x)?)
    }
}

/// Box-constrained LP `min ⟨c, x⟩, l ≤ x ≤ u`.
pub fn box_lp(c: DVector<f64>, lower: DVector<f64>, upper: DVector<f64>) -> Result<CompositeProblem> {
    let known: f64 = c
        .iter()
        .zip(lower.iter().zip(upper.iter()))
        .map(|(ci, (l, u))| (ci * l).min(ci * u))
        .sum();
    let n = c.len();
    let barrier = Barrier::boxed(lower, upper)?;
    Ok(CompositeProblem::new(c, ProxFn::zero(n), barrier)?.with_known_optimum(known))
}

/// Max-Cut relaxation `min ⟨-L/4, X⟩, X ⪰ 0, diag X = e`.
pub fn maxcut(laplacian: &DMatrix<f64>) -> Result<CompositeProblem> {
    maxcut_with(laplacian, false)
}

/// As [`maxcut`]. With `allow_signed` the input only needs to be symmetric
/// with vanishing row sums, which admits graphs with negative weights.
pub fn maxcut_with(laplacian: &DMatrix<f64>, allow_signed: bool) -> Result<CompositeProblem> {
    let p = check_laplacian(laplacian, allow_signed)?;
    let c = pack_sym(&(laplacian * -0.25))?;
    CompositeProblem::new(c, ProxFn::affine_diag(p), Barrier::log_det(p)?)
}

/// Max-k-Cut relaxation `min ⟨-(k-1)/(2k) L, X⟩`, `X ⪰ 0`, `diag X = e`,
/// `Xᵢⱼ ≥ -1/(k-1)`.
pub fn maxkcut(laplacian: &DMatrix<f64>, k: usize) -> Result<CompositeProblem> {
    maxkcut_with(laplacian, k, false)
}

pub fn maxkcut_with(laplacian: &DMatrix<f64>, k: usize, allow_signed: bool) -> Result<CompositeProblem> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("k must be at least 2, got {k}")));
    }
    let p = check_laplacian(laplacian, allow_signed)?;
    let scale = -((k - 1) as f64) / (2.0 * k as f64);
    let c = pack_sym(&(laplacian * scale))?;
    CompositeProblem::new(c, ProxFn::elliptope_k(p, k)?, Barrier::log_det(p)?)
}

fn check_laplacian(l: &DMatrix<f64>, allow_signed: bool) -> Result<usize> {
    let p = l.nrows();
    if p == 0 || l.ncols() != p {
        return Err(Error::InvalidInput("Laplacian must be a non-empty square matrix".into()));
    }
    pack_sym(l)?;
    let scale = l.amax().max(1.0);
    for i in 0..p {
        let row_sum: f64 = l.row(i).sum();
        if row_sum.abs() > LAPLACIAN_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "row {i} of the Laplacian sums to {row_sum}, expected 0"
            )));
        }
        if !allow_signed {
            for j in 0..p {
                if i != j && l[(i, j)] > LAPLACIAN_TOL * scale {
                    return Err(Error::InvalidInput(format!(
                        "positive off-diagonal entry at ({i}, {j}); pass allow_signed for negative edge weights"
                    )));
                }
            }
        }
    }
    Ok(p)
}

/// Laplacian `D - W` of a weighted edge list on `n` nodes (0-based).
pub fn laplacian_from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<DMatrix<f64>> {
    let mut w = DMatrix::zeros(n, n);
    for &(i, j, wt) in edges {
        if i >= n || j >= n || i == j {
            return Err(Error::InvalidInput(format!("bad edge ({i}, {j}) for {n} nodes")));
        }
        w[(i, j)] += wt;
        w[(j, i)] += wt;
    }
    let mut l = -w.clone();
    for i in 0..n {
        l[(i, i)] = w.row(i).sum();
    }
    Ok(l)
}

/// Largest cut weight `¼ Σ Lᵢⱼ sᵢ sⱼ` over all sign vectors, by Gray-code
/// enumeration with node 0 fixed. Exponential; meant for `n ≤ 24` or so.
pub fn brute_force_maxcut(laplacian: &DMatrix<f64>) -> f64 {
    let n = laplacian.nrows();
    if n <= 1 {
        return 0.0;
    }
    let mut s = vec![1.0f64; n];
    // field[i] = Σⱼ Lᵢⱼ sⱼ
    let mut field: Vec<f64> = (0..n).map(|i| laplacian.row(i).sum()).collect();
    let mut quad: f64 = 0.0;
    let mut best = quad;
    for step in 1u64..(1u64 << (n - 1)) {
        let bit = step.trailing_zeros() as usize + 1;
        // flipping s_bit changes sᵀLs by -4 s_b field_b + 4 L_bb
        let sb = s[bit];
        quad += -4.0 * sb * field[bit] + 4.0 * laplacian[(bit, bit)];
        for i in 0..n {
            field[i] -= 2.0 * sb * laplacian[(i, bit)];
        }
        s[bit] = -sb;
        best = best.max(quad);
    }
    best / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k_n(n: usize) -> DMatrix<f64> {
        let edges: Vec<_> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j, 1.0))).collect();
        laplacian_from_edges(n, &edges).unwrap()
    }

    #[test]
    fn box_lp_optimum() {
        let v = |xs: &[f64]| DVector::from_column_slice(xs);
        let p = box_lp(v(&[1.0, -2.0]), v(&[-1.0, -1.0]), v(&[1.0, 1.0])).unwrap();
        assert_eq!(p.known_optimum, Some(-3.0));
        let p = box_lp(v(&[0.0, 0.0]), v(&[-1.0, -1.0]), v(&[1.0, 1.0])).unwrap();
        assert_eq!(p.known_optimum, Some(0.0));
        let p = box_lp(v(&[5.0]), v(&[2.0]), v(&[4.0])).unwrap();
        assert_eq!(p.known_optimum, Some(10.0));
        assert!(box_lp(v(&[1.0]), v(&[1.0]), v(&[0.0])).is_err());
    }

    #[test]
    fn maxcut_k2_objective() {
        let l = k_n(2);
        let prob = maxcut(&l).unwrap();
        let x = pack_sym(&DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0])).unwrap();
        assert!((prob.objective(&x).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn maxcut_k3_objective_at_closed_form_optimum() {
        let prob = maxcut(&k_n(3)).unwrap();
        let x = DMatrix::from_fn(3, 3, |i, j| if i == j { 1.0 } else { -0.5 });
        assert!((prob.objective(&pack_sym(&x).unwrap()).unwrap() + 2.25).abs() < 1e-14);
    }

    #[test]
    fn empty_graph_has_zero_cost() {
        let prob = maxcut(&DMatrix::zeros(4, 4)).unwrap();
        assert_eq!(prob.c.amax(), 0.0);
    }

    #[test]
    fn maxkcut_k2_floor_and_objective() {
        let l = k_n(2);
        let prob = maxkcut(&l, 4).unwrap();
        let x = DMatrix::from_row_slice(2, 2, &[1.0, -1.0 / 3.0, -1.0 / 3.0, 1.0]);
        let obj = prob.objective(&pack_sym(&x).unwrap()).unwrap();
        assert!((obj + 1.0).abs() < 1e-14);
        let too_low = DMatrix::from_row_slice(2, 2, &[1.0, -0.5, -0.5, 1.0]);
        assert_eq!(prob.objective(&pack_sym(&too_low).unwrap()).unwrap(), f64::INFINITY);
        assert!(maxkcut(&l, 1).is_err());
    }

    #[test]
    fn laplacian_validation() {
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert!(maxcut(&bad).is_err());
        let signed = laplacian_from_edges(3, &[(0, 1, 1.0), (1, 2, -2.0)]).unwrap();
        assert!(maxcut(&signed).is_err());
        assert!(maxcut_with(&signed, true).is_ok());
    }

    #[test]
    fn brute_force_small_graphs() {
        assert_eq!(brute_force_maxcut(&k_n(3)), 2.0);
        assert_eq!(brute_force_maxcut(&k_n(4)), 4.0);
        assert_eq!(brute_force_maxcut(&k_n(5)), 6.0);
        let l = laplacian_from_edges(4, &[(0, 1, 2.0), (1, 2, 1.0), (2, 3, 3.0)]).unwrap();
        assert_eq!(brute_force_maxcut(&l), 6.0);
    }
}
