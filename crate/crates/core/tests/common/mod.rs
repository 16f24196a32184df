//! Shared generators and property checks for the integration suites.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use proxpath::problems::laplacian_from_edges;
use proxpath::sym::{pack_sym, unpack_sym};
use proxpath::{Barrier, MetricFactor, ProxFn};

pub const PROPERTY_CASES: u32 = 128;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    })
}

pub fn uniform_vec(r: &mut impl Rng, n: usize, lo: f64, hi: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| r.random_range(lo..hi))
}

pub fn random_symmetric(r: &mut impl Rng, p: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(p, p, |_, _| r.random_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

/// SPD matrix with eigenvalues in `[lo, hi]`.
pub fn random_spd(r: &mut impl Rng, n: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0));
    let q = a.qr().q();
    let d = DVector::from_fn(n, |i, _| {
        if n == 1 {
            lo
        } else {
            lo + (hi - lo) * (i as f64 / (n - 1) as f64).powf(r.random_range(0.5..2.0))
        }
    });
    let m = &q * DMatrix::from_diagonal(&d) * q.transpose();
    (&m + m.transpose()) * 0.5
}

/// A random barrier together with a random interior point.
pub fn random_barrier_point(seed: u64) -> (Barrier, DVector<f64>) {
    let mut r = rng(seed);
    match seed % 4 {
        0 => {
            let n = r.random_range(1..6);
            let lower = uniform_vec(&mut r, n, -3.0, 0.0);
            let width = uniform_vec(&mut r, n, 0.5, 4.0);
            let upper = &lower + &width;
            let frac = uniform_vec(&mut r, n, 0.05, 0.95);
            let x = &lower + width.component_mul(&frac);
            (Barrier::boxed(lower, upper).unwrap(), x)
        }
        1 => {
            let n = r.random_range(1..6);
            let x = uniform_vec(&mut r, n, 0.1, 5.0);
            (Barrier::nonneg_orthant(n).unwrap(), x)
        }
        2 => {
            let p = r.random_range(1..5);
            let x = random_spd(&mut r, p, 0.2, 3.0);
            (Barrier::log_det(p).unwrap(), pack_sym(&x).unwrap())
        }
        _ => {
            let p = r.random_range(1..4);
            let u = random_spd(&mut r, p, 1.0, 4.0);
            let s = r.random_range(0.15..0.85);
            let jitter = random_symmetric(&mut r, p) * 0.05;
            let x = &u * s + jitter;
            let b = Barrier::matrix_interval(u).unwrap();
            let xp = pack_sym(&x).unwrap();
            if b.contains(&xp) {
                (b, xp)
            } else {
                let c = b.analytic_center().unwrap();
                (b, c)
            }
        }
    }
}

pub fn unit_direction(r: &mut impl Rng, metric: &MetricFactor) -> DVector<f64> {
    let v = uniform_vec(r, metric.dim(), -1.0, 1.0);
    let n = metric.local_norm(&v).unwrap();
    v / n
}

pub fn seeds() -> impl Strategy<Value = u64> {
    any::<u64>()
}

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

/// `|φ'''(0)| ≤ 2 φ''(0)^{3/2}` along a random line, with `φ''` exact from
/// the metric and `φ'''` by central differences of `φ''`.
pub fn check_self_concordance(seed: u64) -> Result<(), TestCaseError> {
    let (b, x) = random_barrier_point(seed);
    let mut r = rng(seed ^ 0x5eed);
    let m = b.metric_at(&x).unwrap();
    let v = unit_direction(&mut r, &m);
    let h = 1e-4;
    let second = |tau: f64| -> f64 {
        let p = &x + &v * tau;
        b.metric_at(&p).unwrap().quad_form(&v).unwrap()
    };
    let d2 = second(0.0);
    let d3 = (second(h) - second(-h)) / (2.0 * h);
    let bound = 2.0 * d2.powf(1.5) * (1.0 + 1e-2);
    if d3.abs() <= bound {
        Ok(())
    } else {
        Err(fail(format!("seed {seed}: |phi'''| = {} > {bound}", d3.abs())))
    }
}

/// Directional derivative of the value matches the gradient.
pub fn check_gradient_fd(seed: u64) -> Result<(), TestCaseError> {
    let (b, x) = random_barrier_point(seed);
    let mut r = rng(seed ^ 0xfd);
    let m = b.metric_at(&x).unwrap();
    let u = unit_direction(&mut r, &m) * 0.5;
    let h = 1e-5;
    let fd = (b.value(&(&x + &u * h)).unwrap() - b.value(&(&x - &u * h)).unwrap()) / (2.0 * h);
    let exact = b.gradient(&x).unwrap().dot(&u);
    let scale = exact.abs().max(1.0);
    if (fd - exact).abs() <= 1e-5 * scale {
        Ok(())
    } else {
        Err(fail(format!("seed {seed}: fd {fd} vs {exact}")))
    }
}

/// Quadratic form of the metric matches finite differences of the gradient.
pub fn check_metric_fd(seed: u64) -> Result<(), TestCaseError> {
    let (b, x) = random_barrier_point(seed);
    let mut r = rng(seed ^ 0x4e55);
    let m = b.metric_at(&x).unwrap();
    let u = unit_direction(&mut r, &m) * 0.5;
    let h = 1e-5;
    let gp = b.gradient(&(&x + &u * h)).unwrap();
    let gm = b.gradient(&(&x - &u * h)).unwrap();
    let fd = (gp - gm).dot(&u) / (2.0 * h);
    let exact = m.quad_form(&u).unwrap();
    if (fd - exact).abs() <= 1e-4 * exact.abs().max(1e-12) {
        Ok(())
    } else {
        Err(fail(format!("seed {seed}: fd {fd} vs {exact}")))
    }
}

/// `‖∇f(x)‖*_x ≤ √ν`.
pub fn check_gradient_dual_bound(seed: u64) -> Result<(), TestCaseError> {
    let (b, x) = random_barrier_point(seed);
    let m = b.metric_at(&x).unwrap();
    let dn = m.dual_norm(&b.gradient(&x).unwrap()).unwrap();
    if dn <= b.nu().sqrt() * (1.0 + 1e-8) {
        Ok(())
    } else {
        Err(fail(format!("seed {seed}: {dn} > sqrt(nu) = {}", b.nu().sqrt())))
    }
}

/// Random nonsmooth term and SPD metric of matching dimension.
pub fn random_prox_setup(seed: u64) -> (ProxFn, MetricFactor) {
    let mut r = rng(seed);
    let n = r.random_range(1..6);
    let g = match seed % 3 {
        0 => ProxFn::l1(n, r.random_range(0.1..2.0)).unwrap(),
        1 => {
            let lo = uniform_vec(&mut r, n, -1.5, 0.0);
            let hi = &lo + uniform_vec(&mut r, n, 0.1, 2.0);
            ProxFn::indicator_box(lo, hi).unwrap()
        }
        _ => ProxFn::zero(n),
    };
    let m = if r.random_bool(0.5) {
        MetricFactor::from_diagonal(uniform_vec(&mut r, n, 0.2, 5.0)).unwrap()
    } else {
        MetricFactor::from_dense(random_spd(&mut r, n, 0.2, 5.0)).unwrap()
    };
    (g, m)
}

const PROX_TOL: f64 = 1e-9;

/// Metric prox in dual-input form, `w ↦ argmin g(v) + ½‖v‖²_M - ⟨w, v⟩`.
pub fn dual_prox(g: &ProxFn, m: &MetricFactor, w: &DVector<f64>) -> DVector<f64> {
    g.generalized_prox(&m.solve(w).unwrap(), m, PROX_TOL).unwrap()
}

/// `⟨P(a) - P(b), a - b⟩ ≥ ‖P(a) - P(b)‖²_M`.
pub fn check_cocoercive(seed: u64) -> Result<(), TestCaseError> {
    let (g, m) = random_prox_setup(seed);
    let mut r = rng(seed ^ 0xc0c0);
    let a = uniform_vec(&mut r, g.dim(), -3.0, 3.0);
    let b = uniform_vec(&mut r, g.dim(), -3.0, 3.0);
    let dp = dual_prox(&g, &m, &a) - dual_prox(&g, &m, &b);
    let lhs = dp.dot(&(&a - &b));
    let rhs = m.quad_form(&dp).unwrap();
    let slack = 1e-6 * (1.0 + lhs.abs().max(rhs.abs()));
    if lhs >= rhs - slack {
        Ok(())
    } else {
        Err(fail(format!("seed {seed}: {lhs} < {rhs}")))
    }
}

/// `‖P(a) - P(b)‖_M ≤ ‖a - b‖*_M`.
pub fn check_nonexpansive(seed: u64) -> Result<(), TestCaseError> {
    let (g, m) = random_prox_setup(seed);
    let mut r = rng(seed ^ 0xe4e4);
    let a = uniform_vec(&mut r, g.dim(), -3.0, 3.0);
    let b = uniform_vec(&mut r, g.dim(), -3.0, 3.0);
    let dp = dual_prox(&g, &m, &a) - dual_prox(&g, &m, &b);
    let lhs = m.local_norm(&dp).unwrap();
    let rhs = m.dual_norm(&(&a - &b)).unwrap();
    if lhs <= rhs + 1e-6 {
        Ok(())
    } else {
        Err(fail(format!("seed {seed}: {lhs} > {rhs}")))
    }
}

/// `⟨pack A, pack B⟩ = trace(AB)` and `unpack(pack A) = A`.
pub fn check_pack_trace(seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let p = r.random_range(1..8);
    let a = random_symmetric(&mut r, p) * 3.0;
    let b = random_symmetric(&mut r, p) * 3.0;
    let pa = pack_sym(&a).unwrap();
    let pb = pack_sym(&b).unwrap();
    let tr = (&a * &b).trace();
    if (pa.dot(&pb) - tr).abs() > 1e-12 * (1.0 + tr.abs()) {
        return Err(fail(format!("seed {seed}: {} vs trace {tr}", pa.dot(&pb))));
    }
    let back = unpack_sym(&pa, p).unwrap();
    if (back - &a).amax() > 1e-14 * a.amax().max(1.0) {
        return Err(fail(format!("seed {seed}: round trip drifted")));
    }
    Ok(())
}

/// Erdős–Rényi `G(n, q)` Laplacian with unit weights.
pub fn gnp_laplacian(r: &mut impl Rng, n: usize, q: f64) -> DMatrix<f64> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if r.random_bool(q) {
                edges.push((i, j, 1.0));
            }
        }
    }
    laplacian_from_edges(n, &edges).unwrap()
}

/// Runs `check` on [`PROPERTY_CASES`] random seeds.
pub fn run_property(
    check: fn(u64) -> Result<(), TestCaseError>,
) -> Result<(), proptest::test_runner::TestError<u64>> {
    runner().run(&seeds(), check)
}
