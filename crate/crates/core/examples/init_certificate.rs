//! The initialization scalars for a few barriers, printed as JSON.

use nalgebra::{DMatrix, DVector};
use proxpath::pathfollow::{init, SolverConfig};
use proxpath::problems::box_lp;
use proxpath::{Barrier, CompositeProblem, ProxFn};

fn main() -> proxpath::Result<()> {
    let boxed = box_lp(DVector::from_vec(vec![1.0, -2.0]), DVector::from_element(2, -1.0), DVector::from_element(2, 1.0))?;
    let cert = init(&boxed, &SolverConfig::new(1e-3))?;
    println!("box:\n{}", serde_json::to_string_pretty(&cert).unwrap());

    let exact = SolverConfig { exact_variant: true, ..SolverConfig::new(1e-3) };
    let cert = init(&boxed, &exact)?;
    println!("box, exact steps: sigma {:.6} vs c_beta {:.6}", cert.sigma_beta, cert.c_beta);

    let u = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
    let c = DVector::from_vec(vec![1.0, -0.3, 0.2]);
    let interval = CompositeProblem::new(c, ProxFn::l1(3, 0.1)?, Barrier::matrix_interval(u)?)?;
    let cert = init(&interval, &SolverConfig::new(1e-3))?;
    println!("matrix interval: nu {}, t0 {:.4}, psi {:.3}, k_max {}", cert.nu, cert.t0, cert.psi, cert.k_max);
    Ok(())
}
