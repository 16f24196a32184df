//! Box-constrained LP from the analytic center, with the theoretical
//! initialization and a per-iteration view of the certified gap.

use nalgebra::DVector;
use proxpath::pathfollow::{self, SolverConfig};
use proxpath::problems::box_lp;

fn main() -> proxpath::Result<()> {
    let c = DVector::from_vec(vec![1.0, -2.0, 0.5]);
    let lower = DVector::from_vec(vec![-1.0, -1.0, 0.0]);
    let upper = DVector::from_vec(vec![1.0, 1.0, 4.0]);
    let prob = box_lp(c, lower, upper)?;
    let g_star = prob.known_optimum.unwrap();

    let res = pathfollow::solve(&prob, &SolverConfig::new(1e-4))?;
    let psi = res.cert.psi;
    println!("{:>6} {:>12} {:>12} {:>12}", "k", "t", "G - G*", "t psi");
    let n = res.trace.records.len();
    for rec in res.trace.records.iter().filter(|r| r.k % 200 == 0 || r.k == n) {
        println!("{:>6} {:>12.4e} {:>12.4e} {:>12.4e}", rec.k, rec.t, rec.objective - g_star, rec.t * psi);
    }
    println!("{:?} after {} iterations (bound {}), x = {:.5?}", res.status, res.iterations, res.cert.k_max, res.x.as_slice());
    Ok(())
}
