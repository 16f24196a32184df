//! Max-Cut SDP relaxation on a random graph, compared with the best cut
//! found by enumeration and by rounding the relaxation's sign pattern.

use nalgebra::DMatrix;
use proxpath::pathfollow::{self, SolverConfig};
use proxpath::problems::{brute_force_maxcut, laplacian_from_edges, maxcut, unpack_sym};

fn main() -> proxpath::Result<()> {
    let n = 14;
    // deterministic pseudo-random graph
    let mut state: u64 = 0x2545_f491_4f6c_dd1d;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            if state % 2 == 0 {
                edges.push((i, j, 1.0));
            }
        }
    }
    let l = laplacian_from_edges(n, &edges)?;
    let prob = maxcut(&l)?;

    let res = pathfollow::solve(&prob, &SolverConfig::manual(1e-3, 0.025, None))?;
    let x = unpack_sym(&res.x, n)?;
    println!("{} edges, relaxation {:.4} in {} iterations", edges.len(), -res.objective, res.iterations);

    // sign of the leading eigenvector
    let eig = x.clone().symmetric_eigen();
    let lead = eig.eigenvalues.imax();
    let s: Vec<f64> = eig.eigenvectors.column(lead).iter().map(|v| v.signum()).collect();
    let sv = DMatrix::from_fn(n, 1, |i, _| s[i]);
    let rounded = 0.25 * (sv.transpose() * &l * &sv)[(0, 0)];
    println!("rounded cut {rounded}, best cut {}", brute_force_maxcut(&l));
    Ok(())
}
