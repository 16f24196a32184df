//! Max-k-Cut relaxations of the Petersen graph for k = 2..4.

use proxpath::cli::{laplacian, parse_graph};
use proxpath::pathfollow::{self, SolverConfig};
use proxpath::problems::maxkcut;

fn main() -> proxpath::Result<()> {
    let gf = parse_graph(include_str!("data/petersen.txt"))?;
    let l = laplacian(&gf);
    for k in 2..=4 {
        let res = pathfollow::solve(&maxkcut(&l, k)?, &SolverConfig::manual(1e-3, 0.025, None))?;
        println!("k = {k}: relaxation {:.4}, {} iterations", -res.objective, res.iterations);
    }
    Ok(())
}
