//! Parses an edge-list file (default: the bundled Petersen graph) and
//! solves the Max-Cut relaxation of its Laplacian.

use std::env;
use std::fs;

use proxpath::cli::{laplacian, parse_graph};
use proxpath::pathfollow::{self, SolverConfig};
use proxpath::problems::maxcut;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match env::args().nth(1) {
        Some(path) => fs::read_to_string(path)?,
        None => include_str!("data/petersen.txt").to_owned(),
    };
    let gf = parse_graph(&text)?;
    let l = laplacian(&gf);
    let degrees: Vec<f64> = l.diagonal().iter().copied().collect();
    println!("{} nodes, {} edges, weighted degrees {degrees:?}", gf.n, gf.m);
    let res = pathfollow::solve(&maxcut(&l)?, &SolverConfig::manual(1e-3, 0.025, None))?;
    println!("relaxation {:.4} ({:?})", -res.objective, res.status);
    Ok(())
}
