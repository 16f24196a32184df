//! Proximal path-following interior-point method for
//! `min ⟨c, x⟩ + g(x)` over a set with a self-concordant barrier.
//!
//! ```
//! use nalgebra::DVector;
//! use proxpath::{pathfollow, problems};
//!
//! let c = DVector::from_vec(vec![1.0, -2.0]);
//! let lo = DVector::from_element(2, -1.0);
//! let hi = DVector::from_element(2, 1.0);
//! let problem = problems::box_lp(c, lo, hi).unwrap();
//! let res = pathfollow::solve(&problem, &pathfollow::SolverConfig::new(1e-3)).unwrap();
//! assert!((res.objective + 3.0).abs() <= 1e-3);
//! ```

pub mod barrier;
pub mod cli;
pub mod error;
pub mod oracle;
pub mod pathfollow;
pub mod problems;
pub mod prox;
pub mod subsolver;
pub mod sym;

pub use barrier::{Barrier, BarrierKind, MetricFactor};
pub use error::{Error, Result};
pub use pathfollow::{InitCertificate, SolveResult, SolveStatus, SolverConfig};
pub use problems::CompositeProblem;
pub use prox::{ProxFn, ProxKind};
pub use subsolver::{QuadraticModel, SubSolution};
