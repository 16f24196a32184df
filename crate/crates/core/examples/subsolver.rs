//! One proximal Newton subproblem solved by restarted FISTA, with its gap
//! certificate and the iteration bound for the metric's condition number.

use nalgebra::DVector;
use proxpath::subsolver::{build_model, j_max, solve, spectrum_bounds};
use proxpath::{Barrier, ProxFn};

fn main() -> proxpath::Result<()> {
    let barrier = Barrier::boxed(DVector::from_element(4, -1.0), DVector::from_element(4, 1.0))?;
    let x = DVector::from_vec(vec![0.7, -0.2, 0.1, -0.9]);
    let c = DVector::from_vec(vec![1.0, -1.0, 0.5, 0.0]);
    let g = ProxFn::l1(4, 0.3)?;
    let zeta0 = DVector::zeros(4);
    let model = build_model(&barrier, &x, &zeta0, 0.0, &c, 0.5, &g)?;

    let spec = spectrum_bounds(model.metric())?;
    for delta in [1e-2, 1e-4, 1e-6] {
        let sol = solve(&model, delta)?;
        println!(
            "delta {delta:.0e}: {} iterations (j_max {}), gap bound {:.2e}, z = {:.6?}",
            sol.iters,
            j_max(spec.condition(), 16.0 * delta, delta),
            sol.gap_bound,
            sol.z.as_slice()
        );
    }
    Ok(())
}
