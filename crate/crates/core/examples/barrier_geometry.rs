//! Local norms, dual gradient norms and analytic centers of the built-in
//! barriers.

use nalgebra::{DMatrix, DVector};
use proxpath::sym::pack_sym;
use proxpath::Barrier;

fn report(name: &str, b: &Barrier, x: &DVector<f64>) -> proxpath::Result<()> {
    let g = b.gradient(x)?;
    let m = b.metric_at(x)?;
    println!(
        "{name:<16} nu {:>4}  f(x) {:>9.4}  |grad f|* {:.4} <= sqrt(nu) {:.4}",
        b.nu(),
        b.value(x)?,
        m.dual_norm(&g)?,
        b.nu().sqrt()
    );
    Ok(())
}

fn main() -> proxpath::Result<()> {
    let bx = Barrier::boxed(DVector::from_vec(vec![0.0, -2.0]), DVector::from_vec(vec![1.0, 2.0]))?;
    report("box", &bx, &DVector::from_vec(vec![0.9, 0.5]))?;
    println!("  center {:?}", bx.analytic_center().map(|c| c.as_slice().to_vec()));

    let orth = Barrier::nonneg_orthant(3)?;
    report("orthant", &orth, &DVector::from_vec(vec![0.1, 1.0, 10.0]))?;

    let x = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 0.5]);
    let ld = Barrier::log_det(2)?;
    report("log det", &ld, &pack_sym(&x)?)?;

    let u = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 2.0]);
    let mi = Barrier::matrix_interval(u)?;
    let c = mi.analytic_center().unwrap();
    report("matrix interval", &mi, &c)?;

    // a Dikin ellipsoid step of local length 0.99 stays inside
    let m = mi.metric_at(&c)?;
    let d = DVector::from_vec(vec![1.0, -1.0, 0.5]);
    let step = &d * (0.99 / m.local_norm(&d)?);
    println!("  unit-ball step inside: {}", mi.contains(&(&c + step)));
    Ok(())
}
