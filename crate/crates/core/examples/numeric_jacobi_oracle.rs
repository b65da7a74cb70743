//! Integrates the Jacobi equation along a geodesic and prints the smallest
//! singular value of the endpoint matrix next to the detected rank drops.

use pseudoh::catalog::heisenberg_h_type;
use pseudoh::numeric::{detect_conjugate_points, integrate_jacobi_basis, IntegratorConfig};
use pseudoh::GeodesicIC;

fn main() -> pseudoh::Result<()> {
    let alg = heisenberg_h_type(1);
    let ic = GeodesicIC::new(&alg, &[1.0], &[0.0, 0.0])?;
    let window = (0.1, 20.0);
    let cfg = IntegratorConfig::default();

    println!("      t   smin/smax   sign det");
    for m in integrate_jacobi_basis(&alg, &ic, window, &cfg)?.iter().step_by(16) {
        println!("{:>7.3}   {:.3e}   {:>2}", m.t, m.ratio(), m.det_sign);
    }
    println!("\nrank drops:");
    for p in detect_conjugate_points(&alg, &ic, window, &cfg)? {
        println!(
            "  t0 = {:.10} (2pi k: k = {:.6}), mult {}",
            p.t0,
            p.t0 / std::f64::consts::TAU,
            p.multiplicity
        );
    }
    Ok(())
}
