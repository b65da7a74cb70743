//! Matches closed-form conjugate points against the Jacobi-field oracle on a
//! geodesic with both lattice and transcendental conjugate points.

use pseudoh::analytic::{analytic_conjugate_points, GeodesicInvariants, SolverConfig};
use pseudoh::catalog::heisenberg_h_type;
use pseudoh::numeric::{cross_validate, detect_conjugate_points, IntegratorConfig};
use pseudoh::GeodesicIC;

fn main() -> pseudoh::Result<()> {
    let alg = heisenberg_h_type(1);
    let ic = GeodesicIC::new(&alg, &[1.0], &[1.0, 0.0])?;
    let window = (0.1, 10.0 * std::f64::consts::PI);
    let inv = GeodesicInvariants::from_ic(&alg, &ic)?;
    let analytic = analytic_conjugate_points(&inv, window, &SolverConfig::default())?;
    let numeric = detect_conjugate_points(&alg, &ic, window, &IntegratorConfig::default())?;
    let rep = cross_validate(&analytic, &numeric, 1e-6, true);
    for m in &rep.matched {
        println!(
            "{:<8} t = {:.10}  dt = {:+.2e}  mult {} / {}",
            m.analytic.branch.as_str(),
            m.analytic.t0,
            m.dt,
            m.analytic.multiplicity,
            m.numeric.multiplicity
        );
    }
    println!("mismatches: {}", rep.mismatches());
    std::process::exit(rep.exit_code());
}
