//! How the first transcendental conjugate time moves as `<x0,x0>` varies
//! with a fixed timelike central component.

use pseudoh::analytic::{analytic_conjugate_points, Branch, GeodesicInvariants, SolverConfig};

fn main() -> pseudoh::Result<()> {
    let window = (0.0, 4.0 * std::f64::consts::TAU);
    println!("b,first_A1,first_lattice");
    for i in 0..=10 {
        let b = 0.25 + 0.375 * i as f64;
        let inv = GeodesicInvariants::new(1.0, b, 1, 2);
        let pts = analytic_conjugate_points(&inv, window, &SolverConfig::default())?;
        let first = |br: Branch| pts.iter().find(|p| p.branch == br).map(|p| p.t0).unwrap_or(f64::NAN);
        println!("{b},{:.10},{:.10}", first(Branch::A1), first(Branch::Lattice));
    }
    Ok(())
}
