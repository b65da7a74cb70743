//! Closed-form conjugate points for each causal type of the central
//! component: timelike (lattice and A sets), spacelike (B sets) and null.

use pseudoh::analytic::{analytic_conjugate_points, default_window, GeodesicInvariants, SolverConfig};
use pseudoh::catalog::{example_singular, heisenberg_h_type};
use pseudoh::{GeodesicIC, MetricNilpotentAlgebra};

fn show(label: &str, alg: &MetricNilpotentAlgebra, z0: &[f64], x0: &[f64]) -> pseudoh::Result<()> {
    let ic = GeodesicIC::new(alg, z0, x0)?;
    let inv = GeodesicInvariants::from_ic(alg, &ic)?;
    let window = default_window(&inv);
    println!(
        "{label}: a = {}, b = {}, window ({}, {:.4}]",
        inv.a, inv.b, window.0, window.1
    );
    for p in analytic_conjugate_points(&inv, window, &SolverConfig::default())? {
        println!(
            "  t0 = {:<18.12} mult {:<2} {}",
            p.t0,
            p.multiplicity,
            p.branch.as_str()
        );
    }
    Ok(())
}

fn main() -> pseudoh::Result<()> {
    let h = heisenberg_h_type(1);
    show("heisenberg, z0 = z, x0 = e1", &h, &[1.0], &[1.0, 0.0])?;
    let e1 = example_singular(1);
    show(
        "example 1, z0 = z2, x0 = x1 + w1",
        &e1,
        &[0.0, 1.0, 0.0],
        &[1.0, 0.0, 0.0, 1.0],
    )?;
    show(
        "example 1, z0 = z1 + z2, x0 = x1 + 1.5 w1",
        &e1,
        &[1.0, 1.0, 0.0],
        &[1.0, 0.0, 0.0, 1.5],
    )?;
    Ok(())
}
