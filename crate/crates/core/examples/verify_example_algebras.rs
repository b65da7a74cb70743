//! Pseudo-H and pseudoregularity verdicts for the built-in algebras, plus the
//! `J_z²` table that separates the two examples.

use pseudoh::algebra::{Pseudoregularity, NULL_TOL};
use pseudoh::catalog::{by_name, STANDARD_NAMES};
use pseudoh::identities::j_square_table;

fn main() -> pseudoh::Result<()> {
    for name in STANDARD_NAMES {
        let alg = by_name(name)?;
        let verdict = match alg.is_pseudoregular(200, 0, NULL_TOL) {
            Pseudoregularity::False(w) => format!("not pseudoregular, {w}"),
            Pseudoregularity::LikelyTrue { .. } => "pseudoregular (sampled)".to_string(),
        };
        println!(
            "{name:<12} dim z = {}, dim v = {:>2}, pseudo-H: {:<5} {verdict}",
            alg.dim_center(),
            alg.dim_v(),
            alg.pseudo_h()
        );
    }

    println!("\nJ_z^2 on example2:");
    for e in j_square_table(&by_name("example2")?) {
        println!(
            "  {:<6} lambda = {:>5.2}, residual {:.1e}, -<z,z> = {:>5.2}",
            e.label, e.lambda, e.residual, e.expected
        );
    }

    // null central direction of example 1: J_z has rank dim v / 2
    let alg = by_name("example1-k2")?;
    let z = alg.central(&[1.0, 1.0, 0.0])?;
    println!(
        "\nexample1-k2: rank J_(z1+z2) = {} of dim v = {}",
        alg.jz_rank(&z, 1e-8)?,
        alg.dim_v()
    );
    Ok(())
}
