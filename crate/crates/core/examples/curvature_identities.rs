//! Connection and curvature on the Heisenberg algebra, and the randomized
//! identity suite on every built-in algebra.

use pseudoh::catalog::{by_name, heisenberg_h_type, STANDARD_NAMES};
use pseudoh::geometry::{connection, curvature};
use pseudoh::identities::identity_suite;

fn main() -> pseudoh::Result<()> {
    let h = heisenberg_h_type(1);
    let (z, e1, e2) = (h.z_basis(0), h.v_basis(0), h.v_basis(1));
    println!("nabla_e1 e2 = {:?}", connection(&h, &e1, &e2)?.z_part.as_slice());
    println!("nabla_z e1  = {:?}", connection(&h, &z, &e1)?.v_part.as_slice());
    println!("R(z,e1)z    = {:?}", curvature(&h, &z, &e1, &z)?.v_part.as_slice());

    for name in STANDARD_NAMES {
        let alg = by_name(name)?;
        println!("\n{name}");
        for c in identity_suite(&alg, 100, 0, 1e-9) {
            println!("  {c}");
        }
    }
    Ok(())
}
