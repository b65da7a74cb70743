//! Exports a built-in algebra to the JSON file format, reloads it and checks
//! that nothing changed.

use pseudoh::catalog::example_singular;
use pseudoh::io::{algebra_from_json, algebra_to_json};

fn main() -> pseudoh::Result<()> {
    let alg = example_singular(1);
    let text = algebra_to_json(&alg);
    println!("{text}");
    let back = algebra_from_json(&text)?;
    assert_eq!(back.to_raw(), alg.to_raw());
    println!("round trip ok, pseudo-H: {}", back.pseudo_h());
    Ok(())
}
