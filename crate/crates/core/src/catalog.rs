//! Built-in algebras.
//!
//! Basis orders are fixed so that coordinates given on the command line and
//! columns in CSV output mean the same thing from run to run:
//!
//! * `example_singular(k)`: center `(z1, z2, z3)`, complement
//!   `(x_1..x_k, y_1..y_k, v_1..v_k, w_1..w_k)`.
//! * `example_nonpseudoregular()`: center `(z1, z2)`, complement `(e1, e2)`.
//! * `heisenberg_h_type(m)`: center `(z)`, complement `(e_1..e_{2m})` with
//!   `[e_i, e_{m+i}] = z`.

use crate::algebra::{MetricNilpotentAlgebra, RawAlgebra};
use crate::error::{Error, Result};

/// Singular pseudo-H-type algebra with a three-dimensional Lorentzian-signature
/// center (one timelike, two spacelike directions) and a null basis for `v`.
pub fn example_singular(k: usize) -> MetricNilpotentAlgebra {
    assert!(k >= 1, "example_singular needs k >= 1");
    let q = 4 * k;
    let mut raw = RawAlgebra::abelian(3, q);
    raw.metric_center = vec![vec![1.0, 0.0, 0.0], vec![0.0, -1.0, 0.0], vec![0.0, 0.0, -1.0]];
    let mut gv = vec![vec![0.0; q]; q];
    for i in 0..k {
        let (x, y, v, w) = (i, k + i, 2 * k + i, 3 * k + i);
        gv[x][w] = -1.0;
        gv[w][x] = -1.0;
        gv[y][v] = 1.0;
        gv[v][y] = 1.0;
        raw.set_bracket(x, v, &[0.5, -0.5, 0.0]);
        raw.set_bracket(x, w, &[0.0, 0.0, 1.0]);
        raw.set_bracket(y, v, &[0.0, 0.0, 1.0]);
        raw.set_bracket(y, w, &[2.0, 2.0, 0.0]);
    }
    raw.metric_v = gv;
    MetricNilpotentAlgebra::new_pseudo_h(&raw).expect("example_singular is a valid pseudo-H algebra")
}

/// Four-dimensional algebra with `[e1, e2] = z1 − z2`: `J_z` is nonsingular
/// for nonnull `z` but `ad_{e1}` is not onto the center.
pub fn example_nonpseudoregular() -> MetricNilpotentAlgebra {
    let mut raw = RawAlgebra::abelian(2, 2);
    raw.metric_center = vec![vec![1.0, 0.0], vec![0.0, -1.0]];
    raw.set_bracket(0, 1, &[1.0, -1.0]);
    MetricNilpotentAlgebra::new(&raw).expect("example_nonpseudoregular is valid")
}

/// Riemannian Heisenberg algebra of dimension `2m + 1`.
pub fn heisenberg_h_type(m: usize) -> MetricNilpotentAlgebra {
    assert!(m >= 1, "heisenberg_h_type needs m >= 1");
    let mut raw = RawAlgebra::abelian(1, 2 * m);
    for i in 0..m {
        raw.set_bracket(i, m + i, &[1.0]);
    }
    MetricNilpotentAlgebra::new_pseudo_h(&raw).expect("heisenberg_h_type is a valid H-type algebra")
}

/// Resolves `heisenberg<m>`, `example1-k<k>` and `example2`.
pub fn by_name(name: &str) -> Result<MetricNilpotentAlgebra> {
    let bad = || Error::Parse(format!("unknown catalog algebra `{name}`"));
    let positive = |s: &str| match s.parse::<usize>() {
        Ok(n) if (1..=64).contains(&n) => Ok(n),
        _ => Err(bad()),
    };
    if name == "example2" {
        Ok(example_nonpseudoregular())
    } else if let Some(k) = name.strip_prefix("example1-k") {
        Ok(example_singular(positive(k)?))
    } else if let Some(m) = name.strip_prefix("heisenberg") {
        Ok(heisenberg_h_type(positive(m)?))
    } else {
        Err(bad())
    }
}

/// Names used by the identity suites and the acceptance tests.
pub const STANDARD_NAMES: &[&str] = &[
    "heisenberg1",
    "heisenberg2",
    "example1-k1",
    "example1-k2",
    "example1-k3",
    "example2",
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{CausalClass, Pseudoregularity, NULL_TOL};
    use nalgebra::DMatrix;

    #[test]
    fn example_singular_is_pseudo_h() {
        for k in 1..=3 {
            let alg = example_singular(k);
            assert!(alg.is_pseudo_h_type(1e-12));
            assert_eq!(alg.dim_v(), 4 * k);
        }
    }

    #[test]
    fn example_singular_null_square_vanishes() {
        let alg = example_singular(1);
        let z = alg.central(&[1.0, 1.0, 0.0]).unwrap();
        let j = alg.j_operator(&z).unwrap();
        assert!((&j * &j).amax() < 1e-15);
        let z2 = example_singular(2).central(&[1.0, 1.0, 0.0]).unwrap();
        assert_eq!(example_singular(2).jz_rank(&z2, 1e-8).unwrap(), 4);
    }

    #[test]
    fn example2_square_and_verdicts() {
        let alg = example_nonpseudoregular();
        let j = alg.j_operator(&alg.central(&[1.0, 1.0]).unwrap()).unwrap();
        let expected = DMatrix::<f64>::identity(2, 2) * -4.0;
        assert!((&j * &j - expected).amax() < 1e-15);
        assert!(!alg.is_pseudo_h_type(1e-9));
        match alg.is_pseudoregular(100, 0, 1e-8) {
            Pseudoregularity::False(w) => assert_eq!(w.label(), "e1"),
            other => panic!("expected False, got {other:?}"),
        }
    }

    #[test]
    fn heisenberg_baseline() {
        for m in 1..=3 {
            let alg = heisenberg_h_type(m);
            assert!(alg.is_pseudo_h_type(1e-12));
            assert_eq!(alg.jz_rank(&alg.z_basis(0), 1e-8).unwrap(), 2 * m);
            for i in 0..alg.dim_v() {
                assert_eq!(
                    alg.causal_class(&alg.v_basis(i), NULL_TOL).unwrap(),
                    CausalClass::Timelike
                );
            }
            assert_eq!(
                alg.causal_class(&alg.z_basis(0), NULL_TOL).unwrap(),
                CausalClass::Timelike
            );
        }
    }

    #[test]
    fn names_resolve() {
        for name in STANDARD_NAMES {
            by_name(name).unwrap();
        }
        assert!(by_name("heisenberg0").is_err());
        assert!(by_name("example3").is_err());
    }
}
