//! Randomized checks of the algebraic and curvature identities that the
//! rest of the crate relies on.
//!
//! Each check draws its samples from a ChaCha8 stream seeded by the caller,
//! with coordinates uniform in `[-1, 1]`, and reports the worst error seen.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{AlgebraVector, MetricNilpotentAlgebra};
use crate::geometry::{connection_unchecked, curvature_unchecked, exp_tj, jacobi_operator_with, GeodesicIC};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub samples: usize,
    pub max_error: f64,
    pub tol: f64,
    /// False for identities that only hold on pseudo-H algebras, when run on
    /// one that is not.
    pub applicable: bool,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        !self.applicable || self.max_error <= self.tol
    }
}

impl fmt::Display for IdentityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.applicable {
            return write!(f, "{:<28} n/a", self.name);
        }
        let verdict = if self.passed() { "ok" } else { "FAIL" };
        write!(
            f,
            "{:<28} {:<4} max err {:.3e} (tol {:.0e}, {} samples)",
            self.name, verdict, self.max_error, self.tol, self.samples
        )
    }
}

struct Sampler<'a> {
    alg: &'a MetricNilpotentAlgebra,
    rng: ChaCha8Rng,
}

impl<'a> Sampler<'a> {
    fn new(alg: &'a MetricNilpotentAlgebra, seed: u64) -> Self {
        Self {
            alg,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn coords(&mut self, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |_, _| self.rng.gen_range(-1.0..=1.0))
    }

    fn scalar(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..=hi)
    }

    fn z(&mut self) -> DVector<f64> {
        self.coords(self.alg.dim_center())
    }

    fn v(&mut self) -> DVector<f64> {
        self.coords(self.alg.dim_v())
    }

    fn full(&mut self) -> AlgebraVector {
        AlgebraVector {
            z_part: self.z(),
            v_part: self.v(),
        }
    }
}

fn check<F>(
    alg: &MetricNilpotentAlgebra,
    name: &'static str,
    samples: usize,
    seed: u64,
    tol: f64,
    applicable: bool,
    mut err: F,
) -> IdentityCheck
where
    F: FnMut(&mut Sampler) -> f64,
{
    let mut max_error: f64 = 0.0;
    if applicable {
        let mut s = Sampler::new(alg, seed);
        for _ in 0..samples {
            let e = err(&mut s);
            max_error = if e.is_nan() { f64::INFINITY } else { max_error.max(e) };
        }
    }
    IdentityCheck {
        name,
        samples,
        max_error,
        tol,
        applicable,
    }
}

fn diff(u: &AlgebraVector, w: &AlgebraVector) -> f64 {
    (u - w).max_abs()
}

/// `max |J_z² + ⟨z,z⟩ I|` over `samples` random central `z`; meaningful on
/// pseudo-H algebras only.
pub fn j_square_check(alg: &MetricNilpotentAlgebra, samples: usize, seed: u64, tol: f64) -> IdentityCheck {
    let q = alg.dim_v();
    check(alg, "j_square", samples, seed, tol, alg.pseudo_h(), |s| {
        let z = s.z();
        let j = alg.j_of(&z);
        (&j * &j + DMatrix::identity(q, q) * alg.inner_z(&z, &z)).amax()
    })
}

/// Runs every identity on `samples` random instances each. The four
/// pseudo-H identities are marked not applicable on other algebras.
pub fn identity_suite(alg: &MetricNilpotentAlgebra, samples: usize, seed: u64, tol: f64) -> Vec<IdentityCheck> {
    let ph = alg.pseudo_h();
    let q = alg.dim_v();
    // distinct stream per check, so adding a check does not reshuffle others
    let mut k = 0u64;
    let mut next = || {
        k += 1;
        seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k)
    };
    let br = |x: &DVector<f64>, y: &DVector<f64>| alg.bracket_v(x, y);

    let mut out = vec![
        check(alg, "adjoint_definition", samples, next(), tol, true, |s| {
            let (z, x, y) = (s.z(), s.v(), s.v());
            (alg.inner_v(&(alg.j_of(&z) * &x), &y) - alg.inner_z(&z, &br(&x, &y))).abs()
        }),
        check(alg, "j_skew_adjoint", samples, next(), tol, true, |s| {
            let (j, x, y) = (alg.j_of(&s.z()), s.v(), s.v());
            (alg.inner_v(&(&j * &x), &y) + alg.inner_v(&x, &(&j * &y))).abs()
        }),
        j_square_check(alg, samples, next(), tol),
        check(alg, "jz_jw_inner", samples, next(), tol, ph, |s| {
            let (z, w, x) = (s.z(), s.z(), s.v());
            let lhs = alg.inner_v(&(alg.j_of(&z) * &x), &(alg.j_of(&w) * &x));
            (lhs - alg.inner_z(&z, &w) * alg.inner_v(&x, &x)).abs()
        }),
        check(alg, "jz_isometry", samples, next(), tol, ph, |s| {
            let (z, x, y) = (s.z(), s.v(), s.v());
            let j = alg.j_of(&z);
            (alg.inner_v(&(&j * &x), &(&j * &y)) - alg.inner_z(&z, &z) * alg.inner_v(&x, &y)).abs()
        }),
        check(alg, "anticommutator", samples, next(), tol, ph, |s| {
            let (z, w) = (s.z(), s.z());
            let (jz, jw) = (alg.j_of(&z), alg.j_of(&w));
            (&jz * &jw + &jw * &jz + DMatrix::identity(q, q) * (2.0 * alg.inner_z(&z, &w))).amax()
        }),
        check(alg, "bracket_x_jzx", samples, next(), tol, ph, |s| {
            let (z, x) = (s.z(), s.v());
            (br(&x, &(alg.j_of(&z) * &x)) - &z * alg.inner_v(&x, &x)).amax()
        }),
        check(alg, "torsion_free", samples, next(), tol, true, |s| {
            let (x, y) = (s.full(), s.full());
            let lhs = connection_unchecked(alg, &x, &y) - connection_unchecked(alg, &y, &x);
            diff(&lhs, &alg.bracket_unchecked(&x, &y))
        }),
        check(alg, "metric_compatible", samples, next(), tol, true, |s| {
            let (x, y, z) = (s.full(), s.full(), s.full());
            (alg.inner_unchecked(&connection_unchecked(alg, &x, &y), &z)
                + alg.inner_unchecked(&y, &connection_unchecked(alg, &x, &z)))
            .abs()
        }),
    ];

    let r4 = |x: &AlgebraVector, y: &AlgebraVector, z: &AlgebraVector, w: &AlgebraVector| {
        alg.inner_unchecked(&curvature_unchecked(alg, x, y, z), w)
    };
    out.push(check(alg, "curvature_skew_xy", samples, next(), tol, true, |s| {
        let (x, y, z, w) = (s.full(), s.full(), s.full(), s.full());
        (r4(&x, &y, &z, &w) + r4(&y, &x, &z, &w)).abs()
    }));
    out.push(check(alg, "curvature_skew_zw", samples, next(), tol, true, |s| {
        let (x, y, z, w) = (s.full(), s.full(), s.full(), s.full());
        (r4(&x, &y, &z, &w) + r4(&x, &y, &w, &z)).abs()
    }));
    out.push(check(alg, "curvature_pair_symmetry", samples, next(), tol, true, |s| {
        let (x, y, z, w) = (s.full(), s.full(), s.full(), s.full());
        (r4(&x, &y, &z, &w) - r4(&z, &w, &x, &y)).abs()
    }));
    out.push(check(alg, "first_bianchi", samples, next(), tol, true, |s| {
        let (x, y, z) = (s.full(), s.full(), s.full());
        let sum = curvature_unchecked(alg, &x, &y, &z)
            + curvature_unchecked(alg, &y, &z, &x)
            + curvature_unchecked(alg, &z, &x, &y);
        sum.max_abs()
    }));
    out.push(check(
        alg,
        "jacobi_operator_closed_form",
        samples,
        next(),
        tol,
        true,
        |s| {
            let (z0, x0) = (s.z(), s.v());
            let ic = GeodesicIC::from_velocity(alg, &AlgebraVector { z_part: z0, v_part: x0 })
                .expect("sampled velocity conforms");
            let t = s.scalar(-2.0, 2.0);
            let y = s.full();
            let x_t = exp_tj(alg, &ic, t) * &ic.x0().v_part;
            let vel = AlgebraVector {
                z_part: ic.z0().z_part.clone(),
                v_part: x_t.clone(),
            };
            let reference = curvature_unchecked(alg, &y, &vel, &vel);
            diff(&jacobi_operator_with(alg, &ic, &x_t, &y), &reference) / reference.max_abs().max(1.0)
        },
    ));
    out
}

/// `J_z²` for one probe `z`, with its best scalar fit `λ = tr(J_z²)/q` and
/// the residual `max |J_z² − λ I|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JSquareEntry {
    pub label: String,
    pub z: Vec<f64>,
    pub lambda: f64,
    pub residual: f64,
    /// `−⟨z,z⟩`, the value `λ` takes on pseudo-H algebras.
    pub expected: f64,
}

/// `J_z²` over the probes `z_α` and `z_α ± z_β`.
pub fn j_square_table(alg: &MetricNilpotentAlgebra) -> Vec<JSquareEntry> {
    let (p, q) = (alg.dim_center(), alg.dim_v());
    let unit = |i: usize| {
        let mut e = DVector::zeros(p);
        e[i] = 1.0;
        e
    };
    let mut probes: Vec<(String, DVector<f64>)> = (0..p).map(|i| (format!("z{}", i + 1), unit(i))).collect();
    for i in 0..p {
        for j in i + 1..p {
            probes.push((format!("z{}+z{}", i + 1, j + 1), unit(i) + unit(j)));
            probes.push((format!("z{}-z{}", i + 1, j + 1), unit(i) - unit(j)));
        }
    }
    probes
        .into_iter()
        .map(|(label, z)| {
            let j = alg.j_of(&z);
            let sq = &j * &j;
            let lambda = sq.trace() / q as f64;
            let residual = (&sq - DMatrix::identity(q, q) * lambda).amax();
            JSquareEntry {
                label,
                expected: 0.0 - alg.inner_z(&z, &z),
                z: z.iter().copied().collect(),
                lambda,
                residual,
            }
        })
        .collect()
}
