//! Property tests: algebraic invariants on random algebras, geometric
//! identities checked against independent constructions, and structural
//! properties of both conjugate-point pipelines.

use std::f64::consts::{PI, TAU};

use astro_float::{BigFloat, Consts, RoundingMode};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use pseudoh::analytic::{analytic_conjugate_points, Branch, GeodesicInvariants, SolverConfig};
use pseudoh::catalog::{by_name, example_singular, heisenberg_h_type, STANDARD_NAMES};
use pseudoh::geometry::{connection, curvature, exp_tj, geodesic_velocity, jacobi_operator_along};
use pseudoh::numeric::{
    detect_conjugate_points, endpoint_matrix, integrate_jacobi_basis, jacobi_system_rhs, IntegratorConfig,
};
use pseudoh::ode::{integrate, Method};
use pseudoh::{AlgebraVector, GeodesicIC, MetricNilpotentAlgebra, RawAlgebra};

// ---------------------------------------------------------------- strategies

/// A valid algebra with a non-diagonal indefinite metric on both blocks and
/// dense random structure constants.
fn arb_algebra() -> impl Strategy<Value = MetricNilpotentAlgebra> {
    (1usize..=3, 2usize..=5)
        .prop_flat_map(|(p, q)| {
            (
                Just((p, q)),
                prop::collection::vec(prop::bool::ANY, p + q),
                prop::collection::vec(-0.3f64..0.3, p * p + q * q),
                prop::collection::vec(-2.0f64..2.0, p * q * q),
            )
        })
        .prop_filter_map("degenerate metric", |((p, q), signs, mix, c)| {
            let metric = |n: usize, signs: &[bool], mix: &[f64]| {
                let d = DMatrix::from_fn(n, n, |i, j| {
                    if i == j {
                        if signs[i] {
                            1.0
                        } else {
                            -1.0
                        }
                    } else {
                        0.0
                    }
                });
                let a = DMatrix::<f64>::identity(n, n) + DMatrix::from_column_slice(n, n, mix);
                let g = a.transpose() * d * a;
                (0..n)
                    .map(|i| (0..n).map(|j| g[(i, j)]).collect())
                    .collect::<Vec<Vec<f64>>>()
            };
            let mut raw = RawAlgebra::abelian(p, q);
            raw.metric_center = metric(p, &signs[..p], &mix[..p * p]);
            raw.metric_v = metric(q, &signs[p..], &mix[p * p..]);
            let mut k = 0;
            for a in 0..q {
                for b in a + 1..q {
                    raw.set_bracket(a, b, &c[k * p..(k + 1) * p]);
                    k += 1;
                }
            }
            MetricNilpotentAlgebra::new(&raw).ok()
        })
}

fn catalog_algebra() -> impl Strategy<Value = MetricNilpotentAlgebra> {
    prop::sample::select(STANDARD_NAMES).prop_map(|n| by_name(n).unwrap())
}

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

fn vectors(alg: &MetricNilpotentAlgebra, k: usize) -> impl Strategy<Value = Vec<AlgebraVector>> {
    let (p, q) = (alg.dim_center(), alg.dim_v());
    prop::collection::vec(coords(p + q), k)
        .prop_map(move |vs| vs.into_iter().map(|v| AlgebraVector::new(&v[..p], &v[p..])).collect())
}

fn with_vectors<S: Strategy<Value = MetricNilpotentAlgebra>>(
    algs: S,
    k: usize,
) -> impl Strategy<Value = (MetricNilpotentAlgebra, Vec<AlgebraVector>)> {
    algs.prop_flat_map(move |alg| {
        let vs = vectors(&alg, k);
        (Just(alg), vs)
    })
}

fn ic_of(alg: &MetricNilpotentAlgebra, v: &AlgebraVector) -> GeodesicIC {
    GeodesicIC::from_velocity(alg, v).unwrap()
}

// ------------------------------------------------------------ algebra level

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_bilinear_antisymmetric((alg, v) in with_vectors(arb_algebra(), 3), s in -3.0f64..3.0) {
        let br = |a: &AlgebraVector, b: &AlgebraVector| alg.bracket(a, b).unwrap();
        let lhs = br(&(&v[0] * s + v[1].clone()), &v[2]);
        let rhs = br(&v[0], &v[2]) * s + br(&v[1], &v[2]);
        prop_assert!((&lhs - &rhs).max_abs() < 1e-12 * (1.0 + rhs.max_abs()));
        prop_assert!((br(&v[0], &v[1]) + br(&v[1], &v[0])).max_abs() < 1e-14);
        // brackets are central and the center brackets trivially
        prop_assert!(br(&v[0], &v[1]).v_part.amax() == 0.0);
        prop_assert!(br(&v[0].center_component(), &v[1]).max_abs() == 0.0);
    }

    #[test]
    fn j_is_defined_by_the_metric((alg, v) in with_vectors(arb_algebra(), 3)) {
        let z = v[0].center_component();
        let (x, y) = (v[1].v_component(), v[2].v_component());
        let jx = AlgebraVector::horizontal(alg.dim_center(), alg.j_operator(&z).unwrap() * &x.v_part);
        let lhs = alg.inner(&jx, &y).unwrap();
        let rhs = alg.inner(&z, &alg.bracket(&x, &y).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()));
    }

    /// Curvature against `∇_X ∇_Y Z − ∇_Y ∇_X Z − ∇_[X,Y] Z` assembled from
    /// the connection alone.
    #[test]
    fn curvature_matches_connection_commutator((alg, v) in with_vectors(arb_algebra(), 3)) {
        let nab = |a: &AlgebraVector, b: &AlgebraVector| connection(&alg, a, b).unwrap();
        let (x, y, z) = (&v[0], &v[1], &v[2]);
        let oracle = nab(x, &nab(y, z)) - nab(y, &nab(x, z)) - nab(&alg.bracket(x, y).unwrap(), z);
        let r = curvature(&alg, x, y, z).unwrap();
        prop_assert!((&r - &oracle).max_abs() < 1e-10 * (1.0 + oracle.max_abs()), "{:?} vs {:?}", r, oracle);
    }

    #[test]
    fn torsion_free_and_metric((alg, v) in with_vectors(arb_algebra(), 3)) {
        let nab = |a: &AlgebraVector, b: &AlgebraVector| connection(&alg, a, b).unwrap();
        let (x, y, z) = (&v[0], &v[1], &v[2]);
        let torsion = nab(x, y) - nab(y, x) - alg.bracket(x, y).unwrap();
        prop_assert!(torsion.max_abs() < 1e-12);
        let metric = alg.inner(&nab(x, y), z).unwrap() + alg.inner(y, &nab(x, z)).unwrap();
        prop_assert!(metric.abs() < 1e-10);
    }

    #[test]
    fn first_bianchi((alg, v) in with_vectors(arb_algebra(), 3)) {
        let r = |a: &AlgebraVector, b: &AlgebraVector, c: &AlgebraVector| curvature(&alg, a, b, c).unwrap();
        let (x, y, z) = (&v[0], &v[1], &v[2]);
        prop_assert!((r(x, y, z) + r(y, z, x) + r(z, x, y)).max_abs() < 1e-10);
    }

    /// The closed-form Jacobi operator equals `R(Y, γ̇)γ̇` on arbitrary
    /// algebras, including those using the general matrix exponential.
    #[test]
    fn jacobi_operator_matches_curvature((alg, v) in with_vectors(arb_algebra(), 2), t in -2.0f64..2.0) {
        let ic = ic_of(&alg, &v[0]);
        let vel = geodesic_velocity(&alg, &ic, t);
        let reference = curvature(&alg, &v[1], &vel, &vel).unwrap();
        let closed = jacobi_operator_along(&alg, &ic, t, &v[1]).unwrap();
        prop_assert!((&closed - &reference).max_abs() < 1e-9 * (1.0 + reference.max_abs()));
        // R(γ̇, γ̇)γ̇ = 0
        prop_assert!(jacobi_operator_along(&alg, &ic, t, &vel).unwrap().max_abs() < 1e-9 * (1.0 + vel.max_abs().powi(3)));
    }

    #[test]
    fn exp_tj_one_parameter_group((alg, v) in with_vectors(catalog_algebra(), 1), s in -3.0f64..3.0, t in -3.0f64..3.0) {
        let ic = ic_of(&alg, &v[0]);
        let lhs = exp_tj(&alg, &ic, s + t);
        let rhs = exp_tj(&alg, &ic, s) * exp_tj(&alg, &ic, t);
        prop_assert!((&lhs - &rhs).amax() < 1e-9 * (1.0 + lhs.amax()));
        prop_assert!((exp_tj(&alg, &ic, 0.0) - DMatrix::identity(alg.dim_v(), alg.dim_v())).amax() == 0.0);
    }

    /// `γ̇(t) = z0 + e^{tJ} x0` solves `dγ̇/dt + ∇_γ̇ γ̇ = 0` (central
    /// difference in `t`) and, on pseudo-H algebras, keeps its length.
    #[test]
    fn geodesic_equation((alg, v) in with_vectors(catalog_algebra(), 1), t in -2.0f64..2.0) {
        let ic = ic_of(&alg, &v[0]);
        let h = 1e-4;
        let d = (geodesic_velocity(&alg, &ic, t + h) - geodesic_velocity(&alg, &ic, t - h)) * (0.5 / h);
        let vel = geodesic_velocity(&alg, &ic, t);
        let residual = d + connection(&alg, &vel, &vel).unwrap();
        prop_assert!(residual.max_abs() < 1e-6, "residual {}", residual.max_abs());
        if alg.pseudo_h() {
            prop_assert!((alg.inner(&vel, &vel).unwrap() - ic.g()).abs() < 1e-10);
        }
    }

    #[test]
    fn arbitrary_algebra_geodesic_equation((alg, v) in with_vectors(arb_algebra(), 1), t in -1.0f64..1.0) {
        let ic = ic_of(&alg, &v[0]);
        let h = 1e-4;
        let d = (geodesic_velocity(&alg, &ic, t + h) - geodesic_velocity(&alg, &ic, t - h)) * (0.5 / h);
        let vel = geodesic_velocity(&alg, &ic, t);
        prop_assert!((d + connection(&alg, &vel, &vel).unwrap()).max_abs() < 1e-5);
    }
}

// ------------------------------------------------------- analytic pipeline

fn times(points: &[pseudoh::ConjugatePoint]) -> Vec<f64> {
    points.iter().map(|p| p.t0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Scaling the initial velocity by `s` scales every conjugate time by
    /// `1/s` and leaves branches and multiplicities alone.
    #[test]
    fn analytic_scaling_covariance(a in prop_oneof![0.2f64..3.0, -3.0f64..-0.2], b in prop_oneof![0.2f64..3.0, -3.0f64..-0.2], s in 0.3f64..3.0) {
        let (p, q) = (3, 4);
        let base = GeodesicInvariants::new(a, b, p, q);
        let scaled = GeodesicInvariants::new(s * s * a, s * s * b, p, q);
        let w = (0.0, 30.0);
        let cfg = SolverConfig::default();
        let pts = analytic_conjugate_points(&base, w, &cfg).unwrap();
        let spts = analytic_conjugate_points(&scaled, (0.0, 30.0 / s), &cfg).unwrap();
        prop_assert_eq!(pts.len(), spts.len());
        for (x, y) in pts.iter().zip(&spts) {
            prop_assert!((x.t0 - s * y.t0).abs() < 1e-9 * x.t0.abs().max(1.0));
            prop_assert_eq!(x.multiplicity, y.multiplicity);
            prop_assert_eq!(x.branch, y.branch);
        }
    }

    /// Reversing time along the geodesic: the conjugate set in `(−T, T)` is
    /// symmetric about 0.
    #[test]
    fn analytic_time_symmetry(a in prop_oneof![0.2f64..3.0, -3.0f64..-0.2, Just(0.0)], b in prop_oneof![0.2f64..3.0, -3.0f64..-0.2]) {
        let inv = GeodesicInvariants::new(a, b, 3, 4);
        let pts = analytic_conjugate_points(&inv, (-25.0, 25.0), &SolverConfig::default()).unwrap();
        let ts = times(&pts);
        let mut neg: Vec<f64> = ts.iter().filter(|t| **t < 0.0).map(|t| -t).collect();
        let pos: Vec<f64> = ts.iter().copied().filter(|t| *t > 0.0).collect();
        neg.reverse();
        prop_assert_eq!(neg.len(), pos.len());
        for (x, y) in neg.iter().zip(&pos) {
            prop_assert!((x - y).abs() < 1e-9 * y.max(1.0));
        }
    }

    /// Riemannian case: `b u cos u = g sin u` with `0 < b < g` has exactly
    /// one root in each `(kπ, (k+1)π)`, `k ≥ 1`, i.e. one A1 point between
    /// consecutive lattice points.
    #[test]
    fn riemannian_a1_interlaces_lattice(a in 0.1f64..4.0, b in 0.1f64..4.0) {
        let inv = GeodesicInvariants::new(a, b, 1, 2);
        let period = TAU / a.sqrt();
        let pts = analytic_conjugate_points(&inv, (0.0, 6.0 * period), &SolverConfig::default()).unwrap();
        let a1 = pts.iter().filter(|p| p.branch == Branch::A1).map(|p| p.t0).collect::<Vec<_>>();
        prop_assert_eq!(a1.len(), 5);
        for (k, t) in a1.iter().enumerate() {
            let cell = t / period;
            prop_assert!(cell > (k + 1) as f64 && cell < (k + 2) as f64, "A1 point {} in cell {}", t, cell);
        }
    }
}

const PREC: usize = 256;

/// `b u cos u − g sin u` at `u = αt/2`, in 256-bit arithmetic.
fn a1_big(a: f64, b: f64, t: f64) -> BigFloat {
    let rm = RoundingMode::ToEven;
    let mut cc = Consts::new().unwrap();
    let big = |x: f64| BigFloat::from_f64(x, PREC);
    let u = big(a.sqrt()).mul(&big(t), PREC, rm).mul(&big(0.5), PREC, rm);
    let lhs = big(b).mul(&u, PREC, rm).mul(&u.cos(PREC, rm, &mut cc), PREC, rm);
    lhs.sub(&big(a + b).mul(&u.sin(PREC, rm, &mut cc), PREC, rm), PREC, rm)
}

/// `b u cosh u − g sinh u` at `u = βt/2`, in 256-bit arithmetic.
fn b1_big(a: f64, b: f64, t: f64) -> BigFloat {
    let rm = RoundingMode::ToEven;
    let mut cc = Consts::new().unwrap();
    let big = |x: f64| BigFloat::from_f64(x, PREC);
    let u = big((-a).sqrt()).mul(&big(t), PREC, rm).mul(&big(0.5), PREC, rm);
    let lhs = big(b).mul(&u, PREC, rm).mul(&u.cosh(PREC, rm, &mut cc), PREC, rm);
    lhs.sub(&big(a + b).mul(&u.sinh(PREC, rm, &mut cc), PREC, rm), PREC, rm)
}

fn sign_changes(f: impl Fn(f64) -> BigFloat, t: f64, delta: f64) -> bool {
    let (lo, hi) = (f(t - delta), f(t + delta));
    (lo.is_negative() && hi.is_positive()) || (lo.is_positive() && hi.is_negative()) || f(t).is_zero()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Each double-precision root brackets a sign change of the defining
    /// function when it is re-evaluated in extended precision.
    #[test]
    fn a1_roots_certified_in_extended_precision(a in 0.2f64..3.0, b in prop_oneof![0.2f64..3.0, -3.0f64..-0.2]) {
        let inv = GeodesicInvariants::new(a, b, 1, 2);
        let pts = analytic_conjugate_points(&inv, (0.0, 40.0), &SolverConfig::default()).unwrap();
        for p in pts.iter().filter(|p| p.branch == Branch::A1) {
            prop_assert!(sign_changes(|t| a1_big(a, b, t), p.t0, 1e-12 * p.t0), "A1 root {} not certified", p.t0);
        }
    }

    #[test]
    fn b1_roots_certified_in_extended_precision(a in -3.0f64..-0.2, b in -3.0f64..-0.2) {
        let inv = GeodesicInvariants::new(a, b, 3, 4);
        let pts = analytic_conjugate_points(&inv, (0.0, 40.0), &SolverConfig::default()).unwrap();
        for p in pts.iter().filter(|p| matches!(p.branch, Branch::B1 | Branch::B1B2)) {
            prop_assert!(sign_changes(|t| b1_big(a, b, t), p.t0, 1e-12 * p.t0), "B1 root {} not certified", p.t0);
        }
    }
}

// -------------------------------------------------------- numeric pipeline

fn random_ic(alg: &MetricNilpotentAlgebra, z: &[f64], x: &[f64]) -> GeodesicIC {
    GeodesicIC::new(alg, &z[..alg.dim_center()], &x[..alg.dim_v()]).unwrap()
}

/// One Jacobi field integrated through the public right-hand side, as a
/// stacked `[Y; P]` vector.
fn integrate_single(alg: &MetricNilpotentAlgebra, ic: &GeodesicIC, p0: &DVector<f64>, t: f64) -> DVector<f64> {
    let n = alg.dim();
    let p = alg.dim_center();
    let mut s0 = DMatrix::zeros(2 * n, 1);
    s0.view_mut((n, 0), (n, 1)).copy_from(p0);
    let out = integrate(
        |tt, s| {
            let y = AlgebraVector::from_flat(p, &s.view((0, 0), (n, 1)).column(0).into_owned());
            let pp = AlgebraVector::from_flat(p, &s.view((n, 0), (n, 1)).column(0).into_owned());
            let (dy, dp) = jacobi_system_rhs(alg, ic, tt, &y, &pp).unwrap();
            let mut d = DMatrix::zeros(2 * n, 1);
            d.view_mut((0, 0), (n, 1)).copy_from(&dy.to_flat());
            d.view_mut((n, 0), (n, 1)).copy_from(&dp.to_flat());
            d
        },
        0.0,
        &s0,
        t,
        Method::default(),
    )
    .unwrap();
    out.column(0).into_owned()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Linearity of the flow, and agreement between the tabulated generator
    /// used for `M(t)` and the public right-hand side.
    #[test]
    fn flow_is_linear(
        alg in catalog_algebra(),
        z in coords(3), x in coords(12), u in coords(15), w in coords(15),
        t in 0.1f64..4.0,
    ) {
        let ic = random_ic(&alg, &z, &x);
        let n = alg.dim();
        let u = DVector::from_column_slice(&u[..n]);
        let w = DVector::from_column_slice(&w[..n]);
        let yu = integrate_single(&alg, &ic, &u, t);
        let yw = integrate_single(&alg, &ic, &w, t);
        let yuw = integrate_single(&alg, &ic, &(&u + &w), t);
        let scale = 1.0 + yuw.amax();
        prop_assert!((&yuw - &yu - &yw).amax() < 1e-9 * scale);
        let m = endpoint_matrix(&alg, &ic, t, Method::default()).unwrap();
        prop_assert!((&m.m * &u - yu.rows(0, n)).amax() < 1e-8 * (1.0 + yu.amax()));
    }

    /// `Y(t) = t γ̇(t)` is the Jacobi field with `Y(0) = 0`, `∇Y(0) = γ̇(0)`.
    #[test]
    fn tangential_jacobi_field(alg in catalog_algebra(), z in coords(3), x in coords(12), t in 0.1f64..4.0) {
        let ic = random_ic(&alg, &z, &x);
        let m = endpoint_matrix(&alg, &ic, t, Method::default()).unwrap();
        let y = &m.m * ic.velocity().to_flat();
        let expected = geodesic_velocity(&alg, &ic, t).to_flat() * t;
        prop_assert!((&y - &expected).amax() < 1e-8 * (1.0 + expected.amax()));
    }

    /// Conjugate times depend only on `⟨z0,z0⟩`, `⟨x0,x0⟩` and the
    /// dimensions: rotating `x0` inside a Heisenberg algebra does not move
    /// them.
    #[test]
    fn numeric_depends_on_invariants_only(theta in 0.1f64..3.0) {
        let alg = heisenberg_h_type(2);
        let cfg = IntegratorConfig::default();
        let w = (0.1, 14.0);
        let ic1 = GeodesicIC::new(&alg, &[1.0], &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let ic2 = GeodesicIC::new(&alg, &[1.0], &[0.0, theta.cos(), 0.0, theta.sin()]).unwrap();
        let p1 = detect_conjugate_points(&alg, &ic1, w, &cfg).unwrap();
        let p2 = detect_conjugate_points(&alg, &ic2, w, &cfg).unwrap();
        prop_assert_eq!(p1.len(), p2.len());
        for (a, b) in p1.iter().zip(&p2) {
            prop_assert!((a.t0 - b.t0).abs() < 1e-6);
            prop_assert_eq!(a.multiplicity, b.multiplicity);
        }
    }
}

/// `∇_γ̇ ∇_γ̇ Y + R_γ̇ Y` from five-point central differences of the integrated state,
/// with `∇_γ̇ U = dU/dt + Γ(γ̇, U)` in the left-invariant frame.
#[test]
fn jacobi_residual_on_scan_grid() {
    for (alg, z0, x0) in [
        (heisenberg_h_type(1), vec![1.0], vec![0.6, -0.3]),
        (example_singular(1), vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0, 1.0]),
        (example_singular(1), vec![1.0, 1.0, 0.2], vec![0.3, 0.5, -0.4, 1.0]),
    ] {
        let ic = GeodesicIC::new(&alg, &z0, &x0).unwrap();
        let n = alg.dim();
        let p = alg.dim_center();
        let h = 1e-3;
        let fields = |t: f64| -> Vec<(AlgebraVector, AlgebraVector)> {
            (0..n)
                .map(|i| {
                    let mut e = DVector::zeros(n);
                    e[i] = 1.0;
                    let s = integrate_single(&alg, &ic, &e, t);
                    (
                        AlgebraVector::from_flat(p, &s.rows(0, n).into_owned()),
                        AlgebraVector::from_flat(p, &s.rows(n, n).into_owned()),
                    )
                })
                .collect()
        };
        let mut worst: f64 = 0.0;
        let mut ymax: f64 = 0.0;
        for k in 1..=8 {
            let t = 0.4 * k as f64;
            let (m2, m1, now, p1, p2) = (
                fields(t - 2.0 * h),
                fields(t - h),
                fields(t),
                fields(t + h),
                fields(t + 2.0 * h),
            );
            let vel = geodesic_velocity(&alg, &ic, t);
            // five-point stencil, O(h^4)
            type Field = (AlgebraVector, AlgebraVector);
            let diff = |f: &dyn Fn(&[Field]) -> AlgebraVector| {
                (f(&m2) - f(&p2) + (f(&p1) - f(&m1)) * 8.0) * (1.0 / (12.0 * h))
            };
            for i in 0..n {
                let (y, pp) = &now[i];
                // P = ∇Y
                let dy = diff(&|v| v[i].0.clone());
                let cov_y = dy + connection(&alg, &vel, y).unwrap();
                // ∇P + R Y = 0
                let dp = diff(&|v| v[i].1.clone());
                let cov_p = dp + connection(&alg, &vel, pp).unwrap();
                let res = cov_p + jacobi_operator_along(&alg, &ic, t, y).unwrap();
                worst = worst.max(res.max_abs()).max((&cov_y - pp).max_abs());
                ymax = ymax.max(y.max_abs());
            }
        }
        assert!(worst < 1e-6 * ymax.max(1.0), "residual {worst} vs max|Y| {ymax}");
    }
}

/// The pure-center geodesic of the Heisenberg group solved by hand: the
/// center block is `t`, the complement block is `2 sin(t/2) e^{tJ/2}`.
#[test]
fn pure_center_block_by_hand() {
    let alg = heisenberg_h_type(1);
    let ic = GeodesicIC::new(&alg, &[1.0], &[0.0, 0.0]).unwrap();
    let j = alg.j_operator(&alg.z_basis(0)).unwrap();
    for t in [PI, 2.5, 5.0] {
        let rot = DMatrix::<f64>::identity(2, 2) * (t / 2.0).cos() + &j * (t / 2.0).sin();
        let mut expected = DMatrix::zeros(3, 3);
        expected[(0, 0)] = t;
        expected
            .view_mut((1, 1), (2, 2))
            .copy_from(&(rot * (2.0 * (t / 2.0).sin())));
        let m = endpoint_matrix(&alg, &ic, t, Method::default()).unwrap();
        assert!((&m.m - &expected).amax() < 1e-8, "t = {t}: {} vs {expected}", m.m);
    }
}

#[test]
fn endpoint_matrix_near_zero() {
    let alg = example_singular(1);
    let ic = GeodesicIC::new(&alg, &[0.3, 1.0, 0.0], &[1.0, 0.5, 0.0, 1.0]).unwrap();
    let t = 1e-5;
    let m = endpoint_matrix(&alg, &ic, t, Method::default()).unwrap();
    assert!((&m.m / t - DMatrix::<f64>::identity(7, 7)).amax() < 1e-4);
    assert!(m.smin < 2e-5);
}

#[test]
fn grid_refinement_is_stable() {
    let alg = heisenberg_h_type(1);
    let ic = GeodesicIC::new(&alg, &[1.0], &[1.0, 0.0]).unwrap();
    let coarse = IntegratorConfig::default();
    let fine = IntegratorConfig {
        scan_points_per_period: 128,
        ..coarse
    };
    let w = (0.0, 10.0);
    let a = integrate_jacobi_basis(&alg, &ic, w, &coarse).unwrap();
    let b = integrate_jacobi_basis(&alg, &ic, w, &fine).unwrap();
    for m in &a {
        let other = b.iter().find(|x| (x.t - m.t).abs() < 1e-12).expect("shared grid point");
        assert!(
            (m.smin - other.smin).abs() < 1e-9,
            "t = {}: {} vs {}",
            m.t,
            m.smin,
            other.smin
        );
    }
}

#[test]
fn rk4_agrees_with_rk45() {
    let alg = heisenberg_h_type(1);
    let ic = GeodesicIC::new(&alg, &[1.0], &[1.0, 0.0]).unwrap();
    let rk4 = IntegratorConfig {
        method: Method::Rk4 { step: 2e-3 },
        ..Default::default()
    };
    let w = (0.1, 13.0);
    let a = detect_conjugate_points(&alg, &ic, w, &IntegratorConfig::default()).unwrap();
    let b = detect_conjugate_points(&alg, &ic, w, &rk4).unwrap();
    assert_eq!(times(&a).len(), times(&b).len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x.t0 - y.t0).abs() < 1e-7);
    }
}

#[test]
fn numeric_detection_is_deterministic() {
    let alg = example_singular(1);
    let ic = GeodesicIC::new(&alg, &[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0, 1.0]).unwrap();
    let run = || detect_conjugate_points(&alg, &ic, (0.1, 4.0), &IntegratorConfig::default()).unwrap();
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    assert!(a.iter().zip(&b).all(|(x, y)| x.t0.to_bits() == y.t0.to_bits()));
}
