//! Left-invariant Levi-Civita connection, curvature and Jacobi operator, all
//! in the left-trivialization `T_g N ≅ n`.
//!
//! For central `z, z'` and `e, e' ∈ v`:
//!
//! ```text
//! ∇_z z' = 0,   ∇_z e = ∇_e z = −½ J_z e,   ∇_e e' = ½ [e, e']
//! ```
//!
//! Geodesics through the identity have velocity `γ̇(t) = z0 + e^{tJ} x0` with
//! `J = J_{z0}`; no position integrator is provided.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{numerical_rank, AlgebraVector, CausalClass, MetricNilpotentAlgebra, NULL_TOL};
use crate::error::{Error, Result};

/// Initial velocity `z0 + x0` of a geodesic through the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicIC {
    z0: AlgebraVector,
    x0: AlgebraVector,
    a: f64,
    b: f64,
    j: DMatrix<f64>,
}

impl GeodesicIC {
    /// Builds initial data from center coordinates `z0` and complement
    /// coordinates `x0`.
    pub fn new(alg: &MetricNilpotentAlgebra, z0: &[f64], x0: &[f64]) -> Result<Self> {
        let z0 = alg.central(z0)?;
        let x0 = alg.horizontal(x0)?;
        let a = alg.inner_unchecked(&z0, &z0);
        let b = alg.inner_unchecked(&x0, &x0);
        let j = alg.j_of(&z0.z_part);
        Ok(Self { z0, x0, a, b, j })
    }

    /// Splits a full velocity vector into its central and complement parts.
    pub fn from_velocity(alg: &MetricNilpotentAlgebra, v: &AlgebraVector) -> Result<Self> {
        alg.check(v)?;
        Self::new(alg, v.z_part.as_slice(), v.v_part.as_slice())
    }

    /// The geodesic with velocity multiplied by `s`.
    pub fn scaled(&self, alg: &MetricNilpotentAlgebra, s: f64) -> Self {
        Self::new(alg, (&self.z0.z_part * s).as_slice(), (&self.x0.v_part * s).as_slice())
            .expect("scaling preserves shape")
    }

    pub fn z0(&self) -> &AlgebraVector {
        &self.z0
    }

    pub fn x0(&self) -> &AlgebraVector {
        &self.x0
    }

    /// `⟨z0, z0⟩`
    pub fn a(&self) -> f64 {
        self.a
    }

    /// `⟨x0, x0⟩`
    pub fn b(&self) -> f64 {
        self.b
    }

    /// `⟨γ̇, γ̇⟩ = a + b`
    pub fn g(&self) -> f64 {
        self.a + self.b
    }

    /// `J = J_{z0}`
    pub fn j(&self) -> &DMatrix<f64> {
        &self.j
    }

    pub fn velocity(&self) -> AlgebraVector {
        &self.z0 + &self.x0
    }

    pub fn center_class(&self) -> CausalClass {
        CausalClass::classify(self.a, self.z0.coord_norm(), NULL_TOL)
    }
}

/// `∇_X Y` for left-invariant fields.
pub fn connection(alg: &MetricNilpotentAlgebra, x: &AlgebraVector, y: &AlgebraVector) -> Result<AlgebraVector> {
    alg.check(x)?;
    alg.check(y)?;
    Ok(connection_unchecked(alg, x, y))
}

pub(crate) fn connection_unchecked(
    alg: &MetricNilpotentAlgebra,
    x: &AlgebraVector,
    y: &AlgebraVector,
) -> AlgebraVector {
    // ∇_{zX} xY + ∇_{xX} zY = −½ (J_{zX} xY + J_{zY} xX)
    let v = (alg.j_of(&x.z_part) * &y.v_part + alg.j_of(&y.z_part) * &x.v_part) * -0.5;
    let z = alg.bracket_v(&x.v_part, &y.v_part) * 0.5;
    AlgebraVector { z_part: z, v_part: v }
}

/// `R(X, Y) Z`, with the convention `R(X,Y) = [∇_X, ∇_Y] − ∇_{[X,Y]}`.
///
/// Each argument is split into its central and complement part and the
/// eight resulting terms are summed (two of them follow from antisymmetry in
/// the first pair of slots).
pub fn curvature(
    alg: &MetricNilpotentAlgebra,
    x: &AlgebraVector,
    y: &AlgebraVector,
    z: &AlgebraVector,
) -> Result<AlgebraVector> {
    alg.check(x)?;
    alg.check(y)?;
    alg.check(z)?;
    Ok(curvature_unchecked(alg, x, y, z))
}

pub(crate) fn curvature_unchecked(
    alg: &MetricNilpotentAlgebra,
    x: &AlgebraVector,
    y: &AlgebraVector,
    z: &AlgebraVector,
) -> AlgebraVector {
    let (p, q) = (alg.dim_center(), alg.dim_v());
    let jx = alg.j_of(&x.z_part);
    let jy = alg.j_of(&y.z_part);
    let jz = alg.j_of(&z.z_part);
    let (ex, ey, ez) = (&x.v_part, &y.v_part, &z.v_part);
    let br = |u: &DVector<f64>, w: &DVector<f64>| alg.bracket_v(u, w);

    let mut v_out = DVector::<f64>::zeros(q);
    let mut z_out = DVector::<f64>::zeros(p);

    // R(z, z') e = ¼ (J_z J_z' − J_z' J_z) e
    v_out += (&jx * (&jy * ez) - &jy * (&jx * ez)) * 0.25;
    // R(z, e) z' = ¼ J_z J_z' e
    v_out += (&jx * (&jz * ey)) * 0.25;
    // R(e, z) z' = −¼ J_z J_z' e
    v_out -= (&jy * (&jz * ex)) * 0.25;
    // R(z, e) e' = ¼ [e, J_z e']
    z_out += br(ey, &(&jx * ez)) * 0.25;
    // R(e, z) e' = −¼ [e, J_z e']
    z_out -= br(ex, &(&jy * ez)) * 0.25;
    // R(e, e') z = −¼ ([e, J_z e'] + [J_z e, e'])
    z_out -= (br(ex, &(&jz * ey)) + br(&(&jz * ex), ey)) * 0.25;
    // R(e, e') e'' = ¼ (J_{[e,e'']} e' − J_{[e',e'']} e) + ½ J_{[e,e']} e''
    let j_xz = alg.j_of(&br(ex, ez));
    let j_yz = alg.j_of(&br(ey, ez));
    let j_xy = alg.j_of(&br(ex, ey));
    v_out += (&j_xz * ey - &j_yz * ex) * 0.25 + (&j_xy * ez) * 0.5;

    AlgebraVector {
        z_part: z_out,
        v_part: v_out,
    }
}

/// `e^{tJ}` with `J = J_{z0}`.
///
/// On pseudo-H algebras `J² = −⟨z0,z0⟩ I`, so the exponential is a rotation,
/// a boost, or `I + tJ` depending on the causal class of `z0`. Other algebras
/// use a general Padé scaling-and-squaring exponential.
pub fn exp_tj(alg: &MetricNilpotentAlgebra, ic: &GeodesicIC, t: f64) -> DMatrix<f64> {
    let q = alg.dim_v();
    let ident = DMatrix::<f64>::identity(q, q);
    if !alg.pseudo_h() {
        return (ic.j() * t).exp();
    }
    let a = ic.a();
    match ic.center_class() {
        CausalClass::Timelike => {
            let w = a.sqrt();
            ident * (w * t).cos() + ic.j() * ((w * t).sin() / w)
        }
        CausalClass::Spacelike => {
            let w = (-a).sqrt();
            ident * (w * t).cosh() + ic.j() * ((w * t).sinh() / w)
        }
        CausalClass::Null => ident + ic.j() * t,
    }
}

/// `γ̇(t) = z0 + e^{tJ} x0` in left-trivialized coordinates.
pub fn geodesic_velocity(alg: &MetricNilpotentAlgebra, ic: &GeodesicIC, t: f64) -> AlgebraVector {
    let x_t = exp_tj(alg, ic, t) * &ic.x0().v_part;
    AlgebraVector {
        z_part: ic.z0().z_part.clone(),
        v_part: x_t,
    }
}

/// `R_γ̇(Y) = R(Y, γ̇(t)) γ̇(t)` via the closed expression in `z`, `x`,
/// `x' = e^{tJ} x0` and `J = J_{z0}`, where `Y = z + x`.
pub fn jacobi_operator_along(
    alg: &MetricNilpotentAlgebra,
    ic: &GeodesicIC,
    t: f64,
    y: &AlgebraVector,
) -> Result<AlgebraVector> {
    alg.check(y)?;
    let x_t = exp_tj(alg, ic, t) * &ic.x0().v_part;
    Ok(jacobi_operator_with(alg, ic, &x_t, y))
}

/// Same as [`jacobi_operator_along`] with `x' = e^{tJ} x0` supplied.
pub(crate) fn jacobi_operator_with(
    alg: &MetricNilpotentAlgebra,
    ic: &GeodesicIC,
    x_t: &DVector<f64>,
    y: &AlgebraVector,
) -> AlgebraVector {
    let j = ic.j();
    let jz = alg.j_of(&y.z_part);
    let x = &y.v_part;
    let br = |u: &DVector<f64>, w: &DVector<f64>| alg.bracket_v(u, w);

    let j_xt = j * x_t;
    let jz_xt = &jz * x_t;
    let v_part = alg.j_of(&br(x, x_t)) * x_t * 0.75 + &jz * &j_xt * 0.5 - j * &jz_xt * 0.25 - j * (j * x) * 0.25;
    let z_part = br(x, &j_xt) * -0.5 + br(x_t, &(j * x)) * 0.25 + br(x_t, &jz_xt) * 0.25;
    AlgebraVector { z_part, v_part }
}

/// Result of [`is_totally_geodesic_subalgebra`].
#[derive(Debug, Clone, PartialEq)]
pub struct SubalgebraCertificate {
    pub closed_under_bracket: bool,
    pub closed_under_connection: bool,
    /// The metric restricted to the span is degenerate. The certificate is
    /// then only indicative: for degenerate submanifolds totally geodesic is
    /// meant in the extended sense, which a Lie-algebra level check does not
    /// fully capture.
    pub degenerate: bool,
    /// Largest relative distance of a bracket or covariant derivative from
    /// the span.
    pub max_residual: f64,
}

impl SubalgebraCertificate {
    pub fn is_totally_geodesic(&self) -> bool {
        self.closed_under_bracket && self.closed_under_connection
    }

    pub fn caveat(&self) -> Option<&'static str> {
        self.degenerate.then_some(
            "span is degenerate; the subalgebra-level check is a sufficient certificate only for nondegenerate spans",
        )
    }
}

/// Checks that `span(basis)` is closed under the bracket and the connection,
/// which makes the corresponding left-invariant distribution totally geodesic.
pub fn is_totally_geodesic_subalgebra(
    alg: &MetricNilpotentAlgebra,
    basis: &[AlgebraVector],
    tol: f64,
) -> Result<SubalgebraCertificate> {
    for b in basis {
        alg.check(b)?;
    }
    let n = alg.dim();
    let k = basis.len();
    if k == 0 {
        return Err(Error::DependentBasis);
    }
    let mut m = DMatrix::<f64>::zeros(n, k);
    for (i, b) in basis.iter().enumerate() {
        m.set_column(i, &b.to_flat());
    }
    if numerical_rank(&m, 1e-10) < k {
        return Err(Error::DependentBasis);
    }
    let svd = m.clone().svd(true, true);
    let pinv = svd.pseudo_inverse(1e-12).map_err(|_| Error::DependentBasis)?;
    let projector = &m * pinv;
    let residual = |w: &AlgebraVector| {
        let f = w.to_flat();
        (&f - &projector * &f).norm() / (1.0 + f.norm())
    };

    let mut bracket_res: f64 = 0.0;
    let mut conn_res: f64 = 0.0;
    for u in basis {
        for w in basis {
            bracket_res = bracket_res.max(residual(&alg.bracket_unchecked(u, w)));
            conn_res = conn_res.max(residual(&connection_unchecked(alg, u, w)));
        }
    }

    let gram = DMatrix::from_fn(k, k, |i, j| alg.inner_unchecked(&basis[i], &basis[j]));
    let degenerate = numerical_rank(&gram, 1e-10) < k;

    Ok(SubalgebraCertificate {
        closed_under_bracket: bracket_res <= tol,
        closed_under_connection: conn_res <= tol,
        degenerate,
        max_residual: bracket_res.max(conn_res),
    })
}
