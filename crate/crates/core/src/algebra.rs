//! Metric 2-step nilpotent Lie algebras `n = z ⊕ v` with a nondegenerate
//! center, the operators `J_z`, and the structural predicates built on them.
//!
//! Elements are stored as a pair of coordinate arrays, one against a basis
//! `z_1..z_p` of the center and one against a basis `e_1..e_q` of its
//! orthogonal complement. Brackets are encoded by a dense tensor
//! `C[a][b][α]` with `[e_a, e_b] = Σ_α C[a][b][α] z_α`; everything central
//! brackets to zero, so 2-step nilpotency holds by construction.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, MetricBlock, Result};

/// Minimum |det| accepted for either metric block.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;
/// Relative cutoff used by [`CausalClass`]: `|⟨u,u⟩| ≤ NULL_TOL·(1 + ‖u‖²)` is null.
pub const NULL_TOL: f64 = 1e-9;
/// Entrywise tolerance used when caching the pseudo-H flag of an algebra.
pub const PSEUDO_H_TOL: f64 = 1e-10;

const SYMMETRY_TOL: f64 = 1e-12;

/// An element of `n = z ⊕ v`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraVector {
    pub z_part: DVector<f64>,
    pub v_part: DVector<f64>,
}

impl AlgebraVector {
    pub fn new(z_part: &[f64], v_part: &[f64]) -> Self {
        Self {
            z_part: DVector::from_column_slice(z_part),
            v_part: DVector::from_column_slice(v_part),
        }
    }

    pub fn zeros(p: usize, q: usize) -> Self {
        Self {
            z_part: DVector::zeros(p),
            v_part: DVector::zeros(q),
        }
    }

    /// A purely central vector.
    pub fn central(z: DVector<f64>, q: usize) -> Self {
        Self {
            z_part: z,
            v_part: DVector::zeros(q),
        }
    }

    /// A vector in the complement `v`.
    pub fn horizontal(p: usize, v: DVector<f64>) -> Self {
        Self {
            z_part: DVector::zeros(p),
            v_part: v,
        }
    }

    /// The `i`-th center basis vector `z_{i+1}`.
    pub fn z_basis(p: usize, q: usize, i: usize) -> Self {
        let mut out = Self::zeros(p, q);
        out.z_part[i] = 1.0;
        out
    }

    /// The `i`-th complement basis vector `e_{i+1}`.
    pub fn v_basis(p: usize, q: usize, i: usize) -> Self {
        let mut out = Self::zeros(p, q);
        out.v_part[i] = 1.0;
        out
    }

    pub fn dim(&self) -> usize {
        self.z_part.len() + self.v_part.len()
    }

    /// Coordinates in the concatenated basis `(z_1..z_p, e_1..e_q)`.
    pub fn to_flat(&self) -> DVector<f64> {
        let p = self.z_part.len();
        let mut out = DVector::zeros(self.dim());
        out.rows_mut(0, p).copy_from(&self.z_part);
        out.rows_mut(p, self.v_part.len()).copy_from(&self.v_part);
        out
    }

    pub fn from_flat(p: usize, flat: &DVector<f64>) -> Self {
        let q = flat.len() - p;
        Self {
            z_part: flat.rows(0, p).into_owned(),
            v_part: flat.rows(p, q).into_owned(),
        }
    }

    pub fn center_component(&self) -> Self {
        Self::central(self.z_part.clone(), self.v_part.len())
    }

    pub fn v_component(&self) -> Self {
        Self::horizontal(self.z_part.len(), self.v_part.clone())
    }

    /// Euclidean norm of the coordinate array (not the indefinite form).
    pub fn coord_norm(&self) -> f64 {
        (self.z_part.norm_squared() + self.v_part.norm_squared()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.z_part.amax().max(self.v_part.amax())
    }

    pub fn is_zero(&self) -> bool {
        self.z_part.iter().chain(self.v_part.iter()).all(|&c| c == 0.0)
    }
}

impl Add for &AlgebraVector {
    type Output = AlgebraVector;
    fn add(self, rhs: &AlgebraVector) -> AlgebraVector {
        AlgebraVector {
            z_part: &self.z_part + &rhs.z_part,
            v_part: &self.v_part + &rhs.v_part,
        }
    }
}

impl Add for AlgebraVector {
    type Output = AlgebraVector;
    fn add(self, rhs: AlgebraVector) -> AlgebraVector {
        &self + &rhs
    }
}

impl Sub for &AlgebraVector {
    type Output = AlgebraVector;
    fn sub(self, rhs: &AlgebraVector) -> AlgebraVector {
        AlgebraVector {
            z_part: &self.z_part - &rhs.z_part,
            v_part: &self.v_part - &rhs.v_part,
        }
    }
}

impl Sub for AlgebraVector {
    type Output = AlgebraVector;
    fn sub(self, rhs: AlgebraVector) -> AlgebraVector {
        &self - &rhs
    }
}

impl Mul<f64> for &AlgebraVector {
    type Output = AlgebraVector;
    fn mul(self, s: f64) -> AlgebraVector {
        AlgebraVector {
            z_part: &self.z_part * s,
            v_part: &self.v_part * s,
        }
    }
}

impl Mul<f64> for AlgebraVector {
    type Output = AlgebraVector;
    fn mul(self, s: f64) -> AlgebraVector {
        &self * s
    }
}

impl Neg for AlgebraVector {
    type Output = AlgebraVector;
    fn neg(self) -> AlgebraVector {
        self * -1.0
    }
}

/// Causal character of a vector. Timelike means a *positive* square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalClass {
    Timelike,
    Null,
    Spacelike,
}

impl CausalClass {
    /// Classifies the value `⟨u,u⟩` of a vector whose coordinate norm is `norm`.
    pub fn classify(square: f64, norm: f64, tol: f64) -> Self {
        let cutoff = tol * (1.0 + norm * norm);
        if square > cutoff {
            CausalClass::Timelike
        } else if square < -cutoff {
            CausalClass::Spacelike
        } else {
            CausalClass::Null
        }
    }
}

impl fmt::Display for CausalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CausalClass::Timelike => "timelike",
            CausalClass::Null => "null",
            CausalClass::Spacelike => "spacelike",
        };
        f.write_str(s)
    }
}

/// Unvalidated algebra description with the full structure tensor
/// `structure[a][b][α]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawAlgebra {
    pub dim_center: usize,
    pub dim_v: usize,
    pub metric_center: Vec<Vec<f64>>,
    pub metric_v: Vec<Vec<f64>>,
    pub structure: Vec<Vec<Vec<f64>>>,
}

impl RawAlgebra {
    /// Zero brackets and identity metrics.
    pub fn abelian(dim_center: usize, dim_v: usize) -> Self {
        let ident = |n: usize| {
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect()
        };
        Self {
            dim_center,
            dim_v,
            metric_center: ident(dim_center),
            metric_v: ident(dim_v),
            structure: vec![vec![vec![0.0; dim_center]; dim_v]; dim_v],
        }
    }

    /// Sets `[e_a, e_b] = Σ_α z[α] z_α` and the mirrored `[e_b, e_a]`.
    pub fn set_bracket(&mut self, a: usize, b: usize, z: &[f64]) {
        self.structure[a][b] = z.to_vec();
        self.structure[b][a] = z.iter().map(|c| -c).collect();
    }
}

/// A validated metric 2-step nilpotent Lie algebra with nondegenerate center.
///
/// Immutable after construction. The operators `J_{z_α}` for the center basis
/// are assembled once and checked against `⟨J_z x, y⟩ = ⟨z, [x, y]⟩`.
#[derive(Debug, Clone)]
pub struct MetricNilpotentAlgebra {
    p: usize,
    q: usize,
    metric_center: DMatrix<f64>,
    metric_v: DMatrix<f64>,
    /// `slices[α][(a, b)] = C[a][b][α]`
    slices: Vec<DMatrix<f64>>,
    j_basis: Vec<DMatrix<f64>>,
    pseudo_h: bool,
}

fn to_matrix(rows: &[Vec<f64>], n: usize, what: &'static str) -> Result<DMatrix<f64>> {
    if rows.len() != n {
        return Err(Error::DimensionMismatch {
            what,
            expected: n,
            got: rows.len(),
        });
    }
    for r in rows {
        if r.len() != n {
            return Err(Error::DimensionMismatch {
                what,
                expected: n,
                got: r.len(),
            });
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn check_metric(m: &DMatrix<f64>, block: MetricBlock) -> Result<()> {
    let scale = 1.0 + m.amax();
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::AsymmetricMetric { block, row: i, col: j });
            }
        }
    }
    let det = m.determinant();
    if det.abs() < DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateMetric { block, det });
    }
    Ok(())
}

impl MetricNilpotentAlgebra {
    /// Validates a raw description.
    pub fn new(raw: &RawAlgebra) -> Result<Self> {
        let (p, q) = (raw.dim_center, raw.dim_v);
        if p == 0 {
            return Err(Error::DimensionMismatch {
                what: "dim_center must be positive",
                expected: 1,
                got: 0,
            });
        }
        if q == 0 {
            return Err(Error::DimensionMismatch {
                what: "dim_v must be positive",
                expected: 1,
                got: 0,
            });
        }
        let metric_center = to_matrix(&raw.metric_center, p, "metric_center size")?;
        let metric_v = to_matrix(&raw.metric_v, q, "metric_v size")?;
        check_metric(&metric_center, MetricBlock::Center)?;
        check_metric(&metric_v, MetricBlock::Complement)?;

        if raw.structure.len() != q {
            return Err(Error::DimensionMismatch {
                what: "structure outer size",
                expected: q,
                got: raw.structure.len(),
            });
        }
        let mut slices = vec![DMatrix::zeros(q, q); p];
        for (a, row) in raw.structure.iter().enumerate() {
            if row.len() != q {
                return Err(Error::DimensionMismatch {
                    what: "structure inner size",
                    expected: q,
                    got: row.len(),
                });
            }
            for (b, zs) in row.iter().enumerate() {
                if zs.len() != p {
                    return Err(Error::DimensionMismatch {
                        what: "structure component count",
                        expected: p,
                        got: zs.len(),
                    });
                }
                for (alpha, &c) in zs.iter().enumerate() {
                    slices[alpha][(a, b)] = c;
                }
            }
        }
        for (alpha, s) in slices.iter().enumerate() {
            let scale = 1.0 + s.amax();
            for a in 0..q {
                for b in a..q {
                    if (s[(a, b)] + s[(b, a)]).abs() > SYMMETRY_TOL * scale {
                        return Err(Error::NonAntisymmetricStructure { a, b, alpha });
                    }
                }
            }
        }

        let gv_inv = metric_v.clone().try_inverse().ok_or(Error::DegenerateMetric {
            block: MetricBlock::Complement,
            det: 0.0,
        })?;
        // ⟨J_z x, y⟩ = xᵀ Jᵀ G_v y must equal xᵀ B_z y, hence J = G_v⁻¹ B_zᵀ.
        let j_basis = (0..p)
            .map(|alpha| {
                let mut b = DMatrix::zeros(q, q);
                for (beta, s) in slices.iter().enumerate() {
                    b += s * metric_center[(beta, alpha)];
                }
                &gv_inv * b.transpose()
            })
            .collect();

        let mut alg = Self {
            p,
            q,
            metric_center,
            metric_v,
            slices,
            j_basis,
            pseudo_h: false,
        };
        alg.adjoint_self_test()?;
        alg.pseudo_h = alg.is_pseudo_h_type(PSEUDO_H_TOL);
        Ok(alg)
    }

    /// Validates and additionally requires the pseudo-H identity (which in
    /// particular forces `dim v` to be even).
    pub fn new_pseudo_h(raw: &RawAlgebra) -> Result<Self> {
        if raw.dim_v % 2 == 1 {
            return Err(Error::OddComplementDimension(raw.dim_v));
        }
        let alg = Self::new(raw)?;
        if !alg.pseudo_h {
            return Err(Error::NotPseudoHType(alg.pseudo_h_defect()));
        }
        Ok(alg)
    }

    fn adjoint_self_test(&self) -> Result<()> {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for alpha in 0..self.p {
            let z = AlgebraVector::z_basis(self.p, self.q, alpha);
            let j = &self.j_basis[alpha];
            for a in 0..self.q {
                let x = AlgebraVector::v_basis(self.p, self.q, a);
                for b in 0..self.q {
                    let y = AlgebraVector::v_basis(self.p, self.q, b);
                    let lhs = (j.column(a).transpose() * &self.metric_v * &y.v_part)[0];
                    let rhs = self.inner_unchecked(&z, &self.bracket_unchecked(&x, &y));
                    worst = worst.max((lhs - rhs).abs());
                    scale = scale.max(rhs.abs());
                }
            }
        }
        if worst > 1e-9 * scale {
            return Err(Error::AdjointSelfTest(worst));
        }
        Ok(())
    }

    pub fn dim_center(&self) -> usize {
        self.p
    }

    pub fn dim_v(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    pub fn metric_center(&self) -> &DMatrix<f64> {
        &self.metric_center
    }

    pub fn metric_v(&self) -> &DMatrix<f64> {
        &self.metric_v
    }

    /// Structure constant `C[a][b][α]`.
    pub fn structure_constant(&self, a: usize, b: usize, alpha: usize) -> f64 {
        self.slices[alpha][(a, b)]
    }

    /// Whether the algebra satisfied the pseudo-H identity at [`PSEUDO_H_TOL`]
    /// when it was built.
    pub fn pseudo_h(&self) -> bool {
        self.pseudo_h
    }

    /// Back to the raw description (full tensor).
    pub fn to_raw(&self) -> RawAlgebra {
        let rows = |m: &DMatrix<f64>| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                .collect()
        };
        RawAlgebra {
            dim_center: self.p,
            dim_v: self.q,
            metric_center: rows(&self.metric_center),
            metric_v: rows(&self.metric_v),
            structure: (0..self.q)
                .map(|a| {
                    (0..self.q)
                        .map(|b| (0..self.p).map(|al| self.slices[al][(a, b)]).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn zero(&self) -> AlgebraVector {
        AlgebraVector::zeros(self.p, self.q)
    }

    pub fn z_basis(&self, i: usize) -> AlgebraVector {
        AlgebraVector::z_basis(self.p, self.q, i)
    }

    pub fn v_basis(&self, i: usize) -> AlgebraVector {
        AlgebraVector::v_basis(self.p, self.q, i)
    }

    pub fn central(&self, z: &[f64]) -> Result<AlgebraVector> {
        let v = AlgebraVector::new(z, &vec![0.0; self.q]);
        self.check(&v)?;
        Ok(v)
    }

    pub fn horizontal(&self, x: &[f64]) -> Result<AlgebraVector> {
        let v = AlgebraVector::new(&vec![0.0; self.p], x);
        self.check(&v)?;
        Ok(v)
    }

    /// Checks that `u` has this algebra's shape.
    pub fn check(&self, u: &AlgebraVector) -> Result<()> {
        if u.z_part.len() != self.p {
            return Err(Error::DimensionMismatch {
                what: "z_part length",
                expected: self.p,
                got: u.z_part.len(),
            });
        }
        if u.v_part.len() != self.q {
            return Err(Error::DimensionMismatch {
                what: "v_part length",
                expected: self.q,
                got: u.v_part.len(),
            });
        }
        Ok(())
    }

    pub fn bracket(&self, u: &AlgebraVector, w: &AlgebraVector) -> Result<AlgebraVector> {
        self.check(u)?;
        self.check(w)?;
        Ok(self.bracket_unchecked(u, w))
    }

    pub(crate) fn bracket_unchecked(&self, u: &AlgebraVector, w: &AlgebraVector) -> AlgebraVector {
        AlgebraVector::central(self.bracket_v(&u.v_part, &w.v_part), self.q)
    }

    /// Center coordinates of `[x, y]` for `x, y ∈ v`.
    pub(crate) fn bracket_v(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.p, self.slices.iter().map(|s| (x.transpose() * s * y)[0]))
    }

    pub fn inner(&self, u: &AlgebraVector, w: &AlgebraVector) -> Result<f64> {
        self.check(u)?;
        self.check(w)?;
        Ok(self.inner_unchecked(u, w))
    }

    pub(crate) fn inner_unchecked(&self, u: &AlgebraVector, w: &AlgebraVector) -> f64 {
        self.inner_z(&u.z_part, &w.z_part) + self.inner_v(&u.v_part, &w.v_part)
    }

    pub(crate) fn inner_z(&self, z: &DVector<f64>, w: &DVector<f64>) -> f64 {
        (z.transpose() * &self.metric_center * w)[0]
    }

    pub(crate) fn inner_v(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.metric_v * y)[0]
    }

    /// `J_z` for a central vector `z`.
    pub fn j_operator(&self, z: &AlgebraVector) -> Result<DMatrix<f64>> {
        self.check(z)?;
        if z.v_part.iter().any(|&c| c != 0.0) {
            return Err(Error::NonCentralInput);
        }
        Ok(self.j_of(&z.z_part))
    }

    /// `J_z` from center coordinates; `z.len()` must equal `dim_center`.
    pub(crate) fn j_of(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.q, self.q);
        for (c, j) in z.iter().zip(&self.j_basis) {
            if *c != 0.0 {
                out += j * *c;
            }
        }
        out
    }

    /// `J_{z_α}` for the `α`-th center basis vector.
    pub fn j_basis(&self, alpha: usize) -> &DMatrix<f64> {
        &self.j_basis[alpha]
    }

    /// Largest entrywise violation of `J_α J_β + J_β J_α = −2⟨z_α,z_β⟩ I` over
    /// all basis pairs.
    pub fn pseudo_h_defect(&self) -> f64 {
        let ident = DMatrix::<f64>::identity(self.q, self.q);
        let mut worst: f64 = 0.0;
        for a in 0..self.p {
            for b in a..self.p {
                let (ja, jb) = (&self.j_basis[a], &self.j_basis[b]);
                let anti = ja * jb + jb * ja + &ident * (2.0 * self.metric_center[(a, b)]);
                worst = worst.max(anti.amax());
            }
        }
        worst
    }

    /// `J_z² = −⟨z,z⟩ I` for all central `z`, checked through its polarization
    /// on basis pairs.
    pub fn is_pseudo_h_type(&self, tol: f64) -> bool {
        self.pseudo_h_defect() <= tol
    }

    pub fn causal_class(&self, u: &AlgebraVector, tol: f64) -> Result<CausalClass> {
        self.check(u)?;
        Ok(CausalClass::classify(self.inner_unchecked(u, u), u.coord_norm(), tol))
    }

    /// Numerical rank of `J_z`: singular values above `tol·σ_max`.
    pub fn jz_rank(&self, z: &AlgebraVector, tol: f64) -> Result<usize> {
        Ok(numerical_rank(&self.j_operator(z)?, tol))
    }

    /// The matrix of `ad_x : v → z` for `x ∈ v` (rows index the center basis).
    pub fn ad_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.p, self.q);
        for (alpha, s) in self.slices.iter().enumerate() {
            let row = x.transpose() * s;
            m.row_mut(alpha).copy_from(&row);
        }
        m
    }

    /// Sampling test of pseudoregularity: `ad_x` onto `z` for nonnull `x ∈ v`
    /// and `J_z` nonsingular for nonnull `z ∈ z`.
    ///
    /// Basis-aligned vectors and pairwise sums/differences are tried first so
    /// that failures come with a readable witness; then `sample_count` random
    /// vectors drawn from a seeded generator. A pass is only ever `LikelyTrue`.
    pub fn is_pseudoregular(&self, sample_count: usize, rng_seed: u64, tol: f64) -> Pseudoregularity {
        let (p, q) = (self.p, self.q);
        let unit = |n: usize, i: usize| {
            let mut v = DVector::zeros(n);
            v[i] = 1.0;
            v
        };
        let combos = |n: usize, prefix: &str| {
            let mut out: Vec<(DVector<f64>, String)> =
                (0..n).map(|i| (unit(n, i), format!("{prefix}{}", i + 1))).collect();
            for i in 0..n {
                for j in (i + 1)..n {
                    out.push((unit(n, i) + unit(n, j), format!("{prefix}{}+{prefix}{}", i + 1, j + 1)));
                    out.push((unit(n, i) - unit(n, j), format!("{prefix}{}-{prefix}{}", i + 1, j + 1)));
                }
            }
            out
        };

        for (x, label) in combos(q, "e") {
            if let Some(w) = self.ad_witness(&x, label, tol) {
                return Pseudoregularity::False(w);
            }
        }
        for (z, label) in combos(p, "z") {
            if let Some(w) = self.j_witness(&z, label, tol) {
                return Pseudoregularity::False(w);
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        for k in 0..sample_count {
            let x = DVector::from_fn(q, |_, _| rng.gen_range(-1.0..1.0));
            let z = DVector::from_fn(p, |_, _| rng.gen_range(-1.0..1.0));
            if let Some(w) = self.ad_witness(&x, format!("sample {k} (v)"), tol) {
                return Pseudoregularity::False(w);
            }
            if let Some(w) = self.j_witness(&z, format!("sample {k} (z)"), tol) {
                return Pseudoregularity::False(w);
            }
        }
        Pseudoregularity::LikelyTrue { samples: sample_count }
    }

    fn ad_witness(&self, x: &DVector<f64>, label: String, tol: f64) -> Option<PseudoregularityWitness> {
        let class = CausalClass::classify(self.inner_v(x, x), x.norm(), NULL_TOL);
        if class == CausalClass::Null {
            return None;
        }
        let rank = numerical_rank(&self.ad_matrix(x), tol);
        (rank < self.p).then(|| PseudoregularityWitness::AdNotSurjective {
            x: AlgebraVector::horizontal(self.p, x.clone()),
            label,
            rank,
            required: self.p,
        })
    }

    fn j_witness(&self, z: &DVector<f64>, label: String, tol: f64) -> Option<PseudoregularityWitness> {
        let class = CausalClass::classify(self.inner_z(z, z), z.norm(), NULL_TOL);
        if class == CausalClass::Null {
            return None;
        }
        let rank = numerical_rank(&self.j_of(z), tol);
        (rank < self.q).then(|| PseudoregularityWitness::SingularJ {
            z: AlgebraVector::central(z.clone(), self.q),
            label,
            rank,
            required: self.q,
        })
    }
}

/// Outcome of [`MetricNilpotentAlgebra::is_pseudoregular`].
#[derive(Debug, Clone, PartialEq)]
pub enum Pseudoregularity {
    False(PseudoregularityWitness),
    LikelyTrue { samples: usize },
}

impl Pseudoregularity {
    pub fn is_false(&self) -> bool {
        matches!(self, Pseudoregularity::False(_))
    }
}

impl fmt::Display for Pseudoregularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pseudoregularity::False(w) => write!(f, "False ({w})"),
            Pseudoregularity::LikelyTrue { samples } => {
                write!(f, "LikelyTrue ({samples} random samples passed)")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PseudoregularityWitness {
    /// A nonnull `x ∈ v` whose `ad_x` misses part of the center.
    AdNotSurjective {
        x: AlgebraVector,
        label: String,
        rank: usize,
        required: usize,
    },
    /// A nonnull central `z` with singular `J_z`.
    SingularJ {
        z: AlgebraVector,
        label: String,
        rank: usize,
        required: usize,
    },
}

impl PseudoregularityWitness {
    pub fn label(&self) -> &str {
        match self {
            PseudoregularityWitness::AdNotSurjective { label, .. }
            | PseudoregularityWitness::SingularJ { label, .. } => label,
        }
    }
}

impl fmt::Display for PseudoregularityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PseudoregularityWitness::AdNotSurjective {
                label, rank, required, ..
            } => write!(f, "witness {label}: rank ad = {rank} < dim z = {required}"),
            PseudoregularityWitness::SingularJ {
                label, rank, required, ..
            } => write!(f, "witness {label}: rank J = {rank} < dim v = {required}"),
        }
    }
}

/// Number of singular values above `tol·σ_max` (zero for the zero matrix).
pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let s = m.clone().singular_values();
    let smax = s.max();
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > tol * smax).count()
}
