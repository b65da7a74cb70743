//! Closed-form conjugate loci of geodesics in pseudo-H-type groups.
//!
//! Everything here depends only on the scalar invariants `a = ⟨z0,z0⟩`,
//! `b = ⟨x0,x0⟩`, `g = a + b` and the dimensions `p = dim z`, `q = dim v`.
//! With `α = √a` (timelike `z0`) or `β = √−a` (spacelike `z0`):
//!
//! | set | equation solved (pole-free form)           |
//! |-----|---------------------------------------------|
//! | A1  | `b·(αt/2)·cos(αt/2) − g·sin(αt/2) = 0`        |
//! | A2  | `αt − b/(g+a)·sin(αt) = 0`                    |
//! | B1  | `b·(βt/2)·cosh(βt/2) − g·sinh(βt/2) = 0`      |
//! | B2  | `βt − b/(g+a)·sinh(βt) = 0`                   |
//!
//! plus the lattice `(2π/α)ℤ*` for timelike `z0`, `t² = −12/b` for null
//! `z0 ≠ 0` and for `z0 = 0`.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::algebra::{CausalClass, MetricNilpotentAlgebra, NULL_TOL};
use crate::error::{Error, Result};
use crate::geometry::GeodesicIC;
use crate::roots::bracket_roots;

/// Which defining equation produced a conjugate point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Branch {
    Lattice,
    A1,
    A2,
    A1A2,
    B1,
    B2,
    B1B2,
    NullCenter,
    PureCenter,
    PureV,
    Numeric,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Lattice => "lattice",
            Branch::A1 => "A1",
            Branch::A2 => "A2",
            Branch::A1A2 => "A1&A2",
            Branch::B1 => "B1",
            Branch::B2 => "B2",
            Branch::B1B2 => "B1&B2",
            Branch::NullCenter => "null-center",
            Branch::PureCenter => "pure-center",
            Branch::PureV => "pure-v",
            Branch::Numeric => "numeric",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Annotations attached to a conjugate point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PointFlag {
    /// A transcendental root coincided with a lattice point; the lattice
    /// multiplicity was used.
    MergedWithLattice,
    /// `x0` is null but nonzero: A1 reduces to the lattice.
    NullX0Folded,
    /// `γ̇` is null; the closed forms are evaluated but not covered by the
    /// normalization assumption behind them.
    NullVelocity,
    /// The endpoint determinant changes sign across the point.
    DetSignChange,
    /// Another numerically detected point lies within `10·bisect_tol`.
    Clustered,
}

impl PointFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            PointFlag::MergedWithLattice => "merged-with-lattice",
            PointFlag::NullX0Folded => "null-x0-folded",
            PointFlag::NullVelocity => "null-velocity-unverified",
            PointFlag::DetSignChange => "det-sign-change",
            PointFlag::Clustered => "clustered",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugatePoint {
    pub t0: f64,
    pub multiplicity: usize,
    pub branch: Branch,
    /// Relative residual of the defining equation at `t0` (for numeric points:
    /// `σ_min / σ_max` of the endpoint matrix).
    pub residual: f64,
    pub flags: Vec<PointFlag>,
}

/// Scalar data the closed-form loci depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicInvariants {
    pub a: f64,
    pub b: f64,
    pub g: f64,
    pub p: usize,
    pub q: usize,
    pub z0_zero: bool,
    pub x0_zero: bool,
    pub center_class: CausalClass,
    pub x0_class: CausalClass,
}

const ABS_CLASS_TOL: f64 = 1e-12;

impl GeodesicInvariants {
    /// Invariants for nonzero `z0` and `x0` given directly by `a` and `b`.
    pub fn new(a: f64, b: f64, p: usize, q: usize) -> Self {
        Self {
            a,
            b,
            g: a + b,
            p,
            q,
            z0_zero: false,
            x0_zero: false,
            center_class: CausalClass::classify(a, 0.0, ABS_CLASS_TOL),
            x0_class: CausalClass::classify(b, 0.0, ABS_CLASS_TOL),
        }
    }

    /// `z0 = 0`, `⟨x0,x0⟩ = b`.
    pub fn pure_v(b: f64, p: usize, q: usize) -> Self {
        Self {
            z0_zero: true,
            center_class: CausalClass::Null,
            ..Self::new(0.0, b, p, q)
        }
    }

    /// `x0 = 0`, `⟨z0,z0⟩ = a`.
    pub fn pure_center(a: f64, p: usize, q: usize) -> Self {
        Self {
            x0_zero: true,
            x0_class: CausalClass::Null,
            ..Self::new(a, 0.0, p, q)
        }
    }

    pub fn from_ic(alg: &MetricNilpotentAlgebra, ic: &GeodesicIC) -> Result<Self> {
        let z0_zero = ic.z0().is_zero();
        let x0_zero = ic.x0().is_zero();
        if z0_zero && x0_zero {
            return Err(Error::ZeroVelocity);
        }
        Ok(Self {
            a: ic.a(),
            b: ic.b(),
            g: ic.g(),
            p: alg.dim_center(),
            q: alg.dim_v(),
            z0_zero,
            x0_zero,
            center_class: if z0_zero { CausalClass::Null } else { ic.center_class() },
            x0_class: CausalClass::classify(ic.b(), ic.x0().coord_norm(), NULL_TOL),
        })
    }

    /// Replaces `a`, keeping `b`.
    pub fn with_a(self, a: f64) -> Self {
        let mut out = Self::new(a, self.b, self.p, self.q);
        out.x0_zero = self.x0_zero;
        out.x0_class = self.x0_class;
        out
    }

    /// Replaces `b`, keeping `a`.
    pub fn with_b(self, b: f64) -> Self {
        let mut out = Self::new(self.a, b, self.p, self.q);
        out.z0_zero = self.z0_zero;
        if self.z0_zero {
            out.center_class = CausalClass::Null;
        } else {
            out.center_class = self.center_class;
        }
        out
    }

    /// `α = √a`, or `β = √−a`; zero for a null center.
    pub fn rate(&self) -> f64 {
        match self.center_class {
            CausalClass::Null => 0.0,
            _ => self.a.abs().sqrt(),
        }
    }

    /// Characteristic time scale: `2π/α`, `1/β`, or `√(12/|b|)` when `z0` is
    /// null.
    pub fn period(&self) -> f64 {
        match self.center_class {
            CausalClass::Timelike => 2.0 * PI / self.rate(),
            CausalClass::Spacelike => 1.0 / self.rate(),
            CausalClass::Null if self.b != 0.0 => (12.0 / self.b.abs()).sqrt(),
            CausalClass::Null => 1.0,
        }
    }

    /// `⟨γ̇,γ̇⟩ + ⟨z0,z0⟩ ≠ 0`
    pub fn g_plus_a_nonzero(&self) -> bool {
        (self.g + self.a).abs() > 1e-12 * (self.a.abs() + self.b.abs())
    }

    fn velocity_null(&self) -> bool {
        self.g.abs() <= 1e-12 * (self.a.abs() + self.b.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Relative residual every reported root must meet.
    pub tol: f64,
    /// Bracketing cells per `2π/α` (A sets) or per `1/β` (B sets).
    pub grid_per_period: usize,
    /// Points closer than `merge_rel · period` are merged.
    pub merge_rel: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            grid_per_period: 64,
            merge_rel: 1e-9,
        }
    }
}

/// `(0, 6·2π/α]` for timelike `z0`, `(0, 20/β]` for spacelike `z0`, and
/// `(0, 2·√(12/|b|)]` otherwise.
pub fn default_window(inv: &GeodesicInvariants) -> (f64, f64) {
    match inv.center_class {
        CausalClass::Timelike => (0.0, 6.0 * inv.period()),
        CausalClass::Spacelike => (0.0, 20.0 * inv.period()),
        CausalClass::Null => (0.0, 2.0 * inv.period()),
    }
}

fn check_window(window: (f64, f64)) -> Result<()> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidWindow(lo, hi));
    }
    Ok(())
}

/// Value and scale of the pole-free defining function of a transcendental set.
fn branch_function(branch: Branch, inv: &GeodesicInvariants, t: f64) -> (f64, f64) {
    let w = inv.rate();
    let (a, b, g) = (inv.a, inv.b, inv.g);
    match branch {
        Branch::A1 => {
            let u = 0.5 * w * t;
            (b * u * u.cos() - g * u.sin(), b.abs() * u.abs() + g.abs())
        }
        Branch::A2 => {
            let c = b / (g + a);
            let u = w * t;
            (u - c * u.sin(), u.abs() + c.abs())
        }
        Branch::B1 => {
            let u = 0.5 * w * t;
            (
                b * u * u.cosh() - g * u.sinh(),
                (b.abs() * u.abs() + g.abs()) * u.cosh(),
            )
        }
        Branch::B2 => {
            let c = b / (g + a);
            let u = w * t;
            (u - c * u.sinh(), u.abs() + c.abs() * u.cosh())
        }
        _ => (f64::NAN, 1.0),
    }
}

/// Relative residual `|f(t)| / scale` of a transcendental defining equation.
pub fn branch_residual(branch: Branch, inv: &GeodesicInvariants, t: f64) -> f64 {
    let (f, scale) = branch_function(branch, inv, t);
    f.abs() / scale
}

/// Roots `t ≠ 0` of the A1, A2, B1 or B2 equation inside `window`.
pub fn solve_transcendental(
    branch: Branch,
    inv: &GeodesicInvariants,
    window: (f64, f64),
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    check_window(window)?;
    let name = branch.as_str();
    let (needs, oscillatory) = match branch {
        Branch::A1 | Branch::A2 => (CausalClass::Timelike, true),
        Branch::B1 | Branch::B2 => (CausalClass::Spacelike, false),
        other => return Err(Error::InvalidConfig(format!("{other} is not a transcendental branch"))),
    };
    if inv.z0_zero || inv.center_class != needs {
        return Err(Error::WrongCausalClass {
            branch: name,
            required: if oscillatory { "timelike" } else { "spacelike" },
            a: inv.a,
        });
    }
    if matches!(branch, Branch::A2 | Branch::B2) {
        if inv.p < 2 {
            return Err(Error::CenterTooSmall(name));
        }
        if !inv.g_plus_a_nonzero() {
            return Err(Error::DegenerateDenominator(name));
        }
    }

    let period = inv.period();
    let (lo, hi) = window;
    let cells = (((hi - lo) / period) * cfg.grid_per_period as f64).ceil() as usize;
    let zero_guard = 1e-9 * period;
    let f = |t: f64| branch_function(branch, inv, t).0;
    Ok(bracket_roots(f, lo, hi, cells.max(1))
        .into_iter()
        .filter(|t| t.abs() > zero_guard)
        .collect())
}

/// Multiplicity of a conjugate point from the set(s) it belongs to.
pub fn multiplicity(inv: &GeodesicInvariants, t0: f64, membership: &[Branch]) -> Result<usize> {
    let mut set = BTreeSet::new();
    for &b in membership {
        match b {
            Branch::A1A2 => {
                set.insert(Branch::A1);
                set.insert(Branch::A2);
            }
            Branch::B1B2 => {
                set.insert(Branch::B1);
                set.insert(Branch::B2);
            }
            other => {
                set.insert(other);
            }
        }
    }
    let bad = |why: &str| Err(Error::InconsistentMembership(format!("{membership:?}: {why}")));
    if set.is_empty() {
        return bad("empty");
    }
    if set.contains(&Branch::Numeric) {
        return bad("numeric points have no closed-form multiplicity");
    }
    let has_a = set.contains(&Branch::A1) || set.contains(&Branch::A2);
    let has_b = set.contains(&Branch::B1) || set.contains(&Branch::B2);
    let singles = [Branch::NullCenter, Branch::PureCenter, Branch::PureV];
    if let Some(&single) = singles.iter().find(|s| set.contains(s)) {
        if set.len() > 1 {
            return bad("exclusive branch mixed with others");
        }
        return match single {
            Branch::PureV if inv.z0_zero => Ok(inv.p),
            Branch::PureCenter if inv.x0_zero && inv.center_class == CausalClass::Timelike => Ok(inv.q),
            Branch::NullCenter if !inv.z0_zero && inv.center_class == CausalClass::Null => Ok(inv.p.saturating_sub(1)),
            _ => bad("branch does not match the invariants"),
        };
    }
    if has_a && has_b {
        return bad("A and B sets are mutually exclusive");
    }
    if set.contains(&Branch::Lattice) {
        if has_b || inv.center_class != CausalClass::Timelike || inv.x0_zero || inv.z0_zero {
            return bad("lattice needs timelike z0 and nonzero x0");
        }
        let k = t0 * inv.rate() / (2.0 * PI);
        if k.round() == 0.0 || (k - k.round()).abs() > 1e-8 * k.abs().max(1.0) {
            return bad("t0 is not a lattice point");
        }
        return Ok(if inv.g_plus_a_nonzero() {
            inv.q - 1
        } else {
            inv.p + inv.q - 2
        });
    }
    let (one, two, class) = if has_a {
        (Branch::A1, Branch::A2, CausalClass::Timelike)
    } else {
        (Branch::B1, Branch::B2, CausalClass::Spacelike)
    };
    if inv.center_class != class || inv.z0_zero || inv.x0_zero {
        return bad("branch does not match the causal class of z0");
    }
    match (set.contains(&one), set.contains(&two)) {
        (true, false) => Ok(1),
        (false, true) if inv.p >= 2 => Ok(inv.p - 1),
        (true, true) if inv.p >= 2 => Ok(inv.p),
        _ => bad("second set needs dim z >= 2"),
    }
}

struct Candidate {
    t: f64,
    branch: Branch,
    residual: f64,
}

fn symmetric_points(t_star: f64, window: (f64, f64)) -> Vec<f64> {
    [-t_star, t_star]
        .into_iter()
        .filter(|t| *t >= window.0 && *t <= window.1)
        .collect()
}

/// All conjugate points in `window`, sorted by `t0`.
pub fn analytic_conjugate_points(
    inv: &GeodesicInvariants,
    window: (f64, f64),
    cfg: &SolverConfig,
) -> Result<Vec<ConjugatePoint>> {
    check_window(window)?;
    if inv.z0_zero && inv.x0_zero {
        return Err(Error::ZeroVelocity);
    }
    let mut flags = Vec::new();
    if inv.velocity_null() {
        flags.push(PointFlag::NullVelocity);
    }

    let cubic_case = |branch: Branch| -> Result<Vec<ConjugatePoint>> {
        if inv.b >= 0.0 || inv.x0_class == CausalClass::Null {
            return Ok(Vec::new());
        }
        let t_star = (-12.0 / inv.b).sqrt();
        let mult = multiplicity(inv, t_star, &[branch])?;
        if mult == 0 {
            return Ok(Vec::new());
        }
        Ok(symmetric_points(t_star, window)
            .into_iter()
            .map(|t0| ConjugatePoint {
                t0,
                multiplicity: mult,
                branch,
                residual: (inv.b * t0 * t0 + 12.0).abs() / 12.0,
                flags: flags.clone(),
            })
            .collect())
    };

    if inv.z0_zero {
        return cubic_case(Branch::PureV);
    }
    if inv.center_class == CausalClass::Null {
        return cubic_case(Branch::NullCenter);
    }

    let mut candidates: Vec<Candidate> = Vec::new();
    let period = inv.period();
    let alpha = inv.rate();

    if inv.center_class == CausalClass::Timelike {
        let lattice_step = 2.0 * PI / alpha;
        let k_lo = (window.0 / lattice_step).ceil() as i64;
        let k_hi = (window.1 / lattice_step).floor() as i64;
        for k in k_lo..=k_hi {
            if k == 0 {
                continue;
            }
            let t = k as f64 * lattice_step;
            candidates.push(Candidate {
                t,
                branch: Branch::Lattice,
                residual: (0.5 * alpha * t).sin().abs(),
            });
        }
        if inv.x0_zero {
            return Ok(candidates
                .into_iter()
                .map(|c| ConjugatePoint {
                    t0: c.t,
                    multiplicity: inv.q,
                    branch: Branch::PureCenter,
                    residual: c.residual,
                    flags: flags.clone(),
                })
                .collect());
        }
        if inv.x0_class == CausalClass::Null {
            flags.push(PointFlag::NullX0Folded);
        } else {
            for t in solve_transcendental(Branch::A1, inv, window, cfg)? {
                candidates.push(Candidate {
                    t,
                    branch: Branch::A1,
                    residual: branch_residual(Branch::A1, inv, t),
                });
            }
            if inv.p >= 2 && inv.g_plus_a_nonzero() {
                for t in solve_transcendental(Branch::A2, inv, window, cfg)? {
                    candidates.push(Candidate {
                        t,
                        branch: Branch::A2,
                        residual: branch_residual(Branch::A2, inv, t),
                    });
                }
            }
        }
    } else {
        if inv.x0_zero || inv.x0_class == CausalClass::Null {
            return Ok(Vec::new());
        }
        for t in solve_transcendental(Branch::B1, inv, window, cfg)? {
            candidates.push(Candidate {
                t,
                branch: Branch::B1,
                residual: branch_residual(Branch::B1, inv, t),
            });
        }
        if inv.p >= 2 && inv.g_plus_a_nonzero() {
            for t in solve_transcendental(Branch::B2, inv, window, cfg)? {
                candidates.push(Candidate {
                    t,
                    branch: Branch::B2,
                    residual: branch_residual(Branch::B2, inv, t),
                });
            }
        }
    }

    candidates.sort_by(|x, y| x.t.total_cmp(&y.t));
    let merge_tol = cfg.merge_rel * period;
    let mut out = Vec::new();
    let mut i = 0;
    while i < candidates.len() {
        let mut j = i + 1;
        while j < candidates.len() && candidates[j].t - candidates[j - 1].t <= merge_tol {
            j += 1;
        }
        let group = &candidates[i..j];
        let members: Vec<Branch> = group.iter().map(|c| c.branch).collect();
        let lattice = group.iter().find(|c| c.branch == Branch::Lattice);
        let mut point_flags = flags.clone();
        let (t0, branch) = match lattice {
            Some(c) => {
                if group.len() > 1 {
                    point_flags.push(PointFlag::MergedWithLattice);
                }
                (c.t, Branch::Lattice)
            }
            None => {
                let has = |b| members.contains(&b);
                let branch = match (has(Branch::A1), has(Branch::A2), has(Branch::B1), has(Branch::B2)) {
                    (true, true, _, _) => Branch::A1A2,
                    (_, _, true, true) => Branch::B1B2,
                    _ => group[0].branch,
                };
                (group[0].t, branch)
            }
        };
        let multiplicity = multiplicity(inv, t0, &members)?;
        let residual = group.iter().map(|c| c.residual).fold(0.0, f64::max);
        out.push(ConjugatePoint {
            t0,
            multiplicity,
            branch,
            residual,
            flags: point_flags,
        });
        i = j;
    }
    Ok(out)
}
