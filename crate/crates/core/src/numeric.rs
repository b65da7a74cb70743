//! Brute-force conjugate points: integrate the Jacobi equation along a
//! geodesic and look for times at which the endpoint map loses rank.
//!
//! In the left-invariant frame, with `P = ∇_γ̇ Y` and `Γ(W, U) = ∇_W U`:
//!
//! ```text
//! dY/dt = P − Γ(γ̇(t), Y)
//! dP/dt = −R_γ̇(Y) − Γ(γ̇(t), P)
//! ```
//!
//! Integrating the `n = dim n` solutions with `Y(0) = 0`, `P(0) = e_i` gives
//! the endpoint matrix `M(t)`; `γ(t0)` is conjugate to `γ(0)` exactly when
//! `M(t0)` is singular, with multiplicity `dim ker M(t0)`. Vectors are
//! flattened as `(z_1..z_p, e_1..e_q)`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::algebra::{AlgebraVector, MetricNilpotentAlgebra};
use crate::analytic::{Branch, ConjugatePoint, PointFlag};
use crate::error::{Error, Result};
use crate::geometry::{connection_unchecked, exp_tj, jacobi_operator_with, GeodesicIC};
use crate::ode::{integrate, Method};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Scan-grid samples per characteristic period `2π / max(√|a|, √|b|)`.
    pub scan_points_per_period: usize,
    /// Singular values below `rank_tol · σ_max` count towards the kernel.
    pub rank_tol: f64,
    /// Width, in `t`, to which each minimum of `σ_min` is localized.
    pub bisect_tol: f64,
    /// Candidates with `t ≤ dead_zone_rel · window length` are ignored.
    pub dead_zone_rel: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::default(),
            scan_points_per_period: 64,
            rank_tol: 1e-7,
            bisect_tol: 1e-9,
            dead_zone_rel: 1e-3,
        }
    }
}

impl IntegratorConfig {
    // written negated so NaN is rejected
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if self.scan_points_per_period < 32 {
            return Err(Error::InvalidConfig(format!(
                "scan_points_per_period must be at least 32, got {}",
                self.scan_points_per_period
            )));
        }
        let positive = match self.method {
            Method::Rk4 { step } => step > 0.0,
            Method::Rk45 { rel_tol, abs_tol } => rel_tol > 0.0 && abs_tol > 0.0,
        };
        if !positive || !(self.rank_tol > 0.0) || !(self.bisect_tol > 0.0) || !(self.dead_zone_rel >= 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// `M(t)` together with its conditioning summary.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiEndpointMatrix {
    pub t: f64,
    pub m: DMatrix<f64>,
    pub smin: f64,
    pub smax: f64,
    /// `log|det M|`, `−∞` when a pivot vanishes.
    pub logdet: f64,
    /// Sign of `det M` (0 when singular to working precision).
    pub det_sign: i8,
}

impl JacobiEndpointMatrix {
    fn new(t: f64, m: DMatrix<f64>) -> Self {
        let s = m.clone().singular_values();
        let smin = s.min();
        let smax = s.max();
        let (logdet, det_sign) = log_det(&m);
        Self {
            t,
            m,
            smin,
            smax,
            logdet,
            det_sign,
        }
    }

    /// `σ_min / σ_max`, taken as 1 for the zero matrix at `t = 0`.
    pub fn ratio(&self) -> f64 {
        if self.smax == 0.0 {
            1.0
        } else {
            self.smin / self.smax
        }
    }

    pub fn singular_values(&self) -> DVector<f64> {
        self.m.clone().singular_values()
    }
}

/// `log|det M|` from a column-pivoted QR, summing logarithms of the pivots,
/// and the sign of the determinant from an LU factorization of `M` with unit
/// columns (positive column scaling leaves the sign alone).
fn log_det(m: &DMatrix<f64>) -> (f64, i8) {
    let qr = m.clone().col_piv_qr();
    let r = qr.r();
    let mut logdet = 0.0;
    for i in 0..r.nrows().min(r.ncols()) {
        let d = r[(i, i)].abs();
        if d == 0.0 {
            return (f64::NEG_INFINITY, 0);
        }
        logdet += d.ln();
    }
    let mut scaled = m.clone();
    for mut col in scaled.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col /= n;
        }
    }
    let det = scaled.lu().determinant();
    let sign = if det > 0.0 {
        1
    } else if det < 0.0 {
        -1
    } else {
        0
    };
    (logdet, sign)
}

/// Right-hand side of the first-order Jacobi system for one field.
pub fn jacobi_system_rhs(
    alg: &MetricNilpotentAlgebra,
    ic: &GeodesicIC,
    t: f64,
    y: &AlgebraVector,
    p: &AlgebraVector,
) -> Result<(AlgebraVector, AlgebraVector)> {
    alg.check(y)?;
    alg.check(p)?;
    let x_t = exp_tj(alg, ic, t) * &ic.x0().v_part;
    let vel = AlgebraVector {
        z_part: ic.z0().z_part.clone(),
        v_part: x_t.clone(),
    };
    let dy = p - &connection_unchecked(alg, &vel, y);
    let dp = (jacobi_operator_with(alg, ic, &x_t, y) * -1.0) - connection_unchecked(alg, &vel, p);
    Ok((dy, dp))
}

/// The linear Jacobi flow `d/dt [Y; P] = A(t) [Y; P]` along one geodesic.
///
/// Only `x' = e^{tJ} x0` varies with `t`. `Γ(γ̇, ·)` is affine in `x'` and
/// `R_γ̇` quadratic, so their coefficient matrices are tabulated once.
pub(crate) struct JacobiFlow<'a> {
    alg: &'a MetricNilpotentAlgebra,
    ic: &'a GeodesicIC,
    gamma0: DMatrix<f64>,
    gamma_lin: Vec<DMatrix<f64>>,
    curv0: DMatrix<f64>,
    curv_lin: Vec<DMatrix<f64>>,
    /// `(k, l, Q_kl)` for `k ≤ l`
    curv_quad: Vec<(usize, usize, DMatrix<f64>)>,
}

impl<'a> JacobiFlow<'a> {
    pub(crate) fn new(alg: &'a MetricNilpotentAlgebra, ic: &'a GeodesicIC) -> Self {
        let q = alg.dim_v();
        let unit = |k: usize| {
            let mut e = DVector::zeros(q);
            e[k] = 1.0;
            e
        };
        let gamma = |x: &DVector<f64>| operator_matrix(alg, |e| connection_unchecked(alg, &velocity(ic, x), e));
        let curv = |x: &DVector<f64>| operator_matrix(alg, |e| jacobi_operator_with(alg, ic, x, e));

        let zero = DVector::zeros(q);
        let gamma0 = gamma(&zero);
        let gamma_lin = (0..q).map(|k| gamma(&unit(k)) - &gamma0).collect();

        let curv0 = curv(&zero);
        let mut curv_lin = Vec::with_capacity(q);
        let mut diag = Vec::with_capacity(q);
        for k in 0..q {
            let plus = curv(&unit(k));
            let minus = curv(&-unit(k));
            curv_lin.push((&plus - &minus) * 0.5);
            diag.push((plus + minus) * 0.5 - &curv0);
        }
        let mut curv_quad = Vec::new();
        for k in 0..q {
            for l in k..q {
                let m = if k == l {
                    diag[k].clone()
                } else {
                    curv(&(unit(k) + unit(l))) - &curv0 - &curv_lin[k] - &curv_lin[l] - &diag[k] - &diag[l]
                };
                if m.amax() > 0.0 {
                    curv_quad.push((k, l, m));
                }
            }
        }
        Self {
            alg,
            ic,
            gamma0,
            gamma_lin,
            curv0,
            curv_lin,
            curv_quad,
        }
    }

    fn n(&self) -> usize {
        self.alg.dim()
    }

    /// `A(t) = [[−Γ, I], [−R, −Γ]]`
    pub(crate) fn generator(&self, t: f64) -> DMatrix<f64> {
        let n = self.n();
        let x_t = exp_tj(self.alg, self.ic, t) * &self.ic.x0().v_part;
        let mut gamma = self.gamma0.clone();
        let mut curv = self.curv0.clone();
        for (k, &xk) in x_t.iter().enumerate() {
            if xk != 0.0 {
                gamma.zip_apply(&self.gamma_lin[k], |acc, v| *acc += xk * v);
                curv.zip_apply(&self.curv_lin[k], |acc, v| *acc += xk * v);
            }
        }
        for (k, l, m) in &self.curv_quad {
            let c = x_t[*k] * x_t[*l];
            if c != 0.0 {
                curv.zip_apply(m, |acc, v| *acc += c * v);
            }
        }
        let mut gen = DMatrix::zeros(2 * n, 2 * n);
        gen.view_mut((0, 0), (n, n)).copy_from(&-&gamma);
        gen.view_mut((n, n), (n, n)).copy_from(&-&gamma);
        gen.view_mut((n, 0), (n, n)).copy_from(&-curv);
        gen.view_mut((0, n), (n, n)).fill_with_identity();
        gen
    }

    pub(crate) fn initial_state(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut s = DMatrix::zeros(2 * n, n);
        for i in 0..n {
            s[(n + i, i)] = 1.0;
        }
        s
    }

    pub(crate) fn advance(&self, t0: f64, state: &DMatrix<f64>, t1: f64, method: Method) -> Result<DMatrix<f64>> {
        integrate(|t, s| self.generator(t) * s, t0, state, t1, method)
    }

    fn endpoint(&self, t: f64, state: &DMatrix<f64>) -> JacobiEndpointMatrix {
        let n = self.n();
        JacobiEndpointMatrix::new(t, state.rows(0, n).into_owned())
    }
}

fn velocity(ic: &GeodesicIC, x_t: &DVector<f64>) -> AlgebraVector {
    AlgebraVector {
        z_part: ic.z0().z_part.clone(),
        v_part: x_t.clone(),
    }
}

/// Matrix of a linear map on `n` in flat coordinates.
fn operator_matrix<F: Fn(&AlgebraVector) -> AlgebraVector>(alg: &MetricNilpotentAlgebra, f: F) -> DMatrix<f64> {
    let n = alg.dim();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut flat = DVector::zeros(n);
        flat[j] = 1.0;
        m.set_column(j, &f(&AlgebraVector::from_flat(alg.dim_center(), &flat)).to_flat());
    }
    m
}

/// Characteristic period used to size the scan grid.
fn scan_period(ic: &GeodesicIC, window: (f64, f64)) -> f64 {
    let w = ic.a().abs().sqrt().max(ic.b().abs().sqrt());
    if w > 0.0 {
        2.0 * std::f64::consts::PI / w
    } else {
        window.1 - window.0
    }
}

fn check_window(window: (f64, f64)) -> Result<()> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
        return Err(Error::InvalidWindow(lo, hi));
    }
    Ok(())
}

struct Scan {
    samples: Vec<JacobiEndpointMatrix>,
    states: Vec<DMatrix<f64>>,
}

/// Uniform grid spacing over `window`.
fn grid_step(ic: &GeodesicIC, window: (f64, f64), cfg: &IntegratorConfig) -> f64 {
    let (lo, hi) = window;
    let per = cfg.scan_points_per_period as f64;
    let cells = (((hi - lo) / scan_period(ic, window)) * per).ceil().max(per);
    (hi - lo) / cells
}

fn uniform_grid(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let cells = ((hi - lo) / h).round().max(1.0) as usize;
    (0..=cells)
        .map(|i| if i == cells { hi } else { lo + h * i as f64 })
        .collect()
}

fn scan(alg: &MetricNilpotentAlgebra, ic: &GeodesicIC, grid: &[f64], cfg: &IntegratorConfig) -> Result<Scan> {
    let flow = JacobiFlow::new(alg, ic);
    let mut state = flow.initial_state();
    let mut t_prev = 0.0;
    let mut samples = Vec::with_capacity(grid.len());
    let mut states = Vec::with_capacity(grid.len());
    for &t in grid {
        state = flow.advance(t_prev, &state, t, cfg.method)?;
        samples.push(flow.endpoint(t, &state));
        states.push(state.clone());
        t_prev = t;
    }
    Ok(Scan { samples, states })
}

/// Samples `M(t)` on a uniform grid over `window`.
pub fn integrate_jacobi_basis(
    alg: &MetricNilpotentAlgebra,
    ic: &GeodesicIC,
    window: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Vec<JacobiEndpointMatrix>> {
    check_window(window)?;
    cfg.validate()?;
    let h = grid_step(ic, window, cfg);
    Ok(scan(alg, ic, &uniform_grid(window.0, window.1, h), cfg)?.samples)
}

/// `M(t)` at a single time.
pub fn endpoint_matrix(
    alg: &MetricNilpotentAlgebra,
    ic: &GeodesicIC,
    t: f64,
    method: Method,
) -> Result<JacobiEndpointMatrix> {
    let flow = JacobiFlow::new(alg, ic);
    let state = flow.advance(0.0, &flow.initial_state(), t, method)?;
    Ok(flow.endpoint(t, &state))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Conjugate points in `window`, located as zeros of `σ_min(M(t))`.
///
/// Every local minimum of `σ_min/σ_max` on the scan grid is refined by
/// golden-section search to `bisect_tol`; it is kept when the refined ratio
/// falls below `rank_tol`. Multiplicity is the number of singular values
/// below `rank_tol · σ_max` at the refined time.
pub fn detect_conjugate_points(
    alg: &MetricNilpotentAlgebra,
    ic: &GeodesicIC,
    window: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Vec<ConjugatePoint>> {
    if ic.z0().is_zero() && ic.x0().is_zero() {
        return Err(Error::ZeroVelocity);
    }
    check_window(window)?;
    cfg.validate()?;
    // one extra cell past each edge, so that a point on the edge is an
    // interior minimum of the scan
    let h = grid_step(ic, window, cfg);
    let mut grid = uniform_grid(window.0, window.1, h);
    if window.0 > 0.0 {
        grid.insert(0, (window.0 - h).max(0.0));
    }
    grid.push(window.1 + h);
    let Scan { samples, states } = scan(alg, ic, &grid, cfg)?;
    let flow = JacobiFlow::new(alg, ic);
    let ratios: Vec<f64> = samples.iter().map(JacobiEndpointMatrix::ratio).collect();
    let last = ratios.len() - 1;
    let dead_zone = cfg.dead_zone_rel * (window.1 - window.0);

    let mut found: Vec<ConjugatePoint> = Vec::new();
    for i in 0..=last {
        if i == 0 || i == last || !(ratios[i] < ratios[i - 1] && ratios[i] <= ratios[i + 1]) {
            continue;
        }
        let (lo_idx, hi_idx) = (i - 1, i + 1);
        let (lo, hi) = (samples[lo_idx].t, samples[hi_idx].t);
        let base = &states[lo_idx];
        let eval = |t: f64| -> Result<JacobiEndpointMatrix> {
            let s = flow.advance(lo, base, t, cfg.method)?;
            Ok(flow.endpoint(t, &s))
        };

        // golden-section search for the minimum of σ_min/σ_max on [lo, hi]
        let (mut a, mut b) = (lo, hi);
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let mut fc = eval(c)?.ratio();
        let mut fd = eval(d)?.ratio();
        let mut best = (samples[i].t, ratios[i]);
        while b - a > cfg.bisect_tol {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = eval(c)?.ratio();
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = eval(d)?.ratio();
            }
            for (t, f) in [(c, fc), (d, fd)] {
                if f < best.1 {
                    best = (t, f);
                }
            }
        }
        let (t_star, _) = best;
        if t_star <= dead_zone || t_star < window.0 - cfg.bisect_tol || t_star > window.1 + cfg.bisect_tol {
            continue;
        }
        let at = if t_star == samples[i].t {
            samples[i].clone()
        } else {
            eval(t_star)?
        };
        let s = at.singular_values();
        let mult = s.iter().filter(|&&v| v < cfg.rank_tol * at.smax).count();
        if mult == 0 {
            continue;
        }
        let mut flags = Vec::new();
        let (sl, sr) = (samples[lo_idx].det_sign, samples[hi_idx].det_sign);
        if sl * sr < 0 {
            flags.push(PointFlag::DetSignChange);
        }
        found.push(ConjugatePoint {
            t0: t_star,
            multiplicity: mult,
            branch: Branch::Numeric,
            residual: at.ratio(),
            flags,
        });
    }

    found.sort_by(|x, y| x.t0.total_cmp(&y.t0));
    let mut merged: Vec<ConjugatePoint> = Vec::with_capacity(found.len());
    for pt in found {
        match merged.last_mut() {
            Some(prev) if pt.t0 - prev.t0 < 10.0 * cfg.bisect_tol => {
                if !prev.flags.contains(&PointFlag::Clustered) {
                    prev.flags.push(PointFlag::Clustered);
                }
                if pt.residual < prev.residual {
                    prev.t0 = pt.t0;
                    prev.residual = pt.residual;
                }
                prev.multiplicity = prev.multiplicity.max(pt.multiplicity);
            }
            _ => merged.push(pt),
        }
    }
    Ok(merged)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchedPair {
    pub analytic: ConjugatePoint,
    pub numeric: ConjugatePoint,
    /// `numeric.t0 − analytic.t0`
    pub dt: f64,
    pub multiplicity_agrees: bool,
}

/// Outcome of [`cross_validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct CrossReport {
    pub matched: Vec<MatchedPair>,
    pub analytic_only: Vec<ConjugatePoint>,
    pub numeric_only: Vec<ConjugatePoint>,
    pub t_tol: f64,
    pub mult_strict: bool,
}

impl CrossReport {
    pub fn mismatches(&self) -> usize {
        let mult = if self.mult_strict {
            self.matched.iter().filter(|m| !m.multiplicity_agrees).count()
        } else {
            0
        };
        self.analytic_only.len() + self.numeric_only.len() + mult
    }

    pub fn is_full_match(&self) -> bool {
        self.mismatches() == 0
    }

    /// 0 on a full match, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.is_full_match() {
            0
        } else {
            1
        }
    }
}

/// Pairs up points whose times differ by less than `t_tol`, nearest first.
pub fn cross_validate(
    analytic: &[ConjugatePoint],
    numeric: &[ConjugatePoint],
    t_tol: f64,
    mult_strict: bool,
) -> CrossReport {
    let mut used = vec![false; numeric.len()];
    let mut matched = Vec::new();
    let mut analytic_only = Vec::new();
    for a in analytic {
        let best = numeric
            .iter()
            .enumerate()
            .filter(|(j, n)| !used[*j] && (n.t0 - a.t0).abs() < t_tol)
            .min_by(|x, y| (x.1.t0 - a.t0).abs().total_cmp(&(y.1.t0 - a.t0).abs()));
        match best {
            Some((j, n)) => {
                used[j] = true;
                matched.push(MatchedPair {
                    analytic: a.clone(),
                    numeric: n.clone(),
                    dt: n.t0 - a.t0,
                    multiplicity_agrees: n.multiplicity == a.multiplicity,
                });
            }
            None => analytic_only.push(a.clone()),
        }
    }
    let numeric_only = numeric
        .iter()
        .zip(&used)
        .filter(|(_, u)| !**u)
        .map(|(n, _)| n.clone())
        .collect();
    CrossReport {
        matched,
        analytic_only,
        numeric_only,
        t_tol,
        mult_strict,
    }
}
