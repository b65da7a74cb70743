//! Explicit Runge-Kutta integrators for matrix-valued ODEs `dS/dt = f(t, S)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Method {
    /// Classical fourth-order scheme with (at most) the given step; the step
    /// is shortened uniformly so that each call lands on its end time.
    Rk4 { step: f64 },
    /// Dormand-Prince 5(4) with per-component mixed error control.
    Rk45 { rel_tol: f64, abs_tol: f64 },
}

impl Default for Method {
    fn default() -> Self {
        Method::Rk45 {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
        }
    }
}

const MAX_STEPS: usize = 2_000_000;

// Dormand-Prince tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates from `(t0, y0)` to `t1 ≥ t0`.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn integrate<F>(mut rhs: F, t0: f64, y0: &DMatrix<f64>, t1: f64, method: Method) -> Result<DMatrix<f64>>
where
    F: FnMut(f64, &DMatrix<f64>) -> DMatrix<f64>,
{
    if !(t1 >= t0) {
        return Err(Error::IntegratorFailure {
            t: t0,
            reason: format!("end time {t1} precedes start time"),
        });
    }
    if t1 == t0 {
        return Ok(y0.clone());
    }
    match method {
        Method::Rk4 { step } => rk4(&mut rhs, t0, y0, t1, step),
        Method::Rk45 { rel_tol, abs_tol } => dopri5(&mut rhs, t0, y0, t1, rel_tol, abs_tol),
    }
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn rk4<F>(rhs: &mut F, t0: f64, y0: &DMatrix<f64>, t1: f64, step: f64) -> Result<DMatrix<f64>>
where
    F: FnMut(f64, &DMatrix<f64>) -> DMatrix<f64>,
{
    if !(step > 0.0) {
        return Err(Error::InvalidConfig(format!("RK4 step must be positive, got {step}")));
    }
    let n = ((t1 - t0) / step).ceil().max(1.0) as usize;
    let h = (t1 - t0) / n as f64;
    let mut y = y0.clone();
    for i in 0..n {
        let t = t0 + h * i as f64;
        let k1 = rhs(t, &y);
        let k2 = rhs(t + 0.5 * h, &(&y + &k1 * (0.5 * h)));
        let k3 = rhs(t + 0.5 * h, &(&y + &k2 * (0.5 * h)));
        let k4 = rhs(t + h, &(&y + &k3 * h));
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Ok(y)
}

fn dopri5<F>(rhs: &mut F, t0: f64, y0: &DMatrix<f64>, t1: f64, rel_tol: f64, abs_tol: f64) -> Result<DMatrix<f64>>
where
    F: FnMut(f64, &DMatrix<f64>) -> DMatrix<f64>,
{
    if !(rel_tol > 0.0 && abs_tol > 0.0) {
        return Err(Error::InvalidConfig("RK45 tolerances must be positive".into()));
    }
    let span = t1 - t0;
    let mut t = t0;
    let mut y = y0.clone();
    let mut h = (span / 16.0).min(0.05);
    let mut k: Vec<DMatrix<f64>> = Vec::with_capacity(7);
    let mut k1 = rhs(t, &y);

    for _ in 0..MAX_STEPS {
        if t >= t1 {
            return Ok(y);
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        k.clear();
        k.push(k1.clone());
        let mut y_new = y.clone();
        for s in 1..7 {
            let mut arg = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let c = A[s][j];
                if c != 0.0 {
                    arg += kj * (h * c);
                }
            }
            if s == 6 {
                y_new = arg.clone();
            }
            k.push(rhs(t + C[s] * h, &arg));
        }

        let mut err: f64 = 0.0;
        for idx in 0..y.len() {
            let mut e = 0.0;
            for (s, ks) in k.iter().enumerate() {
                e += E[s] * ks[idx];
            }
            let scale = abs_tol + rel_tol * y[idx].abs().max(y_new[idx].abs());
            err = err.max((h * e).abs() / scale);
        }
        if !err.is_finite() {
            return Err(Error::IntegratorFailure {
                t,
                reason: "non-finite state".into(),
            });
        }

        if err <= 1.0 {
            t = if last { t1 } else { t + h };
            y = y_new;
            k1 = k[6].clone();
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < 1e-14 * t.abs().max(span) {
            return Err(Error::IntegratorFailure {
                t,
                reason: "step size underflow".into(),
            });
        }
    }
    Err(Error::IntegratorFailure {
        t,
        reason: "too many steps".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(_: f64, y: &DMatrix<f64>) -> DMatrix<f64> {
        let gen = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        gen * y
    }

    #[test]
    fn rk45_harmonic_oscillator() {
        let y0 = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let y = integrate(harmonic, 0.0, &y0, 10.0, Method::default()).unwrap();
        assert!((y[0] - 10f64.cos()).abs() < 1e-9);
        assert!((y[1] + 10f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn rk4_converges_at_fourth_order() {
        let y0 = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let err = |h: f64| {
            let y = integrate(harmonic, 0.0, &y0, 1.0, Method::Rk4 { step: h }).unwrap();
            (y[0] - 1f64.cos()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn zero_span_returns_input() {
        let y0 = DMatrix::from_column_slice(2, 1, &[1.0, 2.0]);
        assert_eq!(integrate(harmonic, 1.0, &y0, 1.0, Method::default()).unwrap(), y0);
        assert!(integrate(harmonic, 1.0, &y0, 0.0, Method::default()).is_err());
    }
}
