//! Bracketed root finding for continuous scalar functions.

/// Bisection on `[lo, hi]` given `f(lo)` and `f(hi)` of opposite sign (or one
/// of them zero). Runs until the bracket cannot be split any further in
/// floating point, or `max_iter` halvings, and returns the endpoint with the
/// smaller `|f|`.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, max_iter: usize) -> Option<f64>
where
    F: Fn(f64) -> f64,
{
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    Some(if flo.abs() <= fhi.abs() { lo } else { hi })
}

/// Every sign change of `f` on a uniform grid of `cells` subintervals of
/// `[lo, hi]`, each refined by [`bisect`]. Grid nodes where `f` vanishes
/// exactly are reported once. Tangential (even-order) roots are not found.
pub fn bracket_roots<F>(f: F, lo: f64, hi: f64, cells: usize) -> Vec<f64>
where
    F: Fn(f64) -> f64,
{
    let cells = cells.max(1);
    let h = (hi - lo) / cells as f64;
    let node = |i: usize| if i == cells { hi } else { lo + h * i as f64 };
    let mut roots = Vec::new();
    let mut t_prev = node(0);
    let mut f_prev = f(t_prev);
    if f_prev == 0.0 {
        roots.push(t_prev);
    }
    for i in 1..=cells {
        let t = node(i);
        let ft = f(t);
        if ft == 0.0 {
            roots.push(t);
        } else if f_prev != 0.0 && f_prev.signum() != ft.signum() {
            if let Some(r) = bisect(&f, t_prev, t, 200) {
                roots.push(r);
            }
        }
        t_prev = t;
        f_prev = ft;
    }
    roots
}
