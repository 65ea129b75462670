//! Derivative-free one-dimensional searches.

use crate::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const SCAN_POINTS: usize = 65;
const MAX_ITER: usize = 400;

fn scan(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    (0..SCAN_POINTS)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64;
            (x, f(x))
        })
        .collect()
}

/// Minimizes `f` on `[lo, hi]`.
///
/// A uniform scan picks the bracket around the best grid point, then golden
/// section narrows it to `tol`. A minimum on an end point is returned as is.
pub fn golden_section(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, parameter: &'static str) -> Result<(f64, f64)> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::BracketFailure { parameter, grid: vec![(lo, f64::NAN), (hi, f64::NAN)] });
    }
    let grid = scan(&f, lo, hi);
    let best = grid
        .iter()
        .enumerate()
        .filter(|(_, (_, y))| y.is_finite())
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i);
    let Some(i) = best else {
        return Err(Error::BracketFailure { parameter, grid });
    };
    let (mut a, mut b) = (grid[i.saturating_sub(1)].0, grid[(i + 1).min(SCAN_POINTS - 1)].0);

    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..MAX_ITER {
        if b - a <= tol {
            break;
        }
        // NaN compares false and pushes the search away from it
        if fc < fd || fd.is_nan() {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mut candidates = [(0.5 * (a + b), f(0.5 * (a + b))), (c, fc), (d, fd), grid[i]];
    candidates.sort_by(|p, q| p.1.total_cmp(&q.1));
    let (x, y) = candidates.into_iter().find(|(_, y)| y.is_finite()).ok_or(Error::BracketFailure { parameter, grid })?;
    Ok((x, y))
}

/// Root of `f` in `[lo, hi]` by bisection; `f(lo)` and `f(hi)` must differ in sign.
pub fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, parameter: &'static str) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if !(fa * fb <= 0.0) {
        return Err(Error::BracketFailure { parameter, grid: vec![(a, fa), (b, fb)] });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    let sa = fa.signum();
    for _ in 0..MAX_ITER {
        let m = 0.5 * (a + b);
        if b - a <= tol || m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm.is_nan() {
            return Err(Error::BracketFailure { parameter, grid: vec![(a, fa), (m, fm), (b, fb)] });
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
