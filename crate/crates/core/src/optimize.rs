//! Derivative-free scalar minimization and root bracketing.

use alloc::vec::Vec;


use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Brent's method (golden section with parabolic steps) on `[lo, hi]`.
/// Stops when the bracket is narrower than `2·(tol·|x| + tol_abs)`.
pub fn brent_minimize(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    tol: f64,
    tol_abs: f64,
    max_iter: usize,
) -> Result<Minimum> {
    const GOLDEN: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = if lo < hi { (lo, hi) } else { (hi, lo) };
    let mut x = a + GOLDEN * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x)?;
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for iter in 0..max_iter {
        let xm = 0.5 * (a + b);
        let tol1 = tol * x.abs() + tol_abs;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            return Ok(Minimum { x, value: fx, iterations: iter });
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + if d >= 0.0 { tol1 } else { -tol1 } };
        let fu = f(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Err(Error::Numerical(alloc::format!("Brent minimization did not converge in {max_iter} iterations")))
}

/// Minimize `f` over `[lo, hi]` after a coarse scan of `samples` points.
/// Fails with [`Error::Bracket`] when the smallest sample sits on an end
/// point, i.e. there is no interior minimum to refine.
pub fn scan_then_minimize(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    samples: usize,
    tol: f64,
    tol_abs: f64,
    max_iter: usize,
) -> Result<(Minimum, Vec<(f64, f64)>)> {
    let samples = samples.max(3);
    let mut table = Vec::with_capacity(samples);
    for i in 0..samples {
        let x = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        table.push((x, f(x)?));
    }
    let best = table
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if best == 0 || best == samples - 1 {
        return Err(Error::Bracket { lo, hi, samples: table });
    }
    let m = brent_minimize(&mut f, table[best - 1].0, table[best + 1].0, tol, tol_abs, max_iter)?;
    Ok((m, table))
}

/// Bisection for a sign change of `f` on `[lo, hi]`; `mid` chooses the
/// split point (arithmetic or geometric).
pub fn bisect(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    mid: impl Fn(f64, f64) -> f64,
    rel_tol: f64,
    max_iter: usize,
) -> Result<(f64, f64, f64)> {
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok((lo, lo, hi));
    }
    if fhi == 0.0 {
        return Ok((hi, lo, hi));
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket { lo, hi, samples: alloc::vec![(lo, flo), (hi, fhi)] });
    }
    for _ in 0..max_iter {
        if (hi - lo).abs() <= rel_tol * hi.abs().max(lo.abs()) {
            break;
        }
        let m = mid(lo, hi);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok((m, lo, hi));
        }
        if fm.signum() == flo.signum() {
            lo = m;
            flo = fm;
        } else {
            hi = m;
        }
    }
    Ok((mid(lo, hi), lo, hi))
}
