//! Bracketing root finder (Brent: bisection, secant and inverse quadratic
//! interpolation with the bracket always maintained) and a golden-section
//! minimiser.

use super::Tolerance;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::domain(format!("bracket needs finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Root of `f` inside `bracket`.
///
/// Stops when the bracket has shrunk below `2 (tol.abs + tol.rel |x|)` or an
/// exact zero is hit. The returned point always lies inside the bracket.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, bracket: Bracket, tol: Tolerance) -> Result<f64> {
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (f(a), f(b));
    let mut evals = 2;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoSignChange { lo: a, hi: b });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    loop {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * (tol.abs + tol.rel * b.abs());
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b.clamp(bracket.lo, bracket.hi));
        }
        if evals >= tol.max_evals {
            return Err(Error::Convergence {
                what: "root finder",
                evals,
                estimate: xm.abs(),
            });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        evals += 1;
    }
}

/// First consecutive pair of `points` across which `f` changes sign.
pub fn first_sign_change<F, I>(mut f: F, points: I) -> Option<Bracket>
where
    F: FnMut(f64) -> f64,
    I: IntoIterator<Item = f64>,
{
    let mut prev: Option<(f64, f64)> = None;
    for x in points {
        let fx = f(x);
        if let Some((px, pf)) = prev {
            if pf == 0.0 || pf.signum() != fx.signum() {
                let (lo, hi) = if px < x { (px, x) } else { (x, px) };
                return Some(Bracket { lo, hi });
            }
        }
        prev = Some((x, fx));
    }
    None
}

/// Golden-section search for a minimum of a unimodal `f` on `bracket`.
pub fn minimize_scalar<F: FnMut(f64) -> f64>(mut f: F, bracket: Bracket, tol: Tolerance) -> Result<f64> {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut evals = 2;
    while (b - a) > 2.0 * (tol.abs + tol.rel * (0.5 * (a + b)).abs()) {
        if evals >= tol.max_evals {
            return Err(Error::Convergence {
                what: "golden-section search",
                evals,
                estimate: b - a,
            });
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        }
        evals += 1;
    }
    Ok(if f1 <= f2 { x1 } else { x2 })
}
