//! Adaptive 15-point Gauss-Kronrod quadrature with global error control,
//! plus the semi-infinite and two-dimensional drivers built on it.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use super::Tolerance;
use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Integral of |f| over the segment, used for the round-off floor.
    magnitude: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_kronrod = fc * WGK[7];
    let mut res_gauss = fc * WG[3];
    let mut res_abs = fc.abs() * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_kronrod - res_gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    Segment {
        a,
        b,
        value,
        error,
        magnitude: res_abs,
    }
}

/// Adaptive integration of `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Quadrature> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Adaptive integration over the consecutive intervals delimited by `breaks`.
///
/// The error target is `max(tol.abs, tol.rel * |I|)`, floored at a small
/// multiple of the round-off level `eps * ∫|f|`.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Quadrature> {
    if breaks.len() < 2 {
        return Err(Error::domain("integration needs at least two break points"));
    }
    if breaks.iter().any(|x| !x.is_finite()) || breaks.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("break points must be finite and non-decreasing"));
    }
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(gauss_kronrod(&mut f, w[0], w[1]));
            evals += 15;
        }
    }
    // Segments too narrow to split further keep their error but leave the heap.
    let mut frozen: Vec<Segment> = Vec::new();
    loop {
        let (value, error, magnitude) = heap
            .iter()
            .chain(frozen.iter())
            .fold((0.0, 0.0, 0.0), |acc, s| (acc.0 + s.value, acc.1 + s.error, acc.2 + s.magnitude));
        let target = tol.target(value).max(50.0 * f64::EPSILON * magnitude);
        if error <= target {
            return Ok(Quadrature { value, error, evals });
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => return Ok(Quadrature { value, error, evals }),
        };
        if evals + 30 > tol.max_evals {
            return Err(Error::Convergence {
                what: "adaptive quadrature",
                evals,
                estimate: error,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 1e-14 * mid.abs().max(1e-300) {
            frozen.push(worst);
            continue;
        }
        // Split repeatedly before re-summing: keeps the bookkeeping cost low.
        heap.push(gauss_kronrod(&mut f, worst.a, mid));
        heap.push(gauss_kronrod(&mut f, mid, worst.b));
        evals += 30;
        let mut extra = heap.len() / 8;
        while extra > 0 && evals + 30 <= tol.max_evals {
            let s = heap.pop().expect("non-empty heap");
            let m = 0.5 * (s.a + s.b);
            if m <= s.a || m >= s.b {
                frozen.push(s);
            } else {
                heap.push(gauss_kronrod(&mut f, s.a, m));
                heap.push(gauss_kronrod(&mut f, m, s.b));
                evals += 30;
            }
            extra -= 1;
        }
    }
}

/// Integral over `[0, ∞)` through the substitution `ξ = scale · t / (1 − t)`.
///
/// `scale` should sit near the knee of the integrand (for a Lorentzian, the
/// oscillator frequency) so the mapped integrand is spread over `(0, 1)`.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    scale: f64,
    tol: Tolerance,
) -> Result<Quadrature> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::domain(format!("semi-infinite scale must be positive, got {scale}")));
    }
    let mapped = |t: f64| {
        let s = 1.0 - t;
        f(scale * t / s) * scale / (s * s)
    };
    integrate(mapped, 0.0, 1.0, tol)
}

/// Power-law envelope `|f(r)| <= coefficient / |r - center|^power` used to
/// truncate an integral over the whole plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailBound {
    pub coefficient: f64,
    pub power: f64,
}

impl TailBound {
    /// Bound on the integral over `|r - center| > radius`.
    pub fn tail(&self, radius: f64) -> f64 {
        2.0 * PI * self.coefficient * radius.powf(2.0 - self.power) / (self.power - 2.0)
    }

    /// Smallest radius whose tail bound is `budget`.
    pub fn radius_for(&self, budget: f64) -> f64 {
        (2.0 * PI * self.coefficient / ((self.power - 2.0) * budget)).powf(1.0 / (self.power - 2.0))
    }
}

/// Integration domain for [`integrate_2d`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain2d {
    Rectangle {
        x: (f64, f64),
        y: (f64, f64),
    },
    /// The whole plane, integrated in polar coordinates about `center` and
    /// truncated where the tail bound drops to half of `tol.abs`. `scale` is
    /// the length over which the integrand varies near the center.
    Plane {
        center: (f64, f64),
        scale: f64,
        tail: TailBound,
    },
}

/// Two-dimensional integral as nested adaptive quadrature.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(f: F, domain: Domain2d, tol: Tolerance) -> Result<Quadrature> {
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_evals = RefCell::new(0usize);
    let inner_rel = tol.rel;

    let result = match domain {
        Domain2d::Rectangle { x, y } => {
            if !(x.1 > x.0 && y.1 > y.0) {
                return Err(Error::domain("rectangle bounds must be increasing"));
            }
            let inner_abs = tol.abs / (2.0 * (x.1 - x.0));
            let outer = |xv: f64| {
                if failure.borrow().is_some() {
                    return 0.0;
                }
                let inner_tol = Tolerance {
                    rel: inner_rel,
                    abs: inner_abs,
                    max_evals: tol.max_evals,
                };
                match integrate(|yv| f(xv, yv), y.0, y.1, inner_tol) {
                    Ok(q) => {
                        *inner_evals.borrow_mut() += q.evals;
                        q.value
                    }
                    Err(e) => {
                        *failure.borrow_mut() = Some(e);
                        0.0
                    }
                }
            };
            let outer_tol = Tolerance {
                abs: 0.5 * tol.abs,
                ..tol
            };
            integrate(outer, x.0, x.1, outer_tol)
        }
        Domain2d::Plane { center, scale, tail } => {
            if tail.power < 4.0 {
                return Err(Error::domain("plane integrand must decay at least as |r|^-4"));
            }
            if !(tol.abs > 0.0) {
                return Err(Error::domain("plane integration needs an absolute tolerance for truncation"));
            }
            if !(scale > 0.0) {
                return Err(Error::domain("plane scale must be positive"));
            }
            let radius = tail.radius_for(0.5 * tol.abs).max(scale);
            let mut breaks = vec![0.0];
            let mut r = scale;
            while r < radius {
                breaks.push(r);
                r *= 2.0;
            }
            breaks.push(radius);
            let outer = |rho: f64| {
                if failure.borrow().is_some() {
                    return 0.0;
                }
                // Inner errors weighted by rho add up to at most tol.abs / 4.
                let inner_tol = Tolerance {
                    rel: inner_rel,
                    abs: 0.25 * tol.abs / (radius * rho.max(1e-3 * scale)),
                    max_evals: tol.max_evals,
                };
                let ring = |phi: f64| f(center.0 + rho * phi.cos(), center.1 + rho * phi.sin());
                match integrate(ring, 0.0, 2.0 * PI, inner_tol) {
                    Ok(q) => {
                        *inner_evals.borrow_mut() += q.evals;
                        rho * q.value
                    }
                    Err(e) => {
                        *failure.borrow_mut() = Some(e);
                        0.0
                    }
                }
            };
            let outer_tol = Tolerance {
                abs: 0.25 * tol.abs,
                ..tol
            };
            integrate_with_breaks(outer, &breaks, outer_tol)
        }
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let mut q = result?;
    q.evals += inner_evals.into_inner();
    Ok(q)
}
