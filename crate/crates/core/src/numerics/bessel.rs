//! Modified Bessel functions of the second kind, orders 0 through 3.
//!
//! K0 and K1 come from one of three evaluators depending on the argument:
//!
//! * `u <= 2`: the ascending series (logarithmic terms included);
//! * `2 < u < 25`: Steed's continued fraction for the ratio K1/K0 together
//!   with Temme's normalisation sum;
//! * `u >= 25`: the Hankel asymptotic expansion, truncated once terms drop
//!   below double precision (the smallest term is of order `exp(-2u)`).
//!
//! Higher orders follow from the forward recurrence
//! `K_{n+1}(u) = K_{n-1}(u) + (2n/u) K_n(u)`, which is stable for K.
//! Every evaluator works with the exponentially scaled `exp(u) K_n(u)`, so the
//! scaled values stay finite for arbitrarily large `u`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Past this argument the unscaled functions are reported as exactly zero.
pub const UNDERFLOW_ARG: f64 = 700.0;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_MAX: f64 = 2.0;
const ASYMPTOTIC_MIN: f64 = 25.0;

/// An unscaled K value along with whether the underflow policy zeroed it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KValue {
    pub value: f64,
    pub underflow: bool,
}

/// `K_order(u)` for `order` in {1, 2, 3}. Returns 0 for `u > UNDERFLOW_ARG`.
pub fn bessel_k(order: u32, u: f64) -> Result<f64> {
    bessel_k_flagged(order, u).map(|k| k.value)
}

pub fn bessel_k_flagged(order: u32, u: f64) -> Result<KValue> {
    let scaled = bessel_k_scaled(order, u)?;
    if u > UNDERFLOW_ARG {
        return Ok(KValue {
            value: 0.0,
            underflow: true,
        });
    }
    Ok(KValue {
        value: scaled * (-u).exp(),
        underflow: false,
    })
}

/// `exp(u) K_order(u)` for `order` in {1, 2, 3}.
pub fn bessel_k_scaled(order: u32, u: f64) -> Result<f64> {
    if !(1..=3).contains(&order) {
        return Err(Error::domain(format!(
            "Bessel K order {order} is not supported (1, 2 or 3)"
        )));
    }
    check_argument(u)?;
    Ok(bessel_k_scaled_0123(u)[order as usize])
}

fn check_argument(u: f64) -> Result<()> {
    if u > 0.0 && u.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("Bessel K argument must be positive and finite, got {u}")))
    }
}

/// `[exp(u) K0(u), exp(u) K1(u), exp(u) K2(u), exp(u) K3(u)]` for `u > 0`.
///
/// No argument check; callers validate `u` first.
pub fn bessel_k_scaled_0123(u: f64) -> [f64; 4] {
    let (k0, k1) = if u <= SERIES_MAX {
        let (k0, k1) = k01_series(u);
        let e = u.exp();
        (k0 * e, k1 * e)
    } else if u < ASYMPTOTIC_MIN {
        k01_scaled_continued_fraction(u)
    } else {
        (asymptotic_scaled(0, u), asymptotic_scaled(1, u))
    };
    let k2 = k0 + 2.0 / u * k1;
    let k3 = k1 + 4.0 / u * k2;
    [k0, k1, k2, k3]
}

fn k01_series(x: f64) -> (f64, f64) {
    let t = 0.25 * x * x;
    let log_half = (0.5 * x).ln();

    // I0, I1 and the digamma-weighted companion sums.
    let mut term0 = 1.0; // t^k / (k!)^2
    let mut term1 = 1.0; // t^k / (k! (k+1)!)
    let mut harmonic = 0.0; // H_k
    let mut i0 = 0.0;
    let mut i1_sum = 0.0;
    let mut k0_sum = 0.0;
    let mut k1_sum = 0.0;
    for k in 0..60 {
        let kf = k as f64;
        if k > 0 {
            harmonic += 1.0 / kf;
            term0 *= t / (kf * kf);
            term1 *= t / (kf * (kf + 1.0));
        }
        let psi_k1 = -EULER_GAMMA + harmonic;
        let psi_k2 = psi_k1 + 1.0 / (kf + 1.0);
        i0 += term0;
        i1_sum += term1;
        k0_sum += harmonic * term0;
        k1_sum += (psi_k1 + psi_k2) * term1;
        if term0 < 1e-18 * i0 && term1 < 1e-18 * i1_sum {
            break;
        }
    }
    let i1 = 0.5 * x * i1_sum;
    let k0 = -(log_half + EULER_GAMMA) * i0 + k0_sum;
    let k1 = 1.0 / x + log_half * i1 - 0.25 * x * k1_sum;
    (k0, k1)
}

/// Scaled K0 and K1 via Steed's method on the second continued fraction.
fn k01_scaled_continued_fraction(x: f64) -> (f64, f64) {
    const EPS: f64 = 1e-17;
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

fn asymptotic_scaled(order: u32, x: f64) -> f64 {
    let mu = 4.0 * f64::from(order * order);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (8.0 * k as f64 * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    (PI / (2.0 * x)).sqrt() * sum
}
