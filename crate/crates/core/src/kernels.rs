//! Geometric response functions of the corrugated conductor.
//!
//! `kernel_i` gives the Fourier-space kernel `I_ij(z0, q) = K⁽²⁾_ij K2(z0|q|) + K⁽³⁾_ij K3(z0|q|)`
//! entering the first-order energy for an arbitrary profile. For a single
//! cosine along x the kernel collapses onto the dimensionless response
//! functions `R_ij(u)`, `u = k z0`:
//!
//! ```text
//! R_xx = u³K3 − u⁴K2        R_yy = u³K3
//! R_zz = (u⁴ + 16u²/3)K2 + (2/3)u³K3
//! R_xz = (8/3)u³K2 − u⁴K3
//! ```
//!
//! with `I_ii(z0, k x̂) = 3 R_ii / (8 z0⁴)` and `I_xz(z0, ±k x̂) = ±3i R_xz / (8 z0⁴)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::moments::SecondMoments;
use crate::numerics::{bessel_k_scaled_0123, UNDERFLOW_ARG};

/// Below this `z0 |q|` the kernel is replaced by its `q → 0` limit.
const SMALL_U: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct WaveVector {
    pub qx: f64,
    pub qy: f64,
}

impl WaveVector {
    pub fn new(qx: f64, qy: f64) -> Self {
        Self { qx, qy }
    }

    pub fn along_x(k: f64) -> Self {
        Self { qx: k, qy: 0.0 }
    }

    pub fn norm(&self) -> f64 {
        self.qx.hypot(self.qy)
    }

    pub fn dot(&self, r: (f64, f64)) -> f64 {
        self.qx * r.0 + self.qy * r.1
    }
}

impl std::ops::Neg for WaveVector {
    type Output = WaveVector;
    fn neg(self) -> WaveVector {
        WaveVector::new(-self.qx, -self.qy)
    }
}

/// The six independent entries of the symmetric kernel `I_ij` (units m⁻⁴).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KernelMatrix {
    pub xx: Complex64,
    pub yy: Complex64,
    pub zz: Complex64,
    pub xy: Complex64,
    pub xz: Complex64,
    pub yz: Complex64,
}

impl KernelMatrix {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match (i.min(j), i.max(j)) {
            (0, 0) => self.xx,
            (1, 1) => self.yy,
            (2, 2) => self.zz,
            (0, 1) => self.xy,
            (0, 2) => self.xz,
            (1, 2) => self.yz,
            _ => panic!("kernel index out of range: ({i}, {j})"),
        }
    }

    /// `Σ_ij D_ij I_ij`.
    pub fn contract(&self, d: &SecondMoments) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                acc += self.get(i, j) * d.get(i, j);
            }
        }
        acc
    }

    fn scale(self, s: f64) -> Self {
        Self {
            xx: self.xx * s,
            yy: self.yy * s,
            zz: self.zz * s,
            xy: self.xy * s,
            xz: self.xz * s,
            yz: self.yz * s,
        }
    }

    fn add(self, o: Self) -> Self {
        Self {
            xx: self.xx + o.xx,
            yy: self.yy + o.yy,
            zz: self.zz + o.zz,
            xy: self.xy + o.xy,
            xz: self.xz + o.xz,
            yz: self.yz + o.yz,
        }
    }
}

/// Coefficient matrices `(K⁽²⁾, K⁽³⁾)` multiplying `K2(z0|q|)` and `K3(z0|q|)`.
pub fn kernel_coefficients(z0: f64, q: WaveVector) -> (KernelMatrix, KernelMatrix) {
    let (qx, qy) = (q.qx, q.qy);
    let q1 = q.norm();
    let q2 = q1 * q1;
    let q3 = q2 * q1;
    let re = |v: f64| Complex64::new(v, 0.0);
    let im = |v: f64| Complex64::new(0.0, v);
    let k2 = KernelMatrix {
        xx: re(-0.375 * qx * qx * q2),
        yy: re(-0.375 * qy * qy * q2),
        zz: re((2.0 + 0.375 * z0 * z0 * q2) * q2 / (z0 * z0)),
        xy: re(-0.375 * qx * qy * q2),
        xz: im(qx * q2 / z0),
        yz: im(qy * q2 / z0),
    };
    let k3 = KernelMatrix {
        xx: re(0.375 * q3 / z0),
        yy: re(0.375 * q3 / z0),
        zz: re(0.25 * q3 / z0),
        xy: re(0.0),
        xz: im(-0.375 * qx * q3),
        yz: im(-0.375 * qy * q3),
    };
    (k2, k3)
}

/// The kernel `I_ij(z0, q)`. At `q = 0` the finite analytic limit
/// `diag(3, 3, 6) / z0⁴` is returned; past the Bessel underflow point the
/// kernel is zero.
pub fn kernel_i(z0: f64, q: WaveVector) -> Result<KernelMatrix> {
    if !(z0 > 0.0 && z0.is_finite()) {
        return Err(Error::domain(format!("z0 must be positive, got {z0}")));
    }
    let u = z0 * q.norm();
    if u < SMALL_U {
        let c = 1.0 / z0.powi(4);
        let re = |v: f64| Complex64::new(v, 0.0);
        return Ok(KernelMatrix {
            xx: re(3.0 * c),
            yy: re(3.0 * c),
            zz: re(6.0 * c),
            ..Default::default()
        });
    }
    if u > UNDERFLOW_ARG {
        return Ok(KernelMatrix::default());
    }
    let k = bessel_k_scaled_0123(u);
    let decay = (-u).exp();
    let (c2, c3) = kernel_coefficients(z0, q);
    Ok(c2.scale(k[2] * decay).add(c3.scale(k[3] * decay)))
}

/// Which response function to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Response {
    Xx,
    Yy,
    Zz,
    Xz,
}

/// All four response functions at one argument.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResponseSet {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub xz: f64,
}

impl ResponseSet {
    /// The `u → 0` (proximity-force) limit.
    pub const SMALL_U_LIMIT: ResponseSet = ResponseSet {
        xx: 8.0,
        yy: 8.0,
        zz: 16.0,
        xz: 0.0,
    };

    pub fn get(&self, which: Response) -> f64 {
        match which {
            Response::Xx => self.xx,
            Response::Yy => self.yy,
            Response::Zz => self.zz,
            Response::Xz => self.xz,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.xx.abs().max(self.yy.abs()).max(self.zz.abs()).max(self.xz.abs())
    }

    fn scale(self, s: f64) -> Self {
        Self {
            xx: self.xx * s,
            yy: self.yy * s,
            zz: self.zz * s,
            xz: self.xz * s,
        }
    }
}

fn check_u(u: f64) -> Result<()> {
    if u > 0.0 && u.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("response argument must be positive, got {u}")))
    }
}

/// `exp(u) · R_ij(u)`; finite for every `u > 0`, same sign as `R_ij`.
pub fn response_set_scaled(u: f64) -> Result<ResponseSet> {
    check_u(u)?;
    let k = bessel_k_scaled_0123(u);
    let (k2, k3) = (k[2], k[3]);
    let u3 = u * u * u;
    // Factor u³ out so only the bracket sees the u⁴ vs u³ competition.
    Ok(ResponseSet {
        xx: u3 * (k3 - u * k2),
        yy: u3 * k3,
        zz: u3 * ((u + 16.0 / (3.0 * u)) * k2 + 2.0 / 3.0 * k3),
        xz: u3 * (8.0 / 3.0 * k2 - u * k3),
    })
}

/// `R_ij(u)`; zero once `u` passes the Bessel underflow point.
pub fn response_set(u: f64) -> Result<ResponseSet> {
    let scaled = response_set_scaled(u)?;
    if u > UNDERFLOW_ARG {
        return Ok(scaled.scale(0.0));
    }
    Ok(scaled.scale((-u).exp()))
}

pub fn response_r(which: Response, u: f64) -> Result<f64> {
    response_set(u).map(|r| r.get(which))
}

pub fn response_r_scaled(which: Response, u: f64) -> Result<f64> {
    response_set_scaled(u).map(|r| r.get(which))
}
