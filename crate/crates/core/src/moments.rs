//! Symmetric positive-semidefinite second-moment matrices.
//!
//! The same matrix plays two roles: `d_i d_j` for a permanent classical
//! dipole and the ground-state expectation `<d_i d_j>` of a polarizable
//! particle. Units are C² m².

use crate::error::{Error, Result};

/// Components whose magnitude falls below this are snapped to zero when an
/// axis is built from angles, so axis-aligned orientations give exactly
/// diagonal matrices.
const AXIS_SNAP: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondMoments {
    m: [[f64; 3]; 3],
}

/// Unit vector `(sinθ cosφ, sinθ sinφ, cosθ)`.
pub fn axis_from_angles(phi: f64, theta: f64) -> [f64; 3] {
    let snap = |v: f64| if v.abs() < AXIS_SNAP { 0.0 } else { v };
    let (st, ct) = (snap(theta.sin()), snap(theta.cos()));
    let (sp, cp) = (snap(phi.sin()), snap(phi.cos()));
    [st * cp, st * sp, ct]
}

impl SecondMoments {
    pub fn zero() -> Self {
        Self { m: [[0.0; 3]; 3] }
    }

    /// Validates symmetry and positive semidefiniteness.
    pub fn from_matrix(m: [[f64; 3]; 3]) -> Result<Self> {
        let scale = m.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::domain("second moments must be finite"));
        }
        let eps = 1e-10;
        for i in 0..3 {
            for j in 0..i {
                if (m[i][j] - m[j][i]).abs() > eps * scale {
                    return Err(Error::domain("second-moment matrix must be symmetric"));
                }
            }
        }
        let minors2 = [
            m[0][0] * m[1][1] - m[0][1] * m[1][0],
            m[0][0] * m[2][2] - m[0][2] * m[2][0],
            m[1][1] * m[2][2] - m[1][2] * m[2][1],
        ];
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        let psd = (0..3).all(|i| m[i][i] >= -eps * scale)
            && minors2.iter().all(|&v| v >= -eps * scale * scale)
            && det >= -eps * scale * scale * scale;
        if !psd {
            return Err(Error::domain("second-moment matrix must be positive semidefinite"));
        }
        Ok(Self { m })
    }

    /// `d_i d_j` for a dipole vector.
    pub fn from_dipole_vector(d: [f64; 3]) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = d[i] * d[j];
            }
        }
        Self { m }
    }

    /// Dipole of magnitude `|d|` along the spherical direction `(phi, theta)`.
    pub fn from_dipole(magnitude: f64, phi: f64, theta: f64) -> Self {
        let n = axis_from_angles(phi, theta);
        Self::from_dipole_vector([magnitude * n[0], magnitude * n[1], magnitude * n[2]])
    }

    pub fn isotropic(value: f64) -> Self {
        Self::uniaxial(value, value, [0.0, 0.0, 1.0])
    }

    /// `transverse δ_ij + (parallel − transverse) n_i n_j` for a unit axis `n`.
    pub fn uniaxial(parallel: f64, transverse: f64, axis: [f64; 3]) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (parallel - transverse) * axis[i] * axis[j];
                if i == j {
                    *v += transverse;
                }
            }
        }
        Self { m }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn as_array(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn xx(&self) -> f64 {
        self.m[0][0]
    }
    pub fn yy(&self) -> f64 {
        self.m[1][1]
    }
    pub fn zz(&self) -> f64 {
        self.m[2][2]
    }
    pub fn xz(&self) -> f64 {
        self.m[0][2]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    /// `xx + yy + 2 zz`, the combination weighting the flat-plane energy.
    pub fn flat_weight(&self) -> f64 {
        self.m[0][0] + self.m[1][1] + 2.0 * self.m[2][2]
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut m = self.m;
        m.iter_mut().flatten().for_each(|v| *v *= s);
        Self { m }
    }
}
