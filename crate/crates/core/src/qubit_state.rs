//! Single-qubit mixed states as Bloch vectors.
//!
//! Rotation handedness follows the Heisenberg relations of the ZZ coupling:
//! under `u = exp(iθZ)`, `u† X u = X cos 2θ + Y sin 2θ` and
//! `u† Y u = Y cos 2θ − X sin 2θ`. The Schrödinger-picture Bloch vector
//! therefore transforms as `x' = x cos 2θ + y sin 2θ`, `y' = y cos 2θ − x sin 2θ`.
//! The field kick `exp(−ihX)` takes `|0⟩` towards `−Y`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Slack on the unit-ball constraint.
pub const BALL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Default for BlochState {
    fn default() -> Self {
        Self::ZERO_KET
    }
}

impl BlochState {
    /// `|0⟩`, the initial state of every engine.
    pub const ZERO_KET: BlochState = BlochState {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        BlochState { x, y, z }
    }

    /// Like [`BlochState::new`] but rejects points outside the Bloch ball.
    pub fn checked(x: f64, y: f64, z: f64) -> Result<Self> {
        let s = BlochState { x, y, z };
        if !(x.is_finite() && y.is_finite() && z.is_finite()) || !s.is_physical() {
            return Err(Error::validation(format!(
                "({x}, {y}, {z}) is not a physical Bloch vector"
            )));
        }
        Ok(s)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Length of the transverse (x, y) component.
    pub fn coherence(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_physical(&self) -> bool {
        self.x * self.x + self.y * self.y + self.z * self.z <= 1.0 + BALL_TOLERANCE
    }

    /// Rotation generated by `exp(−ihX)`: angle `2h` about X.
    pub fn rotate_x(self, h: f64) -> Self {
        let (s, c) = (2.0 * h).sin_cos();
        BlochState {
            x: self.x,
            y: self.y * c - self.z * s,
            z: self.z * c + self.y * s,
        }
    }

    /// Rotation generated by `exp(iθZ)` with half-angle `theta`.
    pub fn rotate_z(self, theta: f64) -> Self {
        let (s, c) = (2.0 * theta).sin_cos();
        BlochState {
            x: self.x * c + self.y * s,
            y: self.y * c - self.x * s,
            z: self.z,
        }
    }

    /// Pure dephasing `ρ → (1−p)ρ + pZρZ`.
    pub fn dephase(self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::validation(format!(
                "dephasing probability {p} outside [0, 1]"
            )));
        }
        Ok(self.shrink_coherence(1.0 - 2.0 * p))
    }

    /// Scales (x, y) by `factor`, leaving z alone.
    pub(crate) fn shrink_coherence(self, factor: f64) -> Self {
        BlochState {
            x: self.x * factor,
            y: self.y * factor,
            z: self.z,
        }
    }

    /// `ρ = (1 + xX + yY + zZ) / 2` as a row-major 2×2 matrix.
    pub fn density_matrix(&self) -> [[Complex64; 2]; 2] {
        let half = 0.5;
        [
            [
                Complex64::new(half * (1.0 + self.z), 0.0),
                Complex64::new(half * self.x, -half * self.y),
            ],
            [
                Complex64::new(half * self.x, half * self.y),
                Complex64::new(half * (1.0 - self.z), 0.0),
            ],
        ]
    }

    /// Inverse of [`BlochState::density_matrix`]: `(Tr ρX, Tr ρY, Tr ρZ)`.
    pub fn from_density_matrix(rho: &[[Complex64; 2]; 2]) -> Self {
        BlochState {
            x: 2.0 * rho[1][0].re,
            y: 2.0 * rho[1][0].im,
            z: (rho[0][0] - rho[1][1]).re,
        }
    }

    /// Eigenvalues of the reconstructed density matrix, `(1 ± |r|) / 2`.
    pub fn density_eigenvalues(&self) -> (f64, f64) {
        let r = self.norm();
        (0.5 * (1.0 - r), 0.5 * (1.0 + r))
    }
}

/// `p = ½(1 − exp(−2 J² variance))`, the dephasing probability induced by a
/// Gaussian Z field of the given variance. Always in `[0, ½)`.
pub fn dephasing_probability(variance: f64, j: f64) -> Result<f64> {
    if variance.is_nan() || variance < 0.0 {
        return Err(Error::validation(format!(
            "variance must be >= 0, got {variance}"
        )));
    }
    Ok(-0.5 * (-2.0 * j * j * variance).exp_m1())
}

/// Circuit angles and step count.
///
/// `j` and `h` are the half-angles: θ_J = 2J, θ_h = 2h.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    pub j: f64,
    pub h: f64,
    pub steps: usize,
}

impl DriveParams {
    pub fn new(j: f64, h: f64, steps: usize) -> Result<Self> {
        if !(j.is_finite() && h.is_finite()) {
            return Err(Error::validation("drive angles must be finite"));
        }
        Ok(DriveParams { j, h, steps })
    }

    /// From the full rotation angles θ_J and θ_h.
    pub fn from_angles(theta_j: f64, theta_h: f64, steps: usize) -> Result<Self> {
        Self::new(theta_j / 2.0, theta_h / 2.0, steps)
    }

    pub fn theta_j(&self) -> f64 {
        2.0 * self.j
    }

    pub fn theta_h(&self) -> f64 {
        2.0 * self.h
    }
}
