//! The quasiclassical coordinate: `xi`, `eta`, the map `x -> z`, its inverse,
//! the effective potential, the turning point and the curve `Gamma_lambda`.
//!
//! Only `Im lambda >= 0` is handled; the lower half-plane follows by
//! conjugation. On the real segment `t <= 1` the lower side `t - i0` is the
//! default sheet.

mod contour;
mod potential;
mod turning;
mod xi;
mod zmap;

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{PcfError, Result};

pub use contour::{
    chi_at, gamma_by_chi, gamma_by_kappa, gamma_contour, gamma_integral, gamma_integral_x, kappa_at, GammaContour,
    IntegralKind, IntegralValue,
};
pub use potential::{v_eta, v_eta_with_radius, V0};
pub use turning::{d_abs_xi_sq, turning_point, TurningPoint};
pub use xi::{eta, eta_with_derivative, in_d_t, xi, xi_prime, CutSide, XiValue, ETA_0, ETA_E};
pub use zmap::{dz_dx, eta_inverse, x_of_z, z_of_x};

/// `lambda = |lambda| e^{2 i theta}` with `theta` in `[0, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameter {
    modulus: f64,
    theta: f64,
}

impl SpectralParameter {
    /// Smallest modulus the estimates are stated for.
    pub const MIN_MODULUS: f64 = 0.5;

    pub fn new(modulus: f64, theta: f64) -> Result<Self> {
        if !(modulus >= Self::MIN_MODULUS) || !modulus.is_finite() {
            return Err(PcfError::Range(format!("|lambda| = {modulus} below 1/2")));
        }
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(PcfError::Range(format!("theta = {theta} outside [0, pi/2]")));
        }
        Ok(Self { modulus, theta })
    }

    /// From modulus and `arg lambda` in `[0, pi]`.
    pub fn from_polar(modulus: f64, arg: f64) -> Result<Self> {
        Self::new(modulus, arg / 2.0)
    }

    /// From a point of the closed upper half-plane. A negative real value is
    /// read as `arg = pi`.
    pub fn from_complex(lambda: Complex64) -> Result<Self> {
        if lambda.im < 0.0 {
            return Err(PcfError::Range(format!("Im lambda < 0 at {lambda}; conjugate first")));
        }
        let arg = lambda.im.abs().atan2(lambda.re);
        Self::from_polar(lambda.norm(), arg)
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `arg lambda = 2 theta`.
    pub fn arg(&self) -> f64 {
        2.0 * self.theta
    }

    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.modulus, 2.0 * self.theta)
    }

    /// `|lambda|^p e^{2 i p theta}`, the power continued from `lambda > 0`.
    pub fn pow(&self, p: f64) -> Complex64 {
        Complex64::from_polar(self.modulus.powf(p), 2.0 * p * self.theta)
    }

    /// `|lambda|^{1/2} e^{i theta}`.
    pub fn sqrt(&self) -> Complex64 {
        self.pow(0.5)
    }

    /// `-lambda` as modulus and argument in `[-pi, 0]`.
    pub fn neg_polar(&self) -> (f64, f64) {
        (self.modulus, 2.0 * self.theta - PI)
    }

    /// Short tag used in file names, e.g. `m4_a1.5708`.
    pub fn tag(&self) -> String {
        format!("m{}_a{:.4}", self.modulus, self.arg())
    }
}
