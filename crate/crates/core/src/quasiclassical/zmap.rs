//! `z_lambda(x) = lambda^{2/3} eta(x / sqrt(lambda))` and its inverse.

use num_complex::Complex64;

use super::xi::{eta_any, eta_with_derivative, ETA_E};
use super::SpectralParameter;
use crate::error::{PcfError, Result};

const NEWTON_MAX: usize = 60;

fn t_of_x(x: Complex64, lambda: &SpectralParameter) -> Complex64 {
    x * lambda.pow(-0.5)
}

/// `z_lambda(x)`.
pub fn z_of_x(x: Complex64, lambda: &SpectralParameter) -> Result<Complex64> {
    let (e, _) = eta_with_derivative(t_of_x(x, lambda))?;
    Ok(lambda.pow(2.0 / 3.0) * e)
}

/// `z_lambda'(x) = lambda^{1/6} eta'(x / sqrt(lambda))`.
pub fn dz_dx(x: Complex64, lambda: &SpectralParameter) -> Result<Complex64> {
    let (_, d) = eta_with_derivative(t_of_x(x, lambda))?;
    Ok(lambda.pow(1.0 / 6.0) * d)
}

fn newton(t0: Complex64, target: Complex64) -> Option<Complex64> {
    let mut t = t0;
    for _ in 0..NEWTON_MAX {
        let (e, d) = eta_any(t);
        if d.norm() == 0.0 {
            return None;
        }
        let dt = (e - target) / d;
        t -= dt;
        if dt.norm() <= 1e-15 * t.norm().max(1.0) {
            return Some(t);
        }
    }
    let (e, _) = eta_any(t);
    ((e - target).norm() <= 1e-12 * (1.0 + target.norm())).then_some(t)
}

/// Inverse of `eta` on `C \ (-inf, eta_E]`, by Newton continuation along the
/// segment from `eta = 0` (the image domain is star-shaped about 0).
pub fn eta_inverse(w: Complex64) -> Result<Complex64> {
    if w.im == 0.0 && w.re < ETA_E {
        return Err(PcfError::Domain(format!("eta = {w} on the excluded ray")));
    }
    if w.norm() == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if w == Complex64::new(ETA_E, 0.0) {
        return Ok(Complex64::new(-1.0, 0.0));
    }
    // Parameter steps: uniform up to |w| = 1, geometric beyond.
    let r = w.norm();
    let mut fractions = Vec::new();
    let base = 1.0f64.min(r);
    let n0 = ((base / 0.2).ceil() as usize).max(1);
    for k in 1..=n0 {
        fractions.push(base * k as f64 / n0 as f64 / r);
    }
    let mut f = base / r;
    while f < 1.0 {
        f = (f * 1.5).min(1.0);
        fractions.push(f);
    }
    let mut t = Complex64::new(1.0, 0.0);
    let mut prev = Complex64::new(0.0, 0.0);
    for &s in &fractions {
        let target = w * s;
        let (_, d) = eta_any(t);
        let guess = t + (target - prev) / d;
        t = newton(guess, target)
            .ok_or_else(|| PcfError::Convergence(format!("eta inverse at {target}")))?;
        prev = target;
    }
    Ok(t)
}

/// `x_lambda(z)`, the inverse of [`z_of_x`] on `D_Z(lambda)`.
pub fn x_of_z(z: Complex64, lambda: &SpectralParameter) -> Result<Complex64> {
    let t = eta_inverse(z * lambda.pow(-2.0 / 3.0))?;
    Ok(lambda.sqrt() * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spot_values() {
        let one = SpectralParameter::new(1.0, 0.0).unwrap();
        assert!((z_of_x(c(1.0, 0.0), &one).unwrap()).norm() < 1e-15);
        let z2 = z_of_x(c(2.0, 0.0), &one).unwrap();
        assert!((z2.re - 1.373_880).abs() < 1e-5);
        assert!((dz_dx(c(1.0, 0.0), &one).unwrap() - 2f64.cbrt()).norm() < 1e-14);
        let d2 = dz_dx(c(2.0, 0.0), &one).unwrap();
        assert!((d2.re - 3f64.sqrt() / z2.re.sqrt()).abs() < 1e-13);
        assert!((x_of_z(z2, &one).unwrap() - 2.0).norm() < 1e-12);
        let lam = SpectralParameter::from_polar(3.0, 1.0).unwrap();
        let z0 = z_of_x(c(0.0, 0.0), &lam).unwrap();
        let expect = lam.pow(2.0 / 3.0) * (-(3.0 * PI / 8.0).powf(2.0 / 3.0));
        assert!((z0 - expect).norm() < 1e-13);
        assert!(x_of_z(z0, &lam).unwrap().norm() < 1e-12);
        assert!((x_of_z(c(0.0, 0.0), &lam).unwrap() - lam.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn round_trip_on_the_positive_axis() {
        for &(m, arg) in &[(0.5, 0.0), (1.0, 0.7), (4.0, PI / 2.0), (16.0, 2.5), (64.0, PI), (100.0, 0.1)] {
            let lam = SpectralParameter::from_polar(m, arg).unwrap();
            for k in 0..=30 {
                let x = c(0.2 * k as f64 + 1e-3, 0.0);
                let z = z_of_x(x, &lam).unwrap();
                let back = x_of_z(z, &lam).unwrap();
                assert!((z_of_x(back, &lam).unwrap() - z).norm() <= 1e-10 * (1.0 + z.norm()));
                assert!((back - x).norm() <= 1e-9 * (1.0 + x.norm()), "lambda {m} {arg} x {x}");
            }
        }
    }

    #[test]
    fn derivative_by_differences() {
        let lam = SpectralParameter::from_polar(4.0, 1.2).unwrap();
        let h = 1e-5;
        for k in 0..12 {
            let x = c(0.1 + 0.5 * k as f64, 0.0);
            let fd = (z_of_x(x + h, &lam).unwrap() - z_of_x(x - h, &lam).unwrap()) / (2.0 * h);
            assert!((fd - dz_dx(x, &lam).unwrap()).norm() < 1e-6);
        }
    }

    #[test]
    fn excluded_ray_is_rejected() {
        let one = SpectralParameter::new(1.0, 0.0).unwrap();
        assert!(x_of_z(c(-3.0, 0.0), &one).is_err());
        assert!(x_of_z(c(-3.0, 0.01), &one).is_ok());
    }
}
