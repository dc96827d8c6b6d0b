//! The turning point `x_*`: the minimiser of `|xi(r e^{-i theta})|` over
//! `r >= 0`, scaled back to `x = |lambda|^{1/2} r`.

use num_complex::Complex64;

use super::xi::{sqrt_t2m1_lower, xi_lower};
use super::zmap::z_of_x;
use super::SpectralParameter;
use crate::error::Result;

const SCAN_MAX: f64 = 2.0;
const SCAN_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoint {
    pub x_star: Complex64,
    pub t_star: Complex64,
    pub r_star: f64,
    pub z_star: Complex64,
}

/// `d/dr |xi(r e^{-i theta})|^2 = 2 Re(conj(xi) e^{-i theta} xi')`.
pub fn d_abs_xi_sq(r: f64, theta: f64) -> f64 {
    let rot = Complex64::from_polar(1.0, -theta);
    let t = r * rot;
    let x = xi_lower(t).to_complex();
    2.0 * (x.conj() * rot * sqrt_t2m1_lower(t)).re
}

fn abs_xi(r: f64, theta: f64) -> f64 {
    xi_lower(r * Complex64::from_polar(1.0, -theta)).modulus()
}

/// Dense scan of `|xi|` on `[0, 2]`, then bisection on its `r`-derivative.
pub fn turning_point(lambda: &SpectralParameter) -> Result<TurningPoint> {
    let theta = lambda.theta();
    let r_star = if theta == 0.0 {
        1.0
    } else {
        let n = (SCAN_MAX / SCAN_STEP).round() as usize;
        let mut best = 0;
        let mut best_val = f64::INFINITY;
        for i in 0..=n {
            let v = abs_xi(i as f64 * SCAN_STEP, theta);
            if v < best_val {
                best_val = v;
                best = i;
            }
        }
        let mut lo = best.saturating_sub(1) as f64 * SCAN_STEP;
        let mut hi = (best + 1).min(n) as f64 * SCAN_STEP;
        // At theta = pi/2 the derivative at r = 0 vanishes up to rounding.
        if d_abs_xi_sq(lo, theta) >= -1e-14 {
            lo
        } else {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if d_abs_xi_sq(mid, theta) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            // The endpoint with the smaller derivative magnitude.
            if d_abs_xi_sq(lo, theta).abs() <= d_abs_xi_sq(hi, theta).abs() {
                lo
            } else {
                hi
            }
        }
    };
    let t_star = r_star * Complex64::from_polar(1.0, -theta);
    let x_star = Complex64::new(lambda.modulus().sqrt() * r_star, 0.0);
    let z_star = if theta == 0.0 { Complex64::new(0.0, 0.0) } else { z_of_x(x_star, lambda)? };
    Ok(TurningPoint { x_star, t_star, r_star, z_star })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn real_lambda() {
        let tp = turning_point(&SpectralParameter::new(4.0, 0.0).unwrap()).unwrap();
        assert_eq!(tp.r_star, 1.0);
        assert_eq!(tp.x_star, Complex64::new(2.0, 0.0));
        assert_eq!(tp.z_star, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn lambda_i_against_fine_scan() {
        let lam = SpectralParameter::new(1.0, FRAC_PI_4).unwrap();
        let tp = turning_point(&lam).unwrap();
        assert!(d_abs_xi_sq(tp.r_star, FRAC_PI_4).abs() < 1e-10);
        // Oracle: scan at step 1e-4, then bisection on the derivative.
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=20000 {
            let r = i as f64 * 1e-4;
            let v = abs_xi(r, FRAC_PI_4);
            if v < best.0 {
                best = (v, r);
            }
        }
        let (mut lo, mut hi) = (best.1 - 1e-4, best.1 + 1e-4);
        for _ in 0..100 {
            let m = 0.5 * (lo + hi);
            if d_abs_xi_sq(m, FRAC_PI_4) < 0.0 {
                lo = m
            } else {
                hi = m
            }
        }
        assert!((tp.r_star - lo).abs() < 1e-12);
        let th = FRAC_PI_4;
        let a = tp.z_star.arg();
        assert!(a >= -FRAC_PI_2 - th / 2.0 && a <= -FRAC_PI_2 + 5.0 * th / 6.0, "arg z_* = {a}");
    }

    #[test]
    fn bound_and_stationarity_across_theta() {
        for k in 0..=24 {
            let th = FRAC_PI_2 * k as f64 / 24.0;
            let tp = turning_point(&SpectralParameter::new(2.0, th).unwrap()).unwrap();
            assert!(tp.r_star <= 2f64.sqrt() + 1e-12);
            assert!(d_abs_xi_sq(tp.r_star, th).abs() <= 1e-10 || tp.r_star == 0.0, "theta {th}");
        }
        let tp = turning_point(&SpectralParameter::new(2.0, PI / 2.0).unwrap()).unwrap();
        assert_eq!(tp.r_star, 0.0);
    }
}
