//! `xi(t) = int_1^t sqrt(s^2 - 1) ds` and `eta = (3 xi / 2)^{2/3}`.
//!
//! The closed form `(t sqrt(t^2-1) - log(t + sqrt(t^2-1))) / 2` is evaluated
//! on the closed lower half-plane; the upper half-plane follows by the
//! reflection `xi(conj t) = conj xi(t)`. Near `t = 1` a power series in
//! `t - 1` avoids the cancellation in the closed form.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::branched_complex::{pow_branched, BranchedComplex};
use crate::error::{PcfError, Result};

/// `eta(0) = -(3 pi / 8)^{2/3}`.
pub const ETA_0: f64 = -1.115_460_237_225_355_8;
/// `eta(-1) = -(3 pi / 4)^{2/3}`.
pub const ETA_E: f64 = -1.770_682_754_000_227_1;

const NEAR_ONE: f64 = 0.5;
const SERIES_TERMS: usize = 48;

/// Which side of a cut on the real axis a real argument sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutSide {
    Lower,
    Upper,
}

/// `xi(t)` on the unwrapped sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiValue {
    pub value: BranchedComplex,
    pub t: Complex64,
    pub side: Option<CutSide>,
}

/// Argument in `[-pi, pi)`: a negative real counts as the lower side.
fn lower_arg(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a == PI {
        -PI
    } else {
        a
    }
}

/// `sum_k c_k tau^k` and its derivative, `c_k = binom(1/2, k) 2^{-k} / (k + 3/2)`,
/// so that `xi = sqrt(2) tau^{3/2} S(tau)`.
fn near_one_series(tau: Complex64) -> (Complex64, Complex64) {
    let mut b = 1.0f64;
    let mut p = Complex64::new(1.0, 0.0);
    let mut s = Complex64::new(0.0, 0.0);
    let mut ds = Complex64::new(0.0, 0.0);
    let mut p_prev = Complex64::new(0.0, 0.0);
    for k in 0..SERIES_TERMS {
        let kf = k as f64;
        if k > 0 {
            b *= (0.5 - (kf - 1.0)) / (2.0 * kf);
        }
        let c = b / (kf + 1.5);
        s += c * p;
        ds += c * kf * p_prev;
        p_prev = p;
        p *= tau;
    }
    (s, ds)
}

/// `sqrt(t^2 - 1)` continued from `t > 1` through the lower half-plane; a
/// real `t` is read as `t - i0`.
pub(crate) fn sqrt_t2m1_lower(t: Complex64) -> Complex64 {
    if t.im == 0.0 {
        let x = t.re;
        return if x >= 1.0 {
            Complex64::new((x * x - 1.0).sqrt(), 0.0)
        } else if x > -1.0 {
            Complex64::new(0.0, -(1.0 - x * x).sqrt())
        } else {
            Complex64::new(-(x * x - 1.0).sqrt(), 0.0)
        };
    }
    Complex64::new(0.0, -1.0) * (1.0 - t * t).sqrt()
}

/// `xi` at `t` with `Im t <= 0`, real `t` on the lower side.
pub(crate) fn xi_lower(t: Complex64) -> BranchedComplex {
    let tau = t - 1.0;
    if tau.norm() < NEAR_ONE {
        if tau.norm() == 0.0 {
            return BranchedComplex::from_principal(Complex64::new(0.0, 0.0));
        }
        let (s, _) = near_one_series(tau);
        let modulus = 2f64.sqrt() * tau.norm().powf(1.5) * s.norm();
        let arg = 1.5 * lower_arg(tau) + s.arg();
        return BranchedComplex::new(modulus, arg).expect("finite xi");
    }
    let s = sqrt_t2m1_lower(t);
    let w = t + s;
    let log_w = Complex64::new(w.norm().ln(), lower_arg(w));
    let g = 0.5 * (t * s - log_w);
    let mut a = g.arg();
    if a > 0.0 {
        a -= 2.0 * PI;
    }
    BranchedComplex::new(g.norm(), a).expect("finite xi")
}

/// `(eta, eta')` at `t` with `Im t <= 0`. Outside `D_T` this is the analytic
/// continuation across the image of the cut, which Newton iterations may
/// visit transiently.
pub(crate) fn eta_lower(t: Complex64) -> (Complex64, Complex64) {
    let tau = t - 1.0;
    let c = 2f64.cbrt();
    if tau.norm() < NEAR_ONE {
        let (s, ds) = near_one_series(tau);
        let p = 1.5 * s;
        let dp = 1.5 * ds;
        let p23 = p.powf(2.0 / 3.0);
        let eta = c * tau * p23;
        let deta = c * (p23 + tau * (2.0 / 3.0) * dp * p23 / p);
        return (eta, deta);
    }
    let xi = xi_lower(t);
    let e = pow_branched(xi.scale(1.5), 2.0 / 3.0).expect("nonnegative power");
    let half = pow_branched(e, 0.5).expect("nonnegative power");
    let deta = sqrt_t2m1_lower(t) / half.to_complex();
    (e.to_complex(), deta)
}

/// `(eta, eta')` on either half-plane without the `D_T` check.
pub(crate) fn eta_any(t: Complex64) -> (Complex64, Complex64) {
    if t.im <= 0.0 {
        eta_lower(t)
    } else {
        let (e, d) = eta_lower(t.conj());
        (e.conj(), d.conj())
    }
}

/// Membership in `D_T`: the plane minus `(-inf, -1)` and minus the regions
/// where the continued `|arg xi|` exceeds `3 pi / 2`. Those regions lie in
/// `Re t < -1`; on `(-1, 1)` itself `arg xi = -3 pi / 2` exactly, so the half
/// plane `Re t >= -1` is accepted without the rounding-sensitive arg test.
pub fn in_d_t(t: Complex64) -> bool {
    if t.re >= -1.0 {
        return true;
    }
    if t.im == 0.0 {
        return false;
    }
    let lower = if t.im < 0.0 { t } else { t.conj() };
    xi_lower(lower).arg() > -1.5 * PI
}

/// `xi(t)`. Real `t < 1` needs a side.
pub fn xi(t: Complex64, side: Option<CutSide>) -> Result<XiValue> {
    let conj = |v: BranchedComplex| BranchedComplex::new(v.modulus(), -v.arg()).expect("finite");
    let value = if t.im == 0.0 && t.re < 1.0 {
        match side {
            Some(CutSide::Lower) => xi_lower(t),
            Some(CutSide::Upper) => conj(xi_lower(t)),
            None => {
                return Err(PcfError::Branch(format!("xi at {} on the cut needs a side", t.re)))
            }
        }
    } else if t.im <= 0.0 {
        xi_lower(t)
    } else {
        conj(xi_lower(t.conj()))
    };
    Ok(XiValue { value, t, side })
}

/// `xi'(t) = sqrt(t^2 - 1)` on the sheet of [`xi`] (lower side on the cut).
pub fn xi_prime(t: Complex64) -> Complex64 {
    if t.im <= 0.0 {
        sqrt_t2m1_lower(t)
    } else {
        sqrt_t2m1_lower(t.conj()).conj()
    }
}

/// `(eta(t), eta'(t))` for `t` in `D_T`.
pub fn eta_with_derivative(t: Complex64) -> Result<(Complex64, Complex64)> {
    if t.im == 0.0 && t.re < -1.0 {
        return Err(PcfError::Branch(format!("eta at {} on the cut", t.re)));
    }
    if !in_d_t(t) {
        return Err(PcfError::Domain(format!("t = {t} outside D_T")));
    }
    Ok(eta_any(t))
}

/// `eta(t) = (3 xi(t) / 2)^{2/3}`, analytic on `D_T`.
pub fn eta(t: Complex64) -> Result<Complex64> {
    eta_with_derivative(t).map(|(e, _)| e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Simpson on the straight segment `[1, t]`, lower sheet.
    fn xi_by_quadrature(t: Complex64) -> Complex64 {
        // 2000-panel Simpson on s = 1 + u (t - 1), with the endpoint
        // singularity of the derivative removed by u = v^2.
        let n = 2000;
        let h = 1.0 / n as f64;
        let f = |v: f64| {
            let s = 1.0 + v * v * (t - 1.0);
            sqrt_t2m1_lower(s) * (t - 1.0) * 2.0 * v
        };
        let mut acc = f(0.0) + f(1.0);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(k as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn spot_values() {
        assert_eq!(xi(c(1.0, 0.0), None).unwrap().value.modulus(), 0.0);
        let x2 = xi(c(2.0, 0.0), None).unwrap().value;
        assert!((x2.modulus() - 1.073_571_859_106_469).abs() < 1e-14);
        assert_eq!(x2.arg(), 0.0);
        let x0 = xi(c(0.0, 0.0), Some(CutSide::Lower)).unwrap().value;
        assert!((x0.modulus() - PI / 4.0).abs() < 1e-15);
        assert!((x0.arg() + 1.5 * PI).abs() < 1e-15);
        assert!((x0.to_complex() - c(0.0, PI / 4.0)).norm() < 1e-15);
        assert!(matches!(xi(c(0.0, 0.0), None), Err(PcfError::Branch(_))));
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for t in [c(2.0, 0.0), c(0.3, -0.8), c(-0.7, -0.2), c(3.0, -2.0), c(1.2, -0.1), c(0.0, -1.5)] {
            let q = xi_by_quadrature(t);
            let v = xi_lower(t).to_complex();
            assert!((q - v).norm() < 1e-9 * (1.0 + q.norm()), "t = {t}: {q} vs {v}");
        }
    }

    #[test]
    fn series_and_closed_form_agree() {
        for k in 0..16 {
            let t = 1.0 + Complex64::from_polar(0.5, -PI * k as f64 / 15.0);
            let tau = t - 1.0;
            let (s, _) = near_one_series(tau);
            let a = 2f64.sqrt() * crate::branched_complex::pow_lower(tau, 1.5) * s;
            let b = xi_lower(t).to_complex();
            assert!((a - b).norm() < 1e-14, "t = {t}");
        }
    }

    #[test]
    fn eta_values() {
        assert_eq!(eta(c(1.0, 0.0)).unwrap(), c(0.0, 0.0));
        let e0 = eta(c(0.0, 0.0)).unwrap();
        assert!((e0.re - ETA_0).abs() < 1e-14 && e0.im.abs() < 1e-14);
        let ee = eta(c(-1.0, 0.0)).unwrap();
        assert!((ee.re - ETA_E).abs() < 1e-14 && ee.im.abs() < 1e-14);
        assert!((eta(c(2.0, 0.0)).unwrap().re - 1.373_878_262_204_078).abs() < 1e-13);
        assert!(matches!(eta(c(-2.0, 0.0)), Err(PcfError::Branch(_))));
        // Real and increasing on (-1, 1].
        let mut prev = ETA_E;
        for k in 1..=40 {
            let t = -1.0 + 2.0 * k as f64 / 40.0;
            let e = eta(c(t, 0.0)).unwrap();
            assert!(e.im.abs() < 1e-13 && e.re > prev);
            prev = e.re;
        }
    }

    #[test]
    fn eta_is_analytic_across_the_real_segment() {
        for x in [-0.8, -0.2, 0.4, 0.95, 1.6] {
            let below = eta_any(c(x, -1e-9)).0;
            let above = eta_any(c(x, 1e-9)).0;
            assert!((below - above).norm() < 1e-8, "x = {x}");
        }
    }

    #[test]
    fn eta_derivative_by_differences() {
        let h = 1e-5;
        for t in [c(0.3, -0.4), c(1.1, -0.05), c(-0.5, 0.3), c(2.5, -1.0), c(1.49, 0.0), c(1.51, 0.0)] {
            let (_, d) = eta_any(t);
            let fd = (eta_any(t + h).0 - eta_any(t - h).0) / (2.0 * h);
            assert!((fd - d).norm() < 1e-8, "t = {t}");
        }
        assert!((eta_any(c(1.0, 0.0)).1 - 2f64.cbrt()).norm() < 1e-15);
    }

    #[test]
    fn d_t_boundary() {
        assert!(in_d_t(c(0.0, -1.0)) && in_d_t(c(-0.99, 0.0)));
        assert!(!in_d_t(c(-3.0, -0.01)) && !in_d_t(c(-3.0, 0.01)));
    }
}
