//! Complex Airy functions.
//!
//! Three evaluation regimes:
//! * Maclaurin series for `|z| <= SERIES_RADIUS`;
//! * the `K_{1/3}`, `K_{2/3}` integral representation, summed by the
//!   trapezoidal rule in a logarithmic variable along a rotated ray, for
//!   `|arg z| <= 2 pi / 3`;
//! * the exponential asymptotic series for `|z| >= ASYMPTOTIC_RADIUS`.
//!
//! Outside `|arg z| <= 2 pi / 3` the connection formula
//! `Ai(z) = e^{-i pi/3} Ai(z w) + e^{i pi/3} Ai(z w̄)` with `w = e^{2 pi i/3}`
//! reduces to the sector where the integral is used.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::branched_complex::pow_lower;

/// `Ai(0)`.
pub const AI0: f64 = 0.355_028_053_887_817_24;
/// `-Ai'(0)`.
pub const AIP0: f64 = 0.258_819_403_792_806_8;

pub const SERIES_RADIUS: f64 = 2.0;
pub const ASYMPTOTIC_RADIUS: f64 = 12.0;

/// `1 / (2 sqrt(pi) Gamma(5/6))`.
const K13_NORM: f64 = 0.249_909_667_899_743_99;
/// `1 / (2 sqrt(pi) Gamma(7/6))`.
const K23_NORM: f64 = 0.304_073_421_290_121_99;

/// `e^{2 pi i / 3}`.
pub fn omega() -> Complex64 {
    Complex64::new(-0.5, 3f64.sqrt() / 2.0)
}

/// Ai and its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValue {
    pub ai: Complex64,
    pub ai_prime: Complex64,
}

/// `(2/3) z^{3/2}`, negative reals taken from below.
pub fn zeta(z: Complex64) -> Complex64 {
    pow_lower(z, 1.5) * (2.0 / 3.0)
}

/// Ai(z), Ai'(z).
pub fn airy(z: Complex64) -> AiryValue {
    if z.norm() <= SERIES_RADIUS {
        return maclaurin(z);
    }
    let s = airy_scaled(z);
    let e = (-zeta(z)).exp();
    AiryValue { ai: s.ai * e, ai_prime: s.ai_prime * e }
}

/// Ai(z) e^{zeta}, Ai'(z) e^{zeta} with `zeta = (2/3) z^{3/2}`.
pub fn airy_scaled(z: Complex64) -> AiryValue {
    let r = z.norm();
    if !r.is_finite() {
        let nan = Complex64::new(f64::NAN, f64::NAN);
        return AiryValue { ai: nan, ai_prime: nan };
    }
    if r <= SERIES_RADIUS {
        let v = maclaurin(z);
        let e = zeta(z).exp();
        return AiryValue { ai: v.ai * e, ai_prime: v.ai_prime * e };
    }
    let arg = z.im.atan2(z.re);
    if arg.abs() <= 2.0 * PI / 3.0 {
        return sector_scaled(z);
    }
    // Ai(z) = -w̄ Ai(z w̄) - w Ai(z w), Ai'(z) = -w Ai'(z w̄) - w̄ Ai'(z w).
    let w = omega();
    let wb = w.conj();
    let z1 = onto_sector(z * wb);
    let z2 = onto_sector(z * w);
    let a1 = sector_scaled(z1);
    let a2 = sector_scaled(z2);
    let zz = zeta(z);
    let e1 = (zz - zeta(z1)).exp();
    let e2 = (zz - zeta(z2)).exp();
    AiryValue {
        ai: -wb * a1.ai * e1 - w * a2.ai * e2,
        ai_prime: -w * a1.ai_prime * e1 - wb * a2.ai_prime * e2,
    }
}

/// Rounding in the rotation can leave `|arg|` just above `2 pi/3`.
fn onto_sector(z: Complex64) -> Complex64 {
    let a = z.im.atan2(z.re);
    if a.abs() > 2.0 * PI / 3.0 {
        Complex64::from_polar(z.norm(), a.signum() * 2.0 * PI / 3.0)
    } else {
        z
    }
}

/// `|z| > SERIES_RADIUS`, `|arg z| <= 2 pi/3`.
fn sector_scaled(z: Complex64) -> AiryValue {
    if z.norm() >= ASYMPTOTIC_RADIUS {
        asymptotic_scaled(z)
    } else {
        integral_scaled(z)
    }
}

/// Bi via `Bi(z) = i (2 e^{-i pi/3} Ai(w z) - Ai(z))`, with its derivative.
pub fn airy_bi(z: Complex64) -> (Complex64, Complex64) {
    let w = omega();
    let a = airy(z);
    let aw = airy(w * z);
    let c = Complex64::from_polar(2.0, -PI / 3.0);
    let i = Complex64::i();
    (i * (c * aw.ai - a.ai), i * (c * w * aw.ai_prime - a.ai_prime))
}

pub(crate) fn maclaurin(z: Complex64) -> AiryValue {
    let z3 = z * z * z;
    let mut f = Complex64::new(1.0, 0.0);
    let mut g = z;
    let mut fp = Complex64::new(0.0, 0.0);
    let mut gp = Complex64::new(1.0, 0.0);
    let mut tf = f;
    let mut tg = g;
    let mut tfp = z * z * 0.5;
    let mut tgp = gp;
    fp += tfp;
    for k in 1..200 {
        let kf = k as f64;
        tf *= z3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg *= z3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        tgp *= z3 / ((3.0 * kf - 2.0) * (3.0 * kf));
        f += tf;
        g += tg;
        gp += tgp;
        tfp *= z3 / ((3.0 * kf) * (3.0 * kf + 2.0));
        fp += tfp;
        let small = |t: Complex64, s: Complex64| t.norm() <= 1e-18 * s.norm().max(1e-300);
        if small(tf, f) && small(tg, g) && small(tfp, fp) && small(tgp, gp) {
            break;
        }
    }
    AiryValue { ai: AI0 * f - AIP0 * g, ai_prime: AI0 * fp - AIP0 * gp }
}

/// Trapezoidal sum of `int_0^inf e^{-t} t^{nu-1/2} (1 + t/(2 zeta))^{nu-1/2} dt`
/// along the ray `arg t = arg(zeta) / 3`, in the variable `u = ln |t|`.
fn k_integral(zeta: Complex64, nu: f64) -> Complex64 {
    let az = zeta.im.atan2(zeta.re);
    let theta = az / 3.0;
    let strip = (PI / 2.0 - theta.abs()).min(PI - 2.0 * az.abs() / 3.0);
    let h = 0.17 * strip;
    let p = nu + 0.5;
    let q = nu - 0.5;
    let u_lo = -38.0 / p;
    let u_hi = 4.7;
    let n = ((u_hi - u_lo) / h).ceil() as usize;
    let rot = Complex64::from_polar(1.0, theta);
    let inv2z = 0.5 / zeta;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..=n {
        let u = u_lo + j as f64 * h;
        let t = rot * u.exp();
        // t^{p} with t = e^{u + i theta}.
        let tp = Complex64::from_polar((p * u).exp(), p * theta);
        sum += (-t).exp() * tp * (1.0 + t * inv2z).powf(q);
    }
    sum * h
}

fn integral_scaled(z: Complex64) -> AiryValue {
    let zz = zeta(z);
    let zq = z.powf(0.25);
    AiryValue {
        ai: K13_NORM * k_integral(zz, 1.0 / 3.0) / zq,
        ai_prime: -K23_NORM * k_integral(zz, 2.0 / 3.0) * zq,
    }
}

fn asymptotic_scaled(z: Complex64) -> AiryValue {
    let zz = zeta(z);
    let inv = -1.0 / zz;
    let mut u = 1.0f64;
    let mut pw = Complex64::new(1.0, 0.0);
    let mut s = Complex64::new(1.0, 0.0);
    let mut sp = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        pw *= inv;
        let t = pw * u;
        let tn = t.norm();
        if tn > last {
            break;
        }
        s += t;
        sp += pw * v;
        last = tn;
        if tn < 1e-18 {
            break;
        }
    }
    let zq = z.powf(0.25);
    let c = 0.5 / PI.sqrt();
    AiryValue { ai: c * s / zq, ai_prime: -c * zq * sp }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn values_at_origin() {
        let v = airy(Complex64::new(0.0, 0.0));
        assert!((v.ai.re - 0.3550280539).abs() < 1e-10);
        assert!((v.ai_prime.re + 0.2588194038).abs() < 1e-10);
        let (bi, _) = airy_bi(Complex64::new(0.0, 0.0));
        assert!((bi.re - 3f64.sqrt() * AI0).abs() < 1e-14 && bi.im.abs() < 1e-14);
        assert!((bi.re - 0.6149266274).abs() < 1e-10);
    }

    #[test]
    fn regimes_agree_on_overlaps() {
        // Series against the integral where the series is still well conditioned.
        for k in 0..24 {
            let z = Complex64::from_polar(2.2, -PI + k as f64 * PI / 12.0);
            if z.arg().abs() > 2.0 * PI / 3.0 {
                continue;
            }
            let s = maclaurin(z);
            let e = zeta(z).exp();
            let i = integral_scaled(z);
            assert!(rel(i.ai, s.ai * e) < 1e-12, "ai at {z}");
            assert!(rel(i.ai_prime, s.ai_prime * e) < 1e-12, "ai' at {z}");
        }
        // Integral against the asymptotic series at the switch radius.
        for k in 0..17 {
            let z = Complex64::from_polar(ASYMPTOTIC_RADIUS, -2.0 * PI / 3.0 + k as f64 * PI / 12.0);
            let a = asymptotic_scaled(z);
            let i = integral_scaled(z);
            assert!(rel(i.ai, a.ai) < 1e-13, "ai at {z}");
            assert!(rel(i.ai_prime, a.ai_prime) < 1e-13, "ai' at {z}");
        }
    }

    #[test]
    fn asymptotic_ratio_at_eight() {
        let z = Complex64::new(8.0, 0.0);
        let v = airy(z);
        let zz = zeta(z).re;
        let r = v.ai * 2.0 * PI.sqrt() * z.powf(0.25) * zeta(z).exp();
        // The leading correction -5/(72 zeta) is 4.6e-3 here.
        assert!((r - 1.0).norm() < 5e-3);
        let two_term = 1.0 - 5.0 / (72.0 * zz) + 385.0 / (10368.0 * zz * zz);
        assert!((r - two_term).norm() < 5e-5);
    }

    #[test]
    fn connection_and_wronskian() {
        let w = omega();
        let c1 = Complex64::from_polar(1.0, -PI / 3.0);
        let c2 = Complex64::from_polar(1.0, PI / 3.0);
        for z in [Complex64::new(2.0, 1.0), Complex64::new(-4.0, 0.5), Complex64::new(0.3, -4.7)] {
            let res = airy(z).ai - c1 * airy(z * w).ai - c2 * airy(z * w.conj()).ai;
            assert!(res.norm() < 1e-10 * (1.0 + airy(z).ai.norm()));
        }
        let z = Complex64::new(1.0, 0.0);
        let a = airy(z);
        let (bi, bip) = airy_bi(z);
        let wr = a.ai * bip - a.ai_prime * bi;
        assert!((wr - 1.0 / PI).norm() < 1e-12);
        let (bi, _) = airy_bi(Complex64::new(-3.0, 0.0));
        assert!(bi.im.abs() < 1e-12 && bi.re.abs() <= 1.0);
    }
}
