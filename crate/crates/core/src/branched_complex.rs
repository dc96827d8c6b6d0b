//! Complex numbers on the universal cover of the punctured plane.
//!
//! A [`BranchedComplex`] keeps its argument unreduced, so `z^{3/2}` on the
//! lower side of a cut and on the upper side are different values.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{PcfError, Result};

/// Default tolerance for sector predicates.
pub const SECTOR_TOL: f64 = 1e-12;

/// Modulus and unwrapped argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchedComplex {
    modulus: f64,
    arg: f64,
}

impl BranchedComplex {
    /// Builds a value; the argument of zero is set to 0.
    pub fn new(modulus: f64, arg: f64) -> Result<Self> {
        if !(modulus >= 0.0) || !modulus.is_finite() || !arg.is_finite() {
            return Err(PcfError::Domain(format!(
                "invalid branched value ({modulus}, {arg})"
            )));
        }
        let arg = if modulus == 0.0 { 0.0 } else { arg };
        Ok(Self { modulus, arg })
    }

    /// Principal lift: argument in `(-pi, pi]`, respecting the sign of a
    /// zero imaginary part (so `-1 - 0i` lands on `-pi`).
    pub fn from_principal(z: Complex64) -> Self {
        let modulus = z.norm();
        let arg = if modulus == 0.0 { 0.0 } else { z.im.atan2(z.re) };
        Self { modulus, arg }
    }

    /// Lift of `z` whose argument is the representative closest to `near`.
    pub fn lift_near(z: Complex64, near: f64) -> Self {
        let mut w = Self::from_principal(z);
        if w.modulus > 0.0 {
            let k = ((near - w.arg) / (2.0 * PI)).round();
            w.arg += 2.0 * PI * k;
        }
        w
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn arg(&self) -> f64 {
        self.arg
    }

    /// Projection to the complex plane.
    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.arg)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let modulus = self.modulus * other.modulus;
        let arg = if modulus == 0.0 { 0.0 } else { self.arg + other.arg };
        Self { modulus, arg }
    }

    pub fn scale(&self, r: f64) -> Self {
        assert!(r >= 0.0);
        Self::new(self.modulus * r, self.arg).expect("finite scale")
    }

    pub fn rotate(&self, angle: f64) -> Self {
        if self.modulus == 0.0 {
            *self
        } else {
            Self { modulus: self.modulus, arg: self.arg + angle }
        }
    }

    pub fn pow(&self, p: f64) -> Result<Self> {
        pow_branched(*self, p)
    }
}

/// `(modulus^p, p * arg)` on the unwrapped sheet.
pub fn pow_branched(w: BranchedComplex, p: f64) -> Result<BranchedComplex> {
    if w.modulus == 0.0 {
        if p < 0.0 {
            return Err(PcfError::Domain("negative power of zero".into()));
        }
        let modulus = if p == 0.0 { 1.0 } else { 0.0 };
        return BranchedComplex::new(modulus, 0.0);
    }
    BranchedComplex::new(w.modulus.powf(p), p * w.arg)
}

/// Principal power with negative reals taken from below, i.e. argument in
/// `[-pi, pi)`.
pub fn pow_lower(z: Complex64, p: f64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(if p == 0.0 { 1.0 } else { 0.0 }, 0.0);
    }
    let mut a = z.im.atan2(z.re);
    if a == PI {
        a = -PI;
    }
    Complex64::from_polar(r.powf(p), p * a)
}

/// Lifts an ordered path to the unwrapped sheet. The first sample takes the
/// representative of its argument closest to `seed_arg`.
pub fn continue_arg(path: &[Complex64], seed_arg: f64) -> Result<Vec<BranchedComplex>> {
    let mut out = Vec::with_capacity(path.len());
    let mut prev: Option<f64> = None;
    for (i, &z) in path.iter().enumerate() {
        if z == Complex64::new(0.0, 0.0) {
            return Err(PcfError::Domain(format!("path passes through 0 at sample {i}")));
        }
        let w = match prev {
            None => BranchedComplex::lift_near(z, seed_arg),
            Some(a) => {
                let w = BranchedComplex::lift_near(z, a);
                if (w.arg - a).abs() >= PI {
                    return Err(PcfError::Resolution(i));
                }
                w
            }
        };
        prev = Some(w.arg);
        out.push(w);
    }
    Ok(out)
}

/// Closed or half-open angular sector `S[alpha, beta]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    pub alpha: f64,
    pub beta: f64,
    pub closed_lo: bool,
    pub closed_hi: bool,
}

impl Sector {
    pub fn closed(alpha: f64, beta: f64) -> Self {
        assert!(alpha <= beta && beta - alpha <= 2.0 * PI + 1e-15);
        Self { alpha, beta, closed_lo: true, closed_hi: true }
    }

    /// `S[alpha, beta)`.
    pub fn right_open(alpha: f64, beta: f64) -> Self {
        Self { closed_hi: false, ..Self::closed(alpha, beta) }
    }

    /// `S(alpha, beta)`.
    pub fn open(alpha: f64, beta: f64) -> Self {
        Self { closed_lo: false, closed_hi: false, ..Self::closed(alpha, beta) }
    }

    fn contains_arg(&self, a: f64, tol: f64) -> bool {
        let lo_ok = if self.closed_lo { a >= self.alpha - tol } else { a > self.alpha - tol };
        let hi_ok = if self.closed_hi { a <= self.beta + tol } else { a < self.beta + tol };
        lo_ok && hi_ok
    }

    /// Membership of an unwrapped value, argument taken literally.
    pub fn contains_branched(&self, w: BranchedComplex, tol: f64) -> Result<bool> {
        if w.modulus == 0.0 {
            return Err(PcfError::Domain("sector test at 0".into()));
        }
        Ok(self.contains_arg(w.arg, tol))
    }
}

/// Membership of a plane point: its principal argument or a `2 pi` shift of
/// it must fall in the sector. A zero imaginary part keeps its sign, so
/// `-1 - 0i` is the lower side of the cut.
pub fn sector_contains(s: &Sector, z: Complex64, tol: f64) -> Result<bool> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(PcfError::Domain("sector test at 0".into()));
    }
    let a = z.im.atan2(z.re);
    Ok([a, a - 2.0 * PI, a + 2.0 * PI].iter().any(|&b| s.contains_arg(b, tol)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_examples() {
        let w = pow_branched(BranchedComplex::new(1.0, 0.0).unwrap(), 1.5).unwrap();
        assert_eq!((w.modulus(), w.arg()), (1.0, 0.0));
        let w = pow_branched(BranchedComplex::new(PI / 4.0, -1.5 * PI).unwrap(), 2.0 / 3.0).unwrap();
        assert!((w.arg() + PI).abs() < 1e-15);
        let z = w.to_complex();
        assert!((z.re + (PI / 4.0).powf(2.0 / 3.0)).abs() < 1e-15 && z.im.abs() < 1e-15);
        let w = pow_branched(BranchedComplex::new(4.0, 2.0 * PI).unwrap(), 0.5).unwrap();
        assert_eq!((w.modulus(), w.arg()), (2.0, PI));
        assert!(pow_branched(BranchedComplex::new(0.0, 0.0).unwrap(), -1.0).is_err());
    }

    #[test]
    fn continue_arg_examples() {
        let circle: Vec<_> = (0..=16)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 16.0))
            .collect();
        let lifted = continue_arg(&circle, 0.0).unwrap();
        assert!((lifted.last().unwrap().arg() - 2.0 * PI).abs() < 1e-12);

        let seg: Vec<_> = (0..=10).map(|k| Complex64::new(2.0 + 0.1 * k as f64, 0.0)).collect();
        assert!(continue_arg(&seg, 0.0).unwrap().iter().all(|w| w.arg() == 0.0));

        let half: Vec<_> = (0..=8)
            .map(|k| Complex64::from_polar(1.0, -PI * k as f64 / 8.0))
            .collect();
        let lifted = continue_arg(&half, 0.0).unwrap();
        assert!((lifted.last().unwrap().arg() + PI).abs() < 1e-12);

        let jump = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
        assert_eq!(continue_arg(&jump, 0.0), Err(PcfError::Resolution(1)));
    }

    #[test]
    fn sector_examples() {
        let q1 = Sector::closed(0.0, PI / 2.0);
        assert!(sector_contains(&q1, Complex64::new(1.0, 1.0), SECTOR_TOL).unwrap());
        assert!(!sector_contains(&q1, Complex64::new(-1.0, 0.0), SECTOR_TOL).unwrap());
        let s = Sector::closed(-PI, -PI / 3.0);
        let z = Complex64::from_polar(1.0, -2.0 * PI / 3.0);
        assert!(sector_contains(&s, z, SECTOR_TOL).unwrap());
        assert!(sector_contains(&s, Complex64::new(0.0, 0.0), SECTOR_TOL).is_err());
    }

    #[test]
    fn cut_sides_are_distinct() {
        let full = Sector::right_open(-PI, PI);
        let lower = BranchedComplex::from_principal(Complex64::new(-1.0, -0.0));
        let upper = BranchedComplex::from_principal(Complex64::new(-1.0, 0.0));
        assert!(full.contains_branched(lower, 0.0).unwrap());
        assert!(!full.contains_branched(upper, 0.0).unwrap());
    }
}
