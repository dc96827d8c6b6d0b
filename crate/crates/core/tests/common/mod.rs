//! Double-double Maclaurin oracle for Ai and Bi. With about 32 significant
//! digits it resolves the Wronskian where Ai and Bi both grow like
//! `e^{|zeta|}` and f64 products lose six or more digits to cancellation.

#![allow(dead_code)]

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Division by an f64, one correction step.
    pub fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let p = Dd::from_f64(q1) * Dd::from_f64(b);
        let r = self - p;
        let q2 = r.hi / b;
        quick_two_sum(q1, q2)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let s = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(s.hi, s.lo + t.lo)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + Dd { hi: -o.hi, lo: -o.lo }
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }
}

/// `Ai(0)`.
pub const AI0: Dd = Dd::new(0.3550280538878172, 2.05233632436212e-17);
/// `-Ai'(0)`.
pub const AIP0: Dd = Dd::new(0.2588194037928068, -2.522243111610832e-17);
pub const SQRT3: Dd = Dd::new(1.7320508075688772, 1.0035084221806903e-16);

#[derive(Debug, Clone, Copy)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub fn from_c64(z: Complex64) -> Self {
        Cdd { re: Dd::from_f64(z.re), im: Dd::from_f64(z.im) }
    }

    pub fn real(x: Dd) -> Self {
        Cdd { re: x, im: Dd::from_f64(0.0) }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    fn scale(self, s: Dd) -> Self {
        Cdd { re: self.re * s, im: self.im * s }
    }

    fn div_f64(self, b: f64) -> Self {
        Cdd { re: self.re.div_f64(b), im: self.im.div_f64(b) }
    }

    fn norm_f64(self) -> f64 {
        self.to_c64().norm()
    }
}

impl Add for Cdd {
    type Output = Cdd;
    fn add(self, o: Cdd) -> Cdd {
        Cdd { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    fn sub(self, o: Cdd) -> Cdd {
        Cdd { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    fn mul(self, o: Cdd) -> Cdd {
        Cdd { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

/// `(Ai, Ai', Bi, Bi')` at `z`, in double-double.
pub fn airy_dd(z: Complex64) -> [Cdd; 4] {
    let z = Cdd::from_c64(z);
    let z3 = z * z * z;
    let one = Cdd::real(Dd::from_f64(1.0));
    // Ai = c1 f - c2 g, Bi = sqrt3 (c1 f + c2 g).
    let (mut f, mut g, mut fp, mut gp) = (one, z, Cdd::real(Dd::from_f64(0.0)), one);
    let (mut tf, mut tg, mut tfp, mut tgp) = (one, z, (z * z).div_f64(2.0), one);
    fp = fp + tfp;
    for k in 1..400 {
        let k = k as f64;
        // Integer denominators below 2^53 are exact in f64.
        tf = (tf * z3).div_f64((3.0 * k - 1.0) * (3.0 * k));
        tg = (tg * z3).div_f64((3.0 * k) * (3.0 * k + 1.0));
        tgp = (tgp * z3).div_f64((3.0 * k - 2.0) * (3.0 * k));
        tfp = (tfp * z3).div_f64((3.0 * k) * (3.0 * k + 2.0));
        f = f + tf;
        g = g + tg;
        fp = fp + tfp;
        gp = gp + tgp;
        let tiny = |t: Cdd, s: Cdd| t.norm_f64() <= 1e-34 * s.norm_f64().max(1e-300);
        if tiny(tf, f) && tiny(tg, g) && tiny(tfp, fp) && tiny(tgp, gp) {
            break;
        }
    }
    let (c1, c2, s3) = (AI0, AIP0, SQRT3);
    [
        f.scale(c1) - g.scale(c2),
        fp.scale(c1) - gp.scale(c2),
        (f.scale(c1) + g.scale(c2)).scale(s3),
        (fp.scale(c1) + gp.scale(c2)).scale(s3),
    ]
}

/// `Ai Bi' - Ai' Bi` in double-double.
pub fn wronskian_dd(z: Complex64) -> Complex64 {
    let [a, ap, b, bp] = airy_dd(z);
    (a * bp - ap * b).to_c64()
}
