//! Complex Gamma function: upward shift to `Re w >= 10`, Stirling series,
//! reflection for `Re w < 1/2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{PcfError, Result};

/// `B_{2k} / (2k (2k - 1))` for k = 1..10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// `ln Gamma(w)` for `Re w >= 10` (any branch of the log is acceptable to
/// callers that exponentiate).
fn ln_gamma_large(w: Complex64) -> Complex64 {
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        corr += c * p;
        p *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + corr
}

fn gamma_right(w: Complex64) -> Complex64 {
    let mut shift = Complex64::new(1.0, 0.0);
    let mut v = w;
    while v.re < 10.0 {
        shift *= v;
        v += 1.0;
    }
    ln_gamma_large(v).exp() / shift
}

/// Gamma(w).
pub fn gamma_complex(w: Complex64) -> Result<Complex64> {
    if w.im == 0.0 && w.re <= 0.0 && w.re == w.re.round() {
        return Err(PcfError::Pole(w.re));
    }
    if w.re >= 0.5 {
        Ok(gamma_right(w))
    } else {
        let s = (PI * w).sin();
        Ok(PI / (s * gamma_right(1.0 - w)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        let g = gamma_complex(Complex64::new(1.0, 0.0)).unwrap();
        assert!((g - 1.0).norm() < 1e-14);
        let g = gamma_complex(Complex64::new(0.5, 0.0)).unwrap();
        assert!((g.re - PI.sqrt()).abs() < 1e-14 && g.im.abs() < 1e-15);
        let g = gamma_complex(Complex64::new(1.0, 1.0)).unwrap();
        let exact = (PI / PI.sinh()).sqrt();
        assert!((g.norm() - exact).abs() < 1e-14);
        assert!((g.norm() - 0.521_564_046_864_94).abs() < 1e-13);
        assert!(matches!(gamma_complex(Complex64::new(-3.0, 0.0)), Err(PcfError::Pole(_))));
    }

    #[test]
    fn recurrence_and_reflection() {
        for &(re, im) in &[(0.3, 2.0), (-4.7, 1.5), (12.5, -7.0), (-0.5, 0.0), (2.0, 30.0)] {
            let w = Complex64::new(re, im);
            let g = gamma_complex(w).unwrap();
            let g1 = gamma_complex(w + 1.0).unwrap();
            assert!((g1 - w * g).norm() <= 1e-13 * g1.norm());
            let r = g * gamma_complex(1.0 - w).unwrap() * (PI * w).sin();
            assert!((r - PI).norm() < 1e-12);
        }
    }

    #[test]
    fn factorials() {
        let mut f = 1.0f64;
        for n in 1..30 {
            let g = gamma_complex(Complex64::new(n as f64, 0.0)).unwrap();
            assert!((g.re - f).abs() <= 1e-13 * f, "n = {n}");
            f *= n as f64;
        }
    }
}
