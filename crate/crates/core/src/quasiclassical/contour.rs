//! The curve `Gamma_lambda = z_lambda(R_+)`, its `kappa` and `chi`
//! parametrisations, and arc-length integrals along it.
//!
//! With `t = x / sqrt(lambda)` we have `(2/3) z^{3/2} = lambda xi(t)`, so
//! `kappa = Re(e^{2 i theta} xi)` and `chi = Im(e^{2 i theta} xi)`, and
//! `|e^{-(4/3) z^{3/2}}| = e^{-2 |lambda| kappa}`.

use num_complex::Complex64;

use super::turning::turning_point;
use super::xi::{eta_lower, xi_lower};
use super::zmap::{x_of_z, z_of_x};
use super::SpectralParameter;
use crate::error::{PcfError, Result};
use crate::quad::{integrate, integrate_to_infinity};

const QUAD_TOL: f64 = 1e-8;

/// Discretised `Gamma_lambda` on `x in [0, x_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaContour {
    pub lambda: SpectralParameter,
    pub nodes: Vec<Complex64>,
    pub x_params: Vec<f64>,
    pub kappa_params: Vec<f64>,
    pub weights: Vec<f64>,
    /// Index of the node `z_*`; `Gamma^-` is before it, `Gamma^+` after.
    pub split_index: usize,
}

fn rotated_xi(lambda: &SpectralParameter, x: f64) -> Complex64 {
    let t = x * lambda.pow(-0.5);
    Complex64::from_polar(1.0, lambda.arg()) * xi_lower(t).to_complex()
}

/// `kappa(x) = Re(e^{2 i theta} xi(x / sqrt(lambda)))`.
pub fn kappa_at(lambda: &SpectralParameter, x: f64) -> f64 {
    rotated_xi(lambda, x).re
}

/// `chi(x) = Im(e^{2 i theta} xi(x / sqrt(lambda)))`.
pub fn chi_at(lambda: &SpectralParameter, x: f64) -> f64 {
    rotated_xi(lambda, x).im
}

/// Points `a = p_0 < ... < p_m = b` (or reversed when `b < a`), finest at
/// `a`, spacing growing geometrically with ratio at most 1.1.
fn graded(a: f64, b: f64, m: usize) -> Vec<f64> {
    let q = 1.1f64.powf((40.0 / m as f64).min(1.0));
    let h0 = (b - a) * (q - 1.0) / (q.powi(m as i32) - 1.0);
    let mut out = Vec::with_capacity(m + 1);
    let mut x = a;
    let mut h = h0;
    out.push(a);
    for _ in 1..m {
        x += h;
        h *= q;
        out.push(x);
    }
    out.push(b);
    out
}

/// `n` nodes of `Gamma_lambda` for `x in [0, x_max]`, refined toward `x_*`.
pub fn gamma_contour(lambda: &SpectralParameter, x_max: f64, n: usize) -> Result<GammaContour> {
    if n < 16 {
        return Err(PcfError::Range(format!("node count {n} below 16")));
    }
    let tp = turning_point(lambda)?;
    let xs = tp.x_star.re;
    if !(x_max > xs) {
        return Err(PcfError::Range(format!("x_max = {x_max} not beyond x_* = {xs}")));
    }
    let (x_params, split_index) = if xs > 0.0 {
        let m_left = ((n as f64 * xs / x_max).round() as usize).clamp(4, n - 5);
        let mut left = graded(xs, 0.0, m_left);
        left.reverse();
        let right = graded(xs, x_max, n - 1 - m_left);
        left.extend_from_slice(&right[1..]);
        (left, m_left)
    } else {
        (graded(0.0, x_max, n - 1), 0)
    };
    let mut nodes = Vec::with_capacity(n);
    for (i, &x) in x_params.iter().enumerate() {
        nodes.push(if i == split_index { tp.z_star } else { z_of_x(Complex64::new(x, 0.0), lambda)? });
    }
    let kappa_params = x_params.iter().map(|&x| kappa_at(lambda, x)).collect();
    let mut weights = vec![0.0; n];
    for i in 0..n - 1 {
        let seg = (nodes[i + 1] - nodes[i]).norm();
        weights[i] += 0.5 * seg;
        weights[i + 1] += 0.5 * seg;
    }
    Ok(GammaContour { lambda: *lambda, nodes, x_params, kappa_params, weights, split_index })
}

fn bisect<F: Fn(f64) -> bool>(mut lo: f64, mut hi: f64, below: F) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// The point of `Gamma_lambda` with `kappa = kappa`. Where `kappa` is flat
/// (real `lambda`, `x <= x_*`) the largest such `x` is taken.
pub fn gamma_by_kappa(lambda: &SpectralParameter, kappa: f64) -> Result<Complex64> {
    let k0 = kappa_at(lambda, 0.0);
    if kappa < k0 - 1e-14 {
        return Err(PcfError::Range(format!("kappa = {kappa} below kappa_0 = {k0}")));
    }
    let mut hi = 2.0 * lambda.modulus().sqrt();
    let mut grow = 0;
    while kappa_at(lambda, hi) <= kappa {
        hi *= 2.0;
        grow += 1;
        if grow > 200 {
            return Err(PcfError::Range(format!("kappa = {kappa} not reached")));
        }
    }
    let x = bisect(0.0, hi, |x| kappa_at(lambda, x) <= kappa);
    z_of_x(Complex64::new(x, 0.0), lambda)
}

/// The point of `Gamma_lambda^-` with `chi = chi`, for `chi in [chi_*, chi_0]`.
pub fn gamma_by_chi(lambda: &SpectralParameter, chi: f64) -> Result<Complex64> {
    let tp = turning_point(lambda)?;
    let xs = tp.x_star.re;
    let c0 = chi_at(lambda, 0.0);
    let cs = chi_at(lambda, xs);
    if chi > c0 + 1e-14 || chi < cs - 1e-14 {
        return Err(PcfError::Range(format!("chi = {chi} outside [{cs}, {c0}]")));
    }
    let x = bisect(0.0, xs, |x| chi_at(lambda, x) >= chi);
    if x == 0.0 {
        return z_of_x(Complex64::new(0.0, 0.0), lambda);
    }
    if (x - xs).abs() <= 1e-15 * xs {
        return Ok(tp.z_star);
    }
    z_of_x(Complex64::new(x, 0.0), lambda)
}

/// Integrand families of the arc-length integrals along `Gamma_lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntegralKind {
    /// `|e^{-(4/3) s^{3/2}}| (1+|s|)^{-alpha}`.
    ExpDecay,
    /// `|e^{(4/3) s^{3/2}}| (1+|s|)^{-alpha}`.
    ExpGrow,
    /// `(1+|s|)^{-alpha}`.
    Power,
    /// `(1+|s|)^{-1} (1+|s| |lambda|^{-2/3})^{-alpha}`.
    Mixed,
    /// `(|lambda|^{4/3} + |s|^2)^{-1}`; `alpha` is ignored.
    V0,
}

/// `scaled * e^{log_scale}`; exponential kinds are normalised at the
/// relevant endpoint to stay in range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralValue {
    pub scaled: f64,
    pub log_scale: f64,
}

impl IntegralValue {
    pub fn value(&self) -> f64 {
        self.scaled * self.log_scale.exp()
    }
}

fn x_on_gamma(z: Complex64, lambda: &SpectralParameter) -> Result<f64> {
    let x = x_of_z(z, lambda)?;
    if x.im.abs() > 1e-8 * (1.0 + x.norm()) || x.re < -1e-10 {
        return Err(PcfError::Domain(format!("{z} is not on Gamma_lambda")));
    }
    Ok(x.re.max(0.0))
}

/// `int_{Gamma(z_from, z_to)} F(s) |ds|`, `z_to = None` meaning infinity.
pub fn gamma_integral(
    lambda: &SpectralParameter,
    z_from: Complex64,
    z_to: Option<Complex64>,
    alpha: f64,
    kind: IntegralKind,
) -> Result<IntegralValue> {
    let x_from = x_on_gamma(z_from, lambda)?;
    let x_to = z_to.map(|z| x_on_gamma(z, lambda)).transpose()?;
    gamma_integral_x(lambda, x_from, x_to, alpha, kind)
}

/// [`gamma_integral`] with the endpoints given by their `x` parameters.
pub fn gamma_integral_x(
    lambda: &SpectralParameter,
    x_from: f64,
    x_to: Option<f64>,
    alpha: f64,
    kind: IntegralKind,
) -> Result<IntegralValue> {
    if let Some(b) = x_to {
        if b < x_from {
            return Err(PcfError::Usage(format!("endpoints out of order: {x_from} > {b}")));
        }
    }
    let m = lambda.modulus();
    let shift = match (kind, x_to) {
        (IntegralKind::ExpDecay, _) => -2.0 * m * kappa_at(lambda, x_from),
        (IntegralKind::ExpGrow, Some(b)) => 2.0 * m * kappa_at(lambda, b),
        (IntegralKind::ExpGrow, None) => {
            return Err(PcfError::Usage("growing integrand needs a finite endpoint".into()))
        }
        _ => 0.0,
    };
    let inv_sqrt = lambda.pow(-0.5);
    let l23 = lambda.pow(2.0 / 3.0);
    let l16 = lambda.pow(1.0 / 6.0).norm();
    let m23 = m.powf(2.0 / 3.0);
    let f = |x: f64| -> f64 {
        let t = x * inv_sqrt;
        let (e, d) = eta_lower(t);
        let s = (l23 * e).norm();
        let ds = l16 * d.norm();
        let weight = match kind {
            IntegralKind::ExpDecay => {
                (-2.0 * m * kappa_at(lambda, x) - shift).exp() * (1.0 + s).powf(-alpha)
            }
            IntegralKind::ExpGrow => {
                (2.0 * m * kappa_at(lambda, x) - shift).exp() * (1.0 + s).powf(-alpha)
            }
            IntegralKind::Power => (1.0 + s).powf(-alpha),
            IntegralKind::Mixed => 1.0 / ((1.0 + s) * (1.0 + s / m23).powf(alpha)),
            IntegralKind::V0 => 1.0 / (m23 * m23 + s * s),
        };
        weight * ds
    };
    // Split at x_*, where |s| has a corner for real lambda.
    let xs = turning_point(lambda)?.x_star.re;
    let mut breaks = vec![x_from];
    if xs > x_from && x_to.map_or(true, |b| xs < b) {
        breaks.push(xs);
    }
    let mut total = 0.0;
    for w in breaks.windows(2) {
        total += integrate(&f, w[0], w[1], QUAD_TOL * 0.1, 0.0)?;
    }
    let last = *breaks.last().expect("nonempty");
    total += match x_to {
        Some(b) => integrate(&f, last, b, QUAD_TOL * 0.1, 0.0)?,
        None => integrate_to_infinity(&f, last, 1.0 + m.sqrt(), QUAD_TOL)?,
    };
    Ok(IntegralValue { scaled: total, log_scale: shift })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branched_complex::{sector_contains, Sector, SECTOR_TOL};
    use std::f64::consts::PI;

    #[test]
    fn real_lambda_contour_is_the_half_line() {
        let lam = SpectralParameter::new(3.0, 0.0).unwrap();
        let g = gamma_contour(&lam, 6.0, 64).unwrap();
        for z in &g.nodes {
            assert!(z.im.abs() < 1e-13);
        }
        let z0 = -(3.0 * PI * 3.0 / 8.0).powf(2.0 / 3.0);
        assert!((g.nodes[0].re - z0).abs() < 1e-12);
        assert_eq!(g.nodes[g.split_index], Complex64::new(0.0, 0.0));
        assert!((kappa_at(&lam, 0.0)).abs() < 1e-15);
    }

    #[test]
    fn nodes_in_sector_and_modulus_unimodal() {
        for k in 1..=6 {
            let th = PI / 2.0 * k as f64 / 6.0;
            let lam = SpectralParameter::new(5.0, th).unwrap();
            let g = gamma_contour(&lam, 8.0, 80).unwrap();
            let sec = Sector::right_open(-PI + 4.0 * th / 3.0, 0.0);
            for (i, z) in g.nodes.iter().enumerate() {
                assert!((z_of_x(Complex64::new(g.x_params[i], 0.0), &lam).unwrap() - z).norm() < 1e-10);
                assert!(sector_contains(&sec, *z, SECTOR_TOL).unwrap(), "theta {th} node {z}");
            }
            for i in 1..g.nodes.len() {
                let (a, b) = (g.nodes[i - 1].norm(), g.nodes[i].norm());
                if i <= g.split_index {
                    assert!(b < a);
                } else {
                    assert!(b > a);
                }
            }
        }
    }

    #[test]
    fn parametrisations_hit_the_endpoints() {
        let lam = SpectralParameter::from_polar(3.0, 1.1).unwrap();
        let tp = turning_point(&lam).unwrap();
        let ks = kappa_at(&lam, tp.x_star.re);
        assert!((gamma_by_kappa(&lam, ks).unwrap() - tp.z_star).norm() < 1e-9);
        let th = lam.theta();
        assert!((kappa_at(&lam, 0.0) + PI / 4.0 * (2.0 * th).sin()).abs() < 1e-14);
        assert!((chi_at(&lam, 0.0) - PI / 4.0 * (2.0 * th).cos()).abs() < 1e-14);
        let z0 = z_of_x(Complex64::new(0.0, 0.0), &lam).unwrap();
        assert!((gamma_by_chi(&lam, chi_at(&lam, 0.0)).unwrap() - z0).norm() < 1e-12);
        let cs = chi_at(&lam, tp.x_star.re);
        assert!((gamma_by_chi(&lam, cs).unwrap() - tp.z_star).norm() < 1e-9);
        assert!(gamma_by_kappa(&lam, kappa_at(&lam, 0.0) - 0.1).is_err());
    }

    #[test]
    fn power_integral_on_the_real_line() {
        // lambda > 0: Gamma^+ = [0, inf) and int_0^inf (1+s)^{-2} ds = 1.
        let lam = SpectralParameter::new(2.0, 0.0).unwrap();
        let v = gamma_integral(&lam, Complex64::new(0.0, 0.0), None, 2.0, IntegralKind::Power).unwrap();
        assert!((v.value() - 1.0).abs() < 1e-7, "{}", v.value());
        let v = gamma_integral(&lam, Complex64::new(0.0, 0.0), None, 0.0, IntegralKind::ExpDecay).unwrap();
        // int_0^inf e^{-(4/3) s^{3/2}} ds = Gamma(2/3) (3/4)^{2/3} (2/3).
        let exact = 1.354_117_939_426_400_5 * (0.75f64).powf(2.0 / 3.0) * 2.0 / 3.0;
        assert!((v.value() - exact).abs() < 1e-8, "{} vs {exact}", v.value());
        assert!(gamma_integral(&lam, Complex64::new(0.0, 0.0), None, 1.0, IntegralKind::ExpGrow).is_err());
    }
}
