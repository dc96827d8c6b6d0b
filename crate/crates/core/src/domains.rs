//! Validity regions of the uniform estimates in the `z`-plane and the level
//! curves `Upsilon_phi(z)` used as integration paths.
//!
//! Points of `D_Z(lambda)` carry the canonical argument in
//! `[-pi + 4 theta/3, pi + 4 theta/3)`, the lower edge being the direction of
//! the excluded ray through `z_E`. All sector tests use that argument.

use std::f64::consts::PI;
use std::sync::Mutex;

use num_complex::Complex64;

use crate::branched_complex::SECTOR_TOL;
use crate::error::{PcfError, Result};
use crate::quad::integrate_to_infinity;
use crate::quasiclassical::{SpectralParameter, ETA_0, ETA_E};

/// Allowed range of `delta` is the open interval `(0, pi/5)`.
pub fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < PI / 5.0 {
        Ok(())
    } else {
        Err(PcfError::Range(format!("delta = {delta} outside (0, pi/5)")))
    }
}

/// `arg z_E = -pi + 4 theta / 3`.
pub fn arg_z_e(lambda: &SpectralParameter) -> f64 {
    -PI + 4.0 * lambda.theta() / 3.0
}

/// `z_E(lambda) = lambda^{2/3} eta_E`, on the lower edge of `D_Z`.
pub fn z_e_point(lambda: &SpectralParameter) -> Complex64 {
    Complex64::from_polar(lambda.modulus().powf(2.0 / 3.0) * -ETA_E, arg_z_e(lambda))
}

/// `z_0(lambda) = lambda^{2/3} eta_0`, on the same ray as `z_E`.
pub fn z_0_point(lambda: &SpectralParameter) -> Complex64 {
    Complex64::from_polar(lambda.modulus().powf(2.0 / 3.0) * -ETA_0, arg_z_e(lambda))
}

/// Centre and radius `|z_E| sin(epsilon)` of the excluded disk.
pub fn b_eps_disk(lambda: &SpectralParameter, epsilon: f64) -> (Complex64, f64) {
    let c = z_e_point(lambda);
    (c, c.norm() * epsilon.sin())
}

/// Canonical argument of `z` in `D_Z(lambda)`. Points within `SECTOR_TOL`
/// of the ray through `z_E` take the lower edge, which is where `z_0` sits.
pub fn canonical_arg(z: Complex64, lambda: &SpectralParameter) -> f64 {
    let lo = arg_z_e(lambda);
    let mut a = z.im.atan2(z.re);
    if a < lo - SECTOR_TOL {
        a += 2.0 * PI;
    }
    if a >= lo + 2.0 * PI - SECTOR_TOL {
        a -= 2.0 * PI;
    }
    a
}

fn wrap(a: f64) -> f64 {
    let mut d = a.rem_euclid(2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    }
    d
}

/// Which of the two tangency points `w_{+delta}`, `w_{-delta}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tangent {
    Plus,
    Minus,
}

impl Tangent {
    fn sign(self) -> f64 {
        match self {
            Tangent::Plus => 1.0,
            Tangent::Minus => -1.0,
        }
    }

    /// Rotation `pi/3 -+ delta/3` of the level function.
    fn rotation(self, delta: f64) -> f64 {
        PI / 3.0 - self.sign() * delta / 3.0
    }

    /// Sector `S[-pi +- delta/3, -pi/3 +- delta/3]` of `H_{+-delta}`.
    fn sector(self, delta: f64) -> (f64, f64) {
        let s = self.sign() * delta / 3.0;
        (-PI + s, -PI / 3.0 + s)
    }
}

/// `Im(z e^{i rot})^{3/2}` with `arg z` given explicitly.
fn level(modulus: f64, arg: f64, rot: f64) -> f64 {
    modulus.powf(1.5) * (1.5 * (arg + rot)).sin()
}

/// Checks the `lambda` range on which `w_{+-delta}` and `H_{+-delta}` exist.
fn check_tangent_range(lambda: &SpectralParameter, sign: Tangent, delta: f64) -> Result<()> {
    let a = lambda.arg();
    let ok = match sign {
        Tangent::Plus => a >= delta - SECTOR_TOL,
        Tangent::Minus => a <= PI - delta + SECTOR_TOL,
    };
    if ok {
        Ok(())
    } else {
        Err(PcfError::Domain(format!("arg lambda = {a} outside the range of w_{sign:?}")))
    }
}

/// The point of the boundary circle of `B_eps` maximising the level
/// function `Im(z e^{i(pi/3 -+ delta/3)})^{3/2}`; scan then golden section on
/// the angle, ties going to the smallest angle.
pub fn w_tangent(lambda: &SpectralParameter, sign: Tangent, delta: f64, epsilon: f64) -> Result<Complex64> {
    check_tangent_range(lambda, sign, delta)?;
    let (c, r) = b_eps_disk(lambda, epsilon);
    let base = arg_z_e(lambda);
    let rot = sign.rotation(delta);
    let f = |ang: f64| {
        let z = c + Complex64::from_polar(r, ang);
        let a = base + wrap(z.im.atan2(z.re) - base);
        level(z.norm(), a, rot)
    };
    let n = 3600;
    let h = 2.0 * PI / n as f64;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for k in 0..n {
        let ang = k as f64 * h;
        let v = f(ang);
        if v > best.0 {
            best = (v, ang);
        }
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best.1 - h, best.1 + h);
    for _ in 0..100 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if f(x1) >= f(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    Ok(c + Complex64::from_polar(r, 0.5 * (a + b)))
}

/// Level of `w` measured with its argument lifted next to `arg z_E`.
fn w_level(lambda: &SpectralParameter, w: Complex64, rot: f64) -> f64 {
    let base = arg_z_e(lambda);
    let a = base + wrap(w.im.atan2(w.re) - base);
    level(w.norm(), a, rot)
}

/// The ordering condition that fixes `epsilon`: the level of `w_delta` does
/// not exceed that of `z_0`, for `arg lambda` in `[delta, pi]`.
pub fn ordering_holds(lambda: &SpectralParameter, delta: f64, epsilon: f64) -> Result<bool> {
    let rot = Tangent::Plus.rotation(delta);
    let w = w_tangent(lambda, Tangent::Plus, delta, epsilon)?;
    let z0 = z_0_point(lambda);
    Ok(w_level(lambda, w, rot) <= level(z0.norm(), arg_z_e(lambda), rot))
}

/// `epsilon = delta / 6`, halved until the ordering condition holds on a grid
/// of `arg lambda` in `[delta, pi]` (it is invariant under `|lambda|`).
pub fn default_epsilon(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    // Pure in delta and costly (65 tangency scans), so memoised.
    static CACHE: Mutex<Vec<(u64, f64)>> = Mutex::new(Vec::new());
    let key = delta.to_bits();
    if let Some(&(_, e)) = CACHE.lock().expect("not poisoned").iter().find(|(k, _)| *k == key) {
        return Ok(e);
    }
    let eps = search_epsilon(delta)?;
    CACHE.lock().expect("not poisoned").push((key, eps));
    Ok(eps)
}

fn search_epsilon(delta: f64) -> Result<f64> {
    let mut eps = delta / 6.0;
    for _ in 0..30 {
        let mut ok = true;
        for k in 0..=64 {
            let arg = delta + (PI - delta) * k as f64 / 64.0;
            let lam = SpectralParameter::from_polar(1.0, arg)?;
            if !ordering_holds(&lam, delta, eps)? {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(eps);
        }
        eps *= 0.5;
    }
    Err(PcfError::Convergence(format!("no epsilon found for delta = {delta}")))
}

/// The regions of the estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainKind {
    DZ,
    DZdelta,
    HPlus,
    HMinus,
    D0,
    DPlus,
    DMinus,
    DStar,
}

/// A region for fixed `lambda`, `delta` and `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub lambda: SpectralParameter,
    pub delta: f64,
    pub epsilon: f64,
}

impl DomainSpec {
    /// With the default `epsilon` for `delta`.
    pub fn new(kind: DomainKind, lambda: SpectralParameter, delta: f64) -> Result<Self> {
        Self::with_epsilon(kind, lambda, delta, default_epsilon(delta)?)
    }

    pub fn with_epsilon(kind: DomainKind, lambda: SpectralParameter, delta: f64, epsilon: f64) -> Result<Self> {
        check_delta(delta)?;
        if !(epsilon > 0.0 && epsilon < delta / 3.0) {
            return Err(PcfError::Range(format!("epsilon = {epsilon} outside (0, delta/3)")));
        }
        let a = lambda.arg();
        let tol = SECTOR_TOL;
        let ok = match kind {
            DomainKind::HPlus | DomainKind::DStar => a >= delta - tol,
            DomainKind::HMinus | DomainKind::DPlus => a <= PI - delta + tol,
            _ => true,
        };
        if !ok {
            return Err(PcfError::Domain(format!("{kind:?} undefined for arg lambda = {a}")));
        }
        Ok(Self { kind, lambda, delta, epsilon })
    }
}

fn in_dz(z: Complex64, lambda: &SpectralParameter) -> bool {
    let ze = z_e_point(lambda);
    !(wrap(z.im.atan2(z.re) - arg_z_e(lambda)).abs() <= SECTOR_TOL && z.norm() >= ze.norm())
}

fn in_dz_delta(z: Complex64, lambda: &SpectralParameter, epsilon: f64) -> bool {
    let (c, r) = b_eps_disk(lambda, epsilon);
    if (z - c).norm() <= r {
        return false;
    }
    let d = wrap(z.im.atan2(z.re) - arg_z_e(lambda)).abs();
    !(d <= epsilon && z.norm() >= c.norm() * epsilon.cos())
}

fn in_h(z: Complex64, lambda: &SpectralParameter, sign: Tangent, delta: f64, epsilon: f64) -> Result<bool> {
    let (lo, hi) = sign.sector(delta);
    let p = z.im.atan2(z.re);
    let rep = [p, p - 2.0 * PI, p + 2.0 * PI]
        .into_iter()
        .find(|&b| b >= lo - SECTOR_TOL && b <= hi + SECTOR_TOL);
    let Some(b) = rep else { return Ok(false) };
    let rot = sign.rotation(delta);
    let w = w_tangent(lambda, sign, delta, epsilon)?;
    let lw = w_level(lambda, w, rot);
    Ok(level(z.norm(), b, rot) >= lw - SECTOR_TOL * lw.abs().max(1.0))
}

fn between(a: f64, lo: f64, hi: f64) -> bool {
    a >= lo - SECTOR_TOL && a <= hi + SECTOR_TOL
}

/// Membership of `z` in the region described by `spec`.
pub fn in_domain(spec: &DomainSpec, z: Complex64) -> Result<bool> {
    if z.norm() == 0.0 {
        return Err(PcfError::Domain("membership test at z = 0".into()));
    }
    let lam = &spec.lambda;
    let (d, e) = (spec.delta, spec.epsilon);
    let th = lam.theta();
    let a = canonical_arg(z, lam);
    let zd = || in_dz_delta(z, lam, e);
    Ok(match spec.kind {
        DomainKind::DZ => in_dz(z, lam),
        DomainKind::DZdelta => zd(),
        DomainKind::HPlus => in_h(z, lam, Tangent::Plus, d, e)?,
        DomainKind::HMinus => in_h(z, lam, Tangent::Minus, d, e)?,
        DomainKind::D0 => zd() && a.abs() <= PI - d / 3.0 + SECTOR_TOL,
        DomainKind::DPlus => {
            zd() && (between(a, PI / 3.0 + 4.0 * th / 3.0 + d / 3.0, PI - d / 3.0)
                || between(a, -PI + 4.0 * th / 3.0, PI / 3.0 - d / 3.0)
                || in_h(z, lam, Tangent::Minus, d, e)?)
        }
        DomainKind::DMinus => zd() && (PI / 3.0 - a).abs() >= d / 3.0 - SECTOR_TOL,
        DomainKind::DStar => {
            zd() && (between(a, PI / 3.0 + d / 3.0, PI + 4.0 * th / 3.0)
                || between(a, -PI / 3.0 + d / 3.0, -PI / 3.0 + d / 3.0 + 4.0 * th / 3.0)
                || in_h(z, lam, Tangent::Plus, d, e)?)
        }
    })
}

/// `phi = clamp(arg z, -pi/3 + delta/3, pi/3 - delta/3)`.
pub fn choose_phi(z: Complex64, delta: f64) -> Result<f64> {
    let a = z.im.atan2(z.re);
    if a.abs() > PI - 2.0 * delta / 3.0 + SECTOR_TOL {
        return Err(PcfError::Domain(format!("|arg z| = {} exceeds pi - 2 delta/3", a.abs())));
    }
    Ok(a.clamp(-PI / 3.0 + delta / 3.0, PI / 3.0 - delta / 3.0))
}

/// The curve `Im(s e^{-i phi})^{3/2} = Im(z e^{-i phi})^{3/2}` from `z` to
/// infinity, `s(tau) = e^{i phi} (tau + i y)^{2/3}` for `tau >= x0`.
#[derive(Debug, Clone, PartialEq)]
pub struct UpsilonContour {
    pub z: Complex64,
    pub phi: f64,
    /// `Re(z e^{-i phi})^{3/2}`.
    pub x0: f64,
    /// `Im(z e^{-i phi})^{3/2}`.
    pub y: f64,
    /// The curve runs through the origin (`|arg z - phi| = 2 pi / 3`).
    pub degenerate: bool,
    pub taus: Vec<f64>,
    pub nodes: Vec<Complex64>,
    pub weights: Vec<f64>,
}

/// `(x0, y)` for the anchor `z` and direction `phi`, with `arg z` taken as
/// the representative closest to `phi`.
pub fn upsilon_anchor(z: Complex64, phi: f64) -> Result<(f64, f64)> {
    let a = phi + wrap(z.im.atan2(z.re) - phi);
    if (a - phi).abs() > 2.0 * PI / 3.0 + SECTOR_TOL {
        return Err(PcfError::Contour(format!("|arg z - phi| = {} exceeds 2 pi/3", (a - phi).abs())));
    }
    let w = Complex64::from_polar(z.norm().powf(1.5), 1.5 * (a - phi));
    Ok((w.re, w.im))
}

/// `s(tau)`.
pub fn upsilon_point(phi: f64, y: f64, tau: f64) -> Complex64 {
    Complex64::from_polar(1.0, phi) * Complex64::new(tau, y).powf(2.0 / 3.0)
}

/// `ds / dtau`.
pub fn upsilon_tangent(phi: f64, y: f64, tau: f64) -> Complex64 {
    Complex64::from_polar(2.0 / 3.0, phi) * Complex64::new(tau, y).powf(-1.0 / 3.0)
}

/// Truncation length in `tau` after which `|e^{-(4/3) s^{3/2}}|` has fallen
/// by `1e-16` relative to the anchor.
pub fn upsilon_truncation(phi: f64) -> f64 {
    36.85 / (4.0 / 3.0 * (1.5 * phi).cos())
}

/// `n` nodes on `tau in [x0, x0 + t_len]`, quadratically graded toward the
/// anchor; the origin is dropped from degenerate curves.
pub fn upsilon_contour(z: Complex64, phi: f64, t_len: f64, n: usize) -> Result<UpsilonContour> {
    if phi.abs() > PI / 3.0 + SECTOR_TOL {
        return Err(PcfError::Range(format!("|phi| = {} exceeds pi/3", phi.abs())));
    }
    if n < 2 || !(t_len > 0.0) {
        return Err(PcfError::Range("need n >= 2 and T > 0".into()));
    }
    let (x0, y) = upsilon_anchor(z, phi)?;
    let degenerate = y.abs() <= 1e-14 * z.norm().powf(1.5).max(1e-300) && x0 < 0.0;
    let mut taus: Vec<f64> = (0..n)
        .map(|k| {
            let u = k as f64 / (n - 1) as f64;
            x0 + t_len * u * u
        })
        .collect();
    if degenerate {
        taus.retain(|t| t.abs() > 1e-12 * t_len);
    }
    let nodes: Vec<Complex64> = taus
        .iter()
        .enumerate()
        .map(|(i, &t)| if i == 0 && !degenerate { z } else { upsilon_point(phi, y, t) })
        .collect();
    let mut weights = vec![0.0; nodes.len()];
    for i in 0..nodes.len().saturating_sub(1) {
        let seg = (nodes[i + 1] - nodes[i]).norm();
        weights[i] += 0.5 * seg;
        weights[i + 1] += 0.5 * seg;
    }
    Ok(UpsilonContour { z, phi, x0, y, degenerate, taus, nodes, weights })
}

/// Integrands of the bounds along `Upsilon_phi(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpsilonKind {
    /// `|e^{-(4/3)(s^{3/2} - z^{3/2})}| (1+|s|)^{-alpha}`.
    Exp,
    /// `(1+|s|)^{-alpha}`.
    Power,
}

/// `int_{Upsilon_phi(z)} F(s) |ds|`, in the variable `u = tau^{1/3}` which
/// removes the endpoint singularity of `|ds/dtau|` at the origin.
pub fn upsilon_integral(z: Complex64, phi: f64, alpha: f64, kind: UpsilonKind) -> Result<f64> {
    let (x0, y) = upsilon_anchor(z, phi)?;
    let c = 4.0 / 3.0 * (1.5 * phi).cos();
    let f = |u: f64| {
        let tau = u * u * u;
        let w = Complex64::new(tau, y);
        let s = w.norm().powf(2.0 / 3.0);
        // |ds/dtau| dtau/du = (2/3)|w|^{-1/3} 3u^2.
        let jac = if w.norm() == 0.0 { 0.0 } else { 2.0 * u * u / w.norm().cbrt() };
        let base = (1.0 + s).powf(-alpha) * jac;
        match kind {
            UpsilonKind::Exp => (-c * (tau - x0)).exp() * base,
            UpsilonKind::Power => base,
        }
    };
    let u0 = x0.cbrt();
    integrate_to_infinity(f, u0, 1.0, 1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasiclassical::{gamma_contour, z_of_x};

    fn lam(m: f64, arg: f64) -> SpectralParameter {
        SpectralParameter::from_polar(m, arg).unwrap()
    }

    #[test]
    fn z_e_examples() {
        let one = lam(1.0, 0.0);
        let ze = z_e_point(&one);
        assert!((ze.re + (3.0 * PI / 4.0).powf(2.0 / 3.0)).abs() < 1e-14);
        let li = lam(1.0, PI / 2.0);
        let ze = z_e_point(&li);
        assert!((ze.arg() + 2.0 * PI / 3.0).abs() < 1e-14);
        assert!((ze.norm() - (3.0 * PI / 4.0).powf(2.0 / 3.0)).abs() < 1e-14);
        // Same as the quasiclassical map at x = -sqrt(lambda) read from below.
        let l3 = lam(3.0, 1.0);
        let z0 = z_of_x(Complex64::new(0.0, 0.0), &l3).unwrap();
        assert!((z0 - z_0_point(&l3)).norm() < 1e-12);
        let (_, r) = b_eps_disk(&l3, 0.05);
        assert!((r - z_e_point(&l3).norm() * 0.05f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn tangency_point() {
        let delta = PI / 6.0;
        let eps = default_epsilon(delta).unwrap();
        let l = lam(4.0, PI / 2.0);
        let w = w_tangent(&l, Tangent::Plus, delta, eps).unwrap();
        let (c, r) = b_eps_disk(&l, eps);
        assert!(((w - c).norm() - r).abs() < 1e-10);
        let rot = Tangent::Plus.rotation(delta);
        let lw = w_level(&l, w, rot);
        for k in 1..=8 {
            let h = 1e-3 * k as f64;
            for sgn in [-1.0, 1.0] {
                let ang = (w - c).arg() + sgn * h;
                let p = c + Complex64::from_polar(r, ang);
                assert!(w_level(&l, p, rot) <= lw + 1e-12);
            }
        }
        assert!(w_tangent(&lam(4.0, delta / 2.0), Tangent::Plus, delta, eps).is_err());
    }

    #[test]
    fn ordering_condition_on_a_grid() {
        let delta = PI / 6.0;
        let eps = default_epsilon(delta).unwrap();
        assert!(eps > 0.0 && eps < delta / 3.0);
        for k in 0..=40 {
            let arg = delta + (PI - delta) * k as f64 / 40.0;
            assert!(ordering_holds(&lam(2.0, arg), delta, eps).unwrap(), "arg {arg}");
        }
    }

    #[test]
    fn membership_basics() {
        let delta = PI / 6.0;
        let l = lam(3.0, 1.0);
        let spec = DomainSpec::new(DomainKind::DZdelta, l, delta).unwrap();
        assert!(!in_domain(&spec, z_e_point(&l)).unwrap());
        assert!(in_domain(&spec, Complex64::new(0.0, 0.0)).is_err());
        assert!(in_domain(&spec, Complex64::new(2.0, 0.0)).unwrap());
        let dz = DomainSpec::new(DomainKind::DZ, lam(1.0, 0.0), delta).unwrap();
        assert!(!in_domain(&dz, Complex64::new(-5.0, 0.0)).unwrap());
        assert!(in_domain(&dz, Complex64::new(-1.0, 0.0)).unwrap());
        assert!(DomainSpec::new(DomainKind::DStar, lam(1.0, 0.1), delta).is_err());
        assert!(DomainSpec::new(DomainKind::DZ, lam(1.0, 0.1), 1.0).is_err());
    }

    #[test]
    fn variant_domains_contain_gamma() {
        let delta = PI / 6.0;
        for &m in &[1.0, 10.0] {
            for k in 0..=12 {
                let arg = PI * k as f64 / 12.0;
                let l = lam(m, arg);
                let g = gamma_contour(&l, 6.0 + m.sqrt(), 60).unwrap();
                let check = |kind, range: std::ops::Range<usize>| {
                    let spec = DomainSpec::new(kind, l, delta).unwrap();
                    for &z in &g.nodes[range] {
                        if z.norm() == 0.0 {
                            continue;
                        }
                        assert!(in_domain(&spec, z).unwrap(), "{kind:?} arg {arg} m {m} z {z}");
                    }
                };
                let n = g.nodes.len();
                if arg >= delta {
                    check(DomainKind::D0, 0..n);
                } else {
                    check(DomainKind::D0, g.split_index..n);
                    check(DomainKind::DMinus, 0..g.split_index + 1);
                }
                if arg <= PI - delta {
                    check(DomainKind::DPlus, 0..n);
                }
                if arg >= PI / 2.0 - delta / 2.0 {
                    check(DomainKind::DStar, 0..n);
                }
            }
        }
    }

    #[test]
    fn choose_phi_examples() {
        let d = PI / 6.0;
        assert_eq!(choose_phi(Complex64::new(1.0, 0.0), d).unwrap(), 0.0);
        let phi = choose_phi(Complex64::new(0.0, 1.0), d).unwrap();
        assert!((phi - (PI / 3.0 - PI / 18.0)).abs() < 1e-15);
        let z = Complex64::from_polar(1.0, -(PI - 2.0 * d / 3.0));
        let phi = choose_phi(z, d).unwrap();
        assert!((phi + PI / 3.0 - d / 3.0).abs() < 1e-15);
        assert!(((z.arg() - phi).abs() - (2.0 * PI / 3.0 - d / 3.0)).abs() < 1e-12);
        assert!(choose_phi(Complex64::new(-1.0, 0.01), d).is_err());
    }

    #[test]
    fn upsilon_geometry() {
        let z = Complex64::from_polar(2.0, 0.3);
        let c = upsilon_contour(z, 0.3, 30.0, 50).unwrap();
        for s in &c.nodes {
            assert!((s.arg() - 0.3).abs() < 1e-12 && s.norm() >= 2.0 - 1e-12);
        }
        let z = Complex64::from_polar(1.5, -1.2);
        let phi = 0.2;
        let c = upsilon_contour(z, phi, 20.0, 80).unwrap();
        let rot = Complex64::from_polar(1.0, -phi);
        let mut prev = f64::NEG_INFINITY;
        for s in &c.nodes {
            let w = (s * rot).powf(1.5);
            assert!((w.im - c.y).abs() < 1e-10 * (1.0 + c.y.abs()));
            assert!(s.powf(1.5).re > prev);
            prev = s.powf(1.5).re;
        }
        // Nesting: the curve through a node is a tail of the same curve.
        let w = c.nodes[10];
        let (x1, y1) = upsilon_anchor(w, phi).unwrap();
        assert!((y1 - c.y).abs() < 1e-10 && (x1 - c.taus[10]).abs() < 1e-10);
        let deg = Complex64::from_polar(1.0, -2.0 * PI / 3.0);
        let c = upsilon_contour(deg, 0.0, 10.0, 21).unwrap();
        assert!(c.degenerate && c.nodes.iter().all(|s| s.norm() > 0.0));
    }

    #[test]
    fn upsilon_power_bound() {
        for &alpha in &[1.5, 2.0, 3.0] {
            for &(r, a, phi) in &[(1.0, 0.0, 0.0), (3.0, -1.5, -0.6), (0.5, 2.0, 0.8)] {
                let z = Complex64::from_polar(r, a);
                let v = upsilon_integral(z, phi, alpha, UpsilonKind::Power).unwrap();
                assert!(v <= 2.0 / (alpha - 1.0), "alpha {alpha}: {v}");
            }
        }
    }
}
