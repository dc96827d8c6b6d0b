//! The effective potential `v(eta) = sqrt(t') (1/sqrt(t''))''`, written as
//! `f''/f` with `f = sqrt(eta'(t(eta)))`, and its rescaling `V_0`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::xi::{eta_any, ETA_E};
use super::zmap::eta_inverse;
use super::SpectralParameter;
use crate::error::{PcfError, Result};

const CIRCLE_POINTS: usize = 64;
/// Closest admissible approach to the branch point `eta_E`.
const MIN_DISTANCE: f64 = 1e-8;

/// Newton from a nearby preimage; falls back to the full continuation from
/// `eta = 0` when the local step lands on the wrong side of a cut of `eta_any`.
fn newton_from(t0: Complex64, target: Complex64) -> Result<Complex64> {
    newton_local(t0, target).or_else(|_| eta_inverse(target))
}

fn newton_local(t0: Complex64, target: Complex64) -> Result<Complex64> {
    let mut t = t0;
    for _ in 0..60 {
        let (e, d) = eta_any(t);
        let dt = (e - target) / d;
        t -= dt;
        if dt.norm() <= 1e-15 * t.norm().max(1.0) {
            return Ok(t);
        }
    }
    Err(PcfError::Convergence(format!("eta inverse near {target}")))
}

/// `v(eta)` with a caller-chosen Cauchy radius.
pub fn v_eta_with_radius(eta_val: Complex64, radius: f64) -> Result<Complex64> {
    let dist = (eta_val - ETA_E).norm();
    if dist < MIN_DISTANCE || radius >= dist {
        return Err(PcfError::Singularity(format!("eta = {eta_val} too close to eta_E")));
    }
    let t0 = eta_inverse(eta_val)?;
    let (_, d0) = eta_any(t0);
    let f0 = d0.sqrt();

    // Walk out to the circle, then around it, continuing t and the sign of
    // the square root.
    let mut t = t0;
    let mut prev_target = eta_val;
    for k in 1..=4 {
        let target = eta_val + radius * k as f64 / 4.0;
        let (_, d) = eta_any(t);
        t = newton_from(t + (target - prev_target) / d, target)?;
        prev_target = target;
    }
    let mut prev_f = f0;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..CIRCLE_POINTS {
        let ang = 2.0 * PI * j as f64 / CIRCLE_POINTS as f64;
        let dir = Complex64::from_polar(1.0, ang);
        let target = eta_val + radius * dir;
        if j > 0 {
            let (_, d) = eta_any(t);
            t = newton_from(t + (target - prev_target) / d, target)?;
        }
        prev_target = target;
        let (_, d) = eta_any(t);
        let mut f = d.sqrt();
        if (f - prev_f).norm() > (f + prev_f).norm() {
            f = -f;
        }
        prev_f = f;
        acc += f / (dir * dir);
    }
    // Same sheet as f0 after one loop.
    if (prev_f - f0).norm() > (prev_f + f0).norm() {
        acc = -acc;
    }
    let second = acc * 2.0 / (CIRCLE_POINTS as f64 * radius * radius);
    Ok(second / f0)
}

/// `v(eta)`, Cauchy radius `min(0.1 max(1, |eta|), |eta - eta_E| / 4)`.
pub fn v_eta(eta_val: Complex64) -> Result<Complex64> {
    let dist = (eta_val - ETA_E).norm();
    let radius = (0.1 * eta_val.norm().max(1.0)).min(dist / 4.0);
    v_eta_with_radius(eta_val, radius)
}

/// `V_0(z, lambda) = v(z lambda^{-2/3}) lambda^{-4/3}`.
#[allow(non_snake_case)]
pub fn V0(z: Complex64, lambda: &SpectralParameter) -> Result<Complex64> {
    Ok(v_eta(z * lambda.pow(-2.0 / 3.0))? * lambda.pow(-4.0 / 3.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_eta_asymptotics() {
        // t ~ c eta^{3/4} gives v ~ -(7/64) eta^{-2}.
        // At |eta| = 40 the next correction is still about 5%.
        for ang in [-1.0, 0.0, 1.0] {
            let e = Complex64::from_polar(40.0, ang);
            let r = v_eta(e).unwrap() * e * e / (-7.0 / 64.0);
            assert!((r - 1.0).norm() < 0.06, "arg {ang}: {r}");
        }
        for ang in [-3.0, -2.5, -1.0, 0.0, 2.9] {
            let e = Complex64::from_polar(4000.0, ang);
            let r = v_eta(e).unwrap() * e * e / (-7.0 / 64.0);
            assert!((r - 1.0).norm() < 0.01, "arg {ang}: {r}");
        }
    }

    #[test]
    fn perturbed_airy_equation_holds() {
        // u(z) = psi(x(z)) sqrt(z'(x)) solves u'' - z u = V_0 u.
        let lam = SpectralParameter::new(4.0, 0.0).unwrap();
        let oracle = crate::specfun::PsiOracle::new(lam.value()).unwrap();
        let u = |z: f64| {
            let x = super::super::x_of_z(Complex64::new(z, 0.0), &lam).unwrap();
            let d = super::super::dz_dx(x, &lam).unwrap();
            oracle.eval(x).unwrap().psi * d.sqrt()
        };
        let h = 1e-3;
        for z in [-2.0, -0.7, 0.4, 1.5, 3.0] {
            let (um, u0, up) = (u(z - h), u(z), u(z + h));
            let upp = (up - 2.0 * u0 + um) / (h * h);
            let v = V0(Complex64::new(z, 0.0), &lam).unwrap();
            let res = upp - z * u0 - v * u0;
            assert!(res.norm() < 1e-4 * u0.norm(), "z = {z}: residual {res}, V0 u = {}", v * u0);
        }
    }

    #[test]
    fn radius_independence() {
        for e in [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.5), Complex64::new(3.0, -2.0)] {
            let a = v_eta_with_radius(e, 0.05).unwrap();
            let b = v_eta_with_radius(e, 0.1).unwrap();
            assert!((a - b).norm() < 1e-6 * a.norm().max(1e-3), "{e}: {a} vs {b}");
        }
    }

    #[test]
    fn branch_point_is_rejected() {
        assert!(matches!(v_eta(Complex64::new(ETA_E, 0.0)), Err(PcfError::Singularity(_))));
    }
}
