//! Ratios of arc-length integrals along `Gamma_lambda` to their stated
//! envelopes. Each ratio is the implied constant `C` at one sample point.

use std::fmt;

use rayon::prelude::*;

use crate::domains::check_delta;
use crate::error::{PcfError, Result};
use crate::quasiclassical::{gamma_integral_x, turning_point, z_of_x, IntegralKind, SpectralParameter};
use num_complex::Complex64;

/// The envelope families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArcBound {
    /// `int_{Gamma(z)} |e^{-(4/3)s^{3/2}}| (1+|s|)^{-a} <= C |e^{-(4/3)z^{3/2}}| (1+|z|)^{-a-1/2}`.
    ExpDecay,
    /// `int_{Gamma(w,z)} |e^{(4/3)s^{3/2}}| (1+|s|)^{-a} <= C |e^{(4/3)z^{3/2}}| (1+|z|)^{-a-1/2}`,
    /// with `w = z_0` for `arg lambda >= delta` and `w = z_*` otherwise.
    ExpGrow,
    /// `int_{Gamma(z)} (1+|s|)^{-a} <= C (1+|z|)^{1-a}`, `a > 1`.
    PowerTail,
    /// `int_{Gamma(z)} (1+|s|)^{-1} (1+|s| m)^{-a} <= C (1/a + ln(1+2|lambda|)) (1+|z| m)^{-a}`,
    /// `m = |lambda|^{-2/3}`, `a > 0`.
    MixedTail,
    /// `int_{Gamma^-} (1+|s|)^{-a}` against the three regimes `a < 1`, `a = 1`, `a > 1`.
    PowerHead,
    /// `int_Gamma (|lambda|^{4/3} + |s|^2)^{-1} <= C |lambda|^{-2/3}`.
    V0,
}

impl ArcBound {
    pub const ALL: [ArcBound; 6] = [
        ArcBound::ExpDecay,
        ArcBound::ExpGrow,
        ArcBound::PowerTail,
        ArcBound::MixedTail,
        ArcBound::PowerHead,
        ArcBound::V0,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ArcBound::ExpDecay => "exp_decay",
            ArcBound::ExpGrow => "exp_grow",
            ArcBound::PowerTail => "power_tail",
            ArcBound::MixedTail => "mixed_tail",
            ArcBound::PowerHead => "power_head",
            ArcBound::V0 => "v0",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.tag() == s)
            .ok_or_else(|| PcfError::Usage(format!("unknown arc bound {s:?}")))
    }

    /// Exponents sampled by default.
    pub fn default_alphas(self) -> &'static [f64] {
        match self {
            ArcBound::ExpDecay | ArcBound::ExpGrow => &[-1.0, 0.0, 1.0, 2.0],
            ArcBound::PowerTail => &[1.25, 1.5, 2.0],
            ArcBound::MixedTail => &[0.25, 1.0, 2.0],
            ArcBound::PowerHead => &[0.0, 0.5, 1.0, 1.5, 2.0],
            ArcBound::V0 => &[0.0],
        }
    }

    /// Whether the bound depends on the point `z` (otherwise one value per `lambda`).
    pub fn pointwise(self) -> bool {
        !matches!(self, ArcBound::PowerHead | ArcBound::V0)
    }

    fn alpha_ok(self, a: f64) -> bool {
        match self {
            ArcBound::PowerTail => a > 1.0,
            ArcBound::MixedTail => a > 0.0,
            ArcBound::PowerHead => a >= 0.0,
            _ => a.is_finite(),
        }
    }
}

impl fmt::Display for ArcBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One sample: `lhs` is the integral, `rhs` the envelope without `C`.
/// Exponential kinds are reported relative to the common factor
/// `|e^{-+(4/3)z^{3/2}}|`, so `lhs` and `rhs` stay finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcRecord {
    pub bound: ArcBound,
    pub lambda: SpectralParameter,
    /// Curve parameter of `z = z_lambda(x)`; `NaN` for whole-curve bounds.
    pub x: f64,
    pub z: Complex64,
    pub alpha: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub error: Option<String>,
}

/// Hypothesis of the pointwise bounds: `arg lambda >= delta`, or `z` on `Gamma^+`.
pub fn hypothesis_holds(lambda: &SpectralParameter, x: f64, x_star: f64, delta: f64) -> bool {
    lambda.arg() >= delta || x >= x_star
}

fn evaluate(bound: ArcBound, lambda: &SpectralParameter, x: f64, alpha: f64, delta: f64) -> Result<(f64, f64)> {
    let m = lambda.modulus();
    let m23 = m.powf(2.0 / 3.0);
    let x_star = turning_point(lambda)?.x_star.re;
    let zabs = || -> Result<f64> { Ok(z_of_x(Complex64::new(x, 0.0), lambda)?.norm()) };
    Ok(match bound {
        ArcBound::ExpDecay => {
            let v = gamma_integral_x(lambda, x, None, alpha, IntegralKind::ExpDecay)?;
            (v.scaled, (1.0 + zabs()?).powf(-alpha - 0.5))
        }
        ArcBound::ExpGrow => {
            let w = if lambda.arg() >= delta { 0.0 } else { x_star };
            let v = gamma_integral_x(lambda, w, Some(x), alpha, IntegralKind::ExpGrow)?;
            (v.scaled, (1.0 + zabs()?).powf(-alpha - 0.5))
        }
        ArcBound::PowerTail => {
            let v = gamma_integral_x(lambda, x, None, alpha, IntegralKind::Power)?;
            (v.value(), (1.0 + zabs()?).powf(1.0 - alpha))
        }
        ArcBound::MixedTail => {
            let v = gamma_integral_x(lambda, x, None, alpha, IntegralKind::Mixed)?;
            let env = (1.0 / alpha + (1.0 + 2.0 * m).ln()) * (1.0 + zabs()? / m23).powf(-alpha);
            (v.value(), env)
        }
        ArcBound::PowerHead => {
            let v = gamma_integral_x(lambda, 0.0, Some(x_star), alpha, IntegralKind::Power)?;
            let env = if alpha < 1.0 {
                m.powf(2.0 / 3.0 * (1.0 - alpha)) / (1.0 - alpha)
            } else if alpha == 1.0 {
                (1.0 + 2.0 * m).ln()
            } else {
                1.0 / (alpha - 1.0)
            };
            (v.value(), env)
        }
        ArcBound::V0 => {
            let v = gamma_integral_x(lambda, 0.0, None, 0.0, IntegralKind::V0)?;
            (v.value(), 1.0 / m23)
        }
    })
}

/// Curve parameters `x = r sqrt|lambda|` for `r` in `r_values`, plus `x_*`.
pub fn sample_xs(lambda: &SpectralParameter, r_values: &[f64]) -> Result<Vec<f64>> {
    let s = lambda.modulus().sqrt();
    let mut xs: Vec<f64> = r_values.iter().map(|r| r * s).collect();
    xs.push(turning_point(lambda)?.x_star.re);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    Ok(xs)
}

/// All hypothesis-respecting samples of `bound` over `lambdas`, in input
/// order: lambda, then `x`, then `alpha`.
pub fn arc_bound_sweep(
    bound: ArcBound,
    lambdas: &[SpectralParameter],
    r_values: &[f64],
    alphas: &[f64],
    delta: f64,
) -> Result<Vec<ArcRecord>> {
    check_delta(delta)?;
    if let Some(a) = alphas.iter().find(|a| !bound.alpha_ok(**a)) {
        return Err(PcfError::Usage(format!("alpha {a} outside the range of {bound}")));
    }
    let mut jobs = Vec::new();
    for lam in lambdas {
        if bound.pointwise() {
            let x_star = turning_point(lam)?.x_star.re;
            for x in sample_xs(lam, r_values)? {
                if hypothesis_holds(lam, x, x_star, delta) {
                    jobs.extend(alphas.iter().map(|&a| (*lam, x, a)));
                }
            }
        } else {
            jobs.extend(alphas.iter().map(|&a| (*lam, f64::NAN, a)));
        }
    }
    Ok(jobs
        .par_iter()
        .map(|&(lambda, x, alpha)| {
            let z = if x.is_nan() {
                Complex64::new(f64::NAN, f64::NAN)
            } else {
                z_of_x(Complex64::new(x, 0.0), &lambda).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            };
            let mut rec = ArcRecord {
                bound,
                lambda,
                x,
                z,
                alpha,
                lhs: f64::NAN,
                rhs: f64::NAN,
                ratio: f64::NAN,
                error: None,
            };
            match evaluate(bound, &lambda, x, alpha, delta) {
                Ok((l, r)) => {
                    rec.lhs = l;
                    rec.rhs = r;
                    rec.ratio = l / r;
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
            rec
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn real_lambda_closed_forms() {
        // lambda > 0: Gamma^- = [z_0, 0] on the negative axis, Gamma^+ = [0, inf).
        let lam = SpectralParameter::new(2.0, 0.0).unwrap();
        let recs = arc_bound_sweep(ArcBound::PowerTail, &[lam], &[], &[2.0], PI / 6.0).unwrap();
        // Only z_* = 0 survives the hypothesis; int_0^inf (1+s)^{-2} ds = 1.
        assert_eq!(recs.len(), 1);
        assert!((recs[0].ratio - 1.0).abs() < 1e-7);
        let head = arc_bound_sweep(ArcBound::PowerHead, &[lam], &[], &[0.0], PI / 6.0).unwrap();
        // |Gamma^-| = |z_0| = (3 pi lambda / 8)^{2/3}.
        let len = (3.0 * PI * 2.0 / 8.0).powf(2.0 / 3.0);
        assert!((head[0].lhs - len).abs() < 1e-7, "{}", head[0].lhs);
    }

    #[test]
    fn hypothesis_filters_gamma_minus_for_small_arg() {
        let lam = SpectralParameter::from_polar(4.0, 0.1).unwrap();
        let r = [0.0, 0.5, 2.0];
        let recs = arc_bound_sweep(ArcBound::ExpDecay, &[lam], &r, &[0.0], PI / 6.0).unwrap();
        let xs = turning_point(&lam).unwrap().x_star.re;
        assert!(recs.iter().all(|r| r.x >= xs));
        assert!(ArcBound::parse("pow").is_err());
        assert!(arc_bound_sweep(ArcBound::PowerTail, &[lam], &r, &[1.0], PI / 6.0).is_err());
    }
}
