//! Envelopes of the four combinations `F` built from `psi(+-x, lambda)`,
//! `psi(+-ix, -lambda)`, their classical counterparts, and the solutions
//! `A_nu` of the perturbed Airy equation recovered from the `psi` oracle.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::branched_complex::pow_lower;
use crate::domains::{in_domain, DomainKind, DomainSpec};
use crate::error::{PcfError, Result};
use crate::quasiclassical::{dz_dx, turning_point, x_of_z, xi, z_of_x, CutSide, SpectralParameter};
use crate::specfun::{gamma_complex, omega, PsiOracle, PsiValue};

/// The four solutions `psi(x, lambda)`, `psi(ix, -lambda)`,
/// `psi(-ix, -lambda)`, `psi(-x, lambda)` and their `A_nu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolutionVariant {
    Zero,
    Plus,
    Minus,
    Star,
}

impl SolutionVariant {
    pub const ALL: [SolutionVariant; 4] = [Self::Zero, Self::Plus, Self::Minus, Self::Star];

    pub fn tag(self) -> &'static str {
        match self {
            Self::Zero => "0",
            Self::Plus => "+",
            Self::Minus => "-",
            Self::Star => "*",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "0" | "zero" => Ok(Self::Zero),
            "+" | "plus" => Ok(Self::Plus),
            "-" | "minus" => Ok(Self::Minus),
            "*" | "star" => Ok(Self::Star),
            other => Err(PcfError::Usage(format!("unknown variant {other:?}"))),
        }
    }

    /// Factor `sigma` in the argument `sigma x` of `psi`.
    pub fn rotation(self) -> Complex64 {
        match self {
            Self::Zero => Complex64::new(1.0, 0.0),
            Self::Plus => Complex64::new(0.0, 1.0),
            Self::Minus => Complex64::new(0.0, -1.0),
            Self::Star => Complex64::new(-1.0, 0.0),
        }
    }

    /// Whether the solution belongs to `-lambda`.
    pub fn negated(self) -> bool {
        matches!(self, Self::Plus | Self::Minus)
    }

    /// Airy seed rotation: `A_nu ~ Ai(z rho)`.
    pub fn airy_rotation(self) -> Complex64 {
        match self {
            Self::Zero => Complex64::new(1.0, 0.0),
            Self::Plus | Self::Star => omega(),
            Self::Minus => omega().conj(),
        }
    }

    pub fn domain_kind(self) -> DomainKind {
        match self {
            Self::Zero => DomainKind::D0,
            Self::Plus => DomainKind::DPlus,
            Self::Minus => DomainKind::DMinus,
            Self::Star => DomainKind::DStar,
        }
    }
}

/// `2^{3/4} sqrt(pi) (lambda / 2e)^{lambda/4}` with `arg lambda` given.
pub fn phi_polar(modulus: f64, arg: f64) -> Complex64 {
    let lam = Complex64::from_polar(modulus, arg);
    let log = Complex64::new((modulus / (2.0 * std::f64::consts::E)).ln(), arg);
    2f64.powf(0.75) * PI.sqrt() * (lam * 0.25 * log).exp()
}

/// Principal `phi(lambda)`; undefined on the closed negative axis.
pub fn phi_lambda(lambda: Complex64) -> Result<Complex64> {
    if lambda.im == 0.0 && lambda.re <= 0.0 {
        return Err(PcfError::Branch(format!("phi at {lambda} on the cut")));
    }
    Ok(phi_polar(lambda.norm(), lambda.im.atan2(lambda.re)))
}

/// `phi(lambda)` for `arg lambda` in `[0, pi]`, the endpoint `pi` read from above.
pub fn phi_of(lambda: &SpectralParameter) -> Complex64 {
    phi_polar(lambda.modulus(), lambda.arg())
}

/// `phi(-lambda)` with `arg(-lambda) = arg lambda - pi`, the limit from the
/// upper half-plane of `lambda` when `lambda > 0`.
pub fn phi_of_neg(lambda: &SpectralParameter) -> Complex64 {
    phi_polar(lambda.modulus(), lambda.arg() - PI)
}

/// `(1 + |lambda|^{1/2} + |x^2-lambda|^{1/2}) / (1 + |lambda|^{5/12} + |x^2-lambda|^{5/4})`.
pub fn rho(x: f64, lambda: &SpectralParameter) -> f64 {
    let m = lambda.modulus();
    let d = (x * x - lambda.value()).norm();
    (1.0 + m.sqrt() + d.sqrt()) / (1.0 + m.powf(5.0 / 12.0) + d.powf(1.25))
}

/// `1 + |lambda|^{1/12} + |x^2-lambda|^{1/4}`.
pub fn rho0(x: f64, lambda: &SpectralParameter) -> f64 {
    1.0 + lambda.modulus().powf(1.0 / 12.0) + (x * x - lambda.value()).norm().powf(0.25)
}

/// The branch of `sqrt(x^2 - lambda)` analytic on the positive axis and
/// tending to `x` at infinity; real `lambda` is read as `lambda + i0`.
pub fn sqrt_x2_minus_lambda(x: f64, lambda: &SpectralParameter) -> Complex64 {
    let w = x * x - lambda.value();
    if w.re < 0.0 && w.im == 0.0 {
        Complex64::new(0.0, -(-w.re).sqrt())
    } else {
        w.sqrt()
    }
}

/// `lambda xi(x / sqrt(lambda))` on the lower side of the cut.
pub fn lambda_xi(x: f64, lambda: &SpectralParameter) -> Result<Complex64> {
    let t = Complex64::new(x, 0.0) * lambda.pow(-0.5);
    Ok(lambda.value() * xi(t, Some(CutSide::Lower))?.value.to_complex())
}

/// `psi` oracles for `lambda` and `-lambda`.
pub struct PsiPair {
    pub lambda: SpectralParameter,
    direct: PsiOracle,
    negated: PsiOracle,
}

impl PsiPair {
    pub fn new(lambda: &SpectralParameter) -> Result<Self> {
        let l = lambda.value();
        Ok(Self { lambda: *lambda, direct: PsiOracle::new(l)?, negated: PsiOracle::new(-l)? })
    }

    /// `psi` of the variant at `sigma x`; `psi_prime` is the derivative in
    /// the argument of `psi`, not in `x`.
    pub fn eval(&self, x: Complex64, variant: SolutionVariant) -> Result<PsiValue> {
        let arg = variant.rotation() * x;
        if variant.negated() {
            self.negated.eval(arg)
        } else {
            self.direct.eval(arg)
        }
    }
}

/// `F_nu(x, lambda)` with a prepared oracle pair.
pub fn f_expression_with(pair: &PsiPair, x: f64, variant: SolutionVariant) -> Result<Complex64> {
    let p = pair.eval(Complex64::new(x, 0.0), variant)?;
    let s = sqrt_x2_minus_lambda(x, &pair.lambda);
    let i = Complex64::i();
    Ok(match variant {
        SolutionVariant::Zero | SolutionVariant::Star => p.psi_prime + p.psi * s,
        SolutionVariant::Plus | SolutionVariant::Minus => p.psi_prime + i * p.psi * s,
    })
}

/// `F_nu(x, lambda)`.
pub fn f_expression(x: f64, lambda: &SpectralParameter, variant: SolutionVariant) -> Result<Complex64> {
    f_expression_with(&PsiPair::new(lambda)?, x, variant)
}

/// Right-hand side of the estimate with unit constant.
pub fn estimate_rhs(x: f64, lambda: &SpectralParameter, variant: SolutionVariant) -> Result<f64> {
    let lx = lambda_xi(x, lambda)?;
    let r = rho(x, lambda);
    let l = lambda.value();
    let half_turn = (-Complex64::i() * PI * 0.5 * l).exp();
    Ok(match variant {
        SolutionVariant::Zero => (phi_of(lambda) * (-lx).exp()).norm() * r,
        SolutionVariant::Plus => (phi_of_neg(lambda) * half_turn * lx.exp()).norm() * r,
        SolutionVariant::Minus => (phi_of_neg(lambda) * (-lx).exp()).norm() * r,
        SolutionVariant::Star => (phi_of(lambda) * half_turn * lx.exp()).norm() * r,
    })
}

/// One point of an estimate sweep. Failures are kept in `error`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRecord {
    pub x: f64,
    pub lambda: SpectralParameter,
    pub variant: SolutionVariant,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub in_domain: bool,
    /// Inside the explicit `(arg lambda, x)` range quoted for the variant.
    pub in_range: bool,
    pub error: Option<String>,
}

/// Membership of `z_lambda(x)` in the domain of the variant. The turning
/// point image `z = 0` is a boundary point and counts as inside whenever
/// the variant is defined for `lambda`.
pub fn estimate_in_domain(x: f64, lambda: &SpectralParameter, variant: SolutionVariant, delta: f64) -> Result<bool> {
    let spec = match DomainSpec::new(variant.domain_kind(), *lambda, delta) {
        Ok(s) => s,
        Err(PcfError::Domain(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    let z = z_of_x(Complex64::new(x, 0.0), lambda)?;
    if z.norm() == 0.0 {
        return Ok(true);
    }
    in_domain(&spec, z)
}

/// The explicit `(arg lambda, x)` ranges on which the variant's estimate
/// is asserted along the real axis:
///
/// * `0`: `arg lambda >= delta`, or `x >= x_*`;
/// * `+`: `arg lambda <= pi - delta`;
/// * `-`: `arg lambda <= delta` and `x <= x_*`;
/// * `*`: `arg lambda >= pi/2 - delta/2`.
///
/// Note `estimate_in_domain` is wider for `-`: for small `arg lambda` the
/// image of `x > x_*` lies in the `-` domain, but `psi(-ix, -lambda)` grows
/// there while the right-hand side decays.
pub fn estimate_in_range(x: f64, lambda: &SpectralParameter, variant: SolutionVariant, delta: f64) -> Result<bool> {
    let a = lambda.arg();
    let x_star = || turning_point(lambda).map(|tp| tp.x_star.re);
    Ok(match variant {
        SolutionVariant::Zero => a >= delta || x >= x_star()?,
        SolutionVariant::Plus => a <= PI - delta,
        SolutionVariant::Minus => a <= delta && x <= x_star()?,
        SolutionVariant::Star => a >= FRAC_PI_2 - delta / 2.0,
    })
}

fn estimate_point(pair: &PsiPair, x: f64, variant: SolutionVariant, delta: f64) -> EstimateRecord {
    let lambda = pair.lambda;
    let mut rec = EstimateRecord {
        x,
        lambda,
        variant,
        lhs: f64::NAN,
        rhs: f64::NAN,
        ratio: f64::NAN,
        in_domain: false,
        in_range: false,
        error: None,
    };
    match estimate_in_range(x, &lambda, variant, delta) {
        Ok(r) => rec.in_range = r,
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    }
    let run = || -> Result<(f64, f64, bool)> {
        let lhs = f_expression_with(pair, x, variant)?.norm();
        let rhs = estimate_rhs(x, &lambda, variant)?;
        Ok((lhs, rhs, estimate_in_domain(x, &lambda, variant, delta)?))
    };
    match run() {
        Ok((lhs, rhs, dom)) => {
            rec.lhs = lhs;
            rec.rhs = rhs;
            rec.ratio = if rhs > 0.0 { lhs / rhs } else { f64::INFINITY };
            rec.in_domain = dom;
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

/// Evaluates the estimate on every `(x, lambda)` point, in input order.
pub fn estimate_sweep(points: &[(f64, SpectralParameter)], variant: SolutionVariant, delta: f64) -> Vec<EstimateRecord> {
    // One oracle pair per distinct lambda, built in parallel.
    let mut lambdas: Vec<SpectralParameter> = Vec::new();
    for (_, l) in points {
        if !lambdas.contains(l) {
            lambdas.push(*l);
        }
    }
    let pairs: Vec<std::result::Result<PsiPair, String>> =
        lambdas.par_iter().map(|l| PsiPair::new(l).map_err(|e| e.to_string())).collect();
    points
        .par_iter()
        .map(|&(x, l)| {
            let k = lambdas.iter().position(|m| *m == l).expect("lambda registered");
            match &pairs[k] {
                Ok(p) => estimate_point(p, x, variant, delta),
                Err(e) => EstimateRecord {
                    x,
                    lambda: l,
                    variant,
                    lhs: f64::NAN,
                    rhs: f64::NAN,
                    ratio: f64::NAN,
                    in_domain: false,
                    in_range: false,
                    error: Some(e.clone()),
                },
            }
        })
        .collect()
}

/// The classical ratios `|psi| rho0 / |phi e^{-lambda xi}|` and
/// `|psi'| / (rho0 |phi e^{-lambda xi}|)`.
pub fn olver_ratio_with(pair: &PsiPair, x: f64) -> Result<(f64, f64)> {
    let lambda = &pair.lambda;
    let p = pair.eval(Complex64::new(x, 0.0), SolutionVariant::Zero)?;
    let env = (phi_of(lambda) * (-lambda_xi(x, lambda)?).exp()).norm();
    let r0 = rho0(x, lambda);
    Ok((p.psi.norm() * r0 / env, p.psi_prime.norm() / (r0 * env)))
}

pub fn olver_ratio(x: f64, lambda: &SpectralParameter) -> Result<(f64, f64)> {
    olver_ratio_with(&PsiPair::new(lambda)?, x)
}

/// Residuals of the connection formulas between `psi(+-x, lambda)` and
/// `psi(+-ix, -lambda)`, relative to the largest term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiConnectionResidual {
    /// `psi(+-ix, -lambda)` through `psi(+-x, lambda)`, for both signs.
    pub ix: [f64; 2],
    /// `psi(+-x, lambda)` through `psi(+-ix, -lambda)`, for both signs.
    pub minus_x: [f64; 2],
}

pub fn psi_connection_residuals(pair: &PsiPair, x: f64) -> Result<PsiConnectionResidual> {
    let l = pair.lambda.value();
    let xc = Complex64::new(x, 0.0);
    let v = |var| pair.eval(xc, var).map(|p| p.psi);
    let (p0, ps) = (v(SolutionVariant::Zero)?, v(SolutionVariant::Star)?);
    let (pp, pm) = (v(SolutionVariant::Plus)?, v(SolutionVariant::Minus)?);
    let s2pi = (2.0 * PI).sqrt();
    let i = Complex64::i();
    let g1 = gamma_complex((1.0 - l) * 0.5)? / s2pi;
    let e1 = (i * PI * 0.25 * (l + 1.0)).exp();
    let g2 = gamma_complex((1.0 + l) * 0.5)? / s2pi;
    let e2 = (i * PI * 0.25 * (l - 1.0)).exp();
    let rel = |lhs: Complex64, a: Complex64, b: Complex64| {
        (lhs - a - b).norm() / lhs.norm().max(a.norm()).max(b.norm())
    };
    Ok(PsiConnectionResidual {
        ix: [rel(pp, g1 * e1 * p0, g1 * ps / e1), rel(pm, g1 * e1 * ps, g1 * p0 / e1)],
        minus_x: [rel(p0, g2 * e2 * pp, g2 * pm / e2), rel(ps, g2 * e2 * pm, g2 * pp / e2)],
    })
}

/// `2 sqrt(pi) Gamma((lambda+1)/2) / phi(lambda)^2`.
pub fn connection_constant(lambda: &SpectralParameter) -> Result<Complex64> {
    let l = lambda.value();
    let phi = phi_of(lambda);
    Ok(2.0 * PI.sqrt() * gamma_complex((l + 1.0) * 0.5)? / (phi * phi))
}

/// `(2/3) (z rho)^{3/2}` with the principal branch, negative reals from below.
pub fn airy_exponent(z: Complex64, variant: SolutionVariant) -> Complex64 {
    pow_lower(z * variant.airy_rotation(), 1.5) * (2.0 / 3.0)
}

/// `A_nu` and `a_nu = e^{(2/3)(z rho)^{3/2}} A_nu` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnuValue {
    pub z: Complex64,
    pub x: Complex64,
    pub a_value: Complex64,
    pub big_a: Complex64,
}

/// Solutions `A_nu` of the perturbed Airy equation obtained by scaling the
/// `psi` oracles.
pub struct AnuFromPsi {
    pub pair: PsiPair,
    phi: Complex64,
}

impl AnuFromPsi {
    pub fn new(lambda: &SpectralParameter) -> Result<Self> {
        Ok(Self { pair: PsiPair::new(lambda)?, phi: phi_of(lambda) })
    }

    fn check(&self, variant: SolutionVariant) -> Result<()> {
        let a = self.pair.lambda.arg();
        if variant == SolutionVariant::Star && a <= 0.0 {
            return Err(PcfError::Domain("A_* needs arg lambda > 0".into()));
        }
        Ok(())
    }

    /// Prefactor `c` in `A_nu = c psi_nu sqrt(z')`.
    fn prefactor(&self, variant: SolutionVariant) -> Complex64 {
        let l = self.pair.lambda.value();
        let i = Complex64::i();
        let k = self.phi / (2f64.powf(1.5) * PI);
        match variant {
            SolutionVariant::Zero => 1.0 / self.phi,
            SolutionVariant::Minus => k * (-i * PI / 12.0 - i * PI * 0.25 * l).exp(),
            SolutionVariant::Plus => k * (i * PI / 12.0 + i * PI * 0.25 * l).exp(),
            SolutionVariant::Star => (-i * PI / 6.0 + i * PI * 0.5 * l).exp() / self.phi,
        }
    }

    /// `A_nu(z_lambda(x))` at a complex `x`.
    pub fn big_a_at_x(&self, x: Complex64, variant: SolutionVariant) -> Result<Complex64> {
        self.check(variant)?;
        let p = self.pair.eval(x, variant)?;
        let zp = dz_dx(x, &self.pair.lambda)?;
        Ok(self.prefactor(variant) * p.psi * zp.sqrt())
    }

    /// `(a_nu, A_nu)` at `z_lambda(x)`.
    pub fn at_x(&self, x: Complex64, variant: SolutionVariant) -> Result<AnuValue> {
        let z = z_of_x(x, &self.pair.lambda)?;
        let big_a = self.big_a_at_x(x, variant)?;
        Ok(AnuValue { z, x, a_value: big_a * airy_exponent(z, variant).exp(), big_a })
    }

    /// `(a_nu, A_nu)` at a point of `D_Z(lambda)`.
    pub fn at_z(&self, z: Complex64, variant: SolutionVariant) -> Result<AnuValue> {
        let x = x_of_z(z, &self.pair.lambda)?;
        let big_a = self.big_a_at_x(x, variant)?;
        Ok(AnuValue { z, x, a_value: big_a * airy_exponent(z, variant).exp(), big_a })
    }

    /// `(A_nu, dA_nu/dz)` by a Cauchy circle of radius `0.1 (1+|z|)^{-1/2}`.
    pub fn big_a_with_derivative(&self, z: Complex64, variant: SolutionVariant) -> Result<(Complex64, Complex64)> {
        let r = cauchy_radius(z);
        let d = cauchy_derivative(|w| self.at_z(w, variant).map(|v| v.big_a), z, r)?;
        Ok((self.at_z(z, variant)?.big_a, d))
    }

    /// `(a_nu, da_nu/dz)`; differentiating `A_nu` keeps the circle clear of
    /// the cut of the exponential factor.
    pub fn a_with_derivative(&self, z: Complex64, variant: SolutionVariant) -> Result<(Complex64, Complex64)> {
        let (big_a, d) = self.big_a_with_derivative(z, variant)?;
        let rot = variant.airy_rotation();
        let e = airy_exponent(z, variant).exp();
        let de = rot * pow_lower(z * rot, 0.5);
        Ok((big_a * e, (d + de * big_a) * e))
    }
}

pub fn cauchy_radius(z: Complex64) -> f64 {
    0.1 / (1.0 + z.norm()).sqrt()
}

const CAUCHY_POINTS: usize = 32;

/// `f'(z)` from a trapezoidal Cauchy integral on `|w - z| = r`.
pub fn cauchy_derivative<F>(f: F, z: Complex64, r: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..CAUCHY_POINTS {
        let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / CAUCHY_POINTS as f64);
        acc += f(z + r * e)? / e;
    }
    Ok(acc / (r * CAUCHY_POINTS as f64))
}

/// `a_nu` from `psi` at real `x`, as `(a_nu, A_nu)`.
pub fn a_nu_from_psi(x: f64, lambda: &SpectralParameter, variant: SolutionVariant) -> Result<(Complex64, Complex64)> {
    let v = AnuFromPsi::new(lambda)?.at_x(Complex64::new(x, 0.0), variant)?;
    Ok((v.a_value, v.big_a))
}

/// One Wronskian compared with its closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct WronskianRow {
    pub pair: &'static str,
    pub z: Complex64,
    pub value: Complex64,
    pub expected: Complex64,
    pub rel_error: f64,
}

/// Closed forms of `W{A_0,A_+}`, `W{A_0,A_-}`, `W{A_*,A_+}`, `W{A_*,A_-}`,
/// `W{A_0,A_*}`, `W{A_-,A_+}` for `0 < arg lambda < pi`.
pub fn wronskian_closed_forms(lambda: &SpectralParameter) -> Result<Vec<(&'static str, SolutionVariant, SolutionVariant, Complex64)>> {
    use SolutionVariant::*;
    let l = lambda.value();
    let i = Complex64::i();
    let tp = 2.0 * PI;
    let k = connection_constant(lambda)?;
    let cis = |a: f64| Complex64::from_polar(1.0, a);
    Ok(vec![
        ("0+", Zero, Plus, cis(-PI / 6.0) / tp),
        ("0-", Zero, Minus, cis(PI / 6.0) / tp),
        ("*+", Star, Plus, -cis(PI / 6.0) * (i * PI * l).exp() / tp),
        ("*-", Star, Minus, cis(PI / 2.0) / tp),
        ("0*", Zero, Star, cis(-PI / 6.0) / PI * (i * PI * 0.5 * l).exp() * (PI * 0.5 * l).cos() * k),
        ("-+", Minus, Plus, cis(-PI / 2.0) / tp / k),
    ])
}

/// Wronskians of the `psi`-derived `A_nu` at each probe point.
pub fn wronskian_check(lambda: &SpectralParameter, probe_z: &[Complex64]) -> Result<Vec<WronskianRow>> {
    let a = lambda.arg();
    if !(a > 0.0 && a < PI) {
        return Err(PcfError::Domain(format!("Wronskians need 0 < arg lambda < pi, got {a}")));
    }
    let ev = AnuFromPsi::new(lambda)?;
    let forms = wronskian_closed_forms(lambda)?;
    let mut rows = Vec::new();
    for &z in probe_z {
        let mut vals = std::collections::HashMap::new();
        for v in SolutionVariant::ALL {
            vals.insert(v, ev.big_a_with_derivative(z, v)?);
        }
        for &(name, f, g, expected) in &forms {
            let (fa, fd) = vals[&f];
            let (ga, gd) = vals[&g];
            let value = fa * gd - fd * ga;
            rows.push(WronskianRow { pair: name, z, value, expected, rel_error: (value - expected).norm() / expected.norm() });
        }
    }
    Ok(rows)
}

/// Relative residuals of the four connection formulas among `A_0`, `A_+-`,
/// `A_*` (upper signs, `0 < arg lambda < pi`), per probe point.
pub fn connection_check_a(lambda: &SpectralParameter, probe_z: &[Complex64]) -> Result<Vec<[f64; 4]>> {
    let a = lambda.arg();
    if !(a > 0.0 && a < PI) {
        return Err(PcfError::Domain(format!("connection formulas need 0 < arg lambda < pi, got {a}")));
    }
    let ev = AnuFromPsi::new(lambda)?;
    let l = lambda.value();
    let i = Complex64::i();
    let k = connection_constant(lambda)?;
    let cis = |a: f64| Complex64::from_polar(1.0, a);
    let m = (-i * PI * 0.5 * l).exp() / (2.0 * (PI * 0.5 * l).cos()) / k;
    let e = (i * PI * l).exp();
    let rel = |lhs: Complex64, terms: &[Complex64]| {
        let s: Complex64 = terms.iter().sum();
        let scale = terms.iter().fold(lhs.norm(), |acc, t| acc.max(t.norm()));
        (lhs - s).norm() / scale
    };
    probe_z
        .iter()
        .map(|&z| {
            let f = |v| ev.at_z(z, v).map(|r| r.big_a);
            let (a0, ap, am, ast) = (
                f(SolutionVariant::Zero)?,
                f(SolutionVariant::Plus)?,
                f(SolutionVariant::Minus)?,
                f(SolutionVariant::Star)?,
            );
            Ok([
                rel(a0, &[k * cis(-PI / 3.0) * ap, k * cis(PI / 3.0) * am]),
                rel(ap, &[m * e * cis(PI / 3.0) * a0, m * ast]),
                rel(am, &[m * cis(PI / 3.0) * ast, m * cis(-PI / 3.0) * a0]),
                rel(ast, &[k * e * cis(-PI / 3.0) * am, k * ap]),
            ])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{airy, airy_scaled};

    fn lam(m: f64, arg: f64) -> SpectralParameter {
        SpectralParameter::from_polar(m, arg).unwrap()
    }

    #[test]
    fn phi_values() {
        // Two routes to (2e)^{-1/4}.
        let a = 2f64.powf(0.75) * PI.sqrt() * (2.0 * std::f64::consts::E).powf(-0.25);
        let b = 2f64.powf(0.5) * PI.sqrt() * (-0.25f64).exp();
        assert!((a - b).abs() < 1e-14);
        let p = phi_lambda(Complex64::new(1.0, 0.0)).unwrap();
        assert!((p.re - a).abs() < 1e-14 && p.im.abs() < 1e-15);
        assert!((p.re - 1.952_164_063_151_547).abs() < 1e-13);
        let l = Complex64::new(1.0, 1.0);
        let prod = phi_lambda(l).unwrap() * phi_lambda(-l).unwrap();
        let expect = 2f64.powf(1.5) * PI * (Complex64::i() * PI * 0.25 * l).exp();
        assert!((prod.norm() - expect.norm()).abs() < 1e-10);
        assert!((prod - expect).norm() < 1e-10);
        let p1 = phi_lambda(Complex64::from_polar(3.0, PI - 1e-6)).unwrap();
        let p2 = phi_lambda(Complex64::from_polar(3.0, PI - 2e-6)).unwrap();
        assert!((p1 - p2).norm() < 1e-5 * p1.norm());
        assert!(phi_lambda(Complex64::new(-2.0, 0.0)).is_err());
        let sp = lam(2.0, 1.0);
        assert!((phi_of_neg(&sp) - phi_lambda(-sp.value()).unwrap()).norm() < 1e-13);
    }

    #[test]
    fn rho_values() {
        let one = lam(1.0, 0.0);
        assert!((rho(0.0, &one) - 1.0).abs() < 1e-15);
        let l = lam(7.0, 1.1);
        let at_tp = rho(0.0, &l);
        assert!(at_tp > 0.0);
        let l4 = lam(4.0, 0.0);
        assert!((rho(2.0, &l4) - 3.0 / (1.0 + 4f64.powf(5.0 / 12.0))).abs() < 1e-15);
        let expect = (2.0 + 3f64.sqrt()) / (2.0 + 3f64.powf(1.25));
        assert!((rho(2.0, &one) - expect).abs() < 1e-15);
        assert!((rho(2.0, &one) - 0.62742).abs() < 1e-5);
        assert!((rho0(0.0, &one) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn sqrt_branch() {
        let one = lam(1.0, 0.0);
        assert!((sqrt_x2_minus_lambda(2.0, &one) - 3f64.sqrt()).norm() < 1e-15);
        assert!((sqrt_x2_minus_lambda(0.0, &one) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        // Continuity from lambda = 1 + i eps.
        let near = lam(1.0, 1e-9);
        assert!((sqrt_x2_minus_lambda(0.0, &near) - Complex64::new(0.0, -1.0)).norm() < 1e-8);
        let l = lam(2.0, PI / 2.0);
        let s = sqrt_x2_minus_lambda(1e4, &l);
        assert!(s.arg().abs() < 1e-7);
        // Agrees with lambda xi'(t) / sqrt(lambda).
        for &x in &[0.3, 1.0, 2.5] {
            let h = 1e-5;
            let d = (lambda_xi(x + h, &l).unwrap() - lambda_xi(x - h, &l).unwrap()) / (2.0 * h);
            assert!((d - sqrt_x2_minus_lambda(x, &l)).norm() < 1e-7);
        }
    }

    #[test]
    fn f_expression_closed_forms() {
        let one = lam(1.0, 0.0);
        let f = f_expression(2.0, &one, SolutionVariant::Zero).unwrap();
        let expect = (-2.0f64).exp() * (3f64.sqrt() - 2.0);
        assert!((f.re - expect).abs() < 1e-10 && f.im.abs() < 1e-10);
        assert!((f.re + 0.036262).abs() < 1e-6);
        let x = 10.0;
        let f = f_expression(x, &one, SolutionVariant::Zero).unwrap();
        let scaled = f.re * (x * x / 2.0).exp() * 2.0 * x;
        assert!((scaled + 1.0).abs() < 0.02);
        let rhs = estimate_rhs(2.0, &one, SolutionVariant::Zero).unwrap();
        assert!((rhs - 0.418_630_007_197_998).abs() < 1e-9, "{rhs}");
        let ratio = f.norm() / rhs;
        let ratio2 = f_expression(2.0, &one, SolutionVariant::Zero).unwrap().norm() / rhs;
        assert!(ratio < 1.0 && (ratio2 - 0.0866).abs() < 1e-3);
        let l4 = lam(4.0, 0.0);
        let tp = estimate_rhs(2.0, &l4, SolutionVariant::Zero).unwrap();
        assert!((tp - phi_of(&l4).norm() * rho(2.0, &l4)).abs() < 1e-12 * tp);
    }

    #[test]
    fn olver_closed_forms() {
        let one = lam(1.0, 0.0);
        let (r1, r2) = olver_ratio(2.0, &one).unwrap();
        assert!(r1 <= 10.0 && r2 <= 10.0);
        let (r1, r2) = olver_ratio(0.0, &one).unwrap();
        // psi(0, 1) = 1, psi'(0, 1) = 0, |e^{-xi(0)}| = 1.
        let phi = phi_of(&one).norm();
        assert!((r1 - 3.0 / phi).abs() < 1e-10 && r2 < 1e-10);
    }

    #[test]
    fn psi_connections() {
        for l in [Complex64::new(1.0, 1.0), Complex64::new(0.0, 2.0)] {
            let sp = SpectralParameter::from_complex(l).unwrap();
            let pair = PsiPair::new(&sp).unwrap();
            for &x in &[0.5, 1.0, 2.0] {
                let r = psi_connection_residuals(&pair, x).unwrap();
                for v in r.ix.iter().chain(r.minus_x.iter()) {
                    assert!(*v < 1e-6, "lambda {l} x {x}: {r:?}");
                }
            }
            let g = gamma_complex((1.0 - l) * 0.5).unwrap() * gamma_complex((1.0 + l) * 0.5).unwrap();
            assert!((g - PI / (PI * l * 0.5).cos()).norm() < 1e-10 * g.norm());
        }
    }

    #[test]
    fn a0_tracks_airy() {
        let l4 = lam(4.0, 0.0);
        let (a, big_a) = a_nu_from_psi(3.0, &l4, SolutionVariant::Zero).unwrap();
        let z = z_of_x(Complex64::new(3.0, 0.0), &l4).unwrap();
        let ai = airy(z).ai;
        assert!((big_a - ai).norm() / ai.norm() < 5e-2 * 4f64.powf(-2.0 / 3.0), "{big_a} {ai}");
        assert!(a.norm().is_finite());
        let one = lam(1.0, 0.0);
        let mut prev = f64::INFINITY;
        for k in 0..=18 {
            let x = 1.5 + 0.25 * k as f64;
            let (a, _) = a_nu_from_psi(x, &one, SolutionVariant::Zero).unwrap();
            let z = z_of_x(Complex64::new(x, 0.0), &one).unwrap();
            assert!((a / airy_scaled(z).ai - 1.0).norm() < 0.02, "x {x}");
            assert!(a.im.abs() < 1e-12 && a.re < prev);
            prev = a.re;
        }
    }

    #[test]
    fn conjugation_symmetry() {
        // A_0(x, conj lambda) = conj A_0(x, lambda) at real x, with conj
        // lambda reached by conjugating the oracle.
        let l = Complex64::new(1.5, 2.0);
        let sp = SpectralParameter::from_complex(l).unwrap();
        let ev = AnuFromPsi::new(&sp).unwrap();
        for &x in &[0.5, 2.0, 3.0] {
            let v = ev.at_x(Complex64::new(x, 0.0), SolutionVariant::Zero).unwrap();
            let o = PsiOracle::new(l.conj()).unwrap().eval_real(x).unwrap();
            let phi_c = phi_lambda(l.conj()).unwrap();
            let zp_c = dz_dx(Complex64::new(x, 0.0), &sp).unwrap().conj();
            let a_c = o.psi * zp_c.sqrt() / phi_c;
            assert!((a_c - v.big_a.conj()).norm() < 1e-10 * a_c.norm());
        }
    }
}
