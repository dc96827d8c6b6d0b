//! Sampled checks of the geometric lemmas behind the estimates.
//!
//! Every clause keeps its worst margin over the samples: positive when the
//! inequality holds strictly, zero on equality, negative when violated.
//! Strict and non-strict inequalities are checked alike, with a per-clause
//! tolerance on the negative side. Constants that the analysis only proves
//! to exist are compared against a ceiling.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::branched_complex::BranchedComplex;
use crate::domains::{choose_phi, in_domain, upsilon_anchor, upsilon_integral, upsilon_point, DomainKind, DomainSpec, UpsilonKind};
use crate::error::Result;
use crate::quad::integrate;
use crate::quasiclassical::{
    d_abs_xi_sq, eta_with_derivative, gamma_contour, turning_point, x_of_z, xi, xi_prime, z_of_x, CutSide,
    SpectralParameter,
};

/// Default tolerance on the negative side of a margin.
pub const MARGIN_TOL: f64 = 1e-8;
/// Finite-difference step in `r`.
pub const FD_STEP: f64 = 1e-6;
/// Ceiling for empirical constants.
pub const DEFAULT_CEILING: f64 = 10.0;

/// Sampling grid: `t = r e^{-i theta}` with `r` uniform on `[0, r_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaGrid {
    pub thetas: Vec<f64>,
    pub r_max: f64,
    pub r_count: usize,
    pub delta: f64,
    pub ceiling: f64,
}

impl Default for LemmaGrid {
    fn default() -> Self {
        Self {
            thetas: (0..=6).map(|k| k as f64 * PI / 12.0).collect(),
            r_max: 10.0,
            r_count: 1601,
            delta: PI / 6.0,
            ceiling: DEFAULT_CEILING,
        }
    }
}

impl LemmaGrid {
    fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.r_count.max(2);
        (0..n).map(move |k| self.r_max * k as f64 / (n - 1) as f64)
    }
}

/// Worst margin of one clause.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClauseResult {
    pub suite: &'static str,
    pub clause: &'static str,
    pub samples: usize,
    pub min_margin: f64,
    /// Sample coordinates of the worst margin (suite-specific pair).
    pub at: (f64, f64),
    pub tol: f64,
}

impl ClauseResult {
    pub fn passed(&self) -> bool {
        self.samples > 0 && self.min_margin >= -self.tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub samples: usize,
    pub clauses: Vec<ClauseResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(ClauseResult::passed)
    }

    pub fn clause(&self, name: &str) -> Option<&ClauseResult> {
        self.clauses.iter().find(|c| c.clause == name)
    }
}

struct Tracker {
    suite: &'static str,
    samples: usize,
    clauses: Vec<ClauseResult>,
}

impl Tracker {
    fn new(suite: &'static str) -> Self {
        Self { suite, samples: 0, clauses: Vec::new() }
    }

    fn declare(&mut self, clause: &'static str, tol: f64) {
        self.clauses.push(ClauseResult {
            suite: self.suite,
            clause,
            samples: 0,
            min_margin: f64::INFINITY,
            at: (f64::NAN, f64::NAN),
            tol,
        });
    }

    fn record(&mut self, clause: &'static str, margin: f64, at: (f64, f64)) {
        let c = self
            .clauses
            .iter_mut()
            .find(|c| c.clause == clause)
            .unwrap_or_else(|| panic!("undeclared clause {clause}"));
        c.samples += 1;
        let m = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        if m < c.min_margin {
            c.min_margin = m;
            c.at = at;
        }
    }

    fn window(&mut self, clause: &'static str, v: f64, lo: f64, hi: f64, at: (f64, f64)) {
        self.record(clause, (v - lo).min(hi - v), at);
    }

    fn finish(self) -> SuiteReport {
        SuiteReport { name: self.suite, samples: self.samples, clauses: self.clauses }
    }
}

/// Representative of `arg w` closest to `center`.
fn arg_near(w: Complex64, center: f64) -> f64 {
    BranchedComplex::lift_near(w, center).arg()
}

fn t_of(r: f64, theta: f64) -> Complex64 {
    r * Complex64::from_polar(1.0, -theta)
}

/// `xi(r e^{-i theta})` on the unwrapped sheet, lower side on the cut.
fn xi_at(r: f64, theta: f64) -> BranchedComplex {
    xi(t_of(r, theta), Some(CutSide::Lower)).expect("side given").value
}

/// `d/dr xi(r e^{-i theta})`.
fn dxi_at(r: f64, theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, -theta) * xi_prime(t_of(r, theta))
}

/// Central difference in `r`, one-sided at `r < h`.
fn fd<F: Fn(f64) -> f64>(f: F, r: f64) -> f64 {
    let h = FD_STEP;
    if r < h {
        (f(r + h) - f(r)) / h
    } else {
        (f(r + h) - f(r - h)) / (2.0 * h)
    }
}

/// `phi` in `t = 1 + |t-1| e^{-i phi}`, `phi in [0, pi]`.
fn phi_of(t: Complex64) -> f64 {
    let d = t - 1.0;
    d.im.abs().atan2(d.re)
}

fn unit_lambda(theta: f64) -> SpectralParameter {
    SpectralParameter::new(1.0, theta).expect("theta in [0, pi/2]")
}

/// Modulus bounds, argument windows and the range of `arg xi`.
pub fn xi_geometry(grid: &LemmaGrid) -> SuiteReport {
    let mut tr = Tracker::new("xi_geometry");
    for c in ["lower", "near_one", "arg_xi", "phi", "arg_dxi", "range", "rotated_dxi_wide", "rotated_dxi_narrow"] {
        tr.declare(c, MARGIN_TOL);
    }
    for &th in &grid.thetas {
        for r in grid.radii() {
            tr.samples += 1;
            let at = (th, r);
            let t = t_of(r, th);
            let x = xi_at(r, th);
            let a = x.arg();
            let eta = (t - 1.0).norm();
            tr.record("lower", x.modulus() - 2.0 / 3.0 * th.sin().powf(1.5), at);
            if eta > 0.0 && eta <= 1.0 {
                let q = x.modulus() / eta.powf(1.5);
                tr.record("near_one", (q - 2.0 / 3.0).min(2.0 - q), at);
            }
            if th > 0.0 {
                tr.window("range", a, -1.5 * PI, -2.0 * th, at);
            } else {
                tr.record("range", -(a + 1.5 * PI).abs().min(a.abs()), at);
            }
            if eta == 0.0 {
                continue;
            }
            let phi = phi_of(t);
            tr.window("arg_xi", a, -1.5 * phi - th / 2.0, -1.5 * phi, at);
            tr.window("phi", -phi, 2.0 * a / 3.0, 2.0 * a / 3.0 + th / 3.0, at);
            let d = dxi_at(r, th);
            let (lo1, hi1) = (-FRAC_PI_2 - th, -2.0 * th);
            let b = arg_near(d, 0.5 * (lo1 + hi1));
            let (lo2, hi2) = (-phi / 2.0 - 1.5 * th, -phi / 2.0 - th);
            tr.record("arg_dxi", (b - lo1).min(hi1 - b).min(b - lo2).min(hi2 - b), at);
            let rot = Complex64::from_polar(1.0, 2.0 * th) * d;
            if a >= -PI - th {
                let (lo, hi) = (-PI / 3.0 + th / 6.0, th / 2.0);
                tr.window("rotated_dxi_wide", arg_near(rot, 0.5 * (lo + hi)), lo, hi, at);
            }
            if a >= -FRAC_PI_2 - 2.0 * th {
                let (lo, hi) = (-PI / 6.0 - th / 6.0, th / 2.0);
                tr.window("rotated_dxi_narrow", arg_near(rot, 0.5 * (lo + hi)), lo, hi, at);
            }
        }
    }
    tr.finish()
}

/// Signs of `r`-derivatives of `e^{2 i theta} xi`, `arg xi` and `|xi|`.
pub fn xi_monotonicity(grid: &LemmaGrid) -> SuiteReport {
    let mut tr = Tracker::new("xi_monotonicity");
    for c in ["signs", "arg_increasing", "arg_nondecreasing", "abs_decreasing", "abs_increasing"] {
        tr.declare(c, MARGIN_TOL);
    }
    for &th in &grid.thetas {
        let rot = Complex64::from_polar(1.0, 2.0 * th);
        for r in grid.radii() {
            tr.samples += 1;
            let at = (th, r);
            let x = xi_at(r, th);
            let w = rot * dxi_at(r, th);
            if th > 0.0 {
                tr.record("signs", (-w.im).min(w.re) / w.norm(), at);
            } else if r < 1.0 {
                tr.record("signs", (-w.im / w.norm()).min(-x.to_complex().re.abs()), at);
            } else if r > 1.0 {
                tr.record("signs", (w.re / w.norm()).min(-x.to_complex().im.abs()), at);
            }
            if x.modulus() == 0.0 {
                continue;
            }
            let c = 2.0 * th + x.arg();
            let d_arg = fd(|s| xi_at(s, th).arg(), r);
            let d_abs = fd(|s| xi_at(s, th).modulus(), r);
            if c > -PI && c < -FRAC_PI_2 + th {
                tr.record("arg_increasing", d_arg, at);
            }
            if c >= -1.5 * PI + 2.0 * th && c <= -th / 4.0 {
                tr.record("arg_nondecreasing", d_arg, at);
            }
            if c > -1.5 * PI && c < -PI + th {
                tr.record("abs_decreasing", -d_abs, at);
            }
            if c > -FRAC_PI_2 && c < th {
                tr.record("abs_increasing", d_abs, at);
            }
        }
    }
    tr.finish()
}

/// The turning point and the behaviour of `|z_lambda|` around it, with the
/// convexity of `|xi|^2` and the `|xi / w| < 1` bound used for uniqueness.
pub fn turning_point_suite(grid: &LemmaGrid) -> Result<SuiteReport> {
    let mut tr = Tracker::new("turning_point");
    tr.declare("unimodal", MARGIN_TOL);
    tr.declare("re_z32_nondecreasing", MARGIN_TOL);
    tr.declare("arg_z_star", MARGIN_TOL);
    tr.declare("arg_xi_star", MARGIN_TOL);
    tr.declare("window_before_star", MARGIN_TOL);
    tr.declare("r_star", 1e-12);
    tr.declare("stationarity", 0.0);
    tr.declare("convexity", MARGIN_TOL);
    tr.declare("xi_over_w", MARGIN_TOL);
    for &th in &grid.thetas {
        let tp = turning_point(&unit_lambda(th))?;
        let rs = tp.r_star;
        tr.record("r_star", 2f64.sqrt() - rs, (th, rs));
        tr.record("stationarity", 1e-10 - d_abs_xi_sq(rs, th).abs(), (th, rs));
        if th > 0.0 {
            let a = xi_at(rs, th).arg();
            tr.window("arg_z_star", 4.0 * th / 3.0 + 2.0 * a / 3.0, -FRAC_PI_2 - th / 2.0, -FRAC_PI_2 + 5.0 * th / 6.0, (th, rs));
            tr.record("arg_xi_star", 2.0 * th + a + PI - PI / 22.0, (th, rs));
        } else {
            tr.record("arg_z_star", -tp.z_star.norm().max((rs - 1.0).abs()), (th, rs));
        }
        let rot = Complex64::from_polar(1.0, 2.0 * th);
        for r in grid.radii() {
            tr.samples += 1;
            let at = (th, r);
            let s = d_abs_xi_sq(r, th);
            if r < rs {
                tr.record("unimodal", -s, at);
                let (lo, hi) = (-FRAC_PI_2 + th, -PI / 4.0 + 0.75 * th);
                tr.window("window_before_star", arg_near(rot * dxi_at(r, th), 0.5 * (lo + hi)), lo, hi, at);
            } else if r > rs {
                tr.record("unimodal", s, at);
            }
            tr.record("re_z32_nondecreasing", fd(|q| (rot * xi_at(q, th).to_complex()).re, r), at);
            tr.record("convexity", fd(|q| d_abs_xi_sq(q, th), r), at);
            let t = t_of(r, th);
            if r != 1.0 || th != 0.0 {
                let p = xi_prime(t);
                let ratio = xi_at(r, th).modulus() * t.norm() / (p * p * p).norm();
                tr.record("xi_over_w", 1.0 - ratio, at);
            }
        }
    }
    Ok(tr.finish())
}

/// Sector containments of `Gamma_lambda^{+-}`, the lower bound on `|z|` and
/// the size of `Gamma_lambda^-`; `|lambda| = 1` since all clauses scale.
pub fn gamma_sectors(grid: &LemmaGrid) -> Result<SuiteReport> {
    let mut tr = Tracker::new("gamma_sectors");
    for c in ["gamma", "gamma_minus", "gamma_plus", "small_arg", "inf_modulus", "gamma_minus_radius"] {
        tr.declare(c, MARGIN_TOL);
    }
    tr.declare("gamma_minus_length", 0.0);
    let r0 = (3.0 * PI / 8.0).powf(2.0 / 3.0);
    for &th in &grid.thetas {
        let rs = turning_point(&unit_lambda(th))?.r_star;
        let small = th > 0.0 && 2.0 * th <= grid.delta;
        for r in grid.radii() {
            tr.samples += 1;
            let at = (th, r);
            let x = xi_at(r, th);
            let m = (1.5 * x.modulus()).powf(2.0 / 3.0);
            let a = 4.0 * th / 3.0 + 2.0 * x.arg() / 3.0;
            tr.record("inf_modulus", m - th.sin(), at);
            if r <= rs {
                tr.record("gamma_minus_radius", (r0 - m) / r0, at);
            }
            if m == 0.0 {
                continue;
            }
            if th > 0.0 {
                tr.window("gamma", a, -PI + 4.0 * th / 3.0, 0.0, at);
                if r <= rs {
                    tr.window("gamma_minus", a, -PI + 4.0 * th / 3.0, -FRAC_PI_2 + 5.0 * th / 6.0, at);
                }
                if r >= rs {
                    tr.window("gamma_plus", a, -FRAC_PI_2 - th / 2.0, 0.0, at);
                }
            } else if r < rs {
                tr.record("gamma_minus", -(a + PI).abs(), at);
            } else {
                tr.record("gamma_plus", -a.abs(), at);
            }
            if small {
                if r <= rs {
                    tr.window("small_arg", a, -PI, -5.0 * PI / 12.0, at);
                } else {
                    tr.window("small_arg", a, -FRAC_PI_2 - PI / 20.0, 0.0, at);
                }
            }
        }
        let len = if rs > 0.0 {
            integrate(|r| eta_with_derivative(t_of(r, th)).map(|(_, d)| d.norm()).unwrap_or(f64::NAN), 0.0, rs, 1e-10, 1e-12)?
        } else {
            0.0
        };
        tr.record("gamma_minus_length", 5.0 - len, (th, rs));
    }
    Ok(tr.finish())
}

/// The contour family `Upsilon_phi(z)`: nesting, monotonicity and the two
/// integral bounds, over anchors `z = rho e^{i a}` with `|a| <= pi - 2 delta/3`.
pub fn upsilon_contours(grid: &LemmaGrid) -> Result<SuiteReport> {
    let mut tr = Tracker::new("upsilon_contours");
    for c in ["nesting", "monotone", "identity", "exp_integral", "power_integral"] {
        tr.declare(c, MARGIN_TOL);
    }
    let amax = PI - 2.0 * grid.delta / 3.0;
    let na = 25;
    let moduli: Vec<f64> = (1..=20).map(|k| grid.r_max * k as f64 / 20.0).collect();
    for ia in 0..na {
        let ang = -amax + 2.0 * amax * ia as f64 / (na - 1) as f64;
        for &rho in &moduli {
            tr.samples += 1;
            let at = (ang, rho);
            let z = Complex64::from_polar(rho, ang);
            let phi = choose_phi(z, grid.delta)?;
            let (x0, y) = upsilon_anchor(z, phi)?;
            let scale = z.norm().powf(1.5);
            for dt in [0.5, 3.0, 20.0] {
                let w = upsilon_point(phi, y, x0 + dt);
                let (x1, y1) = upsilon_anchor(w, phi)?;
                tr.record("nesting", (x1 - x0).min(-(y1 - y).abs() / scale.max(1.0)), at);
                let lhs = (w.powf(1.5) - z.powf(1.5)).re;
                let rhs = (1.5 * phi).cos() * dt;
                tr.record("monotone", lhs / dt, at);
                tr.record("identity", -(lhs - rhs).abs() / rhs, at);
            }
            for alpha in [0.0, 1.0, 2.0] {
                let i = upsilon_integral(z, phi, alpha, UpsilonKind::Exp)?;
                tr.record("exp_integral", grid.ceiling - i * (1.0 + rho).powf(alpha + 0.5), at);
            }
            for alpha in [1.5, 2.0, 3.0] {
                let i = upsilon_integral(z, phi, alpha, UpsilonKind::Power)?;
                tr.record("power_integral", 2.0 / (alpha - 1.0) - i, at);
            }
        }
    }
    Ok(tr.finish())
}

/// `kappa_1 > 0` with `v(kappa_1) = -kappa_1`, as a radius on the ray.
fn r_kappa_one(theta: f64, r_star: f64) -> f64 {
    let rot = Complex64::from_polar(1.0, 2.0 * theta);
    let g = |r: f64| {
        let w = rot * xi_at(r, theta).to_complex();
        w.re + w.im
    };
    let mut lo = r_star;
    let mut hi = r_star.max(1.0) * 2.0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
    }
    if g(lo) >= 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// The `kappa` parametrisation of `Gamma_lambda`: ordering of `kappa_0`,
/// `kappa_*`, `kappa_1` and the three size bounds on `s_lambda(kappa)`.
pub fn kappa_parametrisation(grid: &LemmaGrid) -> Result<SuiteReport> {
    let mut tr = Tracker::new("kappa_parametrisation");
    for c in ["kappa_0", "order", "bounded_by_z_star", "bounded_by_im", "power_bound"] {
        tr.declare(c, MARGIN_TOL);
    }
    let mut thetas = grid.thetas.clone();
    // Clause 2 needs arg lambda <= delta; add a few ray angles there.
    thetas.extend([1.0, 2.0, 3.0].map(|k| k * grid.delta / 8.0));
    for &th in &thetas {
        let rot = Complex64::from_polar(1.0, 2.0 * th);
        let kv = |r: f64| rot * xi_at(r, th).to_complex();
        let rs = turning_point(&unit_lambda(th))?.r_star;
        let r1 = if th == 0.0 { rs } else { r_kappa_one(th, rs) };
        let (k0, ks, k1) = (kv(0.0).re, kv(rs).re, kv(r1).re);
        tr.record("kappa_0", -(k0 + PI / 4.0 * (2.0 * th).sin()).abs(), (th, 0.0));
        tr.record("order", (ks - k0).min(k1 - ks), (th, rs));
        let xs = xi_at(rs, th).modulus();
        let vs = kv(rs).im.abs();
        for r in grid.radii() {
            tr.samples += 1;
            let at = (th, r);
            let w = kv(r);
            if 2.0 * th >= grid.delta && r <= r1 {
                let c = (xi_at(r, th).modulus() / xs).powf(2.0 / 3.0);
                tr.record("bounded_by_z_star", grid.ceiling - c, at);
            }
            if th > 0.0 && 2.0 * th <= grid.delta && r >= rs && r <= r1 {
                tr.record("bounded_by_im", grid.ceiling - w.norm() / vs, at);
            }
            if r >= r1 && w.norm() > 0.0 {
                tr.record("power_bound", (2f64.sqrt() * w.re - w.norm()) / w.norm(), at);
            }
        }
    }
    Ok(tr.finish())
}

/// `x_of_z(z_of_x(x)) = x` on `Gamma_lambda` to `1e-10 (1 + |z|)`, over
/// `|lambda| in {1, 4, 16}` and the grid's `theta`.
pub fn round_trip(grid: &LemmaGrid) -> Result<SuiteReport> {
    let mut tr = Tracker::new("round_trip");
    tr.declare("x_of_z_of_x", 0.0);
    for m in [1.0, 4.0, 16.0] {
        for &th in &grid.thetas {
            let lam = SpectralParameter::new(m, th)?;
            let n = 60;
            for k in 0..=n {
                tr.samples += 1;
                let x = Complex64::new(6.0 * m.sqrt() * k as f64 / n as f64, 0.0);
                let z = z_of_x(x, &lam)?;
                let back = z_of_x(x_of_z(z, &lam)?, &lam)?;
                tr.record("x_of_z_of_x", 1e-10 * (1.0 + z.norm()) - (back - z).norm(), (th, x.re));
            }
        }
    }
    Ok(tr.finish())
}

/// Node containments of `Gamma_lambda` in the estimate domains.
pub fn domain_containment(grid: &LemmaGrid) -> Result<SuiteReport> {
    let mut tr = Tracker::new("domain_containment");
    for c in ["gamma_in_d0", "gamma_plus_in_d0", "gamma_minus_in_dminus", "d0_in_dzdelta"] {
        tr.declare(c, 0.0);
    }
    let flag = |b: bool| if b { 0.0 } else { -1.0 };
    for m in [1.0, 4.0, 16.0] {
        for &th in &grid.thetas {
            let lam = SpectralParameter::new(m, th)?;
            let d0 = DomainSpec::new(DomainKind::D0, lam, grid.delta)?;
            let dz = DomainSpec::new(DomainKind::DZdelta, lam, grid.delta)?;
            let dm = DomainSpec::new(DomainKind::DMinus, lam, grid.delta)?;
            let g = gamma_contour(&lam, 6.0 * m.sqrt(), 200)?;
            for (i, &z) in g.nodes.iter().enumerate() {
                if z.norm() == 0.0 {
                    continue;
                }
                tr.samples += 1;
                let at = (th, g.x_params[i]);
                let in0 = in_domain(&d0, z)?;
                if in0 {
                    tr.record("d0_in_dzdelta", flag(in_domain(&dz, z)?), at);
                }
                if lam.arg() >= grid.delta {
                    tr.record("gamma_in_d0", flag(in0), at);
                } else if i >= g.split_index {
                    tr.record("gamma_plus_in_d0", flag(in0), at);
                } else {
                    tr.record("gamma_minus_in_dminus", flag(in_domain(&dm, z)?), at);
                }
            }
        }
    }
    Ok(tr.finish())
}

/// All suites in a fixed order.
pub fn all_suites(grid: &LemmaGrid) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        xi_geometry(grid),
        xi_monotonicity(grid),
        turning_point_suite(grid)?,
        gamma_sectors(grid)?,
        upsilon_contours(grid)?,
        kappa_parametrisation(grid)?,
        round_trip(grid)?,
        domain_containment(grid)?,
    ])
}
