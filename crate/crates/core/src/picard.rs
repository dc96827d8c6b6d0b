//! Picard iteration for `u'' = (z + V_0) u` along the contours `Upsilon_phi`.
//!
//! With `zeta = rho z` (`rho` the Airy rotation of the variant) the solution
//! `A_nu(z) = U(zeta)` obeys `U'' = (zeta + W(zeta)) U`, `W(zeta) = rho V_0(zeta/rho)`
//! because `rho^3 = 1`, and is seeded by `Ai(zeta)`. The scaled unknown
//! `v = U e^{(2/3) zeta^{3/2}}` satisfies
//!
//! ```text
//! v(zeta) = a(zeta) + int_zeta^inf K(zeta, s) W(s) v(s) ds,
//! K(zeta, s) = [a(zeta) y(s) - y(zeta) a(s) e^{(4/3)(zeta^{3/2} - s^{3/2})}] / Wr,
//! ```
//!
//! where `a = Ai e^{(2/3)(.)^{3/2}}`, `y(s) = Ai(s rho') e^{-(2/3) s^{3/2}}` and
//! `Wr = W{Ai, Ai(. rho')}`. `rho'` is `omega` when the contour stays in
//! `arg s < pi/3` and `conj(omega)` otherwise, so `y` stays bounded. With the
//! kernel `J` this is `v = a - int_z^inf J V v ds`, the sign recorded
//! in [`RESOLVED_KERNEL_SIGN`].
//!
//! On `Upsilon_phi(zeta)` we have `s^{3/2} = e^{3 i phi/2}(tau + i y)`, so the
//! exponential in `K` depends only on `tau`. The contour is parametrised by
//! `u = tau^{1/3}` and cut into Gauss-Legendre panels. Because of the nesting
//! property, the integral from any node to infinity is a suffix of the same
//! discretisation. The plain part uses a cumulative Lagrange integration
//! matrix. The exponential part uses per-panel weights
//! `int_{u_i}^{b} e^{c(tau_i - tau(u))} l_m(u) du` and carries the tail across
//! panels with the factor `e^{c(tau_i - tau_b)}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bounds::SolutionVariant;
use crate::branched_complex::{pow_lower, SECTOR_TOL};
use crate::domains::{canonical_arg, check_delta, default_epsilon, upsilon_anchor};
use crate::error::{PcfError, Result};
use crate::quad::gauss_legendre;
use crate::quasiclassical::{SpectralParameter, V0};
use crate::specfun::{airy, airy_bi, airy_scaled, omega, zeta as airy_zeta};

/// Sign in front of the kernel `J` when the contour runs from `z` to
/// infinity: `v = a + RESOLVED_KERNEL_SIGN * int_z^inf J V_0 v ds`.
pub const RESOLVED_KERNEL_SIGN: f64 = -1.0;

/// Upper end of the panel parameter `u = tau^{1/3}`. The neglected tail of
/// the plain integral is about `6e-3 U^{-3}`.
const U_MAX: f64 = 1.0e4;
/// Decay `Re(c) (tau - tau_i)` after which exponential weights are dropped.
const EXP_CUTOFF: f64 = 40.0;
const MAX_PANELS: usize = 4000;
const MAX_DEPTH: usize = 40;

/// Perturbation used in the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Potential {
    Quasiclassical,
    /// `V_0 = 0`: the iteration must return the Airy seed.
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardOptions {
    pub delta: f64,
    /// Disk angle; `None` takes [`default_epsilon`].
    pub epsilon: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    /// Gauss-Legendre nodes per panel.
    pub order: usize,
    /// Contour direction in the rotated plane; `None` chooses it.
    pub phi: Option<f64>,
    pub potential: Potential,
    pub kernel_sign: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            delta: PI / 6.0,
            epsilon: None,
            tol: 1e-10,
            max_iter: 50,
            order: 16,
            phi: None,
            potential: Potential::Quasiclassical,
            kernel_sign: RESOLVED_KERNEL_SIGN,
        }
    }
}

/// Result of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardRun {
    pub lambda: SpectralParameter,
    pub variant: SolutionVariant,
    pub anchor_z: Complex64,
    /// Contour direction in the rotated plane `zeta = rho z`.
    pub phi: f64,
    /// Largest `tau` on the contour.
    pub truncation: f64,
    /// Collocation nodes.
    pub n: usize,
    pub panels: usize,
    /// Sup-norm change of each iterate over the nodes and the anchor.
    pub iterates: Vec<f64>,
    pub converged: bool,
    /// `a_nu(z) = e^{(2/3)(rho z)^{3/2}} A_nu(z)`.
    pub a_value: Complex64,
    /// `d a_nu / dz`.
    pub a_derivative: Complex64,
    /// `1 / Wr` multiplying the bracket of `K`.
    pub kernel_prefactor: Complex64,
    pub kernel_sign: f64,
}

impl PicardRun {
    /// `A_nu(z)`.
    pub fn big_a(&self) -> Complex64 {
        let rho = self.variant.airy_rotation();
        self.a_value * (-airy_zeta(self.anchor_z * rho)).exp()
    }

    /// Ratio of the second sup-change to the first.
    pub fn contraction(&self) -> Option<f64> {
        match self.iterates.as_slice() {
            [a, b, ..] if *a > 0.0 => Some(b / a),
            _ => None,
        }
    }
}

/// The kernel
/// `J(z, s) = -2 pi i e^{-i pi/3} (a(z) a(s w) - e^{(4/3)(z^{3/2} - s^{3/2})} a(z w) a(s))`.
/// Needs `arg z, arg s` in `[-pi, pi/3]`, where `(z w)^{3/2} = -z^{3/2}`.
pub fn kernel_j(z: Complex64, s: Complex64) -> Result<Complex64> {
    for w in [z, s] {
        if w.norm() > 0.0 {
            let a = w.im.atan2(w.re);
            if a > PI / 3.0 + SECTOR_TOL {
                return Err(PcfError::Branch(format!("arg {w} = {a} outside [-pi, pi/3]")));
            }
        }
    }
    let om = omega();
    let a = |w: Complex64| airy_scaled(w).ai;
    let e = ((pow_lower(z, 1.5) - pow_lower(s, 1.5)) * (4.0 / 3.0)).exp();
    let pre = Complex64::new(0.0, -2.0 * PI) * Complex64::from_polar(1.0, -PI / 3.0);
    Ok(pre * (a(z) * a(s * om) - e * a(z * om) * a(s)))
}

/// `J_0(z, s) = Ai(s) Bi(z) - Ai(z) Bi(s)`.
pub fn kernel_j0(z: Complex64, s: Complex64) -> Complex64 {
    airy(s).ai * airy_bi(z).0 - airy(z).ai * airy_bi(s).0
}

/// Sector of `z` (canonical argument) where `A_nu` has its Airy asymptotics.
pub fn asymptotic_sector(variant: SolutionVariant, lambda: &SpectralParameter, delta: f64, epsilon: f64) -> (f64, f64) {
    let t = 4.0 * lambda.theta() / 3.0;
    match variant {
        SolutionVariant::Zero => (-PI + t + epsilon, PI - delta / 3.0),
        SolutionVariant::Plus => (-PI + t + epsilon, PI / 3.0 - delta / 3.0),
        SolutionVariant::Minus => (-PI / 3.0 + delta / 3.0, PI + t - epsilon),
        SolutionVariant::Star => (PI / 3.0 + delta / 3.0, PI + t - epsilon),
    }
}

/// Shift taking a canonical `arg z` in the asymptotic sector to the
/// principal `arg(rho z)`.
fn zeta_shift(variant: SolutionVariant) -> f64 {
    match variant {
        SolutionVariant::Zero => 0.0,
        SolutionVariant::Plus => 2.0 * PI / 3.0,
        SolutionVariant::Minus => -2.0 * PI / 3.0,
        SolutionVariant::Star => 2.0 * PI / 3.0 - 2.0 * PI,
    }
}

fn check_lambda(variant: SolutionVariant, lambda: &SpectralParameter, delta: f64) -> Result<()> {
    let arg = lambda.arg();
    let ok = match variant {
        SolutionVariant::Plus => arg <= PI - delta + SECTOR_TOL,
        SolutionVariant::Star => arg >= delta - SECTOR_TOL,
        _ => true,
    };
    if ok {
        Ok(())
    } else {
        Err(PcfError::Domain(format!("arg lambda = {arg} outside the range of variant {}", variant.tag())))
    }
}

/// Admissible directions: `(soft, hard)` intervals in the rotated plane.
/// The hard interval keeps the asymptotic ray inside the variant's sector
/// and `|phi| <= pi/3 - epsilon/2`; the soft one also keeps `delta/3` from
/// `+-pi/3`.
fn phi_window(
    variant: SolutionVariant,
    lambda: &SpectralParameter,
    delta: f64,
    epsilon: f64,
) -> Result<((f64, f64), (f64, f64))> {
    let (lo, hi) = asymptotic_sector(variant, lambda, delta, epsilon);
    let sh = zeta_shift(variant);
    let m = 0.5 * epsilon;
    let hard = ((-PI / 3.0 + m).max(lo + sh), (PI / 3.0 - m).min(hi + sh));
    if hard.0 > hard.1 {
        return Err(PcfError::Domain(format!("no contour direction for variant {}", variant.tag())));
    }
    let soft = (hard.0.max(-PI / 3.0 + delta / 3.0), hard.1.min(PI / 3.0 - delta / 3.0));
    Ok((if soft.0 <= soft.1 { soft } else { hard }, hard))
}

/// Rotated anchor argument and contour direction for `z`.
pub fn select_phi(
    variant: SolutionVariant,
    z: Complex64,
    lambda: &SpectralParameter,
    delta: f64,
    epsilon: f64,
) -> Result<(f64, f64)> {
    if z.norm() == 0.0 {
        return Err(PcfError::Domain("anchor at z = 0".into()));
    }
    check_lambda(variant, lambda, delta)?;
    let (lo, hi) = asymptotic_sector(variant, lambda, delta, epsilon);
    let a = canonical_arg(z, lambda);
    if a < lo - SECTOR_TOL || a > hi + SECTOR_TOL {
        return Err(PcfError::Domain(format!(
            "arg z = {a} outside S[{lo}, {hi}] of variant {}",
            variant.tag()
        )));
    }
    let alpha = a + zeta_shift(variant);
    let (soft, hard) = phi_window(variant, lambda, delta, epsilon)?;
    let max_gap = 2.0 * PI / 3.0 - 0.5 * epsilon;
    let mut phi = alpha.clamp(soft.0, soft.1);
    if (alpha - phi).abs() > max_gap {
        phi = (alpha - (alpha - phi).signum() * max_gap).clamp(hard.0, hard.1);
    }
    if (alpha - phi).abs() > 2.0 * PI / 3.0 - 1e-9 {
        return Err(PcfError::Contour(format!("no admissible contour from arg {alpha}")));
    }
    Ok((alpha, phi))
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    tau: f64,
    a: Complex64,
    y: Complex64,
    /// `W(s) ds/du`.
    wds: Complex64,
}

/// One Gauss-Legendre panel `[lo, hi]` in `u`.
struct Panel {
    lo: f64,
    hi: f64,
    nodes: Vec<Sample>,
}

struct Problem<'a> {
    lambda: &'a SpectralParameter,
    rho: Complex64,
    rho_k: Complex64,
    e_phi: Complex64,
    y_im: f64,
    potential: Potential,
    x: Vec<f64>,
    w: Vec<f64>,
}

impl Problem<'_> {
    fn second(&self, s: Complex64) -> Complex64 {
        let sk = s * self.rho_k;
        airy_scaled(sk).ai * (-airy_zeta(sk) - airy_zeta(s)).exp()
    }

    fn sample(&self, u: f64) -> Result<Sample> {
        let tau = u * u * u;
        let w = Complex64::new(tau, self.y_im);
        let s = self.e_phi * w.powf(2.0 / 3.0);
        let ds = if w.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { 2.0 * u * u * self.e_phi * w.powf(-1.0 / 3.0) };
        let pot = match self.potential {
            Potential::Zero => Complex64::new(0.0, 0.0),
            Potential::Quasiclassical => self.rho * V0(s * self.rho.conj(), self.lambda)?,
        };
        Ok(Sample { tau, a: airy_scaled(s).ai, y: self.second(s), wds: pot * ds })
    }

    fn panel(&self, lo: f64, hi: f64) -> Result<Vec<Sample>> {
        let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        self.x.iter().map(|&t| self.sample(c + h * t)).collect()
    }

    /// `(int y W a, int a W a, int |.|)` over a panel, seed `v = a`.
    fn moments(&self, nodes: &[Sample], h: f64) -> (Complex64, Complex64, f64) {
        let mut i1 = Complex64::new(0.0, 0.0);
        let mut i2 = Complex64::new(0.0, 0.0);
        let mut m = 0.0;
        for (s, &w) in nodes.iter().zip(&self.w) {
            let f1 = s.y * s.wds * s.a;
            let f2 = s.a * s.wds * s.a;
            i1 += w * h * f1;
            i2 += w * h * f2;
            m += w * h * (f1.norm() + f2.norm());
        }
        (i1, i2, m)
    }

    fn refine(&self, lo: f64, hi: f64, nodes: Vec<Sample>, depth: usize, out: &mut Vec<Panel>) -> Result<()> {
        if out.len() >= MAX_PANELS {
            return Err(PcfError::Convergence("too many contour panels".into()));
        }
        let mid = 0.5 * (lo + hi);
        let left = self.panel(lo, mid)?;
        let right = self.panel(mid, hi)?;
        let h = 0.5 * (hi - lo);
        let (w1, w2, m) = self.moments(&nodes, h);
        let (l1, l2, _) = self.moments(&left, 0.5 * h);
        let (r1, r2, _) = self.moments(&right, 0.5 * h);
        let err = (w1 - l1 - r1).norm().max((w2 - l2 - r2).norm());
        if err <= 1e-14 + 1e-11 * m || depth >= MAX_DEPTH {
            out.push(Panel { lo, hi, nodes });
            return Ok(());
        }
        self.refine(lo, mid, left, depth + 1, out)?;
        self.refine(mid, hi, right, depth + 1, out)
    }
}

/// Barycentric weights of the reference nodes.
fn bary_weights(x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|m| 1.0 / (0..x.len()).filter(|&k| k != m).map(|k| x[m] - x[k]).product::<f64>())
        .collect()
}

/// Lagrange basis values at `t` on the reference nodes.
fn lagrange(x: &[f64], bw: &[f64], t: f64, out: &mut [f64]) {
    if let Some(m) = x.iter().position(|&xm| xm == t) {
        out.iter_mut().for_each(|v| *v = 0.0);
        out[m] = 1.0;
        return;
    }
    let mut sum = 0.0;
    for m in 0..x.len() {
        out[m] = bw[m] / (t - x[m]);
        sum += out[m];
    }
    out.iter_mut().for_each(|v| *v /= sum);
}

/// Panel weights for one iteration pass.
struct Weights {
    /// `int_{x_i}^{1} l_m` on the reference panel.
    cumulative: Vec<Vec<f64>>,
    /// Per panel: rows for each node and then the left end.
    exponential: Vec<Vec<Vec<Complex64>>>,
}

fn cumulative_matrix(x: &[f64], bw: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let (gx, gw) = gauss_legendre(n);
    let mut l = vec![0.0; n];
    x.iter()
        .map(|&xi| {
            let (c, h) = (0.5 * (xi + 1.0), 0.5 * (1.0 - xi));
            let mut row = vec![0.0; n];
            for (t, w) in gx.iter().zip(&gw) {
                lagrange(x, bw, c + h * t, &mut l);
                for m in 0..n {
                    row[m] += w * h * l[m];
                }
            }
            row
        })
        .collect()
}

/// `int_{u_s}^{hi} e^{c (tau_s - u^3)} l_m(u) du` for every `m`.
fn exponential_row(
    c: Complex64,
    u_s: f64,
    panel: (f64, f64),
    x: &[f64],
    bw: &[f64],
    fine: &(Vec<f64>, Vec<f64>),
) -> Vec<Complex64> {
    let n = x.len();
    let (lo, hi) = panel;
    let (pc, ph) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let tau_s = u_s * u_s * u_s;
    let dtau = 4.0 / c.norm();
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    let mut l = vec![0.0; n];
    let mut a = u_s;
    while a < hi {
        let tau_a = a * a * a;
        if c.re * (tau_a - tau_s) > EXP_CUTOFF {
            break;
        }
        let b = (tau_a + dtau).cbrt().min(hi);
        let (mc, mh) = (0.5 * (a + b), 0.5 * (b - a));
        for (t, w) in fine.0.iter().zip(&fine.1) {
            let u = mc + mh * t;
            let e = (c * (tau_s - u * u * u)).exp() * (w * mh);
            lagrange(x, bw, (u - pc) / ph, &mut l);
            for m in 0..n {
                row[m] += e * l[m];
            }
        }
        a = b;
    }
    row
}

/// Solves for `a_nu(z)` with explicit options; an unconverged iteration is
/// reported in the run, not as an error.
pub fn run_picard(
    variant: SolutionVariant,
    z: Complex64,
    lambda: &SpectralParameter,
    opts: &PicardOptions,
) -> Result<PicardRun> {
    check_delta(opts.delta)?;
    if opts.order < 2 || !(opts.tol > 0.0) {
        return Err(PcfError::Range("need order >= 2 and tol > 0".into()));
    }
    let epsilon = match opts.epsilon {
        Some(e) => e,
        None => default_epsilon(opts.delta)?,
    };
    let (alpha, auto_phi) = select_phi(variant, z, lambda, opts.delta, epsilon)?;
    let phi = match opts.phi {
        None => auto_phi,
        Some(p) => {
            let (_, hard) = phi_window(variant, lambda, opts.delta, epsilon)?;
            if p < hard.0 - SECTOR_TOL || p > hard.1 + SECTOR_TOL || (alpha - p).abs() > 2.0 * PI / 3.0 - 1e-9 {
                return Err(PcfError::Contour(format!("phi = {p} not admissible for arg {alpha}")));
            }
            p
        }
    };
    let rho = variant.airy_rotation();
    let zeta = rho * z;
    let (x0, y_im) = upsilon_anchor(zeta, phi)?;
    let (rho_k, wr) = if alpha <= phi {
        (omega(), Complex64::from_polar(0.5 / PI, -PI / 6.0))
    } else {
        (omega().conj(), Complex64::from_polar(0.5 / PI, PI / 6.0))
    };
    let (x, w) = gauss_legendre(opts.order);
    let prob = Problem {
        lambda,
        rho,
        rho_k,
        e_phi: Complex64::from_polar(1.0, phi),
        y_im,
        potential: opts.potential,
        x: x.clone(),
        w: w.clone(),
    };

    // Panels: steps of max(1/2, |u|/2) from the anchor, then refined.
    let u0 = x0.cbrt();
    let mut bounds = vec![u0];
    let mut b = u0;
    while b < U_MAX {
        b = (b + (0.5 * b.abs()).max(0.5)).min(U_MAX);
        bounds.push(b);
    }
    let mut panels = Vec::new();
    for pair in bounds.windows(2) {
        let nodes = prob.panel(pair[0], pair[1])?;
        prob.refine(pair[0], pair[1], nodes, 0, &mut panels)?;
    }

    let bw = bary_weights(&x);
    let fine = gauss_legendre(32);
    let c = Complex64::from_polar(4.0 / 3.0, 1.5 * phi);
    let weights = Weights {
        cumulative: cumulative_matrix(&x, &bw),
        exponential: panels
            .iter()
            .map(|p| {
                let mut rows: Vec<Vec<Complex64>> = p
                    .nodes
                    .iter()
                    .map(|s| exponential_row(c, s.tau.cbrt(), (p.lo, p.hi), &x, &bw, &fine))
                    .collect();
                rows.push(exponential_row(c, p.lo, (p.lo, p.hi), &x, &bw, &fine));
                rows
            })
            .collect(),
    };

    let sign = -opts.kernel_sign;
    let inv_wr = 1.0 / wr;
    let a_z = airy_scaled(zeta);
    let y_z = prob.second(zeta);
    let n = opts.order;
    let total = panels.len() * n;
    let seed: Vec<Complex64> = panels.iter().flat_map(|p| p.nodes.iter().map(|s| s.a)).collect();
    let mut v = seed.clone();
    let mut v_anchor = a_z.ai;
    let mut iterates = Vec::new();
    let mut converged = false;
    let mut pq = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for _ in 0..opts.max_iter {
        let (nodes_pq, anchor_pq) = sweep(&panels, &weights, &w, c, &v);
        let mut next = Vec::with_capacity(total);
        let mut change: f64 = 0.0;
        for (k, (p, q)) in nodes_pq.iter().enumerate() {
            let s = &panels[k / n].nodes[k % n];
            let val = s.a + sign * (s.a * p - s.y * q) * inv_wr;
            change = change.max((val - v[k]).norm());
            next.push(val);
        }
        let (p0, q0) = anchor_pq;
        let val = a_z.ai + sign * (a_z.ai * p0 - y_z * q0) * inv_wr;
        change = change.max((val - v_anchor).norm());
        v_anchor = val;
        v = next;
        iterates.push(change);
        if change < opts.tol {
            converged = true;
            break;
        }
    }
    if converged {
        // P and Q of the final iterate at the anchor.
        pq = sweep(&panels, &weights, &w, c, &v).1;
        v_anchor = a_z.ai + sign * (a_z.ai * pq.0 - y_z * pq.1) * inv_wr;
    }

    // d/dzeta of a, and of y(zeta) e^{(4/3) zeta^{3/2}} times e^{-(4/3) zeta^{3/2}}.
    let root = pow_lower(zeta, 0.5);
    let da = a_z.ai_prime + root * a_z.ai;
    let zk = zeta * rho_k;
    let dy = rho_k * airy_scaled(zk).ai_prime * (-airy_zeta(zk) - airy_zeta(zeta)).exp() + root * y_z;
    let dv = da + sign * (da * pq.0 - dy * pq.1) * inv_wr;
    Ok(PicardRun {
        lambda: *lambda,
        variant,
        anchor_z: z,
        phi,
        truncation: U_MAX.powi(3),
        n: total,
        panels: panels.len(),
        iterates,
        converged,
        a_value: v_anchor,
        a_derivative: rho * dv,
        kernel_prefactor: inv_wr,
        kernel_sign: opts.kernel_sign,
    })
}

/// `(P, Q)` at every node and at the anchor, where
/// `P(u) = int_u^inf y W v ds` and `Q(u) = int_u^inf e^{c(tau(u) - tau)} a W v ds`.
#[allow(clippy::type_complexity)]
fn sweep(
    panels: &[Panel],
    weights: &Weights,
    w: &[f64],
    c: Complex64,
    v: &[Complex64],
) -> (Vec<(Complex64, Complex64)>, (Complex64, Complex64)) {
    let n = w.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![(zero, zero); v.len()];
    let mut p_right = zero;
    let mut q_right = zero;
    let mut g1 = vec![zero; n];
    let mut g2 = vec![zero; n];
    for (j, panel) in panels.iter().enumerate().rev() {
        let h = 0.5 * (panel.hi - panel.lo);
        let tau_hi = panel.hi * panel.hi * panel.hi;
        for m in 0..n {
            let s = &panel.nodes[m];
            let f = s.wds * v[j * n + m];
            g1[m] = s.y * f;
            g2[m] = s.a * f;
        }
        let rows = &weights.exponential[j];
        for i in 0..n {
            let s = &panel.nodes[i];
            let mut p = p_right;
            for m in 0..n {
                p += weights.cumulative[i][m] * h * g1[m];
            }
            let mut q = (c * (s.tau - tau_hi)).exp() * q_right;
            for m in 0..n {
                q += rows[i][m] * g2[m];
            }
            out[j * n + i] = (p, q);
        }
        for m in 0..n {
            p_right += w[m] * h * g1[m];
        }
        let tau_lo = panel.lo * panel.lo * panel.lo;
        let mut q = (c * (tau_lo - tau_hi)).exp() * q_right;
        for m in 0..n {
            q += rows[n][m] * g2[m];
        }
        q_right = q;
    }
    (out, (p_right, q_right))
}

fn require_converged(run: PicardRun) -> Result<PicardRun> {
    if run.converged {
        Ok(run)
    } else {
        Err(PcfError::Convergence(format!(
            "Picard iteration: last change {:e} after {} iterations",
            run.iterates.last().copied().unwrap_or(f64::NAN),
            run.iterates.len()
        )))
    }
}

/// `a_0(z, lambda)` by Picard iteration.
pub fn solve_a0(z: Complex64, lambda: &SpectralParameter, delta: f64, tol: f64, max_iter: usize) -> Result<PicardRun> {
    solve_a_variant(SolutionVariant::Zero, z, lambda, delta, tol, max_iter)
}

/// `a_nu(z, lambda)` by Picard iteration; a convergence error after
/// `max_iter` sweeps.
pub fn solve_a_variant(
    variant: SolutionVariant,
    z: Complex64,
    lambda: &SpectralParameter,
    delta: f64,
    tol: f64,
    max_iter: usize,
) -> Result<PicardRun> {
    let opts = PicardOptions { delta, tol, max_iter, ..PicardOptions::default() };
    require_converged(run_picard(variant, z, lambda, &opts)?)
}

/// Like [`solve_a_variant`] with full options.
pub fn solve_with(variant: SolutionVariant, z: Complex64, lambda: &SpectralParameter, opts: &PicardOptions) -> Result<PicardRun> {
    require_converged(run_picard(variant, z, lambda, opts)?)
}

/// Picks the sign in front of `J` that reproduces `a_0` from the psi oracle
/// at one probe on the positive axis.
pub fn calibrate_kernel_sign(lambda: &SpectralParameter) -> Result<f64> {
    let oracle = crate::bounds::AnuFromPsi::new(lambda)?;
    let z = Complex64::new(1.5, 0.0) * lambda.modulus().powf(2.0 / 3.0);
    let target = oracle.at_z(z, SolutionVariant::Zero)?.a_value;
    let mut best = (f64::INFINITY, RESOLVED_KERNEL_SIGN);
    for sign in [1.0, -1.0] {
        let opts = PicardOptions { kernel_sign: sign, ..PicardOptions::default() };
        let run = run_picard(SolutionVariant::Zero, z, lambda, &opts)?;
        let err = (run.a_value - target).norm() / target.norm();
        if err < best.0 {
            best = (err, sign);
        }
    }
    Ok(best.1)
}

/// Second-difference residual of `A_nu'' = (z + V_0) A_nu`, relative to
/// `|(z + V_0) A_nu|`, from three solves at `z - h, z, z + h`.
pub fn ode_residual(
    variant: SolutionVariant,
    z: Complex64,
    lambda: &SpectralParameter,
    h: f64,
    opts: &PicardOptions,
) -> Result<f64> {
    let mut vals = [Complex64::new(0.0, 0.0); 3];
    for (k, dz) in [-h, 0.0, h].iter().enumerate() {
        vals[k] = solve_with(variant, z + dz, lambda, opts)?.big_a();
    }
    let second = (vals[0] - 2.0 * vals[1] + vals[2]) / (h * h);
    let pot = match opts.potential {
        Potential::Zero => Complex64::new(0.0, 0.0),
        Potential::Quasiclassical => V0(z, lambda)?,
    };
    let rhs = (z + pot) * vals[1];
    Ok((second - rhs).norm() / rhs.norm())
}

/// `sup |J(z, s) V_0(s)| (1+|z|)^{1/4} (|lambda|^{4/3} + |s|^2) (1+|s|)^{1/4}`
/// over `count` points of `Upsilon_phi(z)` with `tau - x0` in `[0, t_len]`.
pub fn kernel_bound_sup(z: Complex64, phi: f64, lambda: &SpectralParameter, t_len: f64, count: usize) -> Result<f64> {
    let (x0, y) = upsilon_anchor(z, phi)?;
    let l43 = lambda.modulus().powf(4.0 / 3.0);
    let mut sup: f64 = 0.0;
    for k in 1..=count {
        let frac = k as f64 / count as f64;
        let s = crate::domains::upsilon_point(phi, y, x0 + t_len * frac * frac);
        let val = kernel_j(z, s)? * V0(s, lambda)?;
        let weight = (1.0 + z.norm()).powf(0.25) * (l43 + s.norm_sqr()) * (1.0 + s.norm()).powf(0.25);
        sup = sup.max(val.norm() * weight);
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::AnuFromPsi;
    use crate::quasiclassical::z_of_x;

    fn lam(m: f64, arg: f64) -> SpectralParameter {
        SpectralParameter::from_polar(m, arg).unwrap()
    }

    #[test]
    fn kernel_identities() {
        let z = Complex64::new(2.0, 0.0);
        let s = Complex64::new(3.0, 0.0);
        let j = kernel_j(z, s).unwrap();
        let e = ((pow_lower(z, 1.5) - pow_lower(s, 1.5)) * (2.0 / 3.0)).exp();
        let j0 = kernel_j0(z, s) * e;
        assert!((j - PI * j0).norm() < 1e-10 * j.norm(), "{j} vs pi {j0}");
        for w in [Complex64::new(0.4, -1.3), Complex64::new(-2.0, -0.5), Complex64::new(3.0, 1.0)] {
            assert!(kernel_j(w, w).unwrap().norm() < 1e-14);
        }
        assert!(matches!(kernel_j(Complex64::new(-1.0, 1.0), s), Err(PcfError::Branch(_))));
    }

    #[test]
    fn zero_potential_returns_seed() {
        let l = lam(4.0, 0.3);
        let z = Complex64::new(1.2, 0.4);
        let opts = PicardOptions { potential: Potential::Zero, ..PicardOptions::default() };
        let run = solve_with(SolutionVariant::Zero, z, &l, &opts).unwrap();
        let seed = airy_scaled(z);
        assert_eq!(run.iterates.len(), 1);
        assert_eq!(run.a_value, seed.ai);
        let da = seed.ai_prime + pow_lower(z, 0.5) * seed.ai;
        assert!((run.a_derivative - da).norm() < 1e-15);
    }

    #[test]
    fn matches_psi_oracle_at_lambda_four() {
        let l = lam(4.0, 0.0);
        let z = z_of_x(Complex64::new(3.0, 0.0), &l).unwrap();
        let run = solve_a0(z, &l, PI / 6.0, 1e-10, 50).unwrap();
        let want = AnuFromPsi::new(&l).unwrap().at_z(z, SolutionVariant::Zero).unwrap().a_value;
        let err = (run.a_value - want).norm() / want.norm();
        assert!(err < 1e-3, "{} vs {want}: {err:e}", run.a_value);
        assert_eq!(calibrate_kernel_sign(&l).unwrap(), RESOLVED_KERNEL_SIGN);
    }

    #[test]
    fn sector_precondition() {
        let l = lam(2.0, 0.4);
        let z = Complex64::from_polar(1.0, PI / 2.0);
        assert!(matches!(solve_a_variant(SolutionVariant::Plus, z, &l, PI / 6.0, 1e-10, 50), Err(PcfError::Domain(_))));
        assert!(matches!(
            solve_a_variant(SolutionVariant::Star, z, &lam(2.0, 0.1), PI / 6.0, 1e-10, 50),
            Err(PcfError::Domain(_))
        ));
        assert!(matches!(select_phi(SolutionVariant::Zero, Complex64::new(0.0, 0.0), &l, PI / 6.0, 0.04), Err(PcfError::Domain(_))));
    }

    #[test]
    fn doubling_order_and_moving_phi() {
        let l = lam(4.0, 0.5);
        let z = Complex64::from_polar(2.0, 0.3);
        let base = solve_with(SolutionVariant::Zero, z, &l, &PicardOptions::default()).unwrap();
        let fine = solve_with(SolutionVariant::Zero, z, &l, &PicardOptions { order: 32, ..PicardOptions::default() }).unwrap();
        assert!((base.a_value - fine.a_value).norm() < 5e-10, "{:e}", (base.a_value - fine.a_value).norm());
        let other = solve_with(SolutionVariant::Zero, z, &l, &PicardOptions { phi: Some(-0.3), ..PicardOptions::default() }).unwrap();
        assert!((base.a_value - other.a_value).norm() < 1e-6 * base.a_value.norm());
    }
}
