//! Ratios |F_nu| / RHS_nu of the four psi estimates for a few lambda.

use std::f64::consts::PI;

use pcf::bounds::{estimate_sweep, SolutionVariant};
use pcf::SpectralParameter;

fn main() -> pcf::Result<()> {
    let delta = PI / 6.0;
    let mut points = Vec::new();
    for arg in [0.2, PI / 4.0, PI / 2.0, 0.9 * PI] {
        let lam = SpectralParameter::from_polar(9.0, arg)?;
        points.extend((0..=12).map(|k| (0.5 * k as f64, lam)));
    }
    for v in SolutionVariant::ALL {
        let recs = estimate_sweep(&points, v, delta);
        let sup = recs.iter().filter(|r| r.in_range).map(|r| r.ratio).fold(0.0, f64::max);
        println!("variant {}: sup ratio {sup:.4} over {} in-range points", v.tag(), recs.iter().filter(|r| r.in_range).count());
    }
    Ok(())
}
