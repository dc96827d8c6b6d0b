//! Implied constants of the arc-length integral bounds along Gamma_lambda.

use std::f64::consts::PI;

use pcf::arc_integrals::{arc_bound_sweep, ArcBound};
use pcf::SpectralParameter;

fn main() -> pcf::Result<()> {
    let lambdas = [
        SpectralParameter::from_polar(10.0, PI / 2.0)?,
        SpectralParameter::from_polar(100.0, PI / 6.0)?,
    ];
    let r: Vec<f64> = (0..=6).map(|k| 0.5 * k as f64).collect();
    for b in ArcBound::ALL {
        let recs = arc_bound_sweep(b, &lambdas, &r, b.default_alphas(), PI / 6.0)?;
        let sup = recs.iter().map(|r| r.ratio).fold(0.0, f64::max);
        println!("{b:<11} sup C = {sup:.3} over {} samples", recs.len());
    }
    Ok(())
}
