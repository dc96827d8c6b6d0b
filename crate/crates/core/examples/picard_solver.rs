//! The perturbed Airy solution a_0 by Picard iteration, against the psi oracle.

use std::f64::consts::PI;

use num_complex::Complex64;
use pcf::bounds::{AnuFromPsi, SolutionVariant};
use pcf::picard::{solve_with, PicardOptions};
use pcf::SpectralParameter;

fn main() -> pcf::Result<()> {
    let lam = SpectralParameter::from_polar(4.0, PI / 2.0)?;
    let oracle = AnuFromPsi::new(&lam)?;
    for z in [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.5), Complex64::new(3.0, -1.0)] {
        let run = solve_with(SolutionVariant::Zero, z, &lam, &PicardOptions::default())?;
        let exact = oracle.at_z(z, SolutionVariant::Zero)?;
        println!(
            "z = {z}: a_0 = {:.12} after {} sweeps (contraction {:.3}), oracle gap {:.1e}",
            run.a_value,
            run.iterates.len(),
            run.contraction().unwrap_or(f64::NAN),
            (run.a_value - exact.a_value).norm() / exact.a_value.norm()
        );
    }
    Ok(())
}
