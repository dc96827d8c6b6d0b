//! Which points of the z-plane lie in the estimate domains.

use std::f64::consts::PI;

use num_complex::Complex64;
use pcf::domains::{default_epsilon, in_domain, DomainKind, DomainSpec};
use pcf::SpectralParameter;

fn main() -> pcf::Result<()> {
    let delta = PI / 6.0;
    println!("delta = pi/6, default epsilon = {:.5}", default_epsilon(delta)?);
    let lam = SpectralParameter::from_polar(4.0, PI / 2.0)?;
    let scale = lam.pow(2.0 / 3.0);
    let kinds = [DomainKind::D0, DomainKind::DPlus, DomainKind::DMinus, DomainKind::DStar];
    println!("{:>28} {:>6} {:>6} {:>6} {:>6}", "z", "D0", "D+", "D-", "D*");
    for (r, a) in [(0.5, 0.0), (2.0, 0.0), (2.0, 2.0), (2.0, -2.5), (1.0, PI)] {
        let z = scale * Complex64::from_polar(r, a);
        let mut row = format!("{:>28}", format!("{z:.4}"));
        for k in kinds {
            let spec = DomainSpec::new(k, lam, delta)?;
            row += &format!(" {:>6}", in_domain(&spec, z)?);
        }
        println!("{row}");
    }
    Ok(())
}
