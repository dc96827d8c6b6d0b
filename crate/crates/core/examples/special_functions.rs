//! Airy functions and the parabolic cylinder function psi(x, lambda).

use num_complex::Complex64;
use pcf::specfun::{airy, airy_bi, psi};
use pcf::SpectralParameter;

fn main() -> pcf::Result<()> {
    for z in [Complex64::new(1.0, 0.0), Complex64::new(-2.0, 1.0), Complex64::new(3.0, -4.0)] {
        let a = airy(z);
        let (bi, _) = airy_bi(z);
        println!("z = {z}: Ai = {:.12}, Ai' = {:.12}, Bi = {:.12}", a.ai, a.ai_prime, bi);
    }
    // lambda = 1 is the ground state: psi(x, 1) = e^{-x^2/2}.
    let one = SpectralParameter::new(1.0, 0.0)?;
    for x in [0.0, 1.0, 2.5] {
        let p = psi(x, &one)?;
        println!("psi({x}, 1) = {:.14} (exact {:.14})", p.psi.re, (-x * x / 2.0).exp());
    }
    let lam = SpectralParameter::from_polar(4.0, std::f64::consts::FRAC_PI_3)?;
    let p = psi(1.5, &lam)?;
    println!("psi(1.5, 4e^(i pi/3)) = {:.12}, psi' = {:.12}", p.psi, p.psi_prime);
    Ok(())
}
