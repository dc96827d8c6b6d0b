//! The map x -> z_lambda(x), its turning point, and the contour Gamma_lambda.

use num_complex::Complex64;
use pcf::quasiclassical::{gamma_contour, turning_point, x_of_z, z_of_x};
use pcf::SpectralParameter;

fn main() -> pcf::Result<()> {
    let lam = SpectralParameter::from_polar(9.0, 1.0)?;
    let tp = turning_point(&lam)?;
    println!("lambda = {}: x_* = {:.6}, z_* = {:.6}", lam.value(), tp.x_star.re, tp.z_star);
    for x in [0.0, 1.0, 3.0, 6.0] {
        let z = z_of_x(Complex64::new(x, 0.0), &lam)?;
        let back = x_of_z(z, &lam)?;
        println!("x = {x}: z = {z:.6}, round trip error {:.1e}", (back - x).norm());
    }
    let g = gamma_contour(&lam, 8.0, 32)?;
    println!("Gamma nodes (z_* at index {}):", g.split_index);
    for (x, z) in g.x_params.iter().zip(&g.nodes).step_by(4) {
        println!("  x = {x:.3} -> z = {z:.4}");
    }
    Ok(())
}
