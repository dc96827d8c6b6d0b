//! Reference evaluators: complex Airy functions, complex Gamma and the
//! parabolic cylinder function `psi`.

mod airy;
mod gamma;
mod psi;

pub use airy::{airy, airy_bi, airy_scaled, omega, zeta, AiryValue, AI0, AIP0, ASYMPTOTIC_RADIUS, SERIES_RADIUS};
pub use gamma::gamma_complex;
pub use psi::{psi, PsiOracle, PsiValue};
