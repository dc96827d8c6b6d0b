//! Quasiclassical numerics for the parabolic cylinder function
//! `psi(x, lambda) = U(-lambda/2, x sqrt 2)`, the recessive solution of
//! `-y'' + x^2 y = lambda y`: complex Airy and Gamma evaluators, the Langer
//! coordinate `z_lambda(x)` and its branch bookkeeping, the validity domains
//! of the uniform estimates, a contour Picard solver for the perturbed Airy
//! equation, and a verification harness.

pub mod arc_integrals;
pub mod bounds;
pub mod branched_complex;
pub mod domains;
pub mod error;
pub mod harness;
pub mod lemmas;
pub mod picard;
pub mod quad;
pub mod quasiclassical;
pub mod specfun;

pub use error::{PcfError, Result};
pub use quasiclassical::SpectralParameter;
