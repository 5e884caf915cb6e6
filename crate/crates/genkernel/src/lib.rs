//! Numerical evaluation of the (0,a)-generalized Fourier kernel and of the
//! dihedral Dunkl kernel and Dunkl Bessel function.
//!
//! Every kernel is available through several mutually independent routes
//! (defining series, Laplace-domain closed forms, convolution integrals and
//! Mittag-Leffler integrals) so that the routes can be checked against each
//! other.

pub mod error;
pub mod kernel_dunkl;
pub mod kernel_fourier;
pub mod laplace_rational;
pub mod quadrature;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
