//! Spectral toolkit for the singular non-self-adjoint operator
//!
//! ```text
//! L u = i eps (f(x) u')' + i u' = lambda u      on (-pi, pi), periodic
//! ```
//!
//! with f odd, anti-periodic, positive on (0, pi) and f'(0) = 2/pi.
//! Despite L being far from self-adjoint, its eigenvalues are real; this
//! crate computes them, certifies their reality by argument-principle
//! contour counts, locates the zeros of phi(pi, lambda) on the negative
//! imaginary axis, and explores the sector structure of the ratio
//! rho(z) = g(iz)/g(z) with g(z) = phi(pi, i z^2).
//!
//! Modules follow the pipeline:
//! - [`coeff`]: admissible coefficients f, derived weights p and w, WKB seeds
//! - [`bessel`]: complex-argument Bessel functions and the closed-form
//!   solution pieces for the piecewise-linear coefficient
//! - [`frobenius`]: local solution bases at the singular endpoints
//! - [`shoot`]: the ODE transfer phi(pi, lambda) and everything built on it
//! - [`spectrum`]: eigenvalue/zero searches, certification, oracles
//! - [`cli`]: command-line front end and file formats
//!
//! ```
//! use num_complex::Complex64;
//! use ptsturm::{coeff, shoot, spectrum};
//!
//! let profile = coeff::make_sine(0.5)?;
//! let opts = shoot::OdeOptions::with_rtol(1e-8);
//!
//! // the transfer at lambda = 0 is the constant solution
//! let t = shoot::phi_at_pi_opts(&profile, Complex64::new(0.0, 0.0), &opts, false)?;
//! assert!((t.phi_pi - Complex64::new(1.0, 0.0)).norm() < 1e-8);
//!
//! // lowest eigenvalue pair and its certification box come from spectrum
//! let eigs = spectrum::find_real_eigs(&profile, (0.0, 10.0), 1, &opts)?;
//! assert!((eigs[0].lambda - 1.0808838).abs() < 1e-4);
//! # Ok::<(), ptsturm::Error>(())
//! ```

pub mod bessel;
#[cfg(feature = "cli")]
pub mod cli;
pub mod coeff;
pub mod error;
pub mod frobenius;
pub mod shoot;
pub mod spectrum;
pub mod verify;

pub(crate) mod support;

pub use error::{Error, Result};
