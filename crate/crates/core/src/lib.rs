//! Exact truncation and Rayleigh-Ritz spectra of the radial eigenvalue equation
//!
//! ```text
//! u'' + u'/x - γ²/x² u - a/x u - b x u - x² u + W u = 0,   ∫₀^∞ |u|² x dx < ∞
//! ```
//!
//! The equation is conditionally solvable: a Frobenius ansatz terminates only
//! on special curves of the (a, b) plane, while the true eigenvalues
//! `W_ν(a, b)` exist for every real `a` and `b`. The crate computes both and
//! checks that each truncation root is a single point on one continuous band.
//!
//! * [`model`] holds the problem definition, the ansatz wavefunction and the
//!   Gaussian moment integrals;
//! * [`truncation`] runs the three-term recurrence and extracts the
//!   polynomial solutions;
//! * [`poly`] is the univariate polynomial type and its real-root finder;
//! * [`ritz`] diagonalizes the problem in a non-orthogonal Gaussian basis;
//! * [`oracle`] is an independent finite-difference eigenvalue solver;
//! * [`physical`] maps the oscillator-with-defect models onto the
//!   dimensionless problem;
//! * [`report`] builds the tables behind the command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod error;
pub mod model;
pub mod oracle;
pub mod physical;
pub mod poly;
pub mod quad;
pub mod report;
pub mod ritz;
pub mod truncation;

pub use error::{Error, Result};
pub use model::{ModelParams, RadialWavefunction};
pub use poly::Polynomial;
pub use ritz::{BasisSpec, SpectralCurve, VariationalResult};
pub use truncation::{FixedParam, FreeParam, TruncationSolution};
