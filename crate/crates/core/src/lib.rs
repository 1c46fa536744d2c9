//! Exact height calculus on `E x G_m^n` over the rationals.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebraic`]: integer polynomials, certified complex roots, algebraic
//!   numbers and their absolute logarithmic Weil height (via Mahler measure).
//! * [`elliptic`]: exact group law on short Weierstrass curves over `Q`,
//!   naive and Néron–Tate canonical heights, rational torsion.
//! * [`semiabelian`]: the product height on `E x G_m^n`, the small-point
//!   sets `B_eps` and `Gamma_eps`, curve relations, and the bounded explorer.
//! * [`dynamics`]: height-expanding self-maps, the N-function, preperiodicity
//!   and the sample-based checks of the comparison results for N.
//! * [`equidist`]: Galois-orbit angle statistics on the unit circle.
//! * [`cli`]: the `smallpoints` command-line front end.
//!
//! Conventions: the canonical height on `E` is `lim 4^-n h(x(2^n P))` with
//! `h` the logarithmic height of the x-coordinate, so `h(mP) = m^2 h(P)`.
//! Torus coordinates use the absolute logarithmic Weil height, and the
//! height on `E x G_m^n` is the sum of the component heights.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod algebraic;
pub mod cli;
pub mod dynamics;
pub mod elliptic;
pub mod equidist;
pub mod format;
pub mod numeric;
pub mod semiabelian;

pub use algebraic::{AlgebraicNumber, CertifiedRoot, IntPolynomial, TorusElement};
pub use elliptic::{ECPoint, EllipticCurveQ};
pub use semiabelian::{AmbientVariety, SemiabelianPoint};

use thiserror::Error;

/// Top-level error for callers that mix modules (the CLI and the C ABI).
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Algebraic(#[from] algebraic::AlgebraicError),
    #[error(transparent)]
    Elliptic(#[from] elliptic::EllipticError),
    #[error(transparent)]
    Semiabelian(#[from] semiabelian::SemiabelianError),
    #[error(transparent)]
    Dynamics(#[from] dynamics::DynamicsError),
    #[error(transparent)]
    Equidist(#[from] equidist::EquidistError),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
