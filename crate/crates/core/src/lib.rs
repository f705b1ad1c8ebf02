//! Coefficients of the orthorecursive expansion of unity over the monomials
//! `x, x^2, ...` in `L^2[0,1]`.
//!
//! Two engines compute `c_n`: an exact rational one ([`exact`]) and a rigorous
//! ball-arithmetic one ([`ball`]). The remaining modules verify inequalities
//! and identities on either kind of table and analyse the sequence.

pub mod analysis;
pub mod ball;
pub mod cache;
pub mod error;
pub mod exact;
pub mod inequalities;
pub mod io;
pub mod series;
pub mod util;

pub use ball::{
    ball_coefficients, BallCoefficientTable, BallOptions, BallReal, BigFloat, ComplexBall, Mag,
};
pub use error::{Error, Result};
pub use exact::{exact_coefficients, ExactCoefficientTable, ExactPolynomial, ExactRational};
pub use inequalities::{InequalityId, Status};
