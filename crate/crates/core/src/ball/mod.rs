//! Rigorous real arithmetic: arbitrary-precision binary floats, midpoint-radius
//! balls, elementary functions, and the certified coefficient engine.

pub mod complex;
pub mod elementary;
pub mod float;
pub mod kernel;
pub mod mag;
pub mod real;
pub mod table;

pub use complex::ComplexBall;
pub use float::{BigFloat, Round};
pub use mag::Mag;
pub use real::BallReal;
pub use table::{
    ball_coefficients, ball_coefficients_with, default_precision, estimate_k, k_tail_bound,
    BallCoefficientTable, BallOptions, BallProgress, KEstimate,
};
