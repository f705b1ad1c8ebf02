//! Exact rational computation of the coefficients, independent oracles, and
//! the arithmetic properties of their denominators.

mod arith;
mod oracles;
mod polynomial;
mod table;

pub use arith::{
    double_factorial_odd, popcount, two_adic_valuation, verify_integrality_and_lower_bound,
    verify_two_adic_valuation, IntegralityCheck, ValuationCheck,
};
pub use oracles::{
    coefficient_via_determinant, coefficient_via_determinant_capped,
    coefficient_via_permutation_sum, DETERMINANT_CAP, PERMUTATION_CAP,
};
pub use polynomial::ExactPolynomial;
pub use table::{
    exact_coefficients, exact_coefficients_with, ExactCoefficientTable, EXACT_DEFAULT_CAP,
};

/// Reduced fraction of arbitrary-precision integers with a positive
/// denominator; `num_rational` normalizes after every operation.
pub type ExactRational = num_rational::BigRational;
