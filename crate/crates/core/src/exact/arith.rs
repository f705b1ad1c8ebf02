use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::ExactRational;

/// Number of ones in the binary expansion of `n`.
pub fn popcount(n: u64) -> u32 {
    n.count_ones()
}

/// Exponent of 2 in a nonzero integer; `None` for zero.
pub fn two_adic_valuation(m: &BigInt) -> Option<u64> {
    m.trailing_zeros()
}

/// `(2n+1)!! = 1 * 3 * 5 * ... * (2n+1)`; equals 1 for `n = 0`.
pub fn double_factorial_odd(n: u64) -> BigInt {
    (0..=n).fold(BigInt::one(), |acc, k| acc * (2 * k + 1))
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValuationCheck {
    pub n: u64,
    pub passed: bool,
    pub expected: u64,
    /// `None` when the coefficient is zero.
    pub actual: Option<u64>,
}

/// Checks `v_2(q_n) = 2n - b(n)` for the reduced denominator `q_n` of `c`.
/// A zero coefficient fails.
pub fn verify_two_adic_valuation(n: u64, c: &ExactRational) -> ValuationCheck {
    let expected = 2 * n - popcount(n) as u64;
    let actual = if c.is_zero() {
        None
    } else {
        two_adic_valuation(c.denom())
    };
    ValuationCheck {
        n,
        passed: actual == Some(expected),
        expected,
        actual,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegralityCheck {
    pub n: u64,
    /// All three parts of the stated claim hold.
    pub passed: bool,
    /// `c (2n)!/(2n+1)!!` is an integer.
    pub integral: bool,
    pub nonzero: bool,
    /// `|c| >= (2n+1)!!/(2n)!`.
    pub lower_bound_holds: bool,
    /// `c (2n)!/(2n+1)` is an integer; this weaker normalization is the one
    /// observed to hold for every computed `n`.
    pub odd_factor_integral: bool,
    /// `|c| >= (2n+1)/(2n)!`, the bound that follows from it.
    pub odd_factor_bound_holds: bool,
}

/// Checks that `c (2n)!/(2n+1)!!` is a nonzero integer and that
/// `|c| >= (2n+1)!!/(2n)!`.
///
/// The claim is false from `n = 2` on (`c_2 4!/5!! = 1/3`), so `passed` is
/// reported as computed. The same check with `2n+1` in place of `(2n+1)!!`
/// is returned alongside.
pub fn verify_integrality_and_lower_bound(n: u64, c: &ExactRational) -> IntegralityCheck {
    let fact = factorial(2 * n);
    let dfact = double_factorial_odd(n);
    let odd = BigInt::from(2 * n + 1);
    let scaled = c * ExactRational::new(fact.clone(), dfact.clone());
    let integral = scaled.is_integer();
    let nonzero = !c.is_zero();
    let lower_bound_holds = c.abs() >= ExactRational::new(dfact, fact.clone());
    let odd_scaled = c * ExactRational::new(fact.clone(), odd.clone());
    let odd_factor_integral = odd_scaled.is_integer();
    let odd_factor_bound_holds = c.abs() >= ExactRational::new(odd, fact);
    IntegralityCheck {
        n,
        passed: integral && nonzero && lower_bound_holds,
        integral,
        nonzero,
        lower_bound_holds,
        odd_factor_integral,
        odd_factor_bound_holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::real::ratio;
    use crate::exact::exact_coefficients;

    #[test]
    fn listed_denominators() {
        for (n, c) in [(1, ratio(-3, 2)), (2, ratio(5, 24)), (4, ratio(277, 4480))] {
            let r = verify_two_adic_valuation(n, &c);
            assert!(r.passed, "{r:?}");
        }
        let r = verify_two_adic_valuation(4, &ratio(277, 4480));
        assert_eq!((r.expected, r.actual), (7, Some(7)));
        assert!(!verify_two_adic_valuation(3, &ratio(0, 1)).passed);
        assert!(!verify_two_adic_valuation(2, &ratio(5, 12)).passed);
    }

    #[test]
    fn integrality_small_cases() {
        // (-3/2) * 2!/3!! = -1 and the bound is an equality
        let r = verify_integrality_and_lower_bound(1, &ratio(-3, 2));
        assert!(r.passed && r.odd_factor_integral && r.odd_factor_bound_holds);
        // (5/24) * 4!/5!! = 1/3, and 5/24 < 15/24
        let r = verify_integrality_and_lower_bound(2, &ratio(5, 24));
        assert!(!r.integral && !r.lower_bound_holds && !r.passed);
        assert!(r.odd_factor_integral && r.odd_factor_bound_holds);
        // (77/720) * 6!/7!! = 11/15; 6!/7 scaling gives 11
        let r = verify_integrality_and_lower_bound(3, &ratio(77, 720));
        assert!(!r.integral && r.odd_factor_integral);
    }

    #[test]
    fn table_satisfies_valuation_and_odd_factor_laws() {
        let t = exact_coefficients(50).unwrap();
        for n in 1..=50u64 {
            let c = t.coeff(n as usize);
            assert!(verify_two_adic_valuation(n, c).passed, "n = {n}");
            let r = verify_integrality_and_lower_bound(n, c);
            assert!(
                r.nonzero && r.odd_factor_integral && r.odd_factor_bound_holds,
                "n = {n}"
            );
            // the double-factorial bound itself holds once n >= 4
            assert_eq!(r.lower_bound_holds, n == 1 || n >= 4, "n = {n}");
        }
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial_odd(0), BigInt::from(1));
        assert_eq!(double_factorial_odd(3), BigInt::from(105));
        assert_eq!(popcount(10457), 7);
    }
}
