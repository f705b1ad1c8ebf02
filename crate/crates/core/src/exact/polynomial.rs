use num_bigint::BigInt;
use num_traits::Zero;

use super::ExactRational;

/// Polynomial with exact rational coefficients, `coefficients[k]` being the
/// coefficient of `x^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPolynomial {
    coefficients: Vec<ExactRational>,
}

fn int(v: usize) -> ExactRational {
    ExactRational::from_integer(BigInt::from(v))
}

impl ExactPolynomial {
    pub fn new(coefficients: Vec<ExactRational>) -> Self {
        ExactPolynomial { coefficients }
    }

    pub fn coefficients(&self) -> &[ExactRational] {
        &self.coefficients
    }

    /// `length - 1`; an empty coefficient list reports degree 0.
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// `<p, x^m> = int_0^1 p(x) x^m dx = sum_k a_k/(m+k+1)`.
    pub fn inner_product_with_monomial(&self, m: usize) -> ExactRational {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(k, a)| a / int(m + k + 1))
            .sum()
    }

    pub fn derivative(&self) -> ExactPolynomial {
        ExactPolynomial::new(
            self.coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * int(k))
                .collect(),
        )
    }

    pub fn mul(&self, other: &ExactPolynomial) -> ExactPolynomial {
        if self.coefficients.is_empty() || other.coefficients.is_empty() {
            return ExactPolynomial::new(Vec::new());
        }
        let mut out =
            vec![ExactRational::zero(); self.coefficients.len() + other.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coefficients.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ExactPolynomial::new(out)
    }

    /// `int_0^1 p(x) dx`.
    pub fn integrate(&self) -> ExactRational {
        self.inner_product_with_monomial(0)
    }

    pub fn eval(&self, x: &ExactRational) -> ExactRational {
        self.coefficients
            .iter()
            .rev()
            .fold(ExactRational::zero(), |acc, a| acc * x + a)
    }
}
