use std::fmt;

use super::elementary::{exp, sin_cos};
use super::mag::Mag;
use super::real::BallReal;
use crate::error::Result;

/// A complex number as a pair of real balls (a rectangle enclosure).
#[derive(Clone, PartialEq, Eq)]
pub struct ComplexBall {
    pub re: BallReal,
    pub im: BallReal,
}

impl ComplexBall {
    pub fn new(re: BallReal, im: BallReal) -> Self {
        ComplexBall { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        ComplexBall::new(BallReal::zero(prec), BallReal::zero(prec))
    }

    pub fn from_real(re: BallReal) -> Self {
        let prec = re.precision();
        ComplexBall::new(re, BallReal::zero(prec))
    }

    pub fn add(&self, other: &ComplexBall) -> ComplexBall {
        ComplexBall::new(self.re.add(&other.re), self.im.add(&other.im))
    }

    pub fn sub(&self, other: &ComplexBall) -> ComplexBall {
        ComplexBall::new(self.re.sub(&other.re), self.im.sub(&other.im))
    }

    pub fn mul(&self, other: &ComplexBall) -> ComplexBall {
        let re = self.re.mul(&other.re).sub(&self.im.mul(&other.im));
        let im = self.re.mul(&other.im).add(&self.im.mul(&other.re));
        ComplexBall::new(re, im)
    }

    pub fn mul_real(&self, x: &BallReal) -> ComplexBall {
        ComplexBall::new(self.re.mul(x), self.im.mul(x))
    }

    /// `exp(z) = e^re (cos im + i sin im)`.
    pub fn exp(&self) -> Result<ComplexBall> {
        let m = exp(&self.re)?;
        let (s, c) = sin_cos(&self.im)?;
        Ok(ComplexBall::new(m.mul(&c), m.mul(&s)))
    }

    /// Upper bound of the modulus.
    pub fn abs_upper(&self) -> Mag {
        let a = self.re.abs_upper();
        let b = self.im.abs_upper();
        a.mul(&a).add(&b.mul(&b)).sqrt()
    }

    /// Widen both components by `r`, which encloses a disc of radius `r`.
    pub fn inflate(&self, r: &Mag) -> ComplexBall {
        ComplexBall::new(self.re.inflate(r), self.im.inflate(r))
    }

    pub fn contains_point(&self, re: &BallReal, im: &BallReal) -> bool {
        self.re.contains_ball(re) && self.im.contains_ball(im)
    }
}

impl fmt::Debug for ComplexBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) + ({:?})i", self.re, self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::elementary::pi;
    use crate::ball::real::ratio;

    #[test]
    fn euler_identity() {
        let z = ComplexBall::new(BallReal::zero(128), pi(128));
        let e = z.exp().unwrap();
        assert!(e.re.contains_rational(&ratio(-1, 1)));
        assert!(e.im.contains_rational(&ratio(0, 1)));
        assert!(e.re.rad().log2() < -100.0);
    }

    #[test]
    fn multiplication_matches_components() {
        let a = ComplexBall::new(BallReal::from_i64(1, 64), BallReal::from_i64(2, 64));
        let b = ComplexBall::new(BallReal::from_i64(3, 64), BallReal::from_i64(-1, 64));
        let p = a.mul(&b);
        assert!(p.re.contains_rational(&ratio(5, 1)));
        assert!(p.im.contains_rational(&ratio(5, 1)));
        assert!(a.abs_upper().to_f64() >= 5f64.sqrt());
    }
}
