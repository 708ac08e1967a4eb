//! Elements `x + y*sqrt(d)` of a fixed real or imaginary quadratic field.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticSurd {
    pub rational_part: Rational,
    pub surd_part: Rational,
    radicand: i64,
}

fn is_square_free(d: i64) -> bool {
    let n = d.unsigned_abs();
    let mut f = 2u64;
    while f * f <= n {
        if n.is_multiple_of(f * f) {
            return false;
        }
        f += 1;
    }
    true
}

impl QuadraticSurd {
    /// `radicand` must be square-free and different from 0 and 1; negative
    /// radicands give imaginary quadratic fields.
    pub fn new(rational_part: Rational, surd_part: Rational, radicand: i64) -> Result<Self> {
        if radicand == 0 || radicand == 1 || !is_square_free(radicand) {
            return Err(Error::InvalidElement(format!(
                "radicand {radicand} is not a square-free integer other than 0, 1"
            )));
        }
        Ok(QuadraticSurd {
            rational_part,
            surd_part,
            radicand,
        })
    }

    pub fn from_rational(x: Rational, radicand: i64) -> Result<Self> {
        Self::new(x, Rational::zero(), radicand)
    }

    pub fn radicand(&self) -> i64 {
        self.radicand
    }

    pub fn conj(&self) -> Self {
        QuadraticSurd {
            rational_part: self.rational_part.clone(),
            surd_part: -self.surd_part.clone(),
            radicand: self.radicand,
        }
    }

    /// Field norm `x^2 - d*y^2`.
    pub fn norm(&self) -> Rational {
        &self.rational_part * &self.rational_part
            - Rational::from_integer(self.radicand.into()) * &self.surd_part * &self.surd_part
    }

    pub fn trace(&self) -> Rational {
        &self.rational_part + &self.rational_part
    }

    pub fn is_rational(&self) -> bool {
        self.surd_part.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        let r = self.rational_part.to_f64().unwrap_or(f64::NAN);
        let s = self.surd_part.to_f64().unwrap_or(f64::NAN);
        assert!(self.radicand > 0, "imaginary surd has no real value");
        r + s * (self.radicand as f64).sqrt()
    }

    fn check(&self, other: &Self) {
        assert_eq!(
            self.radicand, other.radicand,
            "quadratic surds with different radicands"
        );
    }
}

impl Add for &QuadraticSurd {
    type Output = QuadraticSurd;
    fn add(self, rhs: &QuadraticSurd) -> QuadraticSurd {
        self.check(rhs);
        QuadraticSurd {
            rational_part: &self.rational_part + &rhs.rational_part,
            surd_part: &self.surd_part + &rhs.surd_part,
            radicand: self.radicand,
        }
    }
}

impl Sub for &QuadraticSurd {
    type Output = QuadraticSurd;
    fn sub(self, rhs: &QuadraticSurd) -> QuadraticSurd {
        self + &(-rhs)
    }
}

impl Neg for &QuadraticSurd {
    type Output = QuadraticSurd;
    fn neg(self) -> QuadraticSurd {
        QuadraticSurd {
            rational_part: -self.rational_part.clone(),
            surd_part: -self.surd_part.clone(),
            radicand: self.radicand,
        }
    }
}

impl Mul for &QuadraticSurd {
    type Output = QuadraticSurd;
    fn mul(self, rhs: &QuadraticSurd) -> QuadraticSurd {
        self.check(rhs);
        let d = Rational::from_integer(self.radicand.into());
        QuadraticSurd {
            rational_part: &self.rational_part * &rhs.rational_part
                + d * &self.surd_part * &rhs.surd_part,
            surd_part: &self.rational_part * &rhs.surd_part + &self.surd_part * &rhs.rational_part,
            radicand: self.radicand,
        }
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.surd_part.is_zero() {
            return write!(f, "{}", self.rational_part);
        }
        let sign = if self.surd_part.is_negative() {
            '-'
        } else {
            '+'
        };
        write!(
            f,
            "{} {} {}*sqrt({})",
            self.rational_part,
            sign,
            self.surd_part.abs(),
            self.radicand
        )
    }
}
