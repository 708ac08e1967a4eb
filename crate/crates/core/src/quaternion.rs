//! Definite quaternion algebras `(a,b/Q)` and their elements.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{rat, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuaternionAlgebra {
    a: Rational,
    b: Rational,
    ramified_prime: u64,
}

impl QuaternionAlgebra {
    pub fn new(a: Rational, b: Rational, ramified_prime: u64) -> Result<Arc<Self>> {
        if !a.is_negative() || !b.is_negative() {
            return Err(Error::Validation(format!(
                "algebra ({a},{b}) is not definite"
            )));
        }
        Ok(Arc::new(QuaternionAlgebra {
            a,
            b,
            ramified_prime,
        }))
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn ramified_prime(&self) -> u64 {
        self.ramified_prime
    }

    /// Multiplication in the basis `1, i, j, k` with `i^2 = a`, `j^2 = b`, `ij = -ji = k`.
    pub(crate) fn mul_coords(&self, x: &[Rational; 4], y: &[Rational; 4]) -> [Rational; 4] {
        let (a, b) = (&self.a, &self.b);
        let ab = a * b;
        [
            &x[0] * &y[0] + a * &x[1] * &y[1] + b * &x[2] * &y[2] - &ab * &x[3] * &y[3],
            &x[0] * &y[1] + &x[1] * &y[0] - b * &x[2] * &y[3] + b * &x[3] * &y[2],
            &x[0] * &y[2] + &x[2] * &y[0] + a * &x[1] * &y[3] - a * &x[3] * &y[1],
            &x[0] * &y[3] + &x[3] * &y[0] + &x[1] * &y[2] - &x[2] * &y[1],
        ]
    }

    pub(crate) fn norm_coords(&self, x: &[Rational; 4]) -> Rational {
        let (a, b) = (&self.a, &self.b);
        &x[0] * &x[0] - a * &x[1] * &x[1] - b * &x[2] * &x[2] + a * b * &x[3] * &x[3]
    }
}

/// An element `x0 + x1 i + x2 j + x3 k`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuaternionElement {
    coords: [Rational; 4],
    algebra: Arc<QuaternionAlgebra>,
}

impl QuaternionElement {
    pub fn new(algebra: &Arc<QuaternionAlgebra>, coords: [Rational; 4]) -> Self {
        QuaternionElement {
            coords,
            algebra: Arc::clone(algebra),
        }
    }

    pub fn from_ints(algebra: &Arc<QuaternionAlgebra>, c: [i64; 4]) -> Self {
        Self::new(algebra, c.map(rat))
    }

    pub fn scalar(algebra: &Arc<QuaternionAlgebra>, s: Rational) -> Self {
        let z = Rational::zero();
        Self::new(algebra, [s, z.clone(), z.clone(), z])
    }

    pub fn zero(algebra: &Arc<QuaternionAlgebra>) -> Self {
        Self::scalar(algebra, Rational::zero())
    }

    pub fn one(algebra: &Arc<QuaternionAlgebra>) -> Self {
        Self::scalar(algebra, rat(1))
    }

    pub fn coords(&self) -> &[Rational; 4] {
        &self.coords
    }

    pub fn algebra(&self) -> &Arc<QuaternionAlgebra> {
        &self.algebra
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    fn same_algebra(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if !self.same_algebra(other) {
            return Err(Error::AlgebraMismatch);
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        QuaternionElement {
            coords: self.algebra.mul_coords(&self.coords, &other.coords),
            algebra: Arc::clone(&self.algebra),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if !self.same_algebra(other) {
            return Err(Error::AlgebraMismatch);
        }
        Ok(self.add_unchecked(other))
    }

    fn add_unchecked(&self, other: &Self) -> Self {
        let c = &self.coords;
        let d = &other.coords;
        QuaternionElement {
            coords: [&c[0] + &d[0], &c[1] + &d[1], &c[2] + &d[2], &c[3] + &d[3]],
            algebra: Arc::clone(&self.algebra),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&rat(-1))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        QuaternionElement {
            coords: self.coords.clone().map(|c| c * s),
            algebra: Arc::clone(&self.algebra),
        }
    }

    pub fn conj(&self) -> Self {
        let c = &self.coords;
        QuaternionElement {
            coords: [c[0].clone(), -&c[1], -&c[2], -&c[3]],
            algebra: Arc::clone(&self.algebra),
        }
    }

    /// Reduced norm `x * conj(x)`.
    pub fn norm(&self) -> Rational {
        self.algebra.norm_coords(&self.coords)
    }

    /// Reduced trace `x + conj(x)`.
    pub fn trace(&self) -> Rational {
        &self.coords[0] * rat(2)
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::InvalidElement("zero has no inverse".into()));
        }
        Ok(self.conj().scale(&n.recip()))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl std::ops::$tr for &QuaternionElement {
            type Output = QuaternionElement;
            /// Panics on mismatched algebras; use the `checked_` variant to recover.
            fn $m(self, rhs: &QuaternionElement) -> QuaternionElement {
                assert!(
                    self.same_algebra(rhs),
                    "quaternion elements belong to different algebras"
                );
                self.$inner(rhs)
            }
        }
    };
}

forward_binop!(Mul, mul, mul_unchecked);
forward_binop!(Add, add, add_unchecked);

impl std::ops::Sub for &QuaternionElement {
    type Output = QuaternionElement;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: &QuaternionElement) -> QuaternionElement {
        self + &rhs.neg()
    }
}

impl std::ops::Neg for &QuaternionElement {
    type Output = QuaternionElement;
    fn neg(self) -> QuaternionElement {
        QuaternionElement::neg(self)
    }
}

impl fmt::Debug for QuaternionElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for QuaternionElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "i", "j", "k"];
        let mut first = true;
        for (c, name) in self.coords.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (name, abs == rat(1)) {
                ("", _) => write!(f, "{abs}")?,
                (n, true) => write!(f, "{n}")?,
                (n, false) => write!(f, "{abs}{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
