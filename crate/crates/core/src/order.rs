//! Maximal orders with integer multiplication tables.
//!
//! Elements of the order are stored as integer coordinate vectors in the
//! order basis, so the enumeration and group computations never touch
//! rationals.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::quaternion::{QuaternionAlgebra, QuaternionElement};
use crate::rational::{rat, Rational};

/// Coordinates of an order element in the order basis.
pub type Coords = [i64; 4];

pub const ZERO: Coords = [0; 4];

/// Row-major 2x2 matrix `[[a, b], [c, d]]` of order elements in integer coordinates.
#[derive(
    Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
pub struct IntMatrix(pub [Coords; 4]);

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

pub fn add(x: &Coords, y: &Coords) -> Coords {
    [x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3]]
}

pub fn sub(x: &Coords, y: &Coords) -> Coords {
    [x[0] - y[0], x[1] - y[1], x[2] - y[2], x[3] - y[3]]
}

pub fn scale(x: &Coords, s: i64) -> Coords {
    x.map(|c| c * s)
}

pub fn neg(x: &Coords) -> Coords {
    x.map(|c| -c)
}

/// `x / d` if every coordinate is divisible by `d`.
pub fn div_exact(x: &Coords, d: i64) -> Option<Coords> {
    x.iter().all(|c| c % d == 0).then(|| x.map(|c| c / d))
}

/// Inverse of a 4x4 rational matrix by Gauss-Jordan elimination.
fn invert4(m: &[[Rational; 4]; 4]) -> Option<[[Rational; 4]; 4]> {
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.to_vec();
            r.extend((0..4).map(|j| if i == j { rat(1) } else { rat(0) }));
            r
        })
        .collect();
    for col in 0..4 {
        let piv = (col..4).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..4 {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..8 {
                    let t = &f * &a[col][c];
                    a[r][c] -= t;
                }
            }
        }
    }
    Some(std::array::from_fn(|i| {
        std::array::from_fn(|j| a[i][j + 4].clone())
    }))
}

#[derive(Debug)]
pub struct MaximalOrder {
    algebra: Arc<QuaternionAlgebra>,
    basis: [QuaternionElement; 4],
    basis_inv: [[Rational; 4]; 4],
    mult: [[Coords; 4]; 4],
    conj: [Coords; 4],
    trd: [i64; 4],
    trd_mul: [[i64; 4]; 4],
    norm_form: [[i64; 4]; 4],
}

impl MaximalOrder {
    /// Builds the integer tables; fails if the basis is not closed under
    /// multiplication and conjugation. Maximality is not checked.
    pub fn new(algebra: &Arc<QuaternionAlgebra>, basis: [QuaternionElement; 4]) -> Result<Self> {
        if basis.iter().any(|b| b.algebra() != algebra) {
            return Err(Error::AlgebraMismatch);
        }
        let bmat: [[Rational; 4]; 4] = std::array::from_fn(|i| basis[i].coords().clone());
        let basis_inv = invert4(&bmat)
            .ok_or_else(|| Error::Validation("order basis is linearly dependent".into()))?;
        let mut order = MaximalOrder {
            algebra: Arc::clone(algebra),
            basis,
            basis_inv,
            mult: [[ZERO; 4]; 4],
            conj: [ZERO; 4],
            trd: [0; 4],
            trd_mul: [[0; 4]; 4],
            norm_form: [[0; 4]; 4],
        };
        let integral = |r: &Rational, what: &str| -> Result<i64> {
            if r.denom().is_one() {
                r.numer()
                    .to_i64()
                    .ok_or_else(|| Error::Validation(format!("{what} overflows")))
            } else {
                Err(Error::Validation(format!(
                    "basis is not closed: {what} = {r}"
                )))
            }
        };
        for i in 0..4 {
            let bi = order.basis[i].clone();
            order.conj[i] = order.coords_of(&bi.conj()).ok_or_else(|| {
                Error::Validation(format!("conjugate of basis element {i} is not integral"))
            })?;
            order.trd[i] = integral(&bi.trace(), "reduced trace")?;
            for j in 0..4 {
                let bj = &order.basis[j];
                let prod = &bi * bj;
                order.mult[i][j] = order.coords_of(&prod).ok_or_else(|| {
                    Error::Validation(format!(
                        "product of basis elements {i}, {j} is not integral"
                    ))
                })?;
                order.trd_mul[i][j] = integral(&prod.trace(), "trace form")?;
                order.norm_form[i][j] = integral(&(&bi * &bj.conj()).trace(), "norm form")?;
            }
        }
        Ok(order)
    }

    pub fn algebra(&self) -> &Arc<QuaternionAlgebra> {
        &self.algebra
    }

    pub fn basis(&self) -> &[QuaternionElement; 4] {
        &self.basis
    }

    pub fn ramified_prime(&self) -> u64 {
        self.algebra.ramified_prime()
    }

    /// Gram matrix of the reduced norm on the basis: `N(x) = c^T G c`.
    pub fn gram(&self) -> [[Rational; 4]; 4] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| Rational::new(self.norm_form[i][j].into(), 2.into()))
        })
    }

    /// Integer matrix `T` with `N(x) = c^T T c / 2`.
    pub fn norm_form(&self) -> &[[i64; 4]; 4] {
        &self.norm_form
    }

    /// Rational coordinates of `x` in the order basis.
    pub fn rational_coords(&self, x: &QuaternionElement) -> [Rational; 4] {
        let c = x.coords();
        std::array::from_fn(|j| (0..4).map(|i| &c[i] * &self.basis_inv[i][j]).sum())
    }

    /// Integer coordinates of `x`, or `None` if `x` is not in the order.
    pub fn coords_of(&self, x: &QuaternionElement) -> Option<Coords> {
        let r = self.rational_coords(x);
        let mut out = ZERO;
        for (o, v) in out.iter_mut().zip(&r) {
            if !v.denom().is_one() {
                return None;
            }
            *o = v.numer().to_i64()?;
        }
        Some(out)
    }

    pub fn contains(&self, x: &QuaternionElement) -> bool {
        self.rational_coords(x).iter().all(|v| v.denom().is_one())
    }

    pub fn element(&self, c: &Coords) -> QuaternionElement {
        let mut coords: [Rational; 4] = std::array::from_fn(|_| Rational::zero());
        for (ci, b) in c.iter().zip(&self.basis) {
            if *ci != 0 {
                let s = rat(*ci);
                for (acc, bc) in coords.iter_mut().zip(b.coords()) {
                    *acc += &s * bc;
                }
            }
        }
        QuaternionElement::new(&self.algebra, coords)
    }

    pub fn one(&self) -> Coords {
        self.coords_of(&QuaternionElement::one(&self.algebra))
            .expect("orders contain 1")
    }

    pub fn mul(&self, x: &Coords, y: &Coords) -> Coords {
        let mut out = ZERO;
        for i in 0..4 {
            if x[i] == 0 {
                continue;
            }
            for j in 0..4 {
                let c = x[i] * y[j];
                if c == 0 {
                    continue;
                }
                let m = &self.mult[i][j];
                for t in 0..4 {
                    out[t] += c * m[t];
                }
            }
        }
        out
    }

    pub fn conj(&self, x: &Coords) -> Coords {
        let mut out = ZERO;
        for i in 0..4 {
            if x[i] != 0 {
                for t in 0..4 {
                    out[t] += x[i] * self.conj[i][t];
                }
            }
        }
        out
    }

    pub fn norm(&self, x: &Coords) -> i64 {
        let mut s = 0;
        for i in 0..4 {
            for j in 0..4 {
                s += self.norm_form[i][j] * x[i] * x[j];
            }
        }
        s / 2
    }

    pub fn trd(&self, x: &Coords) -> i64 {
        (0..4).map(|i| self.trd[i] * x[i]).sum()
    }

    /// `trd(x * y)` without forming the product.
    pub fn trd_mul(&self, x: &Coords, y: &Coords) -> i64 {
        let mut s = 0;
        for i in 0..4 {
            if x[i] != 0 {
                for j in 0..4 {
                    s += self.trd_mul[i][j] * x[i] * y[j];
                }
            }
        }
        s
    }

    pub fn mat_mul(&self, x: &IntMatrix, y: &IntMatrix) -> IntMatrix {
        let [a, b, c, d] = &x.0;
        let [e, f, g, h] = &y.0;
        IntMatrix([
            add(&self.mul(a, e), &self.mul(b, g)),
            add(&self.mul(a, f), &self.mul(b, h)),
            add(&self.mul(c, e), &self.mul(d, g)),
            add(&self.mul(c, f), &self.mul(d, h)),
        ])
    }

    /// Entrywise conjugate of the transpose.
    pub fn mat_conj_transpose(&self, x: &IntMatrix) -> IntMatrix {
        let [a, b, c, d] = &x.0;
        IntMatrix([self.conj(a), self.conj(c), self.conj(b), self.conj(d)])
    }

    pub fn mat_identity(&self) -> IntMatrix {
        IntMatrix([self.one(), ZERO, ZERO, self.one()])
    }

    /// Reduced traces of `X` and `X^2` in `M_2(D)`; these are the power sums
    /// of the 4x4 image of `X`.
    pub fn mat_power_sums(&self, x: &IntMatrix) -> (i64, i64) {
        let [a, b, c, d] = &x.0;
        let r1 = self.trd(a) + self.trd(d);
        let r2 = self.trd_mul(a, a) + self.trd_mul(d, d) + 2 * self.trd_mul(b, c);
        (r1, r2)
    }

    pub fn mat_to_quat(&self, x: &IntMatrix) -> crate::matrix::QuatMatrix2 {
        let [a, b, c, d] = &x.0;
        crate::matrix::QuatMatrix2::from_entries(
            self.element(a),
            self.element(b),
            self.element(c),
            self.element(d),
        )
        .expect("one algebra")
    }

    pub fn mat_from_quat(&self, m: &crate::matrix::QuatMatrix2) -> Option<IntMatrix> {
        let e = m.entries();
        Some(IntMatrix([
            self.coords_of(&e[0][0])?,
            self.coords_of(&e[0][1])?,
            self.coords_of(&e[1][0])?,
            self.coords_of(&e[1][1])?,
        ]))
    }
}
