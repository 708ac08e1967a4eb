//! 2x2 matrices over a quaternion algebra and the similitude group GU_2(D).

use std::fmt;
use std::sync::Arc;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::quaternion::{QuaternionAlgebra, QuaternionElement};
use crate::rational::{rat, Rational};

/// Row-major 2x2 matrix `[[a, b], [c, d]]` over `D`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuatMatrix2 {
    entries: [[QuaternionElement; 2]; 2],
}

impl QuatMatrix2 {
    pub fn new(entries: [[QuaternionElement; 2]; 2]) -> Result<Self> {
        let alg = entries[0][0].algebra();
        if entries.iter().flatten().any(|e| e.algebra() != alg) {
            return Err(Error::AlgebraMismatch);
        }
        Ok(QuatMatrix2 { entries })
    }

    pub fn from_entries(
        a: QuaternionElement,
        b: QuaternionElement,
        c: QuaternionElement,
        d: QuaternionElement,
    ) -> Result<Self> {
        Self::new([[a, b], [c, d]])
    }

    pub fn identity(algebra: &Arc<QuaternionAlgebra>) -> Self {
        Self::scalar(algebra, rat(1))
    }

    pub fn scalar(algebra: &Arc<QuaternionAlgebra>, s: Rational) -> Self {
        let z = QuaternionElement::zero(algebra);
        let s = QuaternionElement::scalar(algebra, s);
        QuatMatrix2 {
            entries: [[s.clone(), z.clone()], [z, s]],
        }
    }

    pub fn entries(&self) -> &[[QuaternionElement; 2]; 2] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> &QuaternionElement {
        &self.entries[row][col]
    }

    pub fn algebra(&self) -> &Arc<QuaternionAlgebra> {
        self.entries[0][0].algebra()
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.algebra() != other.algebra() {
            return Err(Error::AlgebraMismatch);
        }
        let x = &self.entries;
        let y = &other.entries;
        let e = |i: usize, j: usize| &(&x[i][0] * &y[0][j]) + &(&x[i][1] * &y[1][j]);
        Ok(QuatMatrix2 {
            entries: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
        })
    }

    /// Entrywise conjugate of the transpose.
    pub fn conj_transpose(&self) -> Self {
        let x = &self.entries;
        QuatMatrix2 {
            entries: [
                [x[0][0].conj(), x[1][0].conj()],
                [x[0][1].conj(), x[1][1].conj()],
            ],
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        QuatMatrix2 {
            entries: self.entries.clone().map(|row| row.map(|e| e.scale(s))),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&rat(-1))
    }

    /// `mu` with `self * conj_transpose(self) = mu * I`, if it exists.
    pub fn similitude(&self) -> Option<Rational> {
        let prod = self
            .checked_mul(&self.conj_transpose())
            .expect("same algebra");
        let mu = prod.entries[0][0].coords()[0].clone();
        (prod == Self::scalar(self.algebra(), mu.clone())).then_some(mu)
    }
}

impl fmt::Debug for QuatMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for QuatMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.entries;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            e[0][0], e[0][1], e[1][0], e[1][1]
        )
    }
}

/// Element of `GU_2(D)` with cached positive similitude.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GU2Matrix {
    matrix: QuatMatrix2,
    similitude: Rational,
}

impl GU2Matrix {
    /// Verifies `g * conj(g)^T = mu * I` with `mu > 0`.
    pub fn new(matrix: QuatMatrix2) -> Result<Self> {
        match matrix.similitude() {
            Some(mu) if mu.is_positive() => Ok(GU2Matrix {
                matrix,
                similitude: mu,
            }),
            Some(mu) => Err(Error::InvalidSimilitude(format!(
                "{matrix} has similitude {mu}"
            ))),
            None => Err(Error::InvalidSimilitude(format!(
                "{matrix} is not a similitude"
            ))),
        }
    }

    pub fn identity(algebra: &Arc<QuaternionAlgebra>) -> Self {
        GU2Matrix {
            matrix: QuatMatrix2::identity(algebra),
            similitude: rat(1),
        }
    }

    pub fn matrix(&self) -> &QuatMatrix2 {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> &QuaternionElement {
        self.matrix.entry(row, col)
    }

    pub fn similitude(&self) -> &Rational {
        &self.similitude
    }

    pub fn algebra(&self) -> &Arc<QuaternionAlgebra> {
        self.matrix.algebra()
    }

    /// `conj(g)^T / mu`.
    pub fn inverse(&self) -> Self {
        GU2Matrix {
            matrix: self.matrix.conj_transpose().scale(&self.similitude.recip()),
            similitude: self.similitude.recip(),
        }
    }

    pub fn neg(&self) -> Self {
        GU2Matrix {
            matrix: self.matrix.neg(),
            similitude: self.similitude.clone(),
        }
    }

    /// `(r1, r2)`: traces of `A` and `A^2` for the image `A` of `g` in `GSp_4`.
    pub fn power_sums(&self) -> (Rational, Rational) {
        embed_gsp4_power_sums(self)
    }
}

impl fmt::Debug for GU2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mu = {})", self.matrix, self.similitude)
    }
}

impl fmt::Display for GU2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.matrix, f)
    }
}

/// Product in `GU_2(D)`. Debug builds re-check the similitude identity.
pub fn gu2_mul(x: &GU2Matrix, y: &GU2Matrix) -> Result<GU2Matrix> {
    let matrix = x.matrix.checked_mul(&y.matrix)?;
    let similitude = &x.similitude * &y.similitude;
    if cfg!(debug_assertions) && matrix.similitude().as_ref() != Some(&similitude) {
        return Err(Error::Consistency(format!(
            "product {matrix} does not have similitude {similitude}"
        )));
    }
    Ok(GU2Matrix { matrix, similitude })
}

/// Power sums of the eigenvalues of the 4x4 image of `g`. The irrational
/// parts of the embedding cancel, leaving reduced traces.
pub fn embed_gsp4_power_sums(g: &GU2Matrix) -> (Rational, Rational) {
    let e = g.matrix.entries();
    let (al, be, ga, de) = (&e[0][0], &e[0][1], &e[1][0], &e[1][1]);
    let r1 = al.trace() + de.trace();
    let r2 = (al * al).trace() + (de * de).trace() + (be * ga).trace() * rat(2);
    (r1, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d3() -> Arc<QuaternionAlgebra> {
        QuaternionAlgebra::new(rat(-1), rat(-3), 3).unwrap()
    }

    fn q(d: &Arc<QuaternionAlgebra>, c: [i64; 4]) -> QuaternionElement {
        QuaternionElement::from_ints(d, c)
    }

    #[test]
    fn identity_power_sums() {
        let d = d3();
        assert_eq!(
            embed_gsp4_power_sums(&GU2Matrix::identity(&d)),
            (rat(4), rat(4))
        );
    }

    #[test]
    fn rejects_non_similitudes() {
        let d = d3();
        let m = QuatMatrix2::from_entries(
            q(&d, [1, 0, 0, 0]),
            q(&d, [1, 0, 0, 0]),
            q(&d, [0; 4]),
            q(&d, [1, 0, 0, 0]),
        )
        .unwrap();
        assert!(matches!(
            GU2Matrix::new(m),
            Err(Error::InvalidSimilitude(_))
        ));
    }

    #[test]
    fn multiplicative_similitude() {
        let d = d3();
        // [[1, z], [-conj z, 1]] with N(z) = 1 has similitude 2.
        let z = q(&d, [0, 1, 0, 0]);
        let one = q(&d, [1, 0, 0, 0]);
        let x = GU2Matrix::new(
            QuatMatrix2::from_entries(one.clone(), z.clone(), z.conj().neg(), one.clone()).unwrap(),
        )
        .unwrap();
        assert_eq!(x.similitude(), &rat(2));
        let y = GU2Matrix::new(
            QuatMatrix2::from_entries(q(&d, [0; 4]), one.clone(), one.clone(), q(&d, [0; 4]))
                .unwrap(),
        )
        .unwrap();
        let xy = gu2_mul(&x, &y).unwrap();
        assert_eq!(xy.similitude(), &rat(2));
        let id = gu2_mul(&x, &x.inverse()).unwrap();
        assert_eq!(id, GU2Matrix::identity(&d));
    }
}
