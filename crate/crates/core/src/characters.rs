//! Characters of `USp(4)` and `SU(2)` as polynomials in conjugation
//! invariants.
//!
//! For `USp(4)` with eigenvalues `z, 1/z, w, 1/w` the invariants are
//! `E = e1^2` and `F = e2`. A similitude `A` with multiplier `theta` and
//! power sums `r1 = tr A`, `r2 = tr A^2` has `E = r1^2 / theta` and
//! `F = (r1^2 - r2) / (2 theta)` after scaling to `USp(4)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{embed_gsp4_power_sums, GU2Matrix};
use crate::quaternion::QuaternionElement;
use crate::rational::Rational;

type Laurent = BTreeMap<(i64, i64), BigInt>;

fn add_term(p: &mut Laurent, key: (i64, i64), c: BigInt) {
    if c.is_zero() {
        return;
    }
    let e = p.entry(key).or_insert_with(BigInt::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&key);
    }
}

fn mul(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for ((x1, y1), c1) in a {
        for ((x2, y2), c2) in b {
            add_term(&mut out, (x1 + x2, y1 + y2), c1 * c2);
        }
    }
    out
}

fn binomial(terms: &[((i64, i64), i64)]) -> Laurent {
    let mut p = Laurent::new();
    for (k, c) in terms {
        add_term(&mut p, *k, BigInt::from(*c));
    }
    p
}

/// Exact division with respect to the lexicographic order on exponents.
fn divide_exact(num: &Laurent, den: &Laurent) -> Result<Laurent> {
    let (&lt, lc) = den.iter().next_back().expect("nonzero divisor");
    let mut rem = num.clone();
    let mut quot = Laurent::new();
    while let Some((&t, c)) = rem.iter().next_back() {
        let (q, r) = c.div_rem(lc);
        if !r.is_zero() || t.0 < lt.0 || t.1 < lt.1 {
            return Err(Error::Consistency(
                "Weyl numerator is not divisible by the denominator".into(),
            ));
        }
        let m = (t.0 - lt.0, t.1 - lt.1);
        for (k, dc) in den {
            add_term(&mut rem, (k.0 + m.0, k.1 + m.1), -(&q * dc));
        }
        add_term(&mut quot, m, q);
    }
    Ok(quot)
}

/// Weyl character of the irreducible `USp(4)` representation with highest
/// weight `(j + k - 3, k - 3)`, as a Laurent polynomial in `z, w`.
fn weyl_character(j: u32, k: u32) -> Result<Laurent> {
    let (j, k) = (j as i64, k as i64);
    let mono = |a: i64, b: i64| binomial(&[((a, b), 1)]);
    let t1 = mul(
        &mul(
            &mono(0, j + 1),
            &binomial(&[((0, 2 * (k - 2)), 1), ((0, 0), -1)]),
        ),
        &binomial(&[((2 * (j + k - 1), 0), 1), ((0, 0), -1)]),
    );
    let t2 = mul(
        &mul(
            &mono(j + 1, 0),
            &binomial(&[((2 * (k - 2), 0), 1), ((0, 0), -1)]),
        ),
        &binomial(&[((0, 2 * (j + k - 1)), 1), ((0, 0), -1)]),
    );
    let mut num = t1;
    for (key, c) in t2 {
        add_term(&mut num, key, -c);
    }
    for den in [
        binomial(&[((2, 0), 1), ((0, 0), -1)]),
        binomial(&[((0, 2), 1), ((0, 0), -1)]),
        binomial(&[((1, 1), 1), ((0, 0), -1)]),
        binomial(&[((1, 0), 1), ((0, 1), -1)]),
    ] {
        num = divide_exact(&num, &den)?;
    }
    let shift = j + k - 3;
    Ok(num
        .into_iter()
        .map(|((a, b), c)| ((a - shift, b - shift), c))
        .collect())
}

/// Dense polynomial in one variable, lowest degree first.
type Poly = Vec<BigInt>;

/// `z^m + z^-m` as a polynomial in `s = z + 1/z`, except that `m = 0`
/// gives 1 rather than 2.
fn orbit_polys(max: usize) -> Vec<Poly> {
    let mut c: Vec<Poly> = vec![vec![BigInt::from(2)], vec![BigInt::zero(), BigInt::one()]];
    while c.len() <= max {
        let n = c.len();
        let mut next = vec![BigInt::zero(); n + 1];
        for (i, v) in c[n - 1].iter().enumerate() {
            next[i + 1] += v;
        }
        for (i, v) in c[n - 2].iter().enumerate() {
            next[i] -= v;
        }
        c.push(next);
    }
    c[0] = vec![BigInt::one()];
    c.truncate(max + 1);
    c
}

/// Bivariate polynomial keyed by exponent pairs.
type Poly2 = BTreeMap<(u32, u32), BigInt>;

fn add2(p: &mut Poly2, key: (u32, u32), c: BigInt) {
    if c.is_zero() {
        return;
    }
    let e = p.entry(key).or_insert_with(BigInt::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&key);
    }
}

fn mul2(a: &Poly2, b: &Poly2) -> Poly2 {
    let mut out = Poly2::new();
    for ((x1, y1), c1) in a {
        for ((x2, y2), c2) in b {
            add2(&mut out, (x1 + x2, y1 + y2), c1 * c2);
        }
    }
    out
}

/// Rewrites a Weyl-invariant Laurent polynomial in `(E, F)`.
fn invariant_to_ef(l: &Laurent) -> Result<Poly2> {
    let max = l
        .keys()
        .map(|(a, b)| a.abs().max(b.abs()))
        .max()
        .unwrap_or(0) as usize;
    let c = orbit_polys(max);
    // Symmetric polynomial in s = z + 1/z, t = w + 1/w.
    let mut st = vec![vec![BigInt::zero(); max + 1]; max + 1];
    for (&(m, n), coef) in l {
        if m < 0 || n < 0 {
            continue;
        }
        let (m, n) = (m as usize, n as usize);
        for (a, ca) in c[m].iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            let cac = coef * ca;
            for (b, cb) in c[n].iter().enumerate() {
                if !cb.is_zero() {
                    st[a][b] += &cac * cb;
                }
            }
        }
    }
    // Power sums s^n + t^n in (sigma1, sigma2), keyed (deg sigma1, deg sigma2).
    let sigma1: Poly2 = [((1, 0), BigInt::one())].into();
    let sigma2: Poly2 = [((0, 1), BigInt::one())].into();
    let mut power_sums: Vec<Poly2> = vec![[((0, 0), BigInt::from(2))].into(), sigma1.clone()];
    for n in 2..=max {
        let mut next = mul2(&sigma1, &power_sums[n - 1]);
        for (k, v) in mul2(&sigma2, &power_sums[n - 2]) {
            add2(&mut next, k, -v);
        }
        power_sums.push(next);
    }
    let mut sig = Poly2::new();
    for a in 0..=max {
        for b in 0..=a {
            let coef = &st[a][b];
            if coef.is_zero() {
                continue;
            }
            if st[b][a] != *coef {
                return Err(Error::Consistency(
                    "character is not symmetric in (s, t)".into(),
                ));
            }
            if a == b {
                add2(&mut sig, (0, b as u32), coef.clone());
            } else {
                for ((e1, e2), v) in &power_sums[a - b] {
                    add2(&mut sig, (*e1, e2 + b as u32), coef * v);
                }
            }
        }
    }
    // sigma1^2 = E and sigma2 = F - 2.
    let mut ef = Poly2::new();
    for ((e1, e2), v) in sig {
        if e1 % 2 != 0 {
            return Err(Error::Consistency(
                "odd power of e1 in an even-weight character".into(),
            ));
        }
        let mut binom = BigInt::one();
        for i in 0..=e2 {
            // (F - 2)^e2 = sum_i C(e2, i) F^i (-2)^(e2 - i)
            let term = &v * &binom * BigInt::from(-2).pow(e2 - i);
            add2(&mut ef, (e1 / 2, i), term);
            binom = binom * BigInt::from(e2 - i) / BigInt::from(i + 1);
        }
    }
    Ok(ef)
}

/// `chi_{j, k-3}` as an integer polynomial in `E = e1^2` and `F = e2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterPolynomial {
    pub j: u32,
    pub k: u32,
    /// `(deg_E, deg_F, coefficient)` with coefficients in decimal.
    coeffs: Vec<(u32, u32, String)>,
    #[serde(skip)]
    parsed: Vec<(u32, u32, BigInt)>,
}

impl CharacterPolynomial {
    fn from_poly(j: u32, k: u32, p: Poly2) -> Self {
        let parsed: Vec<_> = p.into_iter().map(|((a, b), c)| (a, b, c)).collect();
        CharacterPolynomial {
            j,
            k,
            coeffs: parsed
                .iter()
                .map(|(a, b, c)| (*a, *b, c.to_string()))
                .collect(),
            parsed,
        }
    }

    /// Restores the parsed coefficients after deserialization.
    pub fn rehydrate(mut self) -> Result<Self> {
        self.parsed = self
            .coeffs
            .iter()
            .map(|(a, b, c)| {
                c.parse::<BigInt>()
                    .map(|c| (*a, *b, c))
                    .map_err(|_| Error::Validation(format!("bad character coefficient {c:?}")))
            })
            .collect::<Result<_>>()?;
        Ok(self)
    }

    pub fn terms(&self) -> &[(u32, u32, BigInt)] {
        &self.parsed
    }

    /// Half the total degree of the representation, `(j + 2k - 6) / 2`.
    pub fn weight(&self) -> u32 {
        (self.j + 2 * self.k - 6) / 2
    }

    /// Value at a `USp(4)` element with the given invariants.
    pub fn eval_ef(&self, e: &Rational, f: &Rational) -> Rational {
        self.parsed
            .iter()
            .map(|(a, b, c)| {
                Rational::from_integer(c.clone())
                    * num_traits::pow(e.clone(), *a as usize)
                    * num_traits::pow(f.clone(), *b as usize)
            })
            .sum()
    }

    /// Value at a similitude with power sums `r1, r2` and multiplier `theta`:
    /// `theta^w * chi(E, F)` with `E = r1^2/theta`, `F = (r1^2 - r2)/(2 theta)`.
    /// Homogeneity keeps all powers of `theta` non-negative.
    pub fn eval_power_sums(
        &self,
        r1: &Rational,
        r2: &Rational,
        theta: &Rational,
    ) -> Result<Rational> {
        if !theta.is_positive() {
            return Err(Error::InvalidSimilitude(format!(
                "similitude {theta} is not positive"
            )));
        }
        let e_num = r1 * r1;
        let f_num = (&e_num - r2) / Rational::from_integer(2.into());
        let w = self.weight();
        Ok(self
            .parsed
            .iter()
            .map(|(a, b, c)| {
                Rational::from_integer(c.clone())
                    * num_traits::pow(e_num.clone(), *a as usize)
                    * num_traits::pow(f_num.clone(), *b as usize)
                    * num_traits::pow(theta.clone(), (w - a - b) as usize)
            })
            .sum())
    }

    /// Integer version of [`Self::eval_power_sums`] for integral `r1`, `e2 = (r1^2 - r2)/2`.
    pub fn eval_int(&self, r1: i64, e2: i64, theta: u64) -> BigInt {
        let w = self.weight();
        let e_num = BigInt::from(r1) * r1;
        let f_num = BigInt::from(e2);
        let th = BigInt::from(theta);
        self.parsed
            .iter()
            .map(|(a, b, c)| c * e_num.pow(*a) * f_num.pow(*b) * th.pow(w - a - b))
            .sum()
    }

    /// `chi(I) = dim V_{j, k-3}`.
    pub fn dimension(&self) -> BigInt {
        self.eval_int(4, 6, 1)
    }

    /// The polynomial as text, one term per line: `coeff E^a F^b`.
    pub fn dump(&self) -> String {
        self.parsed
            .iter()
            .map(|(a, b, c)| format!("{c} E^{a} F^{b}\n"))
            .collect()
    }
}

/// Builds `chi_{j, k-3}`. Requires `j` even and `k >= 3`.
pub fn build_sp4_character(j: u32, k: u32) -> Result<CharacterPolynomial> {
    if !j.is_multiple_of(2) || k < 3 {
        return Err(Error::Unsupported(format!(
            "(j, k) = ({j}, {k}): need j even and k >= 3"
        )));
    }
    let l = weyl_character(j, k)?;
    let ef = invariant_to_ef(&l)?;
    Ok(CharacterPolynomial::from_poly(j, k, ef))
}

/// Evaluates `chi` on a similitude.
pub fn eval_character(chi: &CharacterPolynomial, g: &GU2Matrix) -> Result<Rational> {
    let (r1, r2) = embed_gsp4_power_sums(g);
    chi.eval_power_sums(&r1, &r2, g.similitude())
}

/// `chi_j = Sym^j` of `SU(2)` as a polynomial in `T = trd(x)^2 / N(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SU2CharacterPolynomial {
    pub j: u32,
    coeffs: Vec<BigInt>,
}

impl SU2CharacterPolynomial {
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn eval_t(&self, t: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| {
            acc * t + Rational::from_integer(c.clone())
        })
    }

    /// `N^(j/2) chi_j(T)` for integral trace and norm.
    pub fn eval_int(&self, trd: i64, norm: i64) -> BigInt {
        let h = self.j / 2;
        let t2 = BigInt::from(trd) * trd;
        let n = BigInt::from(norm);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * t2.pow(i as u32) * n.pow(h - i as u32))
            .sum()
    }
}

/// Builds `chi_j`, `j` even: the Chebyshev polynomial `U_j(s)` in `s^2`.
pub fn build_su2_character(j: u32) -> Result<SU2CharacterPolynomial> {
    if !j.is_multiple_of(2) {
        return Err(Error::Unsupported(format!("j = {j} is odd")));
    }
    let mut u: Vec<Poly> = vec![vec![BigInt::one()], vec![BigInt::zero(), BigInt::one()]];
    for n in 2..=j as usize {
        let mut next = vec![BigInt::zero(); n + 1];
        for (i, v) in u[n - 1].iter().enumerate() {
            next[i + 1] += v;
        }
        for (i, v) in u[n - 2].iter().enumerate() {
            next[i] -= v;
        }
        u.push(next);
    }
    let uj = &u[j as usize];
    if uj.iter().skip(1).step_by(2).any(|c| !c.is_zero()) {
        return Err(Error::Consistency(
            "odd terms in an even Chebyshev polynomial".into(),
        ));
    }
    Ok(SU2CharacterPolynomial {
        j,
        coeffs: uj.iter().step_by(2).cloned().collect(),
    })
}

/// `N(x)^(j/2) chi_j(x / sqrt(N(x)))`.
pub fn eval_su2(chi: &SU2CharacterPolynomial, x: &QuaternionElement) -> Result<Rational> {
    let n = x.norm();
    if n.is_zero() {
        return Err(Error::InvalidElement("character of zero".into()));
    }
    let tr = x.trace();
    let h = chi.j / 2;
    Ok(chi
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            Rational::from_integer(c.clone())
                * num_traits::pow(tr.clone() * &tr, i)
                * num_traits::pow(n.clone(), (h as usize) - i)
        })
        .sum())
}
