//! The non-principal genus: the matrices `g`, `P`, `A` built from a pair
//! `(lambda, mu)`, the sets `W_theta` and `Y_theta`, and the finite groups
//! `Gamma1`, `Gamma2`.
//!
//! `W_theta` lives in `M_2(O)` and is handled in integer coordinates.
//! `Y_theta = g^-1 W_theta g` has rational entries and is only materialized
//! where a caller needs actual elements of `GU_2(D)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{unit_group, NormCache};
use crate::matrix::{GU2Matrix, QuatMatrix2};
use crate::order::{self, Coords, IntMatrix, MaximalOrder, ZERO};
use crate::quaternion::QuaternionElement;
use crate::rational::{rat, Rational};

#[derive(Debug)]
pub struct GenusData {
    order: Arc<MaximalOrder>,
    p: u64,
    pub lambda: QuaternionElement,
    pub mu: QuaternionElement,
    pub r: QuaternionElement,
    pub g: QuatMatrix2,
    pub g_inv: QuatMatrix2,
    pub p_matrix: QuatMatrix2,
    pub a: QuatMatrix2,
    r_c: Coords,
    rbar_c: Coords,
    a_int: IntMatrix,
}

/// Returns `(lambda, mu)` with `N(lambda) = p - 1`, `N(mu) = p` and
/// `trd(lambda * conj(mu)) = 0`. A supplied pair is validated and used as is;
/// otherwise the first admissible pair in enumeration order is returned.
pub fn find_lambda_mu(
    order: &MaximalOrder,
    supplied: Option<(&QuaternionElement, &QuaternionElement)>,
) -> Result<(QuaternionElement, QuaternionElement)> {
    let p = order.ramified_prime();
    if let Some((lambda, mu)) = supplied {
        let ok = order.contains(lambda)
            && order.contains(mu)
            && lambda.norm() == rat(p as i64 - 1)
            && mu.norm() == rat(p as i64)
            && (lambda * &mu.conj()).trace().is_zero();
        if !ok {
            return Err(Error::Validation(format!(
                "lambda = {lambda}, mu = {mu} do not satisfy the genus conditions for p = {p}"
            )));
        }
        return Ok((lambda.clone(), mu.clone()));
    }
    let lambdas = crate::lattice::enumerate_norm(order, p - 1);
    let mus = crate::lattice::enumerate_norm(order, p);
    for l in &lambdas.elements {
        for m in &mus.elements {
            if order.trd_mul(l, &order.conj(m)) == 0 {
                return Ok((order.element(l), order.element(m)));
            }
        }
    }
    Err(Error::NoAdmissiblePair { p })
}

fn qm(
    a: QuaternionElement,
    b: QuaternionElement,
    c: QuaternionElement,
    d: QuaternionElement,
) -> QuatMatrix2 {
    QuatMatrix2::from_entries(a, b, c, d).expect("one algebra")
}

impl GenusData {
    pub fn new(
        order: Arc<MaximalOrder>,
        lambda: QuaternionElement,
        mu: QuaternionElement,
    ) -> Result<Self> {
        let (lambda, mu) = find_lambda_mu(&order, Some((&lambda, &mu)))?;
        let p = order.ramified_prime();
        let alg = order.algebra();
        let one = QuaternionElement::one(alg);
        let zero = QuaternionElement::zero(alg);
        let pr = rat(p as i64);
        let r = &lambda * &mu.conj();
        let mu_inv = mu.inverse()?;
        let g = qm(one.clone(), lambda.clone(), zero.clone(), mu.clone());
        let g_inv = qm(one.clone(), -&(&lambda * &mu_inv), zero.clone(), mu_inv);
        let p_matrix = qm(
            one.clone(),
            r.conj().scale(&pr.recip()),
            zero.clone(),
            one.clone(),
        );
        let a = g.checked_mul(&g.conj_transpose())?;
        let expect_a = qm(
            QuaternionElement::scalar(alg, pr.clone()),
            r.clone(),
            r.conj(),
            QuaternionElement::scalar(alg, pr.clone()),
        );
        if a != expect_a {
            return Err(Error::Consistency(format!(
                "g conj(g)^T = {a}, expected {expect_a}"
            )));
        }
        let r_c = order
            .coords_of(&r)
            .ok_or_else(|| Error::Consistency("r is not integral".into()))?;
        let a_int = order
            .mat_from_quat(&a)
            .ok_or_else(|| Error::Consistency("A is not integral".into()))?;
        let genus = GenusData {
            p,
            lambda,
            mu,
            r,
            g,
            g_inv,
            p_matrix,
            a,
            r_c,
            rbar_c: order.conj(&r_c),
            a_int,
            order,
        };
        genus.check_invariants()?;
        Ok(genus)
    }

    fn check_invariants(&self) -> Result<()> {
        let p = rat(self.p as i64);
        let alg = self.order.algebra();
        let fail = |what: &str| {
            Err(Error::Consistency(format!(
                "genus data for p = {}: {what}",
                self.p
            )))
        };
        if !self.r.trace().is_zero() || self.r.norm() != &p * (&p - rat(1)) {
            return fail("trd(r) = 0 and N(r) = p(p-1) fail");
        }
        let pap = self
            .p_matrix
            .checked_mul(&self.a)?
            .checked_mul(&self.p_matrix.conj_transpose())?;
        let diag = qm(
            QuaternionElement::one(alg),
            QuaternionElement::zero(alg),
            QuaternionElement::zero(alg),
            QuaternionElement::scalar(alg, p),
        );
        if pap != diag {
            return fail("P A conj(P)^T is not diag(1, p)");
        }
        let pc = self
            .p_matrix
            .entries()
            .clone()
            .map(|row| row.map(|e| e.conj()));
        let pbar = QuatMatrix2::new(pc)?;
        if self.p_matrix.checked_mul(&pbar)? != QuatMatrix2::identity(alg) {
            return fail("P^-1 is not conj(P)");
        }
        if self.g.checked_mul(&self.g_inv)? != QuatMatrix2::identity(alg) {
            return fail("g g^-1 is not the identity");
        }
        Ok(())
    }

    pub fn order(&self) -> &Arc<MaximalOrder> {
        &self.order
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a_int(&self) -> &IntMatrix {
        &self.a_int
    }

    /// `nu A conj(nu)^T == theta A`, exactly.
    pub fn preserves_form(&self, nu: &IntMatrix, theta: u64) -> bool {
        let o = &self.order;
        let lhs = o.mat_mul(&o.mat_mul(nu, &self.a_int), &o.mat_conj_transpose(nu));
        lhs == IntMatrix(self.a_int.0.map(|c| order::scale(&c, theta as i64)))
    }

    /// Checks the three scaled equations characterizing `W_theta` and the
    /// equivalent equations for `P nu conj(P)`.
    pub fn satisfies_w_equations(&self, nu: &IntMatrix, theta: u64) -> bool {
        let o = &self.order;
        let p = self.p as i64;
        let th = theta as i64;
        let (r, rb) = (&self.r_c, &self.rbar_c);
        let [al, be, ga, de] = &nu.0;
        let w = order::add(&o.mul(ga, r), &order::scale(de, p));
        let ar_pb = order::add(&o.mul(al, r), &order::scale(be, p));
        let x = order::add(&order::scale(al, p), &o.mul(rb, ga));
        let y = order::add(&order::scale(&ar_pb, p), &o.mul(rb, &w));
        let first = p * o.norm(&x) + o.norm(&y) == th * p * p * p;
        let second = p * o.norm(ga) + o.norm(&w) == th * p * p;
        let third = order::add(
            &order::scale(&o.mul(al, &o.conj(ga)), p),
            &o.mul(&ar_pb, &o.conj(&w)),
        ) == order::scale(rb, -th * p);
        // The same matrix after conjugation by P, scaled to stay integral.
        let eta_third = order::add(
            &order::scale(&o.mul(&x, &o.conj(ga)), p),
            &o.mul(&y, &o.conj(&w)),
        ) == ZERO;
        let norms = o.norm(&x) == o.norm(&w) && o.norm(&y) == p * p * o.norm(ga);
        first && second && third && eta_third && norms
    }

    /// `P m conj(P)`.
    pub fn conjugate_by_p(&self, m: &QuatMatrix2) -> Result<QuatMatrix2> {
        let pc = self
            .p_matrix
            .entries()
            .clone()
            .map(|row| row.map(|e| e.conj()));
        self.p_matrix
            .checked_mul(m)?
            .checked_mul(&QuatMatrix2::new(pc)?)
    }

    /// `g^-1 nu g`, verified to be a similitude with multiplier `theta`.
    pub fn w_to_y(&self, nu: &IntMatrix, theta: u64) -> Result<GU2Matrix> {
        let m = self
            .g_inv
            .checked_mul(&self.order.mat_to_quat(nu))?
            .checked_mul(&self.g)?;
        let y = GU2Matrix::new(m)?;
        if y.similitude() != &rat(theta as i64) {
            return Err(Error::Consistency(format!(
                "element of Y_{theta} has similitude {}",
                y.similitude()
            )));
        }
        Ok(y)
    }

    /// `g y g^-1` in integer coordinates, if integral.
    pub fn y_to_w(&self, y: &QuatMatrix2) -> Option<IntMatrix> {
        let m = self.g.checked_mul(y).ok()?.checked_mul(&self.g_inv).ok()?;
        self.order.mat_from_quat(&m)
    }
}

fn mod_key(x: &Coords, m: i64) -> Coords {
    x.map(|c| c.rem_euclid(m))
}

fn bucket(list: &[Coords], m: i64) -> HashMap<Coords, Vec<Coords>> {
    let mut map: HashMap<Coords, Vec<Coords>> = HashMap::new();
    for x in list {
        map.entry(mod_key(x, m)).or_default().push(*x);
    }
    map
}

/// `W_theta = {nu in M_2(O) : nu A conj(nu)^T = theta A}`, sorted.
///
/// For each `gamma` of norm `j <= theta p` the candidates for `delta`,
/// `alpha` and `beta` come from norm lists via divisibility by `p` and `p^2`;
/// the lists are bucketed by residues so each screen is a lookup.
pub fn compute_w_theta(genus: &GenusData, norms: &NormCache, theta: u64) -> Result<Vec<IntMatrix>> {
    if theta == 0 {
        return Ok(Vec::new());
    }
    let o = genus.order.as_ref();
    let p = genus.p;
    let pi = p as i64;
    let (r, rb) = (genus.r_c, genus.rbar_c);
    let target_third = order::scale(&rb, -(theta as i64) * pi);
    let mut out: Vec<IntMatrix> = (0..=theta * p)
        .into_par_iter()
        .flat_map_iter(|j| {
            let xj = norms.get(j);
            let mut found = Vec::new();
            if xj.is_empty() {
                return found;
            }
            let xp = norms.get(p * (theta * p - j));
            let x3 = norms.get(p * p * j);
            let by_p = bucket(&xp.elements, pi);
            let by_p2 = bucket(&x3.elements, pi * pi);
            let empty = Vec::new();
            for ga in &xj.elements {
                let gr = o.mul(ga, &r);
                let rg = o.mul(&rb, ga);
                let ga_bar = o.conj(ga);
                let deltas = by_p.get(&mod_key(&gr, pi)).unwrap_or(&empty);
                let alphas = by_p.get(&mod_key(&rg, pi)).unwrap_or(&empty);
                for g1 in deltas {
                    let de = order::div_exact(&order::sub(g1, &gr), pi).expect("bucketed");
                    let w_bar = o.conj(g1);
                    let rw = o.mul(&rb, g1);
                    for g2 in alphas {
                        let al = order::div_exact(&order::sub(g2, &rg), pi).expect("bucketed");
                        let ar = o.mul(&al, &r);
                        let base = order::add(&rw, &order::scale(&ar, pi));
                        let p_al_gbar = order::scale(&o.mul(&al, &ga_bar), pi);
                        for g3 in by_p2.get(&mod_key(&base, pi * pi)).unwrap_or(&empty) {
                            let be = order::div_exact(&order::sub(g3, &base), pi * pi)
                                .expect("bucketed");
                            let ar_pb = order::add(&ar, &order::scale(&be, pi));
                            let third = order::add(&p_al_gbar, &o.mul(&ar_pb, &w_bar));
                            if third == target_third {
                                found.push(IntMatrix([al, be, *ga, de]));
                            }
                        }
                    }
                }
            }
            found
        })
        .collect();
    out.sort_unstable();
    for nu in &out {
        if !genus.preserves_form(nu, theta) {
            return Err(Error::Consistency(format!("{nu:?} is not in W_{theta}")));
        }
        debug_assert!(genus.satisfies_w_equations(nu, theta));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupLabel {
    Gamma1,
    Gamma2,
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupLabel::Gamma1 => "Gamma1",
            GroupLabel::Gamma2 => "Gamma2",
        })
    }
}

/// The integral frame a group's elements are stored in: `M_2(O)` itself
/// for `Gamma1`, or `g M_2(O) g^-1`-conjugates for `Gamma2`.
#[derive(Clone, Debug)]
pub enum Frame {
    Principal(Arc<MaximalOrder>),
    Genus(Arc<GenusData>),
}

impl Frame {
    pub fn order(&self) -> &Arc<MaximalOrder> {
        match self {
            Frame::Principal(o) => o,
            Frame::Genus(g) => g.order(),
        }
    }

    /// The integral form of `y`, if `y` is integral in this frame.
    pub fn to_int(&self, y: &QuatMatrix2) -> Option<IntMatrix> {
        match self {
            Frame::Principal(o) => o.mat_from_quat(y),
            Frame::Genus(g) => g.y_to_w(y),
        }
    }

    pub fn to_gu2(&self, m: &IntMatrix, theta: u64) -> Result<GU2Matrix> {
        match self {
            Frame::Principal(o) => {
                let y = GU2Matrix::new(o.mat_to_quat(m))?;
                if y.similitude() != &rat(theta as i64) {
                    return Err(Error::Consistency(format!(
                        "similitude {} != {theta}",
                        y.similitude()
                    )));
                }
                Ok(y)
            }
            Frame::Genus(g) => g.w_to_y(m, theta),
        }
    }
}

/// A finite subgroup of `SU_2(D)`, kept both as matrices over `D` and in
/// integer form in its frame.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    label: GroupLabel,
    prime: u64,
    frame: Frame,
    elements: Vec<GU2Matrix>,
    int_forms: Vec<IntMatrix>,
    index: HashMap<IntMatrix, usize>,
}

impl FiniteGroup {
    /// Builds the group from integral forms, which must already be sorted.
    pub fn from_int_forms(
        label: GroupLabel,
        frame: Frame,
        int_forms: Vec<IntMatrix>,
    ) -> Result<Self> {
        let elements = int_forms
            .par_iter()
            .map(|m| frame.to_gu2(m, 1))
            .collect::<Result<Vec<_>>>()?;
        let index = int_forms
            .iter()
            .enumerate()
            .map(|(i, m)| (*m, i))
            .collect::<HashMap<_, _>>();
        if index.len() != int_forms.len() {
            return Err(Error::Consistency(format!("{label} has repeated elements")));
        }
        Ok(FiniteGroup {
            label,
            prime: frame.order().ramified_prime(),
            frame,
            elements,
            int_forms,
            index,
        })
    }

    pub fn label(&self) -> GroupLabel {
        self.label
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GU2Matrix] {
        &self.elements
    }

    pub fn int_forms(&self) -> &[IntMatrix] {
        &self.int_forms
    }

    pub fn contains_int(&self, m: &IntMatrix) -> bool {
        self.index.contains_key(m)
    }

    pub fn contains(&self, y: &GU2Matrix) -> bool {
        self.frame
            .to_int(y.matrix())
            .is_some_and(|m| self.contains_int(&m))
    }

    /// Identity, inverses, and closure under products. With `sample`, only
    /// products of the first `sample` elements with all elements are formed.
    pub fn check_group_axioms(&self, sample: Option<usize>) -> Result<()> {
        let o = self.frame.order();
        let fail = |what: String| {
            Err(Error::Consistency(format!(
                "{} for p = {}: {what}",
                self.label, self.prime
            )))
        };
        if !self.contains_int(&o.mat_identity()) {
            return fail("identity missing".into());
        }
        if let Some(y) = self
            .elements
            .par_iter()
            .find_any(|y| !self.contains(&y.inverse()))
        {
            return fail(format!("inverse of {y} missing"));
        }
        let n = sample.unwrap_or(self.len()).min(self.len());
        let bad = self.int_forms[..n].par_iter().find_any(|x| {
            self.int_forms
                .iter()
                .any(|y| !self.contains_int(&o.mat_mul(x, y)))
        });
        if let Some(x) = bad {
            return fail(format!("not closed under products with {x:?}"));
        }
        Ok(())
    }
}

/// `Gamma1 = GU_2(O)`: diagonal and anti-diagonal matrices with unit entries.
pub fn gamma1(order: &Arc<MaximalOrder>) -> Result<FiniteGroup> {
    let units = unit_group(order);
    let mut forms = Vec::with_capacity(2 * units.len() * units.len());
    for a in &units {
        for b in &units {
            forms.push(IntMatrix([*a, ZERO, ZERO, *b]));
            forms.push(IntMatrix([ZERO, *a, *b, ZERO]));
        }
    }
    forms.sort_unstable();
    FiniteGroup::from_int_forms(
        GroupLabel::Gamma1,
        Frame::Principal(Arc::clone(order)),
        forms,
    )
}

/// `Gamma2 = Y_1`, from `W_1`.
pub fn gamma2(genus: &Arc<GenusData>, norms: &NormCache) -> Result<FiniteGroup> {
    let w1 = compute_w_theta(genus, norms, 1)?;
    gamma2_from_w1(genus, w1)
}

/// `Gamma2` from a previously computed `W_1`, re-verified.
pub fn gamma2_from_w1(genus: &Arc<GenusData>, mut w1: Vec<IntMatrix>) -> Result<FiniteGroup> {
    w1.sort_unstable();
    if let Some(nu) = w1.iter().find(|nu| !genus.preserves_form(nu, 1)) {
        return Err(Error::Consistency(format!("{nu:?} is not in W_1")));
    }
    FiniteGroup::from_int_forms(GroupLabel::Gamma2, Frame::Genus(Arc::clone(genus)), w1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassReport {
    pub p: u64,
    pub gamma2_size: usize,
    pub gamma2_mass: Rational,
    pub gamma2_expected: Rational,
    /// Only for `p` in {2, 3}, where the principal genus also has class number one.
    pub gamma1: Option<(usize, Rational, Rational)>,
}

impl MassReport {
    pub fn passed(&self) -> bool {
        self.gamma2_mass == self.gamma2_expected
            && self.gamma1.as_ref().is_none_or(|(_, m, e)| m == e)
    }
}

impl fmt::Display for MassReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |ok: bool| if ok { "pass" } else { "FAIL" };
        writeln!(
            f,
            "Gamma2: order {}, 1/|Gamma2| = {}, mass (p^2-1)/5760 = {}: {}",
            self.gamma2_size,
            self.gamma2_mass,
            self.gamma2_expected,
            verdict(self.gamma2_mass == self.gamma2_expected)
        )?;
        if let Some((n, m, e)) = &self.gamma1 {
            writeln!(
                f,
                "Gamma1: order {n}, 1/|Gamma1| = {m}, mass (p-1)(p^2+1)/5760 = {e}: {}",
                verdict(m == e)
            )?;
        }
        Ok(())
    }
}

/// Compares `1/|Gamma|` with the mass of the genus; equality means the
/// genus has a single class.
pub fn mass_check(p: u64, gamma1_size: Option<usize>, gamma2_size: usize) -> Result<MassReport> {
    let pi = p as i64;
    let inv = |n: usize| Rational::new(1.into(), (n as i64).into());
    let report = MassReport {
        p,
        gamma2_size,
        gamma2_mass: inv(gamma2_size),
        gamma2_expected: Rational::new((pi * pi - 1).into(), 5760.into()),
        gamma1: gamma1_size.filter(|_| p == 2 || p == 3).map(|n| {
            (
                n,
                inv(n),
                Rational::new(((pi - 1) * (pi * pi + 1)).into(), 5760.into()),
            )
        }),
    };
    if !report.passed() {
        return Err(Error::ClassNumberNotOne {
            p,
            detail: report.to_string().trim_end().to_string(),
        });
    }
    Ok(report)
}
