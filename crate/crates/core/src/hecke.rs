//! Left coset representatives for the Hecke operators at a prime `q != p`.

use std::collections::{HashMap, HashSet};

use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::genus::{FiniteGroup, Frame, GroupLabel};
use crate::lattice::{enumerate_norm, orbit_reps, unit_group, NormList, Side};
use crate::matrix::GU2Matrix;
use crate::order::{self, Coords, IntMatrix, MaximalOrder, ZERO};
use crate::quaternion::QuaternionElement;

/// `(q + 1)(q^2 + 1)`.
pub fn hecke_degree(q: u64) -> usize {
    ((q + 1) * (q * q + 1)) as usize
}

/// Coset representatives `u_i` with `U u U = disjoint union of u_i U`.
#[derive(Clone, Debug)]
pub struct HeckeRepSet {
    pub p: u64,
    pub q: u64,
    pub group: GroupLabel,
    reps: Vec<GU2Matrix>,
    int_reps: Vec<IntMatrix>,
}

impl HeckeRepSet {
    pub fn reps(&self) -> &[GU2Matrix] {
        &self.reps
    }

    /// The representatives in the integral frame of their group.
    pub fn int_reps(&self) -> &[IntMatrix] {
        &self.int_reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// Splits `Y_q` into orbits under right multiplication by `Gamma2` and keeps
/// the least element of each. `y_q` is given in the integral frame of the
/// group (that is, as `W_q`).
pub fn reps_from_y(y_q: &[IntMatrix], gamma: &FiniteGroup, q: u64) -> Result<HeckeRepSet> {
    let o = gamma.frame().order();
    let mut sorted = y_q.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut seen: HashSet<IntMatrix> = HashSet::with_capacity(sorted.len());
    let mut int_reps = Vec::new();
    for x in &sorted {
        if seen.contains(x) {
            continue;
        }
        let orbit: Vec<IntMatrix> = gamma
            .int_forms()
            .par_iter()
            .map(|g| o.mat_mul(x, g))
            .collect();
        let before = seen.len();
        seen.extend(orbit);
        if seen.len() - before != gamma.len() {
            return Err(Error::Consistency(format!(
                "orbit of {x:?} under {} has {} elements, expected {}",
                gamma.label(),
                seen.len() - before,
                gamma.len()
            )));
        }
        int_reps.push(*x);
    }
    if seen.len() != sorted.len() {
        return Err(Error::Consistency("orbits leave Y_q".into()));
    }
    let expected = hecke_degree(q);
    if int_reps.len() != expected {
        return Err(Error::DegreeMismatch {
            expected,
            found: int_reps.len(),
        });
    }
    let reps = int_reps
        .iter()
        .map(|m| gamma.frame().to_gu2(m, q))
        .collect::<Result<Vec<_>>>()?;
    Ok(HeckeRepSet {
        p: gamma.prime(),
        q,
        group: gamma.label(),
        reps,
        int_reps,
    })
}

/// Representatives built directly from norm lists, for right multiplication
/// by `Gamma1 = GU_2(O)`. For `n = 2m` the block with `N(alpha) = m` admits
/// extra anti-diagonal equivalences and only one matrix of each pair is kept.
pub fn reps_explicit(order: &MaximalOrder, n: u64) -> Result<Vec<GU2Matrix>> {
    let one = order.one();
    if n == 1 {
        return Ok(vec![GU2Matrix::identity(order.algebra())]);
    }
    let units = unit_group(order);
    let lists: HashMap<u64, NormList> = (0..=n).map(|k| (k, enumerate_norm(order, k))).collect();
    let reps_of = |k: u64| orbit_reps(order, &lists[&k], &units, Side::Right);
    let m = n / 2;
    let mut out: Vec<IntMatrix> = Vec::new();
    for k in m + 1..=n {
        if k == n - 1 && n >= 3 {
            // X_1 / O^x = {1}: use the anti-diagonal equivalence instead.
            for z in &lists[&(n - 1)].elements {
                out.push(IntMatrix([one, *z, order::neg(&order.conj(z)), one]));
            }
            continue;
        }
        out.extend(block(order, &reps_of(k), &lists[&(n - k)].elements));
    }
    if n.is_multiple_of(2) {
        if m == 1 {
            // [[1, z], [-conj z, 1]] ~ [[1, -z], [conj z, 1]].
            for z in &units {
                if *z > order::neg(z) {
                    out.push(IntMatrix([one, *z, order::neg(&order.conj(z)), one]));
                }
            }
        } else {
            out.extend(paired_block(
                order,
                m,
                &reps_of(m),
                &lists[&m].elements,
                &units,
            ));
        }
    }
    out.iter()
        .map(|x| {
            let g = GU2Matrix::new(order.mat_to_quat(x))?;
            if g.similitude() != &crate::rational::rat(n as i64) {
                return Err(Error::Consistency(format!(
                    "{g} has similitude {}",
                    g.similitude()
                )));
            }
            Ok(g)
        })
        .collect()
}

/// Matrices `[[x_i, v], [w, x_j]]` with `x_i conj(w) + v conj(x_j) = 0`.
fn block(order: &MaximalOrder, reps: &[Coords], off: &[Coords]) -> Vec<IntMatrix> {
    let mut out = Vec::new();
    for xi in reps {
        for xj in reps {
            let xj_bar = order.conj(xj);
            for v in off {
                let v_xj = order.mul(v, &xj_bar);
                for w in off {
                    if order::add(&order.mul(xi, &order.conj(w)), &v_xj) == ZERO {
                        out.push(IntMatrix([*xi, *v, *w, *xj]));
                    }
                }
            }
        }
    }
    out
}

/// The `N(alpha) = N(beta) = m` block, keeping the smaller matrix of each
/// anti-diagonal pair `[[x_i, v], [w, x_j]] ~ [[x_s, x_i conj(w) x_t / m],
/// [x_j conj(v) x_s / m, x_t]]` with `v ~ x_s`, `w ~ x_t`.
fn paired_block(
    order: &MaximalOrder,
    m: u64,
    reps: &[Coords],
    xm: &[Coords],
    units: &[Coords],
) -> Vec<IntMatrix> {
    let mut rep_of: HashMap<Coords, Coords> = HashMap::new();
    for r in reps {
        for u in units {
            rep_of.insert(order.mul(r, u), *r);
        }
    }
    let mi = m as i64;
    block(order, reps, xm)
        .into_iter()
        .filter(|mat| {
            let [xi, v, w, xj] = &mat.0;
            let xs = rep_of[v];
            let xt = rep_of[w];
            let b = order::div_exact(&order.mul(&order.mul(xi, &order.conj(w)), &xt), mi);
            let c = order::div_exact(&order.mul(&order.mul(xj, &order.conj(v)), &xs), mi);
            match (b, c) {
                (Some(b), Some(c)) => *mat <= IntMatrix([xs, b, c, xt]),
                _ => true,
            }
        })
        .collect()
}

/// How two representative systems are compared.
#[derive(Clone, Copy, Debug)]
pub enum Equivalence<'a> {
    /// `a^-1 b` lies in the group.
    RightGroup(&'a FiniteGroup),
    /// `a^-1 b` is integral at `q` in the order, so `a` and `b` define the
    /// same coset of the local stabilizer at `q`.
    LocalAt { q: u64, order: &'a MaximalOrder },
}

fn equivalent(a: &GU2Matrix, b: &GU2Matrix, eq: Equivalence<'_>) -> bool {
    let Ok(x) = crate::matrix::gu2_mul(&a.inverse(), b) else {
        return false;
    };
    if !x.similitude().is_one() {
        return false;
    }
    match eq {
        Equivalence::RightGroup(g) => g.contains(&x),
        Equivalence::LocalAt { q, order } => {
            let qb = num_bigint::BigInt::from(q);
            x.matrix().entries().iter().flatten().all(|e| {
                order
                    .rational_coords(e)
                    .iter()
                    .all(|c| !num_integer::Integer::is_multiple_of(c.denom(), &qb))
            })
        }
    }
}

/// True iff there is a bijection `a_i <-> b_j` between the two sets with
/// each pair equivalent.
pub fn reps_equivalent(set_a: &[GU2Matrix], set_b: &[GU2Matrix], eq: Equivalence<'_>) -> bool {
    if set_a.len() != set_b.len() {
        return false;
    }
    let matches: Vec<Vec<usize>> = set_a
        .par_iter()
        .map(|a| {
            (0..set_b.len())
                .filter(|&j| equivalent(a, &set_b[j], eq))
                .collect()
        })
        .collect();
    let mut used = vec![false; set_b.len()];
    for m in &matches {
        if m.len() != 1 || used[m[0]] {
            return false;
        }
        used[m[0]] = true;
    }
    true
}

/// Representatives of `X_q / O^x` under right multiplication by units;
/// with class number one there are `q + 1` of them.
pub fn quat_hecke_reps(order: &MaximalOrder, q: u64) -> Result<Vec<QuaternionElement>> {
    let units = unit_group(order);
    let reps = orbit_reps(order, &enumerate_norm(order, q), &units, Side::Right);
    if reps.len() != (q + 1) as usize {
        return Err(Error::DegreeMismatch {
            expected: (q + 1) as usize,
            found: reps.len(),
        });
    }
    Ok(reps.iter().map(|c| order.element(c)).collect())
}

/// Wraps principal-frame representatives as a set for `Gamma1`.
pub fn rep_set_principal(
    order: &std::sync::Arc<MaximalOrder>,
    q: u64,
    reps: Vec<GU2Matrix>,
) -> Result<HeckeRepSet> {
    let frame = Frame::Principal(std::sync::Arc::clone(order));
    let int_reps = reps
        .iter()
        .map(|r| {
            frame
                .to_int(r.matrix())
                .ok_or_else(|| Error::Consistency(format!("{r} is not integral")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HeckeRepSet {
        p: order.ramified_prime(),
        q,
        group: GroupLabel::Gamma1,
        reps,
        int_reps,
    })
}
