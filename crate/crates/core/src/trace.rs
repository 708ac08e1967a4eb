//! Dimensions and Hecke traces on spaces of algebraic modular forms, the
//! oldform correction and the resulting new eigenvalues.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::characters::{CharacterPolynomial, SU2CharacterPolynomial};
use crate::context::{ContextPool, PrimeContext};
use crate::eigenform::{eigenvalue_sum, EigenformRecord};
use crate::error::{Error, Result};
use crate::genus::FiniteGroup;
use crate::hecke::HeckeRepSet;
use crate::order::{Coords, IntMatrix, MaximalOrder};
use crate::rational::Rational;

/// Upper bound on `|reps|^d * |Gamma|` for [`trace_tq_power`].
pub const POWER_WORK_LIMIT: u128 = 400_000_000;

/// `dim V_{j, k-3}` by the Weyl dimension formula for `Sp(4)`.
pub fn weyl_dimension(j: u32, k: u32) -> BigInt {
    if k < 3 {
        return BigInt::zero();
    }
    let (l1, l2) = (BigInt::from(j + k - 3), BigInt::from(k - 3));
    let num = (&l1 - &l2 + 1) * (&l1 + &l2 + 3) * (&l1 + 2) * (&l2 + 1);
    num / 6
}

/// Multiset of `(r1, e2)` invariants.
type Classes = BTreeMap<(i64, i64), u64>;

fn classes_of<'a, I>(order: &MaximalOrder, mats: I) -> Classes
where
    I: IntoParallelIterator<Item = &'a IntMatrix>,
{
    mats.into_par_iter()
        .fold(Classes::new, |mut acc, m| {
            let (r1, r2) = order.mat_power_sums(m);
            *acc.entry((r1, (r1 * r1 - r2) / 2)).or_default() += 1;
            acc
        })
        .reduce(Classes::new, merge)
}

fn merge(mut a: Classes, b: Classes) -> Classes {
    for (key, n) in b {
        *a.entry(key).or_default() += n;
    }
    a
}

fn sum_character(chi: &CharacterPolynomial, classes: &Classes, theta: u64) -> BigInt {
    classes
        .iter()
        .map(|(&(r1, e2), &n)| chi.eval_int(r1, e2, theta) * n)
        .sum()
}

fn products(order: &MaximalOrder, left: &[IntMatrix], right: &[IntMatrix]) -> Classes {
    left.par_iter()
        .map(|u| {
            let prods: Vec<IntMatrix> = right.iter().map(|g| order.mat_mul(u, g)).collect();
            classes_of(order, &prods)
        })
        .reduce(Classes::new, merge)
}

fn divide(total: BigInt, n: usize) -> Rational {
    Rational::new(total, BigInt::from(n))
}

/// `dim A(V_{j,k-3})` for a single class with stabilizer `gamma`.
pub fn dim_space(gamma: &FiniteGroup, chi: &CharacterPolynomial) -> Result<u64> {
    let classes = classes_of(gamma.frame().order(), gamma.int_forms());
    let d = divide(sum_character(chi, &classes, 1), gamma.len());
    if !d.is_integer() || d.is_negative() {
        return Err(Error::Consistency(format!(
            "dimension {d} for (j, k) = ({}, {}) is not a non-negative integer",
            chi.j, chi.k
        )));
    }
    d.to_integer()
        .try_into()
        .map_err(|_| Error::Consistency("dimension overflow".into()))
}

/// `tr T_q = (1/|Gamma|) sum_i sum_gamma chi(u_i gamma)`.
pub fn trace_tq(
    gamma: &FiniteGroup,
    reps: &HeckeRepSet,
    chi: &CharacterPolynomial,
) -> Result<Rational> {
    trace_tq_power(gamma, reps, chi, 1)
}

/// `tr T_q^d`, summing over products of `d` representatives.
pub fn trace_tq_power(
    gamma: &FiniteGroup,
    reps: &HeckeRepSet,
    chi: &CharacterPolynomial,
    d: u32,
) -> Result<Rational> {
    if reps.group != gamma.label() {
        return Err(Error::Consistency(format!(
            "representatives for {} used with {}",
            reps.group,
            gamma.label()
        )));
    }
    if d == 0 {
        return dim_space(gamma, chi).map(|v| Rational::from_integer(v.into()));
    }
    let work = (reps.len() as u128).saturating_pow(d) * gamma.len() as u128;
    if work > POWER_WORK_LIMIT {
        return Err(Error::Unsupported(format!(
            "tr T_{}^{d} needs {work} character evaluations",
            reps.q
        )));
    }
    let order = gamma.frame().order();
    let mut words: Vec<IntMatrix> = reps.int_reps().to_vec();
    for _ in 1..d {
        words = words
            .par_iter()
            .flat_map_iter(|w| reps.int_reps().iter().map(move |u| order.mat_mul(w, u)))
            .collect();
    }
    let classes = products(order, &words, gamma.int_forms());
    let theta = reps.q.pow(d);
    Ok(divide(sum_character(chi, &classes, theta), gamma.len()))
}

/// `tr T_q` as `(1/|Gamma|) sum_{nu in Y_q} chi(nu)` without coset
/// representatives.
pub fn trace_from_w(
    gamma: &FiniteGroup,
    y_q: &[IntMatrix],
    q: u64,
    chi: &CharacterPolynomial,
) -> Rational {
    let classes = classes_of(gamma.frame().order(), y_q);
    divide(sum_character(chi, &classes, q), gamma.len())
}

/// `dim A(D^x, V_j)` for a class number one order with unit group `units`.
pub fn dim_quat_space(
    order: &MaximalOrder,
    units: &[Coords],
    chi: &SU2CharacterPolynomial,
) -> Result<u64> {
    let total: BigInt = units
        .iter()
        .map(|u| chi.eval_int(order.trd(u), order.norm(u)))
        .sum();
    let d = divide(total, units.len());
    if !d.is_integer() || d.is_negative() {
        return Err(Error::Consistency(format!(
            "quaternionic dimension {d} for j = {}",
            chi.j
        )));
    }
    d.to_integer()
        .try_into()
        .map_err(|_| Error::Consistency("dimension overflow".into()))
}

/// `tr T_q` on `A(D^x, V_j)` from representatives of `X_q / O^x`.
pub fn quat_trace_tq(
    order: &MaximalOrder,
    units: &[Coords],
    reps: &[Coords],
    chi: &SU2CharacterPolynomial,
) -> Rational {
    let total: BigInt = reps
        .par_iter()
        .map(|x| {
            units
                .iter()
                .map(|u| {
                    let y = order.mul(x, u);
                    chi.eval_int(order.trd(&y), order.norm(&y))
                })
                .sum::<BigInt>()
        })
        .sum();
    divide(total, units.len())
}

/// `dim S_k(SL_2(Z))`.
pub fn dim_cusp_level1(k: u64) -> u64 {
    if k % 2 == 1 || k < 12 {
        return 0;
    }
    if k % 12 == 2 {
        k / 12 - 1
    } else {
        k / 12
    }
}

fn legendre(a: i64, p: i64) -> i64 {
    let r = a.rem_euclid(p);
    if r == 0 {
        return 0;
    }
    if (1..p).any(|x| (x * x) % p == r) {
        1
    } else {
        -1
    }
}

/// `dim S_k(Gamma_0(p))` for a prime `p`.
pub fn dim_cusp_gamma0(p: u64, k: u64) -> u64 {
    if k % 2 == 1 || k == 0 {
        return 0;
    }
    let pi = p as i64;
    let nu2 = if p == 2 { 1 } else { 1 + legendre(-1, pi) };
    let nu3 = match p {
        2 => 0,
        3 => 1,
        _ => 1 + legendre(-3, pi),
    };
    let (mu, cusps) = (pi + 1, 2);
    // 12 g = 12 + mu - 3 nu2 - 4 nu3 - 6 c
    let genus = (12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps) / 12;
    if k == 2 {
        return genus as u64;
    }
    let k = k as i64;
    let d = (k - 1) * (genus - 1) + (k / 2 - 1) * cusps + nu2 * (k / 4) + nu3 * (k / 3);
    d.max(0) as u64
}

/// `dim S_k^new(Gamma_0(p))`.
pub fn dim_new_gamma0(p: u64, k: u64) -> u64 {
    dim_cusp_gamma0(p, k) - 2 * dim_cusp_level1(k)
}

/// Size of the old part of `A(V_{j,k-3})`: lifts from pairs of a level one
/// form of weight `j + 2k - 2` and a newform of weight `j + 2` and level `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OldCount {
    /// `dim S_{j+2k-2}(SL_2(Z))`.
    pub m: u64,
    /// `dim S_{j+2}^new(Gamma_0(p))`.
    pub n: u64,
}

impl OldCount {
    pub fn dimension(&self) -> u64 {
        self.m * self.n
    }
}

/// `n` from the quaternionic side when the class number is one, checked
/// against the classical formula; from the formula alone otherwise.
pub fn old_count(pool: &ContextPool, ctx: &PrimeContext, j: u32, k: u32) -> Result<OldCount> {
    let m = dim_cusp_level1((j + 2 * k - 2) as u64);
    let classical = dim_new_gamma0(ctx.p(), (j + 2) as u64);
    if j == 0 || ctx.p() == 11 {
        return Ok(OldCount { m, n: classical });
    }
    let n = dim_quat_space(ctx.order(), ctx.units(), &*pool.su2_character(j)?)?;
    if n != classical {
        return Err(Error::Consistency(format!(
            "dim A(D^x, V_{j}) = {n} but dim S_{}^new(Gamma_0({})) = {classical}",
            j + 2,
            ctx.p()
        )));
    }
    Ok(OldCount { m, n })
}

/// Full, old and new dimensions. `old` and `new` are `None` where the
/// old space is not determined: `j = 0` unless no lift can exist, and the
/// trivial weight `(0, 3)` where constants must also be removed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Dimensions {
    pub full: u64,
    pub old: Option<u64>,
    pub new: Option<u64>,
}

pub fn dimensions(pool: &ContextPool, p: u64, j: u32, k: u32) -> Result<Dimensions> {
    let ctx = pool.context(p)?;
    let full = dim_space(&*ctx.gamma2()?, &*pool.character(j, k)?)?;
    let count = old_count(pool, &ctx, j, k)?;
    let determined = j > 0 || (k != 3 && count.dimension() == 0);
    let old = determined.then(|| count.dimension());
    let new = match old {
        Some(o) if o > full => {
            return Err(Error::Consistency(format!(
                "old dimension {o} exceeds full dimension {full} at p = {p}, (j, k) = ({j}, {k})"
            )))
        }
        Some(o) => Some(full - o),
        None => None,
    };
    Ok(Dimensions { full, old, new })
}

/// The trace of `T_q` on the old part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OldformTrace {
    pub count: OldCount,
    /// Sum of `a_q` over level one eigenforms of weight `j + 2k - 2`.
    #[serde(serialize_with = "crate::rational::serialize")]
    pub level1_sum: Rational,
    /// Sum of `a_q` over newforms of weight `j + 2` and level `p`.
    #[serde(serialize_with = "crate::rational::serialize")]
    pub level_p_sum: Rational,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub trace: Rational,
}

/// `n * sum a_q(g) + m * q^(k-2) * sum a_q(h)`. Requires `j > 0`.
pub fn oldform_trace(
    pool: &ContextPool,
    ctx: &PrimeContext,
    records: &[EigenformRecord],
    q: u64,
    j: u32,
    k: u32,
) -> Result<OldformTrace> {
    if j == 0 {
        return Err(Error::Unsupported("oldform trace for j = 0".into()));
    }
    let count = old_count(pool, ctx, j, k)?;
    let weight = (j + 2 * k - 2) as u64;
    let level1_sum = if count.n > 0 {
        eigenvalue_sum(records, 1, weight, q, count.m)?
    } else {
        Rational::zero()
    };
    let level_p_sum = if count.m > 0 && count.n > 0 {
        if ctx.p() == 11 {
            return Err(Error::Unsupported(
                "level p traces at p = 11 need the second ideal class".into(),
            ));
        }
        quat_trace_tq(
            ctx.order(),
            ctx.units(),
            &ctx.quat_reps(q)?,
            &*pool.su2_character(j)?,
        )
    } else {
        Rational::zero()
    };
    let trace = Rational::from_integer(count.n.into()) * &level1_sum
        + Rational::from_integer((count.m * q.pow(k - 2)).into()) * &level_p_sum;
    Ok(OldformTrace {
        count,
        level1_sum,
        level_p_sum,
        trace,
    })
}

/// `tr T_q^d` on the full space.
pub fn full_trace(
    pool: &ContextPool,
    p: u64,
    q: u64,
    j: u32,
    k: u32,
    power: u32,
) -> Result<Rational> {
    let ctx = pool.context(p)?;
    let gamma = ctx.gamma2()?;
    let reps = ctx.hecke_reps(q)?;
    trace_tq_power(&gamma, &reps, &*pool.character(j, k)?, power)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceResult {
    pub p: u64,
    pub q: u64,
    pub j: u32,
    pub k: u32,
    pub power: u32,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub total: Rational,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub old: Rational,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub new: Rational,
    pub dims: Dimensions,
}

/// Trace of `T_q` on the full, old and new parts. The new eigenvalue is
/// `new` when `dims.new == Some(1)`.
pub fn split_trace(
    pool: &ContextPool,
    records: &[EigenformRecord],
    p: u64,
    q: u64,
    j: u32,
    k: u32,
) -> Result<TraceResult> {
    let ctx = pool.context(p)?;
    let dims = dimensions(pool, p, j, k)?;
    let total = full_trace(pool, p, q, j, k, 1)?;
    let old = match dims.old {
        Some(0) => Rational::zero(),
        Some(_) => oldform_trace(pool, &ctx, records, q, j, k)?.trace,
        None => {
            return Err(Error::Unsupported(format!(
                "old space for (j, k) = ({j}, {k}) at p = {p} is not determined"
            )))
        }
    };
    let new = &total - &old;
    Ok(TraceResult {
        p,
        q,
        j,
        k,
        power: 1,
        total,
        old,
        new,
        dims,
    })
}

/// The eigenvalue `b_q` of the unique new eigenform.
pub fn new_eigenvalue(
    pool: &ContextPool,
    records: &[EigenformRecord],
    p: u64,
    q: u64,
    j: u32,
    k: u32,
) -> Result<TraceResult> {
    let r = split_trace(pool, records, p, q, j, k)?;
    match r.dims.new {
        Some(1) => {
            if !r.new.is_integer() {
                return Err(Error::Consistency(format!(
                    "eigenvalue {} is not integral",
                    r.new
                )));
            }
            Ok(r)
        }
        Some(d) => Err(Error::AmbiguousEigenvalue {
            dim: d as i64,
            power_traces: vec![r.new],
        }),
        None => unreachable!("split_trace rejects undetermined old spaces"),
    }
}
