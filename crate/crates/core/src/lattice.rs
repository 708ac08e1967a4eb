//! Enumeration of order elements of fixed reduced norm, the unit group, and
//! orbits under unit multiplication.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex};

use num_integer::Roots;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::order::{Coords, MaximalOrder};

type Q = Ratio<i128>;

/// All elements of the order with reduced norm `norm`, sorted lexicographically
/// on basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormList {
    pub norm: u64,
    pub elements: Vec<Coords>,
}

impl NormList {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// One element per line, four integers separated by spaces.
    pub fn dump(&self) -> String {
        self.elements
            .iter()
            .map(|c| format!("{} {} {} {}\n", c[0], c[1], c[2], c[3]))
            .collect()
    }
}

/// Coefficients of `N(x) = sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2`.
fn ldl(order: &MaximalOrder) -> [[Q; 4]; 4] {
    let t = order.norm_form();
    let mut q: [[Q; 4]; 4] =
        std::array::from_fn(|i| std::array::from_fn(|j| Q::new(t[i][j] as i128, 2)));
    for i in 0..4 {
        for j in i + 1..4 {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..4 {
            for l in k..4 {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    q
}

/// Integer range `{x : q (x - c)^2 <= r}`.
fn coordinate_range(q: Q, c: Q, r: Q) -> Option<(i64, i64)> {
    if r < Q::zero() {
        return None;
    }
    let fits = |x: i64| {
        let d = Q::from_integer(x as i128) - c;
        q * d * d <= r
    };
    // A floating estimate, corrected exactly below.
    let cf = c.to_f64().unwrap();
    let w = (r / q).to_f64().unwrap().sqrt();
    let mut lo = (cf - w).ceil() as i64;
    let mut hi = (cf + w).floor() as i64;
    while fits(lo - 1) {
        lo -= 1;
    }
    while lo <= hi && !fits(lo) {
        lo += 1;
    }
    while fits(hi + 1) {
        hi += 1;
    }
    while hi >= lo && !fits(hi) {
        hi -= 1;
    }
    (lo <= hi).then_some((lo, hi))
}

fn exact_sqrt(x: Q) -> Option<Q> {
    let (n, d) = (*x.numer(), *x.denom());
    if n < 0 {
        return None;
    }
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (sn * sn == n && sd * sd == d).then(|| Q::new(sn, sd))
}

/// Exact Fincke-Pohst enumeration of `{x in O : N(x) = n}`.
pub fn enumerate_norm(order: &MaximalOrder, n: u64) -> NormList {
    if n == 0 {
        return NormList {
            norm: 0,
            elements: vec![[0; 4]],
        };
    }
    let q = ldl(order);
    let total = Q::from_integer(n as i128);
    let center = |i: usize, x: &Coords| -> Q {
        (i + 1..4).fold(Q::zero(), |acc, j| {
            acc - q[i][j] * Q::from_integer(x[j] as i128)
        })
    };
    let spent = |i: usize, x: &Coords| -> Q {
        let d = Q::from_integer(x[i] as i128) - center(i, x);
        q[i][i] * d * d
    };
    let Some((lo3, hi3)) = coordinate_range(q[3][3], Q::zero(), total) else {
        return NormList {
            norm: n,
            elements: vec![],
        };
    };
    let mut elements: Vec<Coords> = (lo3..=hi3)
        .into_par_iter()
        .flat_map_iter(|x3| {
            let mut out = Vec::new();
            let mut x: Coords = [0, 0, 0, x3];
            let r3 = total - spent(3, &x);
            let Some((lo2, hi2)) = coordinate_range(q[2][2], center(2, &x), r3) else {
                return out;
            };
            for x2 in lo2..=hi2 {
                x[2] = x2;
                let r2 = r3 - spent(2, &x);
                let Some((lo1, hi1)) = coordinate_range(q[1][1], center(1, &x), r2) else {
                    continue;
                };
                for x1 in lo1..=hi1 {
                    x[1] = x1;
                    let r1 = r2 - spent(1, &x);
                    let Some(s) = exact_sqrt(r1 / q[0][0]) else {
                        continue;
                    };
                    let c0 = center(0, &x);
                    let mut roots = vec![c0 - s, c0 + s];
                    roots.dedup();
                    for root in roots {
                        if root.is_integer() {
                            x[0] = root.to_integer() as i64;
                            debug_assert_eq!(order.norm(&x), n as i64);
                            out.push(x);
                        }
                    }
                }
            }
            out
        })
        .collect();
    elements.sort_unstable();
    NormList { norm: n, elements }
}

/// The unit group `O^x`, i.e. the elements of norm 1.
pub fn unit_group(order: &MaximalOrder) -> Vec<Coords> {
    enumerate_norm(order, 1).elements
}

/// Memoized norm lists for one order.
#[derive(Debug)]
pub struct NormCache {
    order: Arc<MaximalOrder>,
    lists: Mutex<HashMap<u64, Arc<NormList>>>,
}

impl NormCache {
    pub fn new(order: Arc<MaximalOrder>) -> Self {
        NormCache {
            order,
            lists: Mutex::new(HashMap::new()),
        }
    }

    pub fn order(&self) -> &Arc<MaximalOrder> {
        &self.order
    }

    pub fn get(&self, n: u64) -> Arc<NormList> {
        if let Some(l) = self.lists.lock().expect("norm cache lock").get(&n) {
            return Arc::clone(l);
        }
        // Enumerate outside the lock; a racing duplicate is harmless.
        let list = Arc::new(enumerate_norm(&self.order, n));
        let mut map = self.lists.lock().expect("norm cache lock");
        Arc::clone(map.entry(n).or_insert(list))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// One representative (the lexicographically least element) per orbit of
/// `units` acting on `list` by multiplication on `side`.
pub fn orbit_reps(
    order: &MaximalOrder,
    list: &NormList,
    units: &[Coords],
    side: Side,
) -> Vec<Coords> {
    let mut seen: HashSet<Coords> = HashSet::with_capacity(list.len());
    let mut reps = Vec::new();
    for x in &list.elements {
        if seen.contains(x) {
            continue;
        }
        reps.push(*x);
        for u in units {
            let y = match side {
                Side::Left => order.mul(u, x),
                Side::Right => order.mul(x, u),
            };
            seen.insert(y);
        }
    }
    reps
}
