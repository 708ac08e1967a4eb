use std::sync::{Arc, LazyLock};

use paramodular::config::bundled_record;
use paramodular::context::ContextPool;
use paramodular::matrix::{gu2_mul, GU2Matrix};
use paramodular::order::{self, Coords, IntMatrix};
use paramodular::rational::rat;
use paramodular::{MaximalOrder, QuaternionElement};
use proptest::prelude::*;

fn order(p: u64) -> Arc<MaximalOrder> {
    let rec = bundled_record(p).unwrap();
    Arc::new(MaximalOrder::new(&rec.algebra, rec.basis).unwrap())
}

static POOL: LazyLock<ContextPool> = LazyLock::new(ContextPool::new);

fn coords() -> impl Strategy<Value = Coords> {
    prop::array::uniform4(-20i64..=20)
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn norm_is_multiplicative(p in prime(), x in coords(), y in coords()) {
        let o = order(p);
        let (a, b) = (o.element(&x), o.element(&y));
        prop_assert_eq!((&a * &b).norm(), a.norm() * b.norm());
        prop_assert_eq!(o.norm(&o.mul(&x, &y)), o.norm(&x) * o.norm(&y));
    }

    #[test]
    fn conjugation_reverses_products(p in prime(), x in coords(), y in coords()) {
        let o = order(p);
        let (a, b) = (o.element(&x), o.element(&y));
        prop_assert_eq!((&a * &b).conj(), &b.conj() * &a.conj());
        prop_assert_eq!(o.conj(&o.mul(&x, &y)), o.mul(&o.conj(&y), &o.conj(&x)));
    }

    #[test]
    fn cayley_hamilton(p in prime(), x in coords()) {
        let o = order(p);
        let a = o.element(&x);
        let lhs = &(&a * &a) - &a.scale(&a.trace());
        let lhs = &lhs + &QuaternionElement::scalar(o.algebra(), a.norm());
        prop_assert!(lhs.is_zero());
    }

    #[test]
    fn integer_tables_match_rational_arithmetic(p in prime(), x in coords(), y in coords()) {
        let o = order(p);
        let prod = &o.element(&x) * &o.element(&y);
        prop_assert_eq!(o.coords_of(&prod), Some(o.mul(&x, &y)));
        prop_assert_eq!(rat(o.trd(&x)), o.element(&x).trace());
        prop_assert_eq!(rat(o.norm(&x)), o.element(&x).norm());
    }

    #[test]
    fn bottom_left_survives_conjugation_by_p(p in prime(), e in prop::array::uniform4(coords())) {
        let ctx = POOL.context(p).unwrap();
        let o = ctx.order();
        let nu = o.mat_to_quat(&IntMatrix(e));
        let conj = ctx.genus().conjugate_by_p(&nu).unwrap();
        prop_assert_eq!(conj.entry(1, 0), nu.entry(1, 0));
    }

    #[test]
    fn similitude_of_products(p in prop::sample::select(vec![2u64, 3]), i in 0usize..2000, j in 0usize..2000) {
        let ctx = POOL.context(p).unwrap();
        let g = ctx.gamma2().unwrap();
        let reps = ctx.hecke_reps(if p == 2 { 3 } else { 2 }).unwrap();
        let a = &g.elements()[i % g.len()];
        let b = &reps.reps()[j % reps.len()];
        let ab = gu2_mul(a, b).unwrap();
        prop_assert_eq!(ab.matrix().similitude(), Some(ab.similitude().clone()));
        prop_assert!(GU2Matrix::new(ab.matrix().clone()).is_ok());
    }
}

#[test]
fn order_coordinates_round_trip() {
    for p in [2, 3, 5, 7, 11] {
        let o = order(p);
        for c in [[1, 0, 0, 0], [0, 1, 0, 0], [3, -2, 5, 7], [-1, -1, -1, -1]] {
            assert_eq!(o.coords_of(&o.element(&c)), Some(c));
        }
        assert_eq!(o.one(), [1, 0, 0, 0]);
        assert_eq!(order::add(&o.one(), &order::neg(&o.one())), order::ZERO);
    }
}

#[test]
fn every_constructed_matrix_is_a_similitude() {
    for p in [2u64, 3, 5, 7, 11] {
        let ctx = POOL.context(p).unwrap();
        let g = ctx.gamma2().unwrap();
        for y in g.elements() {
            assert_eq!(y.matrix().similitude(), Some(rat(1)));
        }
        for q in [2u64, 3].into_iter().filter(|&q| q != p) {
            for r in ctx.hecke_reps(q).unwrap().reps() {
                assert_eq!(
                    r.matrix().similitude(),
                    Some(rat(q as i64)),
                    "p = {p}, q = {q}"
                );
            }
        }
    }
}
