use std::sync::LazyLock;

use nalgebra::Matrix4;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use paramodular::characters::{build_sp4_character, eval_character};
use paramodular::context::ContextPool;
use paramodular::matrix::{gu2_mul, GU2Matrix};
use paramodular::rational::{rat, Rational};
use paramodular::{embed_gsp4_power_sums, QuaternionElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

static POOL: LazyLock<ContextPool> = LazyLock::new(ContextPool::new);

fn f(x: &Rational) -> f64 {
    x.to_f64().unwrap()
}

/// The 4x4 complex matrix attached to `g` with `a = i^2`, `b = j^2`.
fn embed(g: &GU2Matrix) -> Matrix4<Complex64> {
    let alg = g.algebra();
    let sa = Complex64::new(f(alg.a()), 0.0).sqrt();
    let b = f(alg.b());
    let c = |e: &QuaternionElement| e.coords().clone().map(|x| f(&x));
    let [al, be] = [c(g.entry(0, 0)), c(g.entry(0, 1))];
    let [ga, de] = [c(g.entry(1, 0)), c(g.entry(1, 1))];
    let plus = |x: [f64; 4], i: usize| Complex64::new(x[i], 0.0) + sa * x[i + 1];
    let minus = |x: [f64; 4], i: usize| Complex64::new(x[i], 0.0) - sa * x[i + 1];
    Matrix4::new(
        plus(al, 0),
        plus(be, 0),
        plus(al, 2),
        plus(be, 2),
        plus(ga, 0),
        plus(de, 0),
        plus(ga, 2),
        plus(de, 2),
        minus(al, 2) * b,
        minus(be, 2) * b,
        minus(al, 0),
        minus(be, 0),
        minus(ga, 2) * b,
        minus(de, 2) * b,
        minus(ga, 0),
        minus(de, 0),
    )
}

fn float_power_sums(g: &GU2Matrix) -> (f64, f64) {
    let m = embed(g);
    let eig = m.schur().eigenvalues().expect("complex Schur form");
    let r1: Complex64 = eig.iter().sum();
    let r2: Complex64 = eig.iter().map(|z| z * z).sum();
    assert!(r1.im.abs() < 1e-9 && r2.im.abs() < 1e-9);
    (r1.re, r2.re)
}

fn sample_elements() -> Vec<GU2Matrix> {
    let mut out = Vec::new();
    for (p, q) in [(2u64, 3u64), (3, 2), (5, 2), (7, 3), (11, 2)] {
        let ctx = POOL.context(p).unwrap();
        let g = ctx.gamma2().unwrap();
        let reps = ctx.hecke_reps(q).unwrap();
        for (i, r) in reps.reps().iter().enumerate().step_by(3) {
            out.push(gu2_mul(r, &g.elements()[(i * 7) % g.len()]).unwrap());
        }
        out.extend(g.elements().iter().step_by(g.len() / 8).cloned());
    }
    out
}

#[test]
fn power_sums_match_the_complex_embedding() {
    for g in sample_elements() {
        let (r1, r2) = embed_gsp4_power_sums(&g);
        let (x1, x2) = float_power_sums(&g);
        assert!((f(&r1) - x1).abs() < 1e-9, "{g}: {r1} vs {x1}");
        assert!((f(&r2) - x2).abs() < 1e-9, "{g}: {r2} vs {x2}");
    }
}

/// Weyl character of `Sp(4)` with highest weight `(l1, l2)` at the torus
/// element with eigenvalues `z^+-1, w^+-1`.
fn weyl(l1: i32, l2: i32, z: Complex64, w: Complex64) -> Complex64 {
    let a = |m: i32, x: Complex64| x.powi(m) - x.powi(-m);
    let (m1, m2) = (l1 + 2, l2 + 1);
    let num = a(m1, z) * a(m2, w) - a(m2, z) * a(m1, w);
    let den = a(2, z) * a(1, w) - a(1, z) * a(2, w);
    num / den
}

#[test]
fn polynomials_agree_with_the_weyl_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for j in (0..=12).step_by(2) {
        for k in 3..=10 {
            let chi = build_sp4_character(j, k).unwrap();
            for _ in 0..5 {
                let (s, t) = (rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0));
                let (z, w) = (Complex64::from_polar(1.0, s), Complex64::from_polar(1.0, t));
                let expected = weyl((j + k - 3) as i32, (k - 3) as i32, z, w);
                let e1 = (z + z.inv() + w + w.inv()).re;
                let e2 = (z * z.inv()
                    + z * w
                    + z * w.inv()
                    + z.inv() * w
                    + z.inv() * w.inv()
                    + w * w.inv())
                .re;
                let value: f64 = chi
                    .terms()
                    .iter()
                    .map(|(a, b, c)| {
                        c.to_f64().unwrap() * (e1 * e1).powi(*a as i32) * e2.powi(*b as i32)
                    })
                    .sum();
                let tol = 1e-7 * chi.dimension().to_f64().unwrap();
                assert!(
                    (value - expected.re).abs() < tol,
                    "({j}, {k}): {value} vs {expected}"
                );
                assert!(expected.im.abs() < tol);
            }
        }
    }
}

#[test]
fn identity_and_minus_identity_give_the_dimension() {
    let ctx = POOL.context(3).unwrap();
    let alg = ctx.order().algebra().clone();
    let id = GU2Matrix::identity(&alg);
    let minus = id.neg();
    for j in (0..=20).step_by(2) {
        for k in 3..=18 {
            let chi = POOL.character(j, k).unwrap();
            let d = Rational::from_integer(chi.dimension());
            assert!(d > rat(0));
            assert_eq!(eval_character(&chi, &id).unwrap(), d);
            assert_eq!(eval_character(&chi, &minus).unwrap(), d);
        }
    }
}

#[test]
fn class_functions() {
    let ctx = POOL.context(5).unwrap();
    let g = ctx.gamma2().unwrap();
    let reps = ctx.hecke_reps(2).unwrap();
    let chi = POOL.character(6, 7).unwrap();
    for (i, x) in reps.reps().iter().enumerate() {
        let h = &g.elements()[(i * 31) % g.len()];
        let conj = gu2_mul(&gu2_mul(h, x).unwrap(), &h.inverse()).unwrap();
        assert_eq!(
            eval_character(&chi, &conj).unwrap(),
            eval_character(&chi, x).unwrap()
        );
    }
}

#[test]
fn scaling_by_a_rational() {
    let ctx = POOL.context(7).unwrap();
    let reps = ctx.hecke_reps(3).unwrap();
    let (j, k) = (4, 6);
    let chi = POOL.character(j, k).unwrap();
    let s = Rational::new(3.into(), 2.into());
    for x in reps.reps().iter().take(5) {
        let scaled = GU2Matrix::new(x.matrix().scale(&s)).unwrap();
        assert_eq!(scaled.similitude(), &(x.similitude() * &s * &s));
        let factor = paramodular::rational::pow(&s, j + 2 * k - 6);
        assert_eq!(
            eval_character(&chi, &scaled).unwrap(),
            eval_character(&chi, x).unwrap() * factor
        );
    }
}
