mod common;

use arctic_core::trig_core::*;
use arctic_core::{ArcticError, Dual, Mp, Real};
use common::*;
use proptest::prelude::*;
use rug::Integer;

fn ints(v: &[i64]) -> Vec<Integer> {
    v.iter().map(|&x| Integer::from(x)).collect()
}

#[test]
fn tower_low_orders() {
    let t = cot_derivative_polynomials(0).unwrap();
    assert_eq!(t.polys, vec![ints(&[0, 1])]);
    let t = cot_derivative_polynomials(1).unwrap();
    assert_eq!(t.polys, vec![ints(&[0, 1]), ints(&[-1, 0, -1])]);
    let t = cot_derivative_polynomials(2).unwrap();
    assert_eq!(t.polys[2], ints(&[0, 2, 0, 2]));
    assert!(matches!(cot_derivative_polynomials(-1), Err(ArcticError::Argument(_))));
}

#[test]
fn tower_recurrence_and_degree() {
    let t = cot_derivative_polynomials(40).unwrap();
    assert_eq!(t.k_max(), 40);
    for j in 0..40 {
        let p = &t.polys[j];
        assert_eq!(p.len(), j + 2, "deg P_{j}");
        // -(1+c²) P'
        let mut q = vec![Integer::new(); j + 3];
        for i in 1..p.len() {
            let d = Integer::from(&p[i] * i as u32);
            q[i - 1] -= &d;
            q[i + 1] -= &d;
        }
        assert_eq!(t.polys[j + 1], q);
        if j % 2 == 0 {
            assert_eq!(p[0], 0);
        }
    }
}

/// d^j/dx^j cot(x) by a j-th order central difference at 1024 bits.
fn cot_fd(x: &Mp, j: usize) -> Mp {
    let prec = 1024;
    let h = Mp::new(1e-12, prec);
    let mut acc = Mp::zero(prec);
    for i in 0..=j {
        let c = Mp::from_integer(&Integer::from(Integer::binomial_u(j as u32, i as u32)), prec);
        let off = Mp::ratio(j as i64 - 2 * i as i64, 2, prec) * h.clone();
        let term = c * (x.clone() + off).cot();
        acc = if i % 2 == 0 { acc + term } else { acc - term };
    }
    acc / h.powi(j as i64)
}

#[test]
fn tower_matches_numeric_derivatives_at_quarter_pi() {
    let t = cot_derivative_polynomials(8).unwrap();
    let x = Mp::pi_frac(1, 4, 1024);
    let c = x.cot();
    for j in 0..=8 {
        assert_rel(&t.eval(j, &c), &cot_fd(&x, j), 1e-20);
    }
}

#[test]
fn m_derivative_examples() {
    let d = m_derivatives(&pf(1, 2), &pf(1, 6), 1).unwrap();
    assert_rel(&d[0], &Mp::ratio(4, 3, P), 1e-70);
    assert_small(&d[1], 1e-70);
    let d = m_derivatives(&pf(1, 2), &pf(1, 4), 0).unwrap();
    assert_rel(&d[0], &Mp::int(2, P), 1e-70);
    assert!(matches!(m_derivatives(&pf(1, 6), &pf(1, 6), 0), Err(ArcticError::Singularity(_))));
}

#[test]
fn m_derivatives_match_finite_differences() {
    let mut r = rng(11);
    let h = mp(1e-30);
    for _ in 0..20 {
        let eta = mp(uniform(&mut r, 0.1, 1.4));
        let w = mp(uniform(&mut r, 0.1, 3.0));
        let (wp, wm) = (w.clone() + eta.clone(), w.clone() - eta.clone());
        let pi = Mp::pi(P);
        let far = |x: &Mp| {
            let y = x.to_f64().rem_euclid(pi.to_f64());
            y > 0.05 && y < pi.to_f64() - 0.05
        };
        if !far(&wp) || !far(&wm) {
            continue;
        }
        let d0 = m_derivatives(&w, &eta, 40).unwrap();
        let dp = m_derivatives(&(w.clone() + h.clone()), &eta, 39).unwrap();
        let dm = m_derivatives(&(w.clone() - h.clone()), &eta, 39).unwrap();
        for k in 1..=40 {
            let fd = (dp[k - 1].clone() - dm[k - 1].clone()) / (h.clone() + h.clone());
            assert!(rel(&d0[k], &fd) < 1e-15, "k={k} w={w} eta={eta}");
        }
    }
}

#[test]
fn m_at_classical_point_is_inverse_sine_square() {
    let w = mp(0.7);
    let d = m_derivatives(&w, &Mp::zero(P), 1).unwrap();
    assert_rel(&d[0], &w.sin().sq().recip(), 1e-70);
}

#[test]
fn mu_matrix_examples() {
    let (u, v, eta) = (mp(0.3), mp(-1.2), pf(1, 6));
    let m1 = mu_derivative_matrix(&u, &v, &eta, 1).unwrap();
    let mu = m_value(&(u.clone() - v.clone()), &eta).unwrap() - m_value(&(u.clone() + v.clone()), &eta).unwrap();
    assert_rel(&m1[0][0], &mu, 1e-70);

    let ff = mu_derivative_matrix(&pf(1, 8), &pf(-1, 2), &pf(1, 4), 1).unwrap();
    assert_small(&ff[0][0], 1e-60);

    let m2 = mu_derivative_matrix(&u, &v, &eta, 2).unwrap();
    let dm = m_derivatives(&(u.clone() - v.clone()), &eta, 1).unwrap();
    let dp = m_derivatives(&(u.clone() + v.clone()), &eta, 1).unwrap();
    // (-1)^j ∂_v m_U with j = 1
    assert_rel(&m2[0][1], &(dm[1].clone() + dp[1].clone()), 1e-70);

    let h = mp(1e-30);
    let mu_at = |v: &Mp| {
        m_value(&(u.clone() - v.clone()), &eta).unwrap() - m_value(&(u.clone() + v.clone()), &eta).unwrap()
    };
    let fd = -(mu_at(&(v.clone() + h.clone())) - mu_at(&(v.clone() - h.clone()))) / (h.clone() + h.clone());
    assert_rel(&m2[0][1], &fd, 1e-40);
}

#[test]
fn mu_matrix_mixed_entry_matches_duals() {
    let (u, v, eta) = (mp(0.25), mp(-1.1), pf(1, 5));
    let m = mu_derivative_matrix(&u, &v, &eta, 3).unwrap();
    let (ud, vd) = seed_mixed(&u, &v);
    let e2 = Dual::constant(Dual::constant(eta.clone()));
    let mu = m_value(&(ud.clone() - vd.clone()), &e2).unwrap() - m_value(&(ud + vd), &e2).unwrap();
    // entry (1,1) = -∂_u ∂_v m_U
    assert_rel(&m[1][1], &-mu.d[0].d[0].clone(), 1e-60);
}

#[test]
fn determinant_small_cases() {
    let a = |x: i64| Mp::int(x, P);
    let m = vec![vec![a(2), a(-1), a(0)], vec![a(-1), a(2), a(-1)], vec![a(0), a(-1), a(2)]];
    assert_rel(&det(m), &a(4), 1e-70);
    let m = vec![vec![a(0), a(1)], vec![a(1), a(0)]];
    assert_rel(&det(m), &a(-1), 1e-70);
    assert_rel(&det_or_one(vec![], &a(5)), &a(1), 0.0 + 1e-70);
    assert_eq!(factorial_square_product(4), Integer::from(144));
}

#[test]
fn precision_policy() {
    if std::env::var(PRECISION_ENV).is_err() {
        assert_eq!(default_precision(1), 256);
        assert_eq!(default_precision(32), 448);
    }
    assert!(mp(1.0).prec() >= MIN_PRECISION);
    let a = Mp::new(1.0, 128);
    let b = Mp::new(1.0, 512);
    assert_eq!((a + b).prec(), 512);
}

fn fd(f: impl Fn(&Mp) -> Mp, x: &Mp) -> Mp {
    let h = Mp::pow2(-40, P);
    (f(&(x.clone() + h.clone())) - f(&(x.clone() - h.clone()))) / (h.clone() + h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dual_tangents_match_finite_differences(x in 0.2f64..1.3, y in 0.5f64..2.0) {
        let x = mp(x);
        let yv = mp(y);
        let yc = Dual::constant(yv.clone());
        let cases: Vec<(Box<dyn Fn(&Dual<Mp>) -> Dual<Mp>>, Box<dyn Fn(&Mp) -> Mp>)> = vec![
            (Box::new(|d: &Dual<Mp>| d.sin()), Box::new(|t: &Mp| t.sin())),
            (Box::new(|d: &Dual<Mp>| d.cos()), Box::new(|t: &Mp| t.cos())),
            (Box::new(|d: &Dual<Mp>| d.cot()), Box::new(|t: &Mp| t.cot())),
            (Box::new(|d: &Dual<Mp>| d.ln()), Box::new(|t: &Mp| t.ln())),
            (Box::new(|d: &Dual<Mp>| d.clone() * d.sin() * yc.clone()), Box::new(|t: &Mp| t.clone() * t.sin() * yv.clone())),
            (Box::new(|d: &Dual<Mp>| d.cos() / (d.clone() + yc.clone())), Box::new(|t: &Mp| t.cos() / (t.clone() + yv.clone()))),
        ];
        for (df, f) in cases {
            let (_, t) = derivative(&x, |d| df(d));
            let r = rel(&t, &fd(|z| f(z), &x));
            prop_assert!(r < 1e-12, "rel {r:e}");
        }
    }

    #[test]
    fn second_order_seed_gives_second_derivative(x in 0.2f64..1.3) {
        let s = seed_second(&mp(x));
        let f = s.sin() * s.clone();
        let xv = mp(x);
        let expect = -(xv.sin() * xv.clone()) + xv.cos() + xv.cos();
        prop_assert!(rel(&f.d[0].d[0], &expect) < 1e-60);
        prop_assert!(rel(&f.v.tangent(0), &(xv.sin() + xv.clone() * xv.cos())) < 1e-60);
    }

    #[test]
    fn tower_evaluates_derivatives_of_cot(j in 0usize..12, x in 0.3f64..1.2) {
        let t = cot_derivative_polynomials(j as i64 + 1).unwrap();
        let x = mp(x);
        let h = mp(1e-30);
        let fdv = (t.eval(j, &(x.clone() + h.clone()).cot()) - t.eval(j, &(x.clone() - h.clone()).cot())) / (h.clone() + h);
        prop_assert!(rel(&t.eval(j + 1, &x.cot()), &fdv) < 1e-30);
    }
}
