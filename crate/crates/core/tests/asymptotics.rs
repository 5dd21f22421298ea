mod common;

use arctic_core::asymptotics::*;
use arctic_core::partition::one_point;
use arctic_core::{ArcticError, Model, ModelParams, Mp, NamedPoint, Real};
use common::*;
use proptest::prelude::*;

const HP: u32 = 512;

fn params(model: Model, eta: &Mp, u: &Mp, v: &Mp) -> ModelParams {
    ModelParams::new(model, eta.clone(), u.clone(), v.clone()).unwrap()
}

fn hp(x: f64) -> Mp {
    Mp::new(x, HP)
}

fn hpf(a: i64, b: i64) -> Mp {
    Mp::pi_frac(a, b, HP)
}

fn interior_xis(p: &ModelParams, count: usize) -> Vec<Mp> {
    let (lo, hi) = branch_range(p);
    let prec = p.prec();
    (1..=count)
        .map(|i| lo.clone() + (hi.clone() - lo.clone()) * Mp::ratio(i as i64, count as i64 + 1, prec))
        .collect()
}

#[test]
fn alpha_values() {
    assert_rel(&alpha(&pf(1, 6)).unwrap(), &Mp::ratio(3, 2, P), 1e-70);
    assert_rel(&alpha(&pf(1, 4)).unwrap(), &Mp::int(2, P), 1e-70);
    assert_rel(&alpha(&pf(1, 8)).unwrap(), &Mp::ratio(4, 3, P), 1e-70);
    assert!(matches!(alpha(&pf(1, 2)), Err(ArcticError::Argument(_))));
    assert!(matches!(alpha(&mp(-0.1)), Err(ArcticError::Argument(_))));
}

#[test]
fn free_energy_values() {
    // log(3^{9/4} / 2^{9/2})
    let three = Mp::int(3, P);
    let two = Mp::int(2, P);
    let oracle = three.ln() * Mp::ratio(9, 4, P) - two.ln() * Mp::ratio(9, 2, P);
    let f20 = free_energy(&NamedPoint::Uniform20V.params(P)).unwrap();
    assert_rel(&f20, &oracle, 1e-30);
    assert!((f20.to_f64() + 0.647284663016507).abs() < 1e-14);
    let fdt = free_energy(&NamedPoint::Uniform20V.params(P).with_model(Model::Dt)).unwrap();
    assert_rel(&fdt, &f20, 1e-30);

    // ASM: log(4 / 3^{3/2})
    let fasm = free_energy(&NamedPoint::Asm.params(P)).unwrap();
    let oracle = Mp::int(4, P).ln() - three.ln() * Mp::ratio(3, 2, P);
    assert_rel(&fasm, &oracle, 1e-30);
    assert!((fasm.to_f64() + 0.261624071882274).abs() < 1e-14);

    let p = params(Model::SixV, &pf(1, 4), &pf(1, 2), &Mp::zero(P));
    assert_small(&free_energy(&p).unwrap(), 1e-60);
    assert_small(&free_energy(&NamedPoint::FreeFermion6VP.params(P)).unwrap(), 1e-60);
}

#[test]
fn free_energy_limit_on_u_line() {
    let v = mp(-1.4);
    let at = |u: f64| free_energy(&params(Model::SixVP, &pf(1, 6), &mp(u), &v)).unwrap();
    let f0 = at(0.0);
    assert!(f0.is_finite());
    let two_sided = (at(1e-8) + at(-1e-8)) / Mp::int(2, P);
    assert!((f0 - two_sided).abs().to_f64() < 1e-12);
    let vs = free_energy(&NamedPoint::Vsasm.params(P)).unwrap();
    assert!(vs.is_finite());
}

#[test]
fn exponent_limits() {
    let vs = NamedPoint::Vsasm.params(HP);
    let psi = one_point_exponent(&vs, &hp(-1e-30), ExponentKind::Psi).unwrap();
    assert_small(&psi, 1e-50);
    assert_small(&one_point_exponent(&vs, &Mp::zero(HP), ExponentKind::Psi).unwrap(), 1e-100);

    // 6V: e^ψ → 0 as ξ → (u - v) - η, so log|e^ψ| → -∞
    let asm = NamedPoint::Asm.params(HP);
    let end = asm.w() - asm.eta.clone();
    let near = |d: f64| one_point_exponent(&asm, &(end.clone() - hp(d)), ExponentKind::Reduced).unwrap().to_f64();
    let (a, b) = (near(1e-10), near(1e-20));
    assert!(a < -10.0 && b < a - 10.0, "{a} {b}");
}

#[test]
fn asm_exponent_frozen_values() {
    let asm = NamedPoint::Asm.params(P);
    for (xi, psi) in [(-0.3, 0.0378710557), (-0.6, 0.1562154611), (-1.0, 0.4707390361)] {
        let got = one_point_exponent(&asm, &mp(xi), ExponentKind::Psi).unwrap().to_f64();
        assert!((got - psi).abs() < 1e-9, "xi={xi}: {got}");
    }
}

#[test]
fn vsasm_exponent_against_finite_size() {
    let vs = NamedPoint::Vsasm.params(P);
    let xi = mp(-0.4);
    let psi = one_point_exponent(&vs, &xi, ExponentKind::Psi).unwrap();
    let n = 32;
    let h = one_point(&vs, n, &xi).unwrap();
    let est = -(h.ln() / Mp::int(n as i64, P));
    assert!((est - psi).abs().to_f64() < 0.05);
}

#[test]
fn saddle_examples() {
    let cases = [
        (NamedPoint::Asm.params(HP), hp(-0.5)),
        (params(Model::SixVP, &hpf(1, 3), &hpf(1, 12), &hpf(-1, 2)), hp(-0.2)),
        (NamedPoint::Uniform20V.params(HP), hp(-0.2)),
    ];
    for (p, xi) in &cases {
        for r in saddle_residuals(p, xi).unwrap() {
            assert!(r.abs().to_f64() < 1e-25, "{}: {r}", p.model);
        }
    }
}

#[test]
fn domino_saddle_examples() {
    let dt = NamedPoint::Uniform20V.params(HP).with_model(Model::Dt);
    let xi = hpf(-1, 8);
    let sd = saddle_data(&dt, &xi).unwrap();
    assert_rel(&(sd.kappa.clone() / sd.lambda.clone()), &Mp::one(HP), 1e-60);
    let expect = xi.sin() / (Mp::int(2, HP).sqrt() * (xi.clone() - hpf(1, 4)).sin());
    assert_rel(&(sd.p[0].clone() / sd.kappa.clone()), &expect, 1e-60);
    assert!((expect.to_f64() - 0.2928932188134524).abs() < 1e-14);

    let tv = NamedPoint::Uniform20V.params(HP);
    for x in [-0.1, -0.25, -0.4, -0.55, -0.7] {
        let k_dt = saddle_data(&dt, &hp(x)).unwrap().kappa;
        let k_20 = saddle_data(&tv, &hp(x)).unwrap().kappa;
        assert_rel(&k_dt, &(k_20 * Mp::int(2, HP) - Mp::one(HP)), 1e-60);
    }
}

#[test]
fn saddle_range_is_enforced() {
    let asm = NamedPoint::Asm.params(P);
    assert!(matches!(saddle_data(&asm, &mp(0.1)), Err(ArcticError::Argument(_))));
    let (lo, _) = branch_range(&asm);
    assert!(matches!(saddle_data(&asm, &(lo - mp(0.01))), Err(ArcticError::Argument(_))));
    let dt = NamedPoint::Uniform20V.params(P).with_model(Model::Dt);
    assert_rel(&branch_range(&dt).0, &pf(-3, 8), 1e-70);
}

#[test]
fn saddle_residuals_over_ranges() {
    let pts = [
        NamedPoint::Asm.params(HP),
        params(Model::SixV, &hp(0.4), &hp(1.0), &hp(-0.3)),
        params(Model::SixVP, &hpf(1, 3), &hpf(1, 12), &hpf(-1, 2)),
        params(Model::SixVP, &hp(0.5), &hp(0.2), &hp(-1.4)),
        params(Model::SixVP, &hp(0.5), &hp(-0.2), &hp(-1.1)),
        NamedPoint::Uniform20V.params(HP),
        params(Model::TwentyV, &hp(0.35), &hp(0.3), &hp(-1.2)),
        NamedPoint::Uniform20V.params(HP).with_model(Model::Dt),
    ];
    for p in &pts {
        for xi in interior_xis(p, 10) {
            for r in saddle_residuals(p, &xi).unwrap() {
                assert!(r.abs().to_f64() < 1e-25, "{} xi={xi}: {r}", p.model);
            }
            assert!(kappa_consistency(p, &xi).unwrap().abs().to_f64() < 1e-25);
            let sd = saddle_data(p, &xi).unwrap();
            // the DT family has A < 0 past -π/4
            let ne = p.model != Model::Dt || xi > hpf(-1, 4);
            assert!(!ne || sd.kappa.sign() > 0 && sd.lambda.sign() > 0, "{} xi={xi}", p.model);
        }
    }
}

#[test]
fn liouville_examples() {
    let p = params(Model::SixV, &hpf(1, 6), &hpf(2, 3), &Mp::zero(HP));
    let (w, ode) = liouville_residuals(&p).unwrap();
    assert_small(&w, 1e-30);
    assert_small(&ode, 1e-25);

    for (eta, u, v) in [(hpf(1, 5), hpf(1, 7), hpf(-1, 2) + hp(0.13)), (hpf(1, 3), hpf(1, 12), hp(-1.4)), (hp(0.5), hp(-0.2), hp(-1.1))] {
        let p = params(Model::SixVP, &eta, &u, &v);
        let (w, ode) = liouville_residuals(&p).unwrap();
        assert_small(&w, 1e-25);
        assert_small(&ode, 1e-25);
    }
    // W is infinite on v = -π/2
    let on_line = params(Model::SixVP, &hpf(1, 5), &hpf(1, 7), &hpf(-1, 2));
    assert!(matches!(liouville_residuals(&on_line), Err(ArcticError::Singularity(_))));
    assert!(liouville_residuals(&NamedPoint::Uniform20V.params(HP)).is_err());
}

#[test]
fn liouville_sign_follows_u() {
    let a = params(Model::SixVP, &hp(0.3), &hp(0.1), &hp(-1.4));
    let b = params(Model::SixVP, &hp(0.3), &hp(-0.1), &hp(-1.4));
    assert_eq!(liouville_sign(&a).unwrap(), -1);
    assert_eq!(liouville_sign(&b).unwrap(), 1);
}

#[test]
fn phi_psi_relations() {
    let pts = [
        NamedPoint::Asm.params(HP),
        params(Model::SixVP, &hp(0.5), &hp(0.2), &hp(-1.4)),
        NamedPoint::Uniform20V.params(HP),
        params(Model::TwentyV, &hp(0.35), &hp(0.3), &hp(-1.2)),
    ];
    for p in &pts {
        for xi in interior_xis(p, 5) {
            assert_small(&phi_psi_consistency(p, &xi).unwrap(), 1e-30);
        }
    }
}

#[test]
fn kappa_inversion_round_trip() {
    let asm = NamedPoint::Asm.params(HP);
    let xi = xi_of_kappa(&asm, &hp(0.7)).unwrap();
    assert!((xi.to_f64() + 0.4539221581).abs() < 1e-9);
    let k = saddle_data(&asm, &xi).unwrap().kappa;
    assert!((k - hp(0.7)).abs().to_f64() < 1e-20);
    assert!(matches!(xi_of_kappa(&asm, &hp(1.5)), Err(ArcticError::Argument(_))));
}

#[test]
fn exponent_set_bundles_values() {
    let p = NamedPoint::Asm.params(P);
    let xi = mp(-0.3);
    let e = exponent_set(&p, &xi).unwrap();
    assert_rel(&e.f, &free_energy(&p).unwrap(), 1e-70);
    assert_rel(&e.psi, &one_point_exponent(&p, &xi, ExponentKind::Psi).unwrap(), 1e-70);
    assert_rel(&e.phi, &one_point_exponent(&p, &xi, ExponentKind::Phi).unwrap(), 1e-70);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn kappa_round_trip_property(t in 0.05f64..0.95) {
        let p = params(Model::SixVP, &hp(0.5), &hp(0.2), &hp(-1.4));
        let (lo, hi) = branch_range(&p);
        let xi = lo.clone() + (hi - lo) * hp(t);
        let k = saddle_data(&p, &xi).unwrap().kappa;
        let back = xi_of_kappa(&p, &k).unwrap();
        let k2 = saddle_data(&p, &back).unwrap().kappa;
        prop_assert!((k2 - k).abs().to_f64() < 1e-20);
    }

    #[test]
    fn sixv_saddle_residuals_vanish(eta in 0.1f64..1.2, t in 0.05f64..0.95, s in 0.05f64..0.95) {
        let w = eta + t * (std::f64::consts::PI - 2.0 * eta);
        let p = params(Model::SixV, &hp(eta), &hp(w), &Mp::zero(HP));
        let (lo, hi) = branch_range(&p);
        let xi = lo.clone() + (hi - lo) * hp(s);
        for r in saddle_residuals(&p, &xi).unwrap() {
            prop_assert!(r.abs().to_f64() < 1e-25);
        }
    }

    #[test]
    fn twentyv_kappa_is_consistent(eta in 0.1f64..0.5, a in 0.1f64..0.9, b in 0.1f64..0.9, s in 0.05f64..0.95) {
        let pi = std::f64::consts::PI;
        let u = a * (pi / 2.0 - eta);
        let v = (eta - pi + u) + b * (-2.0 * u - 2.0 * eta + pi);
        let p = ModelParams::new(Model::TwentyV, hp(eta), hp(u), hp(v));
        prop_assume!(p.is_ok());
        let p = p.unwrap();
        let (lo, hi) = branch_range(&p);
        let xi = lo.clone() + (hi - lo) * hp(s);
        prop_assert!(kappa_consistency(&p, &xi).unwrap().abs().to_f64() < 1e-25);
    }
}
