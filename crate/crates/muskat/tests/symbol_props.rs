mod common;

use common::{random_frozen, random_params, rng};
use muskat::diffraction::solve_potentials;
use muskat::geometry::{make_grid, InterfacePair, PeriodicFn};
use muskat::operators::FluidParams;
use muskat::symbols::{
    frozen_constants, lambda_st_symbol, lambda_symbol, marcinkiewicz_check, ode_oracle_lambda, phi_st_symbol,
    phi_symbol, region_check_r, region_check_s, FrozenPoint, SPairing,
};
use num_complex::Complex;
use proptest::prelude::*;

fn flat_point(params: &FluidParams<f64>, h0: f64, c: f64) -> FrozenPoint<f64> {
    let grid = make_grid::<f64>(16).unwrap();
    let pair = InterfacePair::flat(grid, 0.0, h0, -1.0).unwrap();
    let sol = solve_potentials(&pair, &PeriodicFn::constant(grid, c), params, 8).unwrap();
    frozen_constants(&pair, &sol, params, 0.4).unwrap()
}

#[test]
fn flat_frozen_constants() {
    let p = FluidParams::unit();
    let fp = flat_point(&p, 1.0, p.g * p.rho_plus);
    for (v, want) in [
        (fp.a_plus, 0.0),
        (fp.a_minus, 0.0),
        (fp.b_plus, 1.0),
        (fp.b_minus, 1.0),
        (fp.D_plus, 1.0),
        (fp.D_minus, 1.0),
        (fp.beta2_plus, 1.0),
        (fp.beta2_minus, 1.0),
        (fp.beta1_plus, 0.0),
        (fp.beta1_minus, 0.0),
        (fp.A_plus, 0.0),
        (fp.A_minus, 0.0),
        (fp.B, 0.0),
        (fp.V, 0.0),
        (fp.Delta_A, 0.0),
        (fp.Delta_rho, 1.0),
    ] {
        assert!((v - want).abs() < 1e-10, "{v} vs {want}");
    }
    let wide = flat_point(&FluidParams { mu_plus: 2.0, ..p }, 2.0, p.g * p.rho_plus);
    assert!((wide.D_plus - 2.0).abs() < 1e-12);
    assert!((wide.beta2_plus - 0.25).abs() < 1e-12);
}

#[test]
fn flat_symbol_values() {
    let p = FluidParams::unit();
    let fp = flat_point(&p, 1.0, 1.0);
    let t1 = 1f64.tanh();
    for tau in [0.0, 0.3, 1.0] {
        let l = lambda_symbol(&fp, 1, tau, &p).unwrap();
        assert!((l - Complex::new(-1.0 / (2.0 * t1), 0.0)).norm() < 1e-9);
        let ph = phi_symbol(&fp, 1, tau, &p).unwrap();
        assert!((ph - Complex::new(-1.0 / t1, 0.0)).norm() < 1e-9);
        let o = ode_oracle_lambda(&fp, 1, tau, &p).unwrap();
        assert!((o.symbol_value - l).norm() < 1e-9);
    }
    let st = FluidParams {
        gamma_f: 1.0,
        gamma_h: 1.0,
        ..p
    };
    let fp = flat_point(&st, 1.0, 1.0);
    assert!((phi_st_symbol(&fp, 2, &st).unwrap() + 8.0 / 2f64.tanh()).abs() < 1e-9);
    assert!((lambda_st_symbol(&fp, 1).unwrap() + 1.0 / (2.0 * t1)).abs() < 1e-9);
    let none = flat_point(&p, 1.0, 1.0);
    assert_eq!(lambda_st_symbol(&none, 3).unwrap(), 0.0);
    assert!(lambda_symbol(&none, 0, 0.0, &p).is_err());
}

#[test]
fn large_mode_asymptotics() {
    let mut r = rng(11);
    for _ in 0..20 {
        let p = random_params(&mut r);
        let fp = random_frozen(&mut r, &p);
        let m = 200.0;
        let want =
            -(fp.Delta_rho + fp.Delta_A) / (1.0 / (fp.beta2_plus * fp.D_plus) + 1.0 / (fp.beta2_minus * fp.D_minus));
        let got = lambda_symbol(&fp, 200, 0.0, &p).unwrap().re / m;
        assert!((got - want).abs() < 1e-6 * want.abs().max(1.0), "{got} vs {want}");
    }
}

#[test]
fn parabolicity_sign() {
    let stable = FluidParams::unit();
    let fp = flat_point(&stable, 1.0, 1.0);
    for m in (1..=64).chain(-64..=-1) {
        assert!(lambda_symbol(&fp, m, 0.0, &stable).unwrap().re < 0.0);
        assert!(phi_symbol(&fp, m, 0.0, &stable).unwrap().re < 0.0);
    }
    let reversed = FluidParams {
        rho_minus: 1.0,
        rho_plus: 2.0,
        ..stable
    };
    let fp = flat_point(&reversed, 1.0, 2.0);
    for m in 16..=64 {
        assert!(lambda_symbol(&fp, m, 0.0, &reversed).unwrap().re > 0.0);
    }
}

#[test]
fn region_checks_on_flat_states() {
    let p = FluidParams::unit();
    let grid = make_grid::<f64>(16).unwrap();
    let pair = InterfacePair::flat(grid, 0.0, 1.0, -1.0).unwrap();
    let sol = solve_potentials(&pair, &PeriodicFn::zeros(grid), &p, 8).unwrap();
    for sigma in [0.0, 0.1] {
        assert!(region_check_s(&pair, &sol, &p, sigma, SPairing::Printed).unwrap().ok);
        assert!(region_check_r(&pair, &sol, &p, sigma).unwrap().ok);
    }
    let rep = region_check_s(&pair, &sol, &p, 1.5, SPairing::Printed).unwrap();
    assert!(!rep.ok && rep.worst_margin < 0.0);
}

#[test]
fn marcinkiewicz_examples() {
    let seq: Vec<Complex<f64>> = (-50i64..=50).map(|m| Complex::new(-(m.abs() as f64), 0.0)).collect();
    let rep = marcinkiewicz_check(&seq, Complex::new(1.0, 0.0), 1).unwrap();
    assert!(rep.s1 < 1.0 && rep.s1 > 0.9);
    // resolvent pole inside the range
    assert!(marcinkiewicz_check(&seq, Complex::new(-3.0, 0.0), 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn negative_modes_give_conjugates(seed in 0u64..10_000, m in 1i64..64, tau in 0.0..=1.0f64) {
        let mut r = rng(seed);
        let p = random_params(&mut r);
        let fp = random_frozen(&mut r, &p);
        let pairs = [
            (lambda_symbol(&fp, m, tau, &p).unwrap(), lambda_symbol(&fp, -m, tau, &p).unwrap()),
            (phi_symbol(&fp, m, tau, &p).unwrap(), phi_symbol(&fp, -m, tau, &p).unwrap()),
            (Complex::new(lambda_st_symbol(&fp, m).unwrap(), 0.0), Complex::new(lambda_st_symbol(&fp, -m).unwrap(), 0.0)),
            (Complex::new(phi_st_symbol(&fp, m, &p).unwrap(), 0.0), Complex::new(phi_st_symbol(&fp, -m, &p).unwrap(), 0.0)),
        ];
        for (a, b) in pairs {
            prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0), "{a} {b}");
        }
    }

    #[test]
    fn untilted_symbols_are_real(seed in 0u64..10_000, m in 1i64..64) {
        let mut r = rng(seed);
        let p = random_params(&mut r);
        let fp = random_frozen(&mut r, &p);
        prop_assert_eq!(lambda_symbol(&fp, m, 0.0, &p).unwrap().im, 0.0);
        prop_assert_eq!(phi_symbol(&fp, m, 0.0, &p).unwrap().im, 0.0);
    }
}
