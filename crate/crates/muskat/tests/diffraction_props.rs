use muskat::diffraction::{
    check_complementing, solve_general, solve_potentials, solve_potentials_st, strips_for, ComplementingInput,
    DiffractionData,
};
use muskat::geometry::{curvature, make_grid, InterfacePair, PeriodicFn};
use muskat::operators::{
    boundary_op_minus, boundary_op_plus, coeffs_a_minus, coeffs_a_plus, pullback, FluidParams, StripField,
};
use proptest::prelude::*;

fn wavy_pair(n: usize, amp: f64) -> InterfacePair<f64> {
    let grid = make_grid::<f64>(n).unwrap();
    InterfacePair::new(
        PeriodicFn::from_fn(grid, |x| amp * x.sin()),
        PeriodicFn::from_fn(grid, |x| 1.0 + 0.5 * amp * (2.0 * x).cos()),
        -1.0,
    )
    .unwrap()
}

fn params() -> FluidParams<f64> {
    FluidParams {
        k: 1.2,
        mu_minus: 0.8,
        mu_plus: 1.5,
        rho_minus: 2.5,
        rho_plus: 1.1,
        g: 0.9,
        gamma_f: 0.3,
        gamma_h: 0.4,
        d: -1.0,
    }
}

#[test]
fn zero_data_gives_zero_solution() {
    let pair = wavy_pair(32, 0.2);
    let p = FluidParams { g: 0.0, ..params() };
    let sol = solve_potentials(&pair, &PeriodicFn::zeros(pair.grid()), &p, 16).unwrap();
    assert!(sol.v_plus.sup_norm() < 1e-10 && sol.v_minus.sup_norm() < 1e-10);
}

#[test]
fn flux_and_jump_conditions_hold() {
    let pair = wavy_pair(32, 0.2);
    let p = params();
    let b = PeriodicFn::from_fn(pair.grid(), |x| 1.0 + 0.3 * x.cos());
    for st in [false, true] {
        let sol = if st {
            solve_potentials_st(&pair, &b, &p, 16).unwrap()
        } else {
            solve_potentials(&pair, &b, &p, 16).unwrap()
        };
        let scale = sol.v_plus.sup_norm().max(sol.v_minus.sup_norm()).max(1.0);
        let flux = boundary_op_plus(&pair.f, &pair.h, &p)
            .unwrap()
            .apply(&sol.v_plus)
            .unwrap()
            .sub(&boundary_op_minus(&pair.f, &p).unwrap().apply(&sol.v_minus).unwrap());
        assert!(flux.sup_norm() < 1e-8 * scale, "flux {}", flux.sup_norm());
        let mut jump = pair.f.scale(p.g * (p.rho_plus - p.rho_minus));
        if st {
            jump = jump.axpy(p.gamma_f, &curvature(&pair.f));
        }
        let got = sol.v_plus.level(0).sub(&sol.v_minus.level(sol.n_y()));
        assert!(got.sub(&jump).sup_norm() < 1e-10 * scale);
        assert!(sol.v_minus.level(0).sub(&b).sup_norm() < 1e-10 * scale);
    }
}

#[test]
fn flat_solution_obeys_maximum_principle() {
    let grid = make_grid::<f64>(32).unwrap();
    let pair = InterfacePair::flat(grid, 0.0, 1.0, -1.0).unwrap();
    let p = FluidParams::unit();
    let b = PeriodicFn::from_fn(grid, |x| 1.0 + 0.5 * x.cos() + 0.2 * (3.0 * x).sin());
    let sol = solve_potentials(&pair, &b, &p, 16).unwrap();
    let boundary = sol
        .v_minus
        .level(0)
        .values()
        .iter()
        .chain(sol.v_plus.level(sol.n_y()).values())
        .copied()
        .collect::<Vec<_>>();
    let (lo, hi) = boundary
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    for v in sol.v_minus.values.iter().chain(&sol.v_plus.values) {
        assert!(*v <= hi + 1e-8 && *v >= lo - 1e-8);
    }
}

/// Error of the discrete solution for smooth harmonic potentials on a
/// curved geometry, data taken from the exact fields.
fn manufactured_error(n: usize) -> f64 {
    let pair = wavy_pair(n, 0.15);
    let p = params();
    let (sp, sm) = strips_for(&pair, n / 2).unwrap();
    let vp = pullback(&pair, sp, |x, y| y.exp() * x.cos() + 0.5 * y);
    let vm = pullback(&pair, sm, |x, y| (2.0 * y).exp() * (2.0 * x).sin() - y);
    let b_plus = boundary_op_plus(&pair.f, &pair.h, &p).unwrap();
    let b_minus = boundary_op_minus(&pair.f, &p).unwrap();
    let data = DiffractionData {
        f_plus: StripField::zeros(sp),
        f_minus: StripField::zeros(sm),
        phi1: b_plus.apply(&vp).unwrap().sub(&b_minus.apply(&vm).unwrap()),
        phi2: vp.level(0).sub(&vm.level(n / 2)),
        phi3: vp.level(n / 2),
        phi4: vm.level(0),
        op_plus: coeffs_a_plus(&pair.f, &pair.h, &p, sp).unwrap(),
        op_minus: coeffs_a_minus(&pair.f, &p, sm).unwrap(),
        b_plus,
        b_minus,
    };
    let sol = solve_general(&data).unwrap();
    sol.v_plus.sub(&vp).sup_norm().max(sol.v_minus.sub(&vm).sup_norm())
}

#[test]
fn manufactured_solutions_converge_at_second_order() {
    let e: Vec<f64> = [16, 32, 64].iter().map(|&n| manufactured_error(n)).collect();
    for w in e.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() < 0.4, "errors {e:?}");
    }
}

#[test]
fn inadmissible_geometry_is_rejected() {
    let grid = make_grid::<f64>(16).unwrap();
    let pair = InterfacePair {
        f: PeriodicFn::zeros(grid),
        h: PeriodicFn::zeros(grid),
        d: -1.0,
    };
    assert!(solve_potentials(&pair, &PeriodicFn::zeros(grid), &params(), 8).is_err());
}

fn elliptic() -> impl Strategy<Value = ComplementingInput<f64>> {
    (0.1..5.0f64, 0.1..5.0f64, -0.99..0.99f64, -5.0..5.0f64, 0.01..5.0f64).prop_map(|(a11, a22, r, beta1, beta2)| {
        ComplementingInput {
            a11,
            a12: r * (a11 * a22).sqrt(),
            a22,
            beta1,
            beta2,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn complementing_quantity_is_positive(
        a in elliptic(),
        b in elliptic(),
        xi in prop_oneof![0.01..10.0f64, -10.0..-0.01f64],
        tau in 0.0..=1.0f64,
    ) {
        let rep = check_complementing([a, b], xi, tau).unwrap();
        prop_assert!(rep.satisfied(), "{rep:?}");
    }
}
