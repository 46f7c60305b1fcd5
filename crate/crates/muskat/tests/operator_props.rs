use muskat::geometry::{make_grid, spectral_derivative, InterfacePair, PeriodicFn};
use muskat::operators::{
    apply_operator, boundary_b_minus, coeffs_a_minus, coeffs_a_plus, frechet_a, frechet_b, pullback, FluidParams,
    FrechetA, FrechetB, Side, StripField, StripGrid,
};
use proptest::prelude::*;

fn wave(grid: muskat::geometry::PeriodicGrid<f64>, a: [f64; 3]) -> PeriodicFn<f64> {
    PeriodicFn::from_fn(grid, move |x| {
        a[0] * x.sin() + a[1] * (2.0 * x).cos() + a[2] * (3.0 * x).sin()
    })
}

fn pair_from(a: [f64; 3], b: [f64; 3], gap: f64) -> InterfacePair<f64> {
    let grid = make_grid::<f64>(32).unwrap();
    let f = wave(grid, a);
    let h = f.add(&wave(grid, b)).map(|v| v + gap);
    InterfacePair::new(f, h, -1.0).unwrap()
}

fn small() -> impl Strategy<Value = [f64; 3]> {
    [-0.1..0.1f64, -0.1..0.1f64, -0.05..0.05f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coefficients_are_elliptic(a in small(), b in small(), gap in 0.5..2.0f64) {
        let pair = pair_from(a, b, gap);
        let p = FluidParams::unit();
        let grid = pair.grid();
        let minus = coeffs_a_minus(&pair.f, &p, StripGrid::new(grid, 8, Side::Minus).unwrap()).unwrap();
        let plus = coeffs_a_plus(&pair.f, &pair.h, &p, StripGrid::new(grid, 8, Side::Plus).unwrap()).unwrap();
        prop_assert!(minus.is_elliptic());
        prop_assert!(plus.is_elliptic());
    }

    #[test]
    fn derivatives_are_linear_in_direction(a in small(), u in small(), w in small(), s in -2.0..2.0f64) {
        let pair = pair_from(a, [0.0; 3], 1.0);
        let grid = pair.grid();
        let p = FluidParams::unit();
        let (du, dw) = (wave(grid, u), wave(grid, w));
        let combo = du.axpy(s, &dw);
        let sp = StripGrid::new(grid, 8, Side::Plus).unwrap();
        let sm = StripGrid::new(grid, 8, Side::Minus).unwrap();
        for (which, strip) in [(FrechetA::MinusF, sm), (FrechetA::PlusF, sp), (FrechetA::PlusH, sp)] {
            let lhs = frechet_a(which, &pair, &combo, &p, strip).unwrap();
            let a1 = frechet_a(which, &pair, &du, &p, strip).unwrap();
            let a2 = frechet_a(which, &pair, &dw, &p, strip).unwrap();
            let rhs = a1.difference_quotient(&a2.difference_quotient(&muskat::operators::CoefficientField::zeros(strip), -1.0 / s), 1.0);
            // rhs = a1 + s·a2
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        }
        let vp = StripField::from_fn(sp, |x, y| (x + 2.0 * y).cos());
        let vm = StripField::from_fn(sm, |x, y| x.sin() * y);
        for (which, field) in [(FrechetB::BMinusF, &vm), (FrechetB::BPlusF, &vp), (FrechetB::BPlusH, &vp), (FrechetB::B1H, &vp)] {
            let lhs = frechet_b(which, &pair, &combo, &p, field).unwrap();
            let rhs = frechet_b(which, &pair, &du, &p, field).unwrap()
                .axpy(s, &frechet_b(which, &pair, &dw, &p, field).unwrap());
            prop_assert!(lhs.sub(&rhs).sup_norm() < 1e-10);
        }
    }
}

fn pullback_residuals(side: Side, u: impl Fn(f64, f64) -> f64 + Copy) -> Vec<f64> {
    [16usize, 32, 64]
        .iter()
        .map(|&n| {
            let grid = make_grid::<f64>(n).unwrap();
            let f = PeriodicFn::from_fn(grid, |x| 0.2 * x.sin());
            let h = PeriodicFn::from_fn(grid, |x| 1.0 + 0.1 * (2.0 * x).cos());
            let pair = InterfacePair::new(f.clone(), h.clone(), -1.0).unwrap();
            let strip = StripGrid::new(grid, n, side).unwrap();
            let p = FluidParams::unit();
            let coeffs = match side {
                Side::Minus => coeffs_a_minus(&f, &p, strip).unwrap(),
                Side::Plus => coeffs_a_plus(&f, &h, &p, strip).unwrap(),
            };
            apply_operator(&coeffs, &pullback(&pair, strip, u)).unwrap().sup_norm()
        })
        .collect()
}

#[test]
fn harmonic_library_pulls_back_to_kernel() {
    for side in [Side::Minus, Side::Plus] {
        for m in 1..=2 {
            let mf = m as f64;
            let library: [Box<dyn Fn(f64, f64) -> f64>; 2] = [
                Box::new(move |x, y| (mf * y).exp() * (mf * x).cos()),
                Box::new(move |x, y| (mf * y).exp() * (mf * x).sin()),
            ];
            for u in &library {
                let r = pullback_residuals(side, |x, y| u(x, y));
                assert!((r[1] / r[2]).log2() > 1.7, "{side:?} m={m}: {r:?}");
            }
        }
        let r = pullback_residuals(side, |_, y| 2.0 * y - 0.5);
        assert!((r[1] / r[2]).log2() > 1.7, "{side:?} affine: {r:?}");
    }
}

#[test]
fn lower_boundary_operator_is_a_scaled_normal_derivative() {
    let p = FluidParams {
        k: 1.5,
        mu_minus: 0.7,
        ..FluidParams::unit()
    };
    let mut errs = Vec::new();
    for n in [32usize, 64] {
        let grid = make_grid::<f64>(n).unwrap();
        let f = PeriodicFn::from_fn(grid, |x| 0.2 * x.sin() + 0.05 * (2.0 * x).cos());
        let pair = InterfacePair::new(f.clone(), PeriodicFn::constant(grid, 1.5), -1.0).unwrap();
        let strip = StripGrid::new(grid, n, Side::Minus).unwrap();
        let v = pullback(&pair, strip, |x, y| y.exp() * x.cos());
        let got = boundary_b_minus(&f, &p, &v).unwrap();
        let f1 = spectral_derivative(&f, 1).unwrap();
        let exact = PeriodicFn::new(
            grid,
            (0..n)
                .map(|i| {
                    let (x, fy, s) = (grid.node(i), f.values()[i], f1.values()[i]);
                    p.k / p.mu_minus * (fy.exp() * x.cos() + s * fy.exp() * x.sin())
                })
                .collect(),
        )
        .unwrap();
        errs.push(got.sub(&exact).sup_norm());
    }
    assert!(errs[1] < 1e-3, "{errs:?}");
    assert!((errs[0] / errs[1]).log2() > 1.7, "{errs:?}");
}
