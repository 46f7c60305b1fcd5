//! Self-check suite run by `muskat verify`.

use muskat::diffraction::{check_complementing, solve_general, solve_potentials, ComplementingInput, DiffractionData};
use muskat::geometry::{make_grid, InterfacePair, PeriodicFn};
use muskat::operators::{
    apply_operator, boundary_map, boundary_op_minus, boundary_op_plus, coefficient_map, coeffs_a_minus, coeffs_a_plus,
    frechet_a, frechet_b, pullback, FluidParams, FrechetA, FrechetB, Side, StripField, StripGrid,
};
use muskat::symbols::{lambda_symbol, ode_oracle_lambda, ode_oracle_phi, phi_symbol, FrozenPoint, LocalState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = muskat::Result<CheckResult>;

fn result(name: &'static str, passed: bool, detail: String) -> Check {
    Ok(CheckResult { name, passed, detail })
}

fn base_params() -> FluidParams<f64> {
    FluidParams {
        k: 1.2,
        mu_minus: 0.9,
        mu_plus: 1.4,
        ..FluidParams::unit()
    }
}

fn harmonic_pullback(quick: bool) -> Check {
    let sizes: &[usize] = if quick { &[16, 32] } else { &[16, 32, 64] };
    let mut worst: f64 = f64::INFINITY;
    for m in 1..=3 {
        let mut res = Vec::new();
        for &n in sizes {
            let grid = make_grid::<f64>(n)?;
            let f = PeriodicFn::from_fn(grid, |x| 0.2 * x.sin());
            let pair = InterfacePair::new(f.clone(), PeriodicFn::constant(grid, 1.5), -1.0)?;
            let strip = StripGrid::new(grid, n, Side::Minus)?;
            let u = pullback(&pair, strip, |x, y| (m as f64 * y).exp() * (m as f64 * x).cos());
            res.push(apply_operator(&coeffs_a_minus(&f, &FluidParams::unit(), strip)?, &u)?.sup_norm());
        }
        for w in res.windows(2) {
            worst = worst.min((w[0] / w[1]).log2());
        }
    }
    result(
        "harmonic pullback",
        worst >= 1.7,
        format!("min observed order {worst:.3}"),
    )
}

fn manufactured() -> Check {
    let grid = make_grid::<f64>(32)?;
    let f = PeriodicFn::from_fn(grid, |x| 0.15 * x.sin() + 0.05 * (2.0 * x).cos());
    let h = PeriodicFn::from_fn(grid, |x| 1.0 + 0.1 * x.cos());
    let p = base_params();
    let sp = StripGrid::new(grid, 16, Side::Plus)?;
    let sm = StripGrid::new(grid, 16, Side::Minus)?;
    let op_plus = coeffs_a_plus(&f, &h, &p, sp)?;
    let op_minus = coeffs_a_minus(&f, &p, sm)?;
    let b_plus = boundary_op_plus(&f, &h, &p)?;
    let b_minus = boundary_op_minus(&f, &p)?;
    let vp = StripField::from_fn(sp, |x, y| (2.0 * x).cos() * y.exp() + 0.3);
    let vm = StripField::from_fn(sm, |x, y| (x + y).sin() + y * y);
    let data = DiffractionData {
        f_plus: apply_operator(&op_plus, &vp)?,
        f_minus: apply_operator(&op_minus, &vm)?,
        phi1: b_plus.apply(&vp)?.sub(&b_minus.apply(&vm)?),
        phi2: vp.level(0).sub(&vm.level(16)),
        phi3: vp.level(16),
        phi4: vm.level(0),
        op_plus,
        op_minus,
        b_plus,
        b_minus,
    };
    let sol = solve_general(&data)?;
    let err = sol.v_plus.sub(&vp).sup_norm().max(sol.v_minus.sub(&vm).sup_norm());
    result(
        "manufactured solution",
        err < 1e-12,
        format!("recovery error {err:.2e}"),
    )
}

fn frechet() -> Check {
    let grid = make_grid::<f64>(32)?;
    let p = base_params();
    let base = InterfacePair::new(
        PeriodicFn::from_fn(grid, |x| 0.2 * x.sin() + 0.05 * (3.0 * x).cos()),
        PeriodicFn::from_fn(grid, |x| 1.2 + 0.1 * (2.0 * x).cos()),
        -1.0,
    )?;
    let dir = PeriodicFn::from_fn(grid, |x| 0.3 * x.cos() - 0.2 * (2.0 * x).sin());
    let sp = StripGrid::new(grid, 16, Side::Plus)?;
    let sm = StripGrid::new(grid, 16, Side::Minus)?;
    let vp = StripField::from_fn(sp, |x, y| (x - y).sin() + 0.5 * y);
    let vm = StripField::from_fn(sm, |x, y| (2.0 * x).cos() * (1.0 + y) + y);
    let moved = |on_h: bool, eps: f64| {
        if on_h {
            InterfacePair::new(base.f.clone(), base.h.axpy(eps, &dir), base.d)
        } else {
            InterfacePair::new(base.f.axpy(eps, &dir), base.h.clone(), base.d)
        }
    };
    let eps = [1e-3, 5e-4, 2.5e-4];
    let mut slopes = Vec::new();
    for (which, strip, on_h) in [
        (FrechetA::MinusF, sm, false),
        (FrechetA::PlusF, sp, false),
        (FrechetA::PlusH, sp, true),
    ] {
        let exact = frechet_a(which, &base, &dir, &p, strip)?;
        let c0 = coefficient_map(which, &base, &p, strip)?;
        let mut e = Vec::new();
        for &ep in &eps {
            let c1 = coefficient_map(which, &moved(on_h, ep)?, &p, strip)?;
            e.push(c1.difference_quotient(&c0, ep).max_abs_diff(&exact));
        }
        slopes.extend(e.windows(2).map(|w| (w[0] / w[1]).log2()));
    }
    for (which, field, on_h) in [
        (FrechetB::BMinusF, &vm, false),
        (FrechetB::BPlusF, &vp, false),
        (FrechetB::BPlusH, &vp, true),
        (FrechetB::B1H, &vp, true),
    ] {
        let exact = frechet_b(which, &base, &dir, &p, field)?;
        let b0 = boundary_map(which, &base, &p, field)?;
        let mut e = Vec::new();
        for &ep in &eps {
            let b1 = boundary_map(which, &moved(on_h, ep)?, &p, field)?;
            e.push(b1.sub(&b0).scale(1.0 / ep).sub(&exact).sup_norm());
        }
        slopes.extend(e.windows(2).map(|w| (w[0] / w[1]).log2()));
    }
    let worst = slopes.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
    result(
        "derivative consistency",
        worst <= 0.2,
        format!("max |slope - 1| = {worst:.3} over 7 operators"),
    )
}

fn random_point(r: &mut ChaCha8Rng) -> muskat::Result<(FrozenPoint<f64>, FluidParams<f64>)> {
    let f = r.random_range(-0.5..0.5);
    let d = f - r.random_range(0.3..2.0);
    let h = f + r.random_range(0.3..2.0);
    let p = FluidParams {
        k: r.random_range(0.5..2.0),
        mu_minus: r.random_range(0.5..2.0),
        mu_plus: r.random_range(0.5..2.0),
        rho_minus: r.random_range(0.5..3.0),
        rho_plus: r.random_range(0.5..3.0),
        g: r.random_range(0.5..2.0),
        gamma_f: 0.0,
        gamma_h: 0.0,
        d,
    };
    let mut t = || r.random_range(-1.0..1.0);
    let local = LocalState {
        f,
        h,
        d,
        f_slope: t(),
        h_slope: t(),
        tr0_dy_vminus: t(),
        tr0_dx_vminus: t(),
        tr0_dy_vplus: t(),
        tr0_dx_vplus: t(),
        tr1_dy_vplus: t(),
        tr1_dx_vplus: t(),
    };
    Ok((FrozenPoint::from_local(local, &p)?, p))
}

fn symbols_vs_oracle(quick: bool) -> Check {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    let points = if quick { 20 } else { 100 };
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let (fp, p) = random_point(&mut r)?;
        for m in 1..=32 {
            worst = worst
                .max((lambda_symbol(&fp, m, 0.0, &p)? - ode_oracle_lambda(&fp, m, 0.0, &p)?.symbol_value).norm())
                .max((phi_symbol(&fp, m, 0.0, &p)? - ode_oracle_phi(&fp, m, 0.0, &p)?.symbol_value).norm());
        }
    }
    result(
        "symbols vs oracle",
        worst < 1e-9,
        format!("{points} points, max difference {worst:.2e}"),
    )
}

fn complementing(quick: bool) -> Check {
    let mut r = ChaCha8Rng::seed_from_u64(9);
    let cases = if quick { 1_000 } else { 10_000 };
    let mut min_q = f64::INFINITY;
    for _ in 0..cases {
        let mut op = || {
            let a11: f64 = r.random_range(0.1..5.0);
            let a22: f64 = r.random_range(0.1..5.0);
            ComplementingInput {
                a11,
                a12: r.random_range(-0.99..0.99) * (a11 * a22).sqrt(),
                a22,
                beta1: r.random_range(-5.0..5.0),
                beta2: r.random_range(0.01..5.0),
            }
        };
        let ops = [op(), op()];
        let xi = r.random_range(0.01..10.0) * if r.random_bool(0.5) { 1.0 } else { -1.0 };
        let tau = r.random_range(0.0..=1.0);
        min_q = min_q.min(check_complementing(ops, xi, tau)?.quantity);
    }
    result(
        "complementing condition",
        min_q > 0.0,
        format!("{cases} cases, min quantity {min_q:.3e}"),
    )
}

fn rt_flat() -> Check {
    let grid = make_grid::<f64>(16)?;
    let pair = InterfacePair::flat(grid, 0.0, 1.0, -1.0)?;
    let p = FluidParams::unit();
    let sol = solve_potentials(&pair, &PeriodicFn::zeros(grid), &p, 8)?;
    let rep = muskat::evolution::rayleigh_taylor_from_solution(&pair, &sol, &p)?;
    let err = (rep.margin_f - 1.0).abs().max((rep.margin_h - 0.5).abs());
    result(
        "flat RT margins",
        err < 1e-9 && rep.satisfied,
        format!("margin error {err:.2e}"),
    )
}

/// Runs every check; a check that errors counts as failed.
pub fn run(quick: bool) -> Vec<CheckResult> {
    let checks: Vec<(&'static str, Box<dyn Fn() -> Check>)> = vec![
        ("harmonic pullback", Box::new(move || harmonic_pullback(quick))),
        ("manufactured solution", Box::new(manufactured)),
        ("derivative consistency", Box::new(frechet)),
        ("symbols vs oracle", Box::new(move || symbols_vs_oracle(quick))),
        ("complementing condition", Box::new(move || complementing(quick))),
        ("flat RT margins", Box::new(rt_flat)),
    ];
    checks
        .into_iter()
        .map(|(name, check)| {
            check().unwrap_or_else(|e| CheckResult {
                name,
                passed: false,
                detail: e.to_string(),
            })
        })
        .collect()
}

pub fn table(results: &[CheckResult]) -> String {
    let mut s = format!("{:<26} {:<6} detail\n", "check", "result");
    for r in results {
        s += &format!(
            "{:<26} {:<6} {}\n",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail
        );
    }
    s
}
