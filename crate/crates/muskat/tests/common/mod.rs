#![allow(dead_code)]

use muskat::operators::FluidParams;
use muskat::symbols::{FrozenPoint, LocalState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_params(r: &mut ChaCha8Rng) -> FluidParams<f64> {
    FluidParams {
        k: r.random_range(0.5..2.0),
        mu_minus: r.random_range(0.5..2.0),
        mu_plus: r.random_range(0.5..2.0),
        rho_minus: r.random_range(0.5..3.0),
        rho_plus: r.random_range(0.5..3.0),
        g: r.random_range(0.5..2.0),
        gamma_f: r.random_range(0.0..1.0),
        gamma_h: r.random_range(0.0..1.0),
        d: -1.0,
    }
}

/// Frozen point built from random but mutually consistent point values.
pub fn random_frozen(r: &mut ChaCha8Rng, params: &FluidParams<f64>) -> FrozenPoint<f64> {
    let f = r.random_range(-0.5..0.5);
    let local = LocalState {
        f,
        h: f + r.random_range(0.3..2.0),
        d: f - r.random_range(0.3..2.0),
        f_slope: r.random_range(-1.0..1.0),
        h_slope: r.random_range(-1.0..1.0),
        tr0_dy_vminus: r.random_range(-1.0..1.0),
        tr0_dx_vminus: r.random_range(-1.0..1.0),
        tr0_dy_vplus: r.random_range(-1.0..1.0),
        tr0_dx_vplus: r.random_range(-1.0..1.0),
        tr1_dy_vplus: r.random_range(-1.0..1.0),
        tr1_dx_vplus: r.random_range(-1.0..1.0),
    };
    FrozenPoint::from_local(local, &FluidParams { d: local.d, ..*params }).unwrap()
}

pub fn report(n: u32, name: &str, ok: bool, detail: &str) {
    println!(
        "[acceptance] criterion {n:>2} {name}: {} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
}
