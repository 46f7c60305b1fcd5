//! Frozen-coefficient Fourier symbols of the linearized evolution.
//!
//! Freezing the coefficients of the principal operators at a point `x`
//! turns the linearized problems into constant-coefficient ODEs in `y` for
//! each Fourier mode `m`. The closed-form multipliers are evaluated as
//! printed; [`ode_oracle_lambda`] and [`ode_oracle_phi`] solve the mode ODEs
//! directly as an independent check.

use num_complex::Complex;

use crate::diffraction::DiffractionSolution;
use crate::error::{domain, invalid, Error, Result};
use crate::geometry::{spectral_derivative, InterfacePair, PeriodicFn};
use crate::operators::FluidParams;
use crate::scalar::Real;

/// Point values needed to freeze the coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalState<T> {
    pub f: T,
    pub h: T,
    pub d: T,
    pub f_slope: T,
    pub h_slope: T,
    pub tr0_dy_vminus: T,
    pub tr0_dx_vminus: T,
    pub tr0_dy_vplus: T,
    pub tr0_dx_vplus: T,
    pub tr1_dy_vplus: T,
    pub tr1_dx_vplus: T,
}

/// Frozen constants at one point. `*_plus`/`*_minus` refer to the operators
/// at `Γ₀` on either strip, `*_top` to the upper strip operator at `Γ₁`.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenPoint<T> {
    pub a_plus: T,
    pub a_minus: T,
    pub b_plus: T,
    pub b_minus: T,
    pub D_plus: T,
    pub D_minus: T,
    pub beta1_plus: T,
    pub beta1_minus: T,
    pub beta2_plus: T,
    pub beta2_minus: T,
    pub A_plus: T,
    pub A_minus: T,
    pub B: T,
    pub Delta_rho: T,
    pub Delta_A: T,
    pub a_top: T,
    pub b_top: T,
    pub D_top: T,
    pub V: T,
    pub V_f: T,
    pub V_h: T,
    /// The point values the constants were built from.
    pub local: LocalState<T>,
}

impl<T: Real> FrozenPoint<T> {
    /// Builds every constant from point values of the interfaces and traces.
    pub fn from_local(local: LocalState<T>, params: &FluidParams<T>) -> Result<Self> {
        let one = T::one();
        let two = T::lit(2.0);
        let l = local;
        let gfd = l.f - l.d;
        let ghf = l.h - l.f;
        if !(gfd > T::zero() && ghf > T::zero()) {
            return domain("frozen point requires d < f < h");
        }
        let qf = one + l.f_slope * l.f_slope;
        let qh = one + l.h_slope * l.h_slope;
        let a_minus = -l.f_slope * gfd / qf;
        let b_minus = gfd * gfd / qf;
        let a_plus = -l.f_slope * ghf / qf;
        let b_plus = ghf * ghf / qf;
        let a_top = -l.h_slope * ghf / qh;
        let b_top = ghf * ghf / qh;
        let km = params.k / params.mu_minus;
        let kp = params.k / params.mu_plus;
        let a_p = l.tr0_dy_vplus / ghf;
        let a_m = l.tr0_dy_vminus / gfd;
        let fp = Self {
            a_plus,
            a_minus,
            b_plus,
            b_minus,
            D_plus: (b_plus - a_plus * a_plus).sqrt(),
            D_minus: (b_minus - a_minus * a_minus).sqrt(),
            beta1_plus: -kp * l.f_slope,
            beta1_minus: -km * l.f_slope,
            beta2_plus: kp * qf / ghf,
            beta2_minus: km * qf / gfd,
            A_plus: a_p,
            A_minus: a_m,
            B: km * (two * l.f_slope * l.tr0_dy_vminus / gfd - l.tr0_dx_vminus)
                - kp * (two * l.f_slope * l.tr0_dy_vplus / ghf - l.tr0_dx_vplus),
            Delta_rho: params.g * (params.rho_minus - params.rho_plus),
            Delta_A: a_p - a_m,
            a_top,
            b_top,
            D_top: (b_top - a_top * a_top).sqrt(),
            V: l.tr1_dy_vplus / ghf,
            V_f: params.gamma_f * qf.powf(T::lit(-1.5)),
            V_h: params.gamma_h * qh.powf(T::lit(-1.5)),
            local,
        };
        fp.validate()?;
        Ok(fp)
    }

    pub fn validate(&self) -> Result<()> {
        for (b, a, d) in [
            (self.b_plus, self.a_plus, self.D_plus),
            (self.b_minus, self.a_minus, self.D_minus),
            (self.b_top, self.a_top, self.D_top),
        ] {
            if !(b - a * a > T::zero()) || d != (b - a * a).sqrt() {
                return domain("frozen point violates b - a^2 > 0, D = sqrt(b - a^2)");
            }
        }
        if !(self.beta2_plus > T::zero() && self.beta2_minus > T::zero()) {
            return domain("beta2 must be positive");
        }
        Ok(())
    }
}

/// Freezes the coefficients of the linearization at `base` at the point `x`
/// (interfaces and traces are interpolated trigonometrically).
pub fn frozen_constants(
    base: &InterfacePair<f64>,
    base_solution: &DiffractionSolution,
    params: &FluidParams<f64>,
    x: f64,
) -> Result<FrozenPoint<f64>> {
    let rep = base.admissibility();
    if !rep.ok {
        return domain("base interfaces not admissible");
    }
    let s = base_solution;
    let local = LocalState {
        f: base.f.eval(x),
        h: base.h.eval(x),
        d: base.d,
        f_slope: spectral_derivative(&base.f, 1)?.eval(x),
        h_slope: spectral_derivative(&base.h, 1)?.eval(x),
        tr0_dy_vminus: s.tr0_dy_vminus.eval(x),
        tr0_dx_vminus: s.tr0_dx_vminus.eval(x),
        tr0_dy_vplus: s.tr0_dy_vplus.eval(x),
        tr0_dx_vplus: s.tr0_dx_vplus.eval(x),
        tr1_dy_vplus: s.tr1_dy_vplus.eval(x),
        tr1_dx_vplus: s.tr1_dx_vplus.eval(x),
    };
    FrozenPoint::from_local(local, &FluidParams { d: base.d, ..*params })
}

fn nonzero_mode(m: i64) -> Result<()> {
    if m == 0 {
        return invalid("symbols are defined for m != 0");
    }
    Ok(())
}

/// `1/cosh x` without overflow.
fn sech<T: Real>(x: T) -> T {
    let e = (-x.abs()).exp();
    T::lit(2.0) * e / (T::one() + e * e)
}

/// `x/sinh(c·x)` for `c > 0`, finite at every `x ≠ 0`.
fn x_over_sinh<T: Real>(x: T, c: T) -> T {
    let z = (c * x).abs();
    let e = (-z).exp();
    x.abs() * T::lit(2.0) * e / (T::one() - e * e) * x.signum() * (c * x).signum()
}

/// `tanh(Dm)/(β₂·D·m)` summed over both strips.
fn s_factor<T: Real>(fp: &FrozenPoint<T>, m: T) -> T {
    (fp.D_plus * m).tanh() / (fp.beta2_plus * fp.D_plus * m)
        + (fp.D_minus * m).tanh() / (fp.beta2_minus * fp.D_minus * m)
}

fn check_tau<T: Real>(tau: T) -> Result<()> {
    if !(tau >= T::zero() && tau <= T::one()) {
        return invalid("tau must lie in [0, 1]");
    }
    Ok(())
}

/// Closed-form multiplier of the lower-interface linearization.
pub fn lambda_symbol<T: Real>(fp: &FrozenPoint<T>, m: i64, tau: T, params: &FluidParams<T>) -> Result<Complex<T>> {
    nonzero_mode(m)?;
    check_tau(tau)?;
    let mm = T::of_i64(m);
    let s_inv = s_factor(fp, mm).recip();
    let (dp, dm) = (fp.D_plus * mm, fp.D_minus * mm);
    let re = -s_inv
        * (fp.Delta_rho + fp.Delta_A + tau * fp.A_minus * dm.cos() * sech(dm) - tau * fp.A_plus * dp.cos() * sech(dp));
    let l = &fp.local;
    let im = tau * params.k / params.mu_minus
        * (fp.a_minus * l.tr0_dy_vminus / (fp.a_minus * fp.a_minus + fp.D_minus * fp.D_minus) + l.tr0_dx_vminus)
        * mm
        + tau * s_inv * (fp.A_minus * dm.sin() * sech(dm) + fp.A_plus * dp.sin() * sech(dp))
        - tau * s_inv * dp.tanh() / (fp.beta2_plus * fp.D_plus)
            * (fp.beta1_plus * fp.A_plus - fp.beta1_minus * fp.A_minus - fp.B);
    Ok(Complex::new(re, im))
}

/// Closed-form multiplier of the upper-interface linearization.
pub fn phi_symbol<T: Real>(fp: &FrozenPoint<T>, m: i64, tau: T, params: &FluidParams<T>) -> Result<Complex<T>> {
    nonzero_mode(m)?;
    check_tau(tau)?;
    let mm = T::of_i64(m);
    let kp = params.k / params.mu_plus;
    let (a, d, v) = (fp.a_top, fp.D_top, fp.V);
    let grho = params.g * params.rho_plus;
    let mu = kp * (grho - v) * mm / (d * mm).tanh();
    let m_csch = x_over_sinh(mm, d);
    let nu = tau * kp * v * (a * mm).cos() * m_csch;
    let im = tau * kp * (a * ((T::lit(2.0) - tau) * v - grho) * mm / d + v * (a * mm).sin() * m_csch);
    Ok(Complex::new(-mu - nu, im))
}

/// Capillary multiplier on the lower interface.
pub fn lambda_st_symbol<T: Real>(fp: &FrozenPoint<T>, m: i64) -> Result<T> {
    nonzero_mode(m)?;
    let mm = T::of_i64(m);
    Ok(-fp.V_f * mm * mm / s_factor(fp, mm))
}

/// Capillary multiplier on the upper interface.
pub fn phi_st_symbol<T: Real>(fp: &FrozenPoint<T>, m: i64, params: &FluidParams<T>) -> Result<T> {
    nonzero_mode(m)?;
    let mm = T::of_i64(m);
    Ok(-(params.k * fp.V_h / params.mu_plus) * mm * mm * mm / (fp.D_top * mm).tanh())
}

/// Coefficients and symbol obtained from the mode ODE.
///
/// `coefficients[s]` holds `(ξ₁, ξ₂, ξ₃, ξ₄)` of strip `s` (plus then minus
/// for the two-strip problem, a single entry for the upper one).
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolODESolution<T> {
    pub coefficients: Vec<[T; 4]>,
    pub symbol_value: Complex<T>,
    /// Largest boundary-condition residual of the reconstructed profiles,
    /// relative to the size of the terms in each condition.
    pub residual: T,
}

/// Gaussian elimination with partial pivoting on a dense square system.
fn solve_dense<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Result<Vec<T>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(T::zero(), |s, v| s.max(v.abs()));
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if !(a[piv][col].abs() > T::epsilon() * scale * T::of_usize(n)) {
            return Err(Error::SolverFailure {
                message: "singular mode system".into(),
                condition: f64::INFINITY,
            });
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            if factor != T::zero() {
                for c in col..n {
                    let v = a[col][c];
                    a[r][c] = a[r][c] - factor * v;
                }
                let v = b[col];
                b[r] = b[r] - factor * v;
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for r in (0..n).rev() {
        let s = (r + 1..n).fold(b[r], |s, c| s - a[r][c] * x[c]);
        x[r] = s / a[r][r];
    }
    Ok(x)
}

/// Solves a complex square system through its real 2n×2n form.
fn solve_complex<T: Real>(m: &[Vec<Complex<T>>], rhs: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let n = rhs.len();
    let mut a = vec![vec![T::zero(); 2 * n]; 2 * n];
    let mut b = vec![T::zero(); 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = m[i][j];
            a[i][j] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
            a[i + n][j + n] = z.re;
        }
        b[i] = rhs[i].re;
        b[i + n] = rhs[i].im;
    }
    let x = solve_dense(a, b)?;
    Ok((0..n).map(|i| Complex::new(x[i], x[i + n])).collect())
}

/// Mode basis at `y = ±1`, divided by `cosh(D m)` when `|D m|` is large.
/// Returns `(E₁, E₂, scale)` with `E₁(0) = 1, E₁'(0) = 0, E₂(0) = 0,
/// E₂'(0) = 1` and `scale` the factor applied.
fn basis_at_end<T: Real>(a: T, d: T, m: T, sign: T) -> (Complex<T>, Complex<T>, T) {
    let dm = d * m;
    let phase = Complex::new(T::zero(), -a * m * sign).exp();
    let i = Complex::new(T::zero(), T::one());
    if dm.abs() > T::lit(30.0) {
        let th = dm.tanh();
        let e1 = phase * (Complex::new(T::one(), T::zero()) + i * (a / d) * th * sign);
        let e2 = phase * (th * sign / dm);
        (e1, e2, sech(dm))
    } else {
        let (c, s) = (dm.cosh(), (dm * sign).sinh());
        let e1 = phase * (Complex::new(c, T::zero()) + i * (a / d) * s);
        let e2 = phase * (s / dm);
        (e1, e2, T::one())
    }
}

fn split<T: Real>(z: Complex<T>, e: Complex<T>) -> [T; 4] {
    [z.re, e.re, z.im, e.im]
}

/// Solves the two-strip mode problem for the lower-interface linearization
/// and returns the resulting multiplier.
pub fn ode_oracle_lambda<T: Real>(
    fp: &FrozenPoint<T>,
    m: i64,
    tau: T,
    params: &FluidParams<T>,
) -> Result<SymbolODESolution<T>> {
    nonzero_mode(m)?;
    check_tau(tau)?;
    let mm = T::of_i64(m);
    let zero = Complex::new(T::zero(), T::zero());
    let re = |v: T| Complex::new(v, T::zero());
    let im_m = Complex::new(T::zero(), mm);
    let (e1p, e2p, sp) = basis_at_end(fp.a_plus, fp.D_plus, mm, T::one());
    let (e1m, e2m, sm) = basis_at_end(fp.a_minus, fp.D_minus, mm, -T::one());
    let (tap, tam) = (tau * fp.A_plus, tau * fp.A_minus);
    // unknowns: c₊, e₊, c₋, e₋ with A = c·E₁ + e·E₂ + τA±
    let matrix = vec![
        vec![e1p, e2p, zero, zero],
        vec![zero, zero, e1m, e2m],
        vec![re(T::one()), zero, re(-T::one()), zero],
        vec![
            im_m * fp.beta1_plus,
            re(fp.beta2_plus),
            -im_m * fp.beta1_minus,
            re(-fp.beta2_minus),
        ],
    ];
    let rhs = vec![
        re(-tap * sp),
        re(-tam * sm),
        re(-(fp.Delta_rho + (T::one() - tau) * fp.Delta_A) - tap + tam),
        im_m * (tau * fp.B) - im_m * fp.beta1_plus * tap + im_m * fp.beta1_minus * tam,
    ];
    let z = solve_complex(&matrix, &rhs)?;
    let (cp, ep, cm, em) = (z[0], z[1], z[2], z[3]);

    // rows 1-2 are relative to the size of their terms, which grow like cosh(Dm)
    let rel =
        |a: Complex<T>, b: Complex<T>, c: Complex<T>| (a + b + c).norm() / T::one().max(a.norm() + b.norm() + c.norm());
    let residuals = [
        rel(cp * e1p, ep * e2p, re(tap * sp)),
        rel(cm * e1m, em * e2m, re(tam * sm)),
        ((cp + tap) - (cm + tam) + fp.Delta_rho + (T::one() - tau) * fp.Delta_A).norm(),
        (im_m * (cp + tap) * fp.beta1_plus - im_m * (cm + tam) * fp.beta1_minus + ep * fp.beta2_plus
            - em * fp.beta2_minus
            - im_m * (tau * fp.B))
            .norm(),
    ];
    let residual = residuals.iter().fold(T::zero(), |a, &b| a.max(b));

    let l = &fp.local;
    let two = T::lit(2.0);
    let drift = params.k / params.mu_minus * (two * l.f_slope * l.tr0_dy_vminus / (l.f - l.d) - l.tr0_dx_vminus);
    let symbol = -(im_m * (tau * drift)) - (em * fp.beta2_minus + im_m * (cm + tam) * fp.beta1_minus);
    Ok(SymbolODESolution {
        coefficients: vec![split(cp, ep), split(cm, em)],
        symbol_value: symbol,
        residual,
    })
}

/// Solves the single-strip mode problem for the upper-interface
/// linearization and returns the resulting multiplier.
pub fn ode_oracle_phi<T: Real>(
    fp: &FrozenPoint<T>,
    m: i64,
    tau: T,
    params: &FluidParams<T>,
) -> Result<SymbolODESolution<T>> {
    nonzero_mode(m)?;
    check_tau(tau)?;
    let mm = T::of_i64(m);
    let one = T::one();
    let zero = Complex::new(T::zero(), T::zero());
    let re = |v: T| Complex::new(v, T::zero());
    let im_m = Complex::new(T::zero(), mm);
    let (a, d) = (fp.a_top, fp.D_top);
    let tv = tau * fp.V;
    let top = params.g * params.rho_plus - (one - tau) * fp.V;
    let (e1, e2, s) = basis_at_end(a, d, mm, one);
    // B = z₁E₁ + z₂E₂ + τV with B(0) = 0, B(1) = top
    let matrix = vec![vec![re(one), zero], vec![e1, e2]];
    let rhs = vec![re(-tv), re((top - tv) * s)];
    let z = solve_complex(&matrix, &rhs)?;
    let (z1, z2) = (z[0], z[1]);
    let (t1, t2) = (z1 * e1, z2 * e2);
    let residual = (z1 + tv)
        .norm()
        .max((t1 + t2 + tv * s - top * s).norm() / one.max(t1.norm() + t2.norm() + (tv * s).abs() + (top * s).abs()));

    // B'(1) = z₁(E₁' − E₁E₂'/E₂)(1) + (B(1) − τV)·E₂'/E₂(1), the first factor
    // being −e^{−iam}·Dm/sinh(Dm) by the Wronskian identity.
    let dm = d * mm;
    let phase = Complex::new(T::zero(), -a * mm).exp();
    let ratio = Complex::new(dm / dm.tanh(), -a * mm);
    let dtop = -(phase * z1) * x_over_sinh(mm, d) * d + ratio * (top - tv);
    let b1 = re(top);

    let l = &fp.local;
    let ghf = l.h - l.f;
    let kp = params.k / params.mu_plus;
    let drift = kp * (T::lit(2.0) * l.h_slope * l.tr1_dy_vplus / ghf - l.tr1_dx_vplus);
    let symbol = -(im_m * (tau * drift)) - (dtop * ((one + l.h_slope * l.h_slope) / ghf) - im_m * b1 * l.h_slope) * kp;
    Ok(SymbolODESolution {
        coefficients: vec![split(z1, z2)],
        symbol_value: symbol,
        residual,
    })
}

/// Suprema entering the multiplier theorem for the resolvent
/// `Λ_m = (λ − λ_m)⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarcinkiewiczReport<T> {
    /// `sup |m|^gain·|Λ_m|`
    pub s1: T,
    /// `sup |m|^(gain+1)·|Λ_{m+1} − Λ_m|`
    pub s2: T,
    /// `|λ|·sup |Λ_m|`
    pub s1_weighted: T,
    /// `|λ|·sup |m|·|Λ_{m+1} − Λ_m|`
    pub s2_weighted: T,
}

/// Evaluates the multiplier-theorem suprema for a symbol sequence indexed
/// `m = −M..=M` (so `symbol.len() = 2M + 1`, `symbol[M]` belongs to `m = 0`).
/// Sums range over `m ≠ 0`; differences need both neighbours in range.
pub fn marcinkiewicz_check<T: Real>(
    symbol: &[Complex<T>],
    lambda: Complex<T>,
    order_gain: i32,
) -> Result<MarcinkiewiczReport<T>> {
    if symbol.len() % 2 == 0 || symbol.len() < 3 {
        return invalid("symbol must cover m = -M..=M with M >= 1");
    }
    let big_m = (symbol.len() / 2) as i64;
    let sup_re = symbol.iter().fold(T::neg_infinity(), |a, z| a.max(z.re));
    if !(lambda.re > sup_re) {
        return domain(format!(
            "Re lambda = {} does not exceed sup Re lambda_m = {}",
            lambda.re, sup_re
        ));
    }
    let res: Vec<Complex<T>> = symbol.iter().map(|&z| (lambda - z).inv()).collect();
    let at = |m: i64| res[(m + big_m) as usize];
    let (mut s1, mut s2, mut s1w, mut s2w) = (T::zero(), T::zero(), T::zero(), T::zero());
    for m in -big_m..=big_m {
        if m == 0 {
            continue;
        }
        let mm = T::of_i64(m).abs();
        s1 = s1.max(mm.powi(order_gain) * at(m).norm());
        s1w = s1w.max(at(m).norm());
        if m < big_m {
            let diff = (at(m + 1) - at(m)).norm();
            s2 = s2.max(mm.powi(order_gain + 1) * diff);
            s2w = s2w.max(mm * diff);
        }
    }
    let ln = lambda.norm();
    Ok(MarcinkiewiczReport {
        s1,
        s2,
        s1_weighted: ln * s1w,
        s2_weighted: ln * s2w,
    })
}

/// Which pairing of traces and gaps condition (2) of the lower-interface
/// region uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SPairing {
    /// `tr₀∂yv₋/(h−f) − tr₀∂yv₊/(f−d)` as printed in the region definition.
    #[default]
    Printed,
    /// `−Δ_A = tr₀∂yv₋/(f−d) − tr₀∂yv₊/(h−f)`, matching the frozen constants.
    DeltaA,
}

/// Slack of each defining inequality; positive means satisfied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionReport {
    pub ok: bool,
    pub worst_margin: f64,
    /// `min gap − σ`
    pub gap_margin: f64,
    /// `1/σ − (‖f‖_{C²} + ‖h‖_{C²})`
    pub norm_margin: f64,
    /// Condition (2) with the selected pairing.
    pub sign_margin: f64,
    /// Condition (2) with the printed pairing.
    pub sign_margin_printed: f64,
    /// Condition (2) with the `Δ_A` pairing.
    pub sign_margin_delta_a: f64,
    /// Trace bound of condition (3).
    pub trace_margin: f64,
}

fn c2_norm(u: &PeriodicFn<f64>) -> Result<f64> {
    Ok(u.sup_norm() + spectral_derivative(u, 1)?.sup_norm() + spectral_derivative(u, 2)?.sup_norm())
}

fn inv_sigma(sigma: f64) -> f64 {
    if sigma == 0.0 {
        f64::INFINITY
    } else {
        1.0 / sigma
    }
}

fn common_margins(base: &InterfacePair<f64>, sigma: f64) -> Result<(f64, f64)> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return invalid("sigma must be finite and non-negative");
    }
    let rep = base.admissibility();
    if !rep.ok {
        return domain("base interfaces not admissible");
    }
    let gap = rep.gap_fd.min(rep.gap_hf) - sigma;
    let norms = inv_sigma(sigma) - (c2_norm(&base.f)? + c2_norm(&base.h)?);
    Ok((gap, norms))
}

fn finish(gap: f64, norms: f64, sign: f64, printed: f64, alt: f64, trace: f64) -> RegionReport {
    let worst = gap.min(norms).min(sign).min(trace);
    RegionReport {
        ok: worst > 0.0,
        worst_margin: worst,
        gap_margin: gap,
        norm_margin: norms,
        sign_margin: sign,
        sign_margin_printed: printed,
        sign_margin_delta_a: alt,
        trace_margin: trace,
    }
}

/// Checks the defining inequalities of the lower-interface parabolicity
/// region from grid data.
pub fn region_check_s(
    base: &InterfacePair<f64>,
    base_solution: &DiffractionSolution,
    params: &FluidParams<f64>,
    sigma: f64,
    pairing: SPairing,
) -> Result<RegionReport> {
    let (gap, norms) = common_margins(base, sigma)?;
    let s = base_solution;
    let drho = params.g * (params.rho_minus - params.rho_plus);
    let mut printed = f64::INFINITY;
    let mut alt = f64::INFINITY;
    for i in 0..base.f.len() {
        let gfd = base.f.values()[i] - base.d;
        let ghf = base.h.values()[i] - base.f.values()[i];
        let (dm, dp) = (s.tr0_dy_vminus.values()[i], s.tr0_dy_vplus.values()[i]);
        printed = printed.min(drho - sigma - dm / ghf + dp / gfd);
        alt = alt.min(drho - sigma + dp / ghf - dm / gfd);
    }
    let sign = match pairing {
        SPairing::Printed => printed,
        SPairing::DeltaA => alt,
    };
    let trace = inv_sigma(sigma) - (s.tr0_dy_vplus.sup_norm() + s.tr0_dy_vminus.sup_norm());
    Ok(finish(gap, norms, sign, printed, alt, trace))
}

/// Checks the defining inequalities of the upper-interface parabolicity
/// region from grid data.
pub fn region_check_r(
    base: &InterfacePair<f64>,
    base_solution: &DiffractionSolution,
    params: &FluidParams<f64>,
    sigma: f64,
) -> Result<RegionReport> {
    let (gap, norms) = common_margins(base, sigma)?;
    let s = base_solution;
    let mut sign = f64::INFINITY;
    for i in 0..base.f.len() {
        let ghf = base.h.values()[i] - base.f.values()[i];
        sign = sign.min(params.g * params.rho_plus - sigma - s.tr1_dy_vplus.values()[i] / ghf);
    }
    let trace = inv_sigma(sigma) - s.tr1_dy_vplus.sup_norm();
    Ok(finish(gap, norms, sign, sign, sign, trace))
}
