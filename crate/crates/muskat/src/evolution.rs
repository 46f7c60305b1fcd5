//! Evolution operator, pressures, Rayleigh-Taylor margins and time stepping.
//!
//! The interfaces move with the normal Darcy flux of the adjacent fluid:
//! `∂t f = −ℬ(f)v₋` and `∂t h = −ℬ₁(f,h)v₊`. Integration is explicit
//! Runge-Kutta-Fehlberg 4(5) with embedded error control.

use crate::diffraction::{solve_potentials, solve_potentials_st, DiffractionSolution};
use crate::error::{invalid, Error, Result};
use crate::geometry::{spectral_derivative, InterfacePair, PeriodicFn};
use crate::operators::{boundary_op_minus, boundary_op_top, physical_heights, FluidParams, StripField};

/// Velocities `(∂t f, ∂t h)` together with the potentials they came from.
#[derive(Debug, Clone)]
pub struct PhiEval {
    pub df_dt: PeriodicFn<f64>,
    pub dh_dt: PeriodicFn<f64>,
    pub solution: DiffractionSolution,
}

fn potentials(
    fh: &InterfacePair<f64>,
    b: &PeriodicFn<f64>,
    params: &FluidParams<f64>,
    surface_tension: bool,
    n_y: usize,
) -> Result<DiffractionSolution> {
    if surface_tension {
        solve_potentials_st(fh, b, params, n_y)
    } else {
        solve_potentials(fh, b, params, n_y)
    }
}

/// Interface velocities computed from an already solved potential pair.
pub fn phi_from_solution(
    fh: &InterfacePair<f64>,
    solution: &DiffractionSolution,
    params: &FluidParams<f64>,
) -> Result<(PeriodicFn<f64>, PeriodicFn<f64>)> {
    let p = FluidParams { d: fh.d, ..*params };
    let bm = boundary_op_minus(&fh.f, &p)?;
    let b1 = boundary_op_top(&fh.f, &fh.h, &p)?;
    let combine = |op: &crate::operators::BoundaryOp, dy: &PeriodicFn<f64>, dx: &PeriodicFn<f64>| {
        let v = (0..dy.len())
            .map(|i| -(op.beta2.values()[i] * dy.values()[i] + op.beta1.values()[i] * dx.values()[i]))
            .collect();
        PeriodicFn::new(dy.grid(), v)
    };
    Ok((
        combine(&bm, &solution.tr0_dy_vminus, &solution.tr0_dx_vminus)?,
        combine(&b1, &solution.tr1_dy_vplus, &solution.tr1_dx_vplus)?,
    ))
}

/// Evaluates the evolution operator and keeps the potentials.
pub fn phi_eval(
    fh: &InterfacePair<f64>,
    b: &PeriodicFn<f64>,
    params: &FluidParams<f64>,
    surface_tension: bool,
    n_y: usize,
) -> Result<PhiEval> {
    let solution = potentials(fh, b, params, surface_tension, n_y)?;
    let (df_dt, dh_dt) = phi_from_solution(fh, &solution, params)?;
    Ok(PhiEval { df_dt, dh_dt, solution })
}

/// `(∂t f, ∂t h) = Φ(f, h)` for the bottom datum `b`.
pub fn phi(
    fh: &InterfacePair<f64>,
    b: &PeriodicFn<f64>,
    params: &FluidParams<f64>,
    surface_tension: bool,
    n_y: usize,
) -> Result<(PeriodicFn<f64>, PeriodicFn<f64>)> {
    let e = phi_eval(fh, b, params, surface_tension, n_y)?;
    Ok((e.df_dt, e.dh_dt))
}

/// Pressures `p± = v± − gρ±·Y` at the strip nodes, `Y` the physical height.
pub fn pressures(
    solution: &DiffractionSolution,
    fh: &InterfacePair<f64>,
    params: &FluidParams<f64>,
) -> (StripField, StripField) {
    let hp = physical_heights(fh, solution.v_plus.strip);
    let hm = physical_heights(fh, solution.v_minus.strip);
    let sub = |v: &StripField, y: &StripField, rho: f64| StripField {
        strip: v.strip,
        values: v
            .values
            .iter()
            .zip(&y.values)
            .map(|(a, b)| a - params.g * rho * b)
            .collect(),
    };
    (
        sub(&solution.v_plus, &hp, params.rho_plus),
        sub(&solution.v_minus, &hm, params.rho_minus),
    )
}

/// Signed Rayleigh-Taylor margins; positive means the condition holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RTReport {
    /// `min −(∂ν p₋ − ∂ν p₊)` on the lower interface
    pub margin_f: f64,
    /// `min −∂ν p₊` on the upper interface
    pub margin_h: f64,
    pub satisfied: bool,
}

/// Margins from a potential pair of the problem without surface tension.
pub fn rayleigh_taylor_from_solution(
    fh: &InterfacePair<f64>,
    solution: &DiffractionSolution,
    params: &FluidParams<f64>,
) -> Result<RTReport> {
    let f1 = spectral_derivative(&fh.f, 1)?;
    let h1 = spectral_derivative(&fh.h, 1)?;
    let g = params.g;
    let mut margin_f = f64::INFINITY;
    let mut margin_h = f64::INFINITY;
    for i in 0..fh.f.len() {
        let (f, h, fp, hp) = (fh.f.values()[i], fh.h.values()[i], f1.values()[i], h1.values()[i]);
        let qf = (1.0 + fp * fp).sqrt();
        let qh = (1.0 + hp * hp).sqrt();
        let dnu_minus = ((1.0 + fp * fp) / (f - fh.d) * solution.tr0_dy_vminus.values()[i]
            - fp * solution.tr0_dx_vminus.values()[i])
            / qf;
        let dnu_plus0 = ((1.0 + fp * fp) / (h - f) * solution.tr0_dy_vplus.values()[i]
            - fp * solution.tr0_dx_vplus.values()[i])
            / qf;
        let dnu_plus1 = ((1.0 + hp * hp) / (h - f) * solution.tr1_dy_vplus.values()[i]
            - hp * solution.tr1_dx_vplus.values()[i])
            / qh;
        let pm = dnu_minus - g * params.rho_minus / qf;
        let pp = dnu_plus0 - g * params.rho_plus / qf;
        margin_f = margin_f.min(-(pm - pp));
        margin_h = margin_h.min(-(dnu_plus1 - g * params.rho_plus / qh));
    }
    Ok(RTReport {
        margin_f,
        margin_h,
        satisfied: margin_f > 0.0 && margin_h > 0.0,
    })
}

/// Solves the potential problem and reports the Rayleigh-Taylor margins.
pub fn rayleigh_taylor(
    fh: &InterfacePair<f64>,
    b: &PeriodicFn<f64>,
    params: &FluidParams<f64>,
    n_y: usize,
) -> Result<RTReport> {
    let sol = solve_potentials(fh, b, params, n_y)?;
    rayleigh_taylor_from_solution(fh, &sol, params)
}

/// Time, interfaces and (optionally) the potentials solved at this state.
#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    pub fh: InterfacePair<f64>,
    pub last_solution: Option<DiffractionSolution>,
}

impl SimState {
    pub fn new(t: f64, fh: InterfacePair<f64>) -> Self {
        Self {
            t,
            fh,
            last_solution: None,
        }
    }
}

/// Accepted-or-not outcome of a single embedded step.
#[derive(Debug, Clone)]
pub struct StepResult {
    pub state: SimState,
    /// Componentwise difference of the 5th and 4th order solutions.
    pub error_f: PeriodicFn<f64>,
    pub error_h: PeriodicFn<f64>,
}

const RKF_C: [f64; 6] = [0.0, 0.25, 0.375, 12.0 / 13.0, 1.0, 0.5];
const RKF_A: [[f64; 5]; 6] = [
    [0.0; 5],
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
];
const RKF_B4: [f64; 6] = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -0.2, 0.0];
const RKF_B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];

fn combine(base: &PeriodicFn<f64>, dt: f64, weights: &[f64], ks: &[PeriodicFn<f64>]) -> PeriodicFn<f64> {
    let mut out = base.clone();
    for (w, k) in weights.iter().zip(ks) {
        if *w != 0.0 {
            out = out.axpy(dt * w, k);
        }
    }
    out
}

fn rejected(msg: impl Into<String>) -> Error {
    Error::Domain(format!("step rejected: {}", msg.into()))
}

/// One Runge-Kutta-Fehlberg 4(5) step; the state advances with the 4th
/// order weights. A stage leaving the admissible set is reported as a
/// domain error (step rejection).
pub fn step(
    state: &SimState,
    dt: f64,
    b_at: &dyn Fn(f64) -> PeriodicFn<f64>,
    params: &FluidParams<f64>,
    surface_tension: bool,
    n_y: usize,
) -> Result<StepResult> {
    if !(dt >= 0.0) || !dt.is_finite() {
        return invalid("dt must be finite and non-negative");
    }
    let zero = PeriodicFn::zeros(state.fh.grid());
    if dt == 0.0 {
        return Ok(StepResult {
            state: state.clone(),
            error_f: zero.clone(),
            error_h: zero,
        });
    }
    let mut kf: Vec<PeriodicFn<f64>> = Vec::with_capacity(6);
    let mut kh: Vec<PeriodicFn<f64>> = Vec::with_capacity(6);
    for s in 0..6 {
        let stage = if s == 0 {
            state.fh.clone()
        } else {
            let f = combine(&state.fh.f, dt, &RKF_A[s][..s], &kf);
            let h = combine(&state.fh.h, dt, &RKF_A[s][..s], &kh);
            InterfacePair::new(f, h, state.fh.d).map_err(|e| rejected(e.to_string()))?
        };
        let t = state.t + RKF_C[s] * dt;
        let (df, dh) = match (s, &state.last_solution) {
            (0, Some(sol)) if sol.v_plus.strip.n_y == n_y => phi_from_solution(&state.fh, sol, params)?,
            _ => phi(&stage, &b_at(t), params, surface_tension, n_y)?,
        };
        kf.push(df);
        kh.push(dh);
    }
    let f4 = combine(&state.fh.f, dt, &RKF_B4, &kf);
    let h4 = combine(&state.fh.h, dt, &RKF_B4, &kh);
    let f5 = combine(&state.fh.f, dt, &RKF_B5, &kf);
    let h5 = combine(&state.fh.h, dt, &RKF_B5, &kh);
    let fh = InterfacePair::new(f4.clone(), h4.clone(), state.fh.d).map_err(|e| rejected(e.to_string()))?;
    Ok(StepResult {
        state: SimState::new(state.t + dt, fh),
        error_f: f5.sub(&f4),
        error_h: h5.sub(&h4),
    })
}

/// Integration controls for [`simulate`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    pub n_y: usize,
    pub t_end: f64,
    pub rtol: f64,
    pub atol: f64,
    pub dt_max: f64,
    pub dt_init: f64,
    /// Scale of the capillary step cap `cfl_st / (γ_max·m_max³·k/min μ)`.
    pub cfl_st: f64,
    pub surface_tension: bool,
    pub stop_on_rt: bool,
    /// Zero modes above 2/3 of Nyquist after each accepted step.
    pub dealias: bool,
    pub max_steps: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            n_y: 16,
            t_end: 1.0,
            rtol: 1e-6,
            atol: 1e-9,
            dt_max: 0.1,
            dt_init: 1e-3,
            cfl_st: 1.0,
            surface_tension: false,
            stop_on_rt: false,
            dealias: true,
            max_steps: 100_000,
        }
    }
}

impl SimOptions {
    pub fn validate(&self) -> Result<()> {
        let reals = [self.t_end, self.rtol, self.atol, self.dt_max, self.dt_init, self.cfl_st];
        if reals.iter().any(|v| !v.is_finite()) {
            return invalid("non-finite simulation option");
        }
        if self.t_end < 0.0 {
            return invalid("t_end must be non-negative");
        }
        if self.rtol < 0.0 || self.atol < 0.0 || self.rtol + self.atol <= 0.0 {
            return invalid("tolerances must be non-negative and not both zero");
        }
        if self.dt_max <= 0.0 || self.dt_init <= 0.0 || self.cfl_st <= 0.0 {
            return invalid("dt_max, dt_init and cfl_st must be positive");
        }
        if self.n_y < 8 {
            return invalid("n_y must be >= 8");
        }
        Ok(())
    }
}

/// Why a simulation stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    TEnd,
    AdmissibilityLost,
    RtViolated,
    StepFailure,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::TEnd => "t_end",
            Termination::AdmissibilityLost => "admissibility_lost",
            Termination::RtViolated => "rt_violated",
            Termination::StepFailure => "step_failure",
        }
    }
}

/// One recorded state of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub f: Vec<f64>,
    pub h: Vec<f64>,
    pub rt: RTReport,
    /// Step that produced this state; zero for the initial state.
    pub dt_used: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub termination: Termination,
    /// Message of the error that ended the run, if any.
    pub message: Option<String>,
}

/// Largest stable step suggested by the cubic growth of the capillary symbol.
pub fn capillary_dt_cap(params: &FluidParams<f64>, n_x: usize, cfl_st: f64, dealias: bool) -> f64 {
    let gamma = params.gamma_f.max(params.gamma_h);
    if gamma <= 0.0 {
        return f64::INFINITY;
    }
    let m_max = if dealias { n_x / 3 } else { n_x / 2 } as f64;
    let rate = params.k / params.mu_minus.min(params.mu_plus);
    cfl_st / (gamma * m_max.powi(3) * rate)
}

fn error_norm(err: &PeriodicFn<f64>, old: &PeriodicFn<f64>, new: &PeriodicFn<f64>, o: &SimOptions) -> f64 {
    (0..err.len())
        .map(|i| {
            let scale = o.atol + o.rtol * old.values()[i].abs().max(new.values()[i].abs());
            err.values()[i].abs() / scale
        })
        .fold(0.0, f64::max)
}

/// Solves at the state, fills the cache and returns the RT report.
fn settle(
    state: &mut SimState,
    b_at: &dyn Fn(f64) -> PeriodicFn<f64>,
    params: &FluidParams<f64>,
    o: &SimOptions,
) -> Result<RTReport> {
    let b = b_at(state.t);
    let sol = potentials(&state.fh, &b, params, o.surface_tension, o.n_y)?;
    let rt = if o.surface_tension {
        rayleigh_taylor(&state.fh, &b, params, o.n_y)?
    } else {
        rayleigh_taylor_from_solution(&state.fh, &sol, params)?
    };
    state.last_solution = Some(sol);
    Ok(rt)
}

fn termination_for(e: &Error) -> Termination {
    match e {
        Error::Domain(_) => Termination::AdmissibilityLost,
        _ => Termination::StepFailure,
    }
}

/// Adaptive integration from `initial` up to `options.t_end`. Failures end
/// the trajectory with a recorded reason rather than an error.
pub fn simulate(
    initial: &InterfacePair<f64>,
    b_at: &dyn Fn(f64) -> PeriodicFn<f64>,
    params: &FluidParams<f64>,
    options: &SimOptions,
) -> Result<Trajectory> {
    options.validate()?;
    params.validate()?;
    let o = options;
    let mut state = SimState::new(0.0, initial.clone());
    let mut samples = Vec::new();
    let finish = |samples, termination, message| {
        Ok(Trajectory {
            samples,
            termination,
            message,
        })
    };

    let rt = match settle(&mut state, b_at, params, o) {
        Ok(rt) => rt,
        Err(e) => return finish(samples, termination_for(&e), Some(e.to_string())),
    };
    samples.push(Sample {
        t: 0.0,
        f: state.fh.f.values().to_vec(),
        h: state.fh.h.values().to_vec(),
        rt,
        dt_used: 0.0,
    });
    if o.stop_on_rt && !o.surface_tension && !rt.satisfied {
        return finish(samples, Termination::RtViolated, None);
    }

    let mut dt_cap = o.dt_max;
    if o.surface_tension {
        dt_cap = dt_cap.min(capillary_dt_cap(params, initial.grid().n_x(), o.cfl_st, o.dealias));
    }
    let dt_min = 1e-12 * o.t_end.max(1.0);
    let mut dt = o.dt_init.min(dt_cap);
    let mut steps = 0usize;
    while state.t < o.t_end * (1.0 - 1e-14) {
        if steps >= o.max_steps {
            return finish(samples, Termination::StepFailure, Some("step limit reached".into()));
        }
        steps += 1;
        let h = dt.min(o.t_end - state.t);
        match step(&state, h, b_at, params, o.surface_tension, o.n_y) {
            Ok(res) => {
                let ef = error_norm(&res.error_f, &state.fh.f, &res.state.fh.f, o);
                let eh = error_norm(&res.error_h, &state.fh.h, &res.state.fh.h, o);
                let err = ef.max(eh);
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                if err <= 1.0 {
                    let mut next = res.state;
                    if o.dealias {
                        let f = next.fh.f.truncated(2.0 / 3.0);
                        let hh = next.fh.h.truncated(2.0 / 3.0);
                        match InterfacePair::new(f, hh, next.fh.d) {
                            Ok(p) => next.fh = p,
                            Err(e) => return finish(samples, Termination::AdmissibilityLost, Some(e.to_string())),
                        }
                    }
                    let rt = match settle(&mut next, b_at, params, o) {
                        Ok(rt) => rt,
                        Err(e) => return finish(samples, termination_for(&e), Some(e.to_string())),
                    };
                    samples.push(Sample {
                        t: next.t,
                        f: next.fh.f.values().to_vec(),
                        h: next.fh.h.values().to_vec(),
                        rt,
                        dt_used: h,
                    });
                    state = next;
                    if o.stop_on_rt && !o.surface_tension && !rt.satisfied {
                        return finish(samples, Termination::RtViolated, None);
                    }
                }
                dt = (h * factor).min(dt_cap);
            }
            Err(Error::Domain(msg)) => {
                dt = 0.5 * h;
                if dt < dt_min {
                    return finish(samples, Termination::AdmissibilityLost, Some(msg));
                }
            }
            Err(e) => return finish(samples, Termination::StepFailure, Some(e.to_string())),
        }
        if dt < dt_min {
            return finish(samples, Termination::StepFailure, Some("step size underflow".into()));
        }
    }
    finish(samples, Termination::TEnd, None)
}

/// Per-mode Jacobian of `Φ` at an `x`-independent state, by forward
/// differences along `(sin mx, 0)` and `(0, sin mx)` projected back onto
/// `sin mx`. Row index is the component of `Φ`, column the perturbed
/// interface.
pub fn linearized_matrix(
    fh_equilibrium: &InterfacePair<f64>,
    b: &PeriodicFn<f64>,
    params: &FluidParams<f64>,
    m: usize,
    surface_tension: bool,
    eps: f64,
    n_y: usize,
) -> Result<[[f64; 2]; 2]> {
    let fh = fh_equilibrium;
    let flat = |u: &PeriodicFn<f64>| u.max() - u.min() <= 1e-12 * (1.0 + u.sup_norm());
    if !flat(&fh.f) || !flat(&fh.h) || !flat(b) {
        return invalid("linearization requires x-independent interfaces and bottom datum");
    }
    let n = fh.grid().n_x();
    if m == 0 || 2 * m >= n {
        return invalid(format!("mode {m} not resolved on {n} points"));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return invalid("eps must be positive");
    }
    let (f0, h0) = phi(fh, b, params, surface_tension, n_y)?;
    let dir = PeriodicFn::from_fn(fh.grid(), |x| (m as f64 * x).sin());
    let mut out = [[0.0; 2]; 2];
    for col in 0..2 {
        let pert = if col == 0 {
            InterfacePair::new(fh.f.axpy(eps, &dir), fh.h.clone(), fh.d)?
        } else {
            InterfacePair::new(fh.f.clone(), fh.h.axpy(eps, &dir), fh.d)?
        };
        let (f1, h1) = phi(&pert, b, params, surface_tension, n_y)?;
        out[0][col] = f1.sub(&f0).mode(m).1 / eps;
        out[1][col] = h1.sub(&h0).mode(m).1 / eps;
    }
    Ok(out)
}

/// Least-squares slope of `ln a(t)` and the coefficient of determination.
pub fn fit_growth_rate(times: &[f64], amplitudes: &[f64]) -> Result<(f64, f64)> {
    if times.len() != amplitudes.len() || times.len() < 3 {
        return invalid("need at least three samples");
    }
    if amplitudes.iter().any(|a| !(*a > 0.0)) {
        return invalid("amplitudes must be positive");
    }
    let y: Vec<f64> = amplitudes.iter().map(|a| a.ln()).collect();
    let n = times.len() as f64;
    let mt = times.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let stt: f64 = times.iter().map(|t| (t - mt).powi(2)).sum();
    let sty: f64 = times.iter().zip(&y).map(|(t, v)| (t - mt) * (v - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if stt == 0.0 {
        return invalid("times must not all coincide");
    }
    let slope = sty / stt;
    let r2 = if syy == 0.0 { 1.0 } else { sty * sty / (stt * syy) };
    Ok((slope, r2))
}
