//! Discrete transmission problem on the two coupled reference strips.
//!
//! Unknowns are the nodal values of `v₋` on the closed minus strip followed
//! by those of `v₊` on the closed plus strip; both copies of the interface
//! level are kept. Interior rows carry the elliptic equations, the outer
//! levels carry Dirichlet data, the interface level of the minus strip
//! carries the value jump and the interface level of the plus strip carries
//! the flux balance. The resulting sparse system is factored with a sparse
//! LU and its 1-norm condition number is estimated before the solution is
//! accepted.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::Col;

use crate::error::{domain, invalid, Error, Result};
use crate::geometry::{curvature, curvature_frechet, InterfacePair, PeriodicFn};
use crate::operators::{
    apply_operator, boundary_op_minus, boundary_op_plus, coeffs_a_minus, coeffs_a_plus, dy_weights, frechet_a,
    frechet_b_op, node_stencil, BoundaryLevel, BoundaryOp, CoefficientField, FluidParams, FrechetA, FrechetB, Side,
    StripField, StripGrid,
};
use crate::scalar::Real;

/// Largest accepted 1-norm condition estimate.
pub const MAX_CONDITION: f64 = 1e12;

/// Right-hand sides, boundary data and operators of the transmission problem
///
/// ```text
/// L₊v₊ = F₊ in Ω₊,  L₋v₋ = F₋ in Ω₋,
/// B₊v₊ − B₋v₋ = φ₁,  v₊ − v₋ = φ₂  on Γ₀,
/// v₊ = φ₃ on Γ₁,  v₋ = φ₄ on Γ₋₁.
/// ```
#[derive(Debug, Clone)]
pub struct DiffractionData {
    pub f_plus: StripField,
    pub f_minus: StripField,
    pub phi1: PeriodicFn<f64>,
    pub phi2: PeriodicFn<f64>,
    pub phi3: PeriodicFn<f64>,
    pub phi4: PeriodicFn<f64>,
    pub op_plus: CoefficientField,
    pub op_minus: CoefficientField,
    pub b_plus: BoundaryOp,
    pub b_minus: BoundaryOp,
}

impl DiffractionData {
    pub fn validate(&self) -> Result<()> {
        let sp = self.op_plus.strip;
        let sm = self.op_minus.strip;
        if sp.side != Side::Plus || sm.side != Side::Minus {
            return invalid("operators attached to the wrong strips");
        }
        if sp.grid != sm.grid || sp.n_y != sm.n_y {
            return invalid("the two strips must share the grid and n_y");
        }
        if self.f_plus.strip != sp || self.f_minus.strip != sm {
            return invalid("right-hand side shapes do not match the operators");
        }
        for phi in [&self.phi1, &self.phi2, &self.phi3, &self.phi4] {
            if phi.grid() != sp.grid {
                return invalid("boundary datum on a different grid");
            }
        }
        if self.b_plus.side != Side::Plus
            || self.b_minus.side != Side::Minus
            || self.b_plus.level != BoundaryLevel::Interface
            || self.b_minus.level != BoundaryLevel::Interface
            || self.b_plus.beta1.grid() != sp.grid
            || self.b_minus.beta1.grid() != sp.grid
        {
            return invalid("interface operators must live on Γ₀ of their own strip");
        }
        if !self.op_plus.is_elliptic() || !self.op_minus.is_elliptic() {
            return domain("coefficient field is not elliptic");
        }
        if self.b_plus.beta2.min() <= 0.0 || self.b_minus.beta2.min() <= 0.0 {
            return domain("normal coefficients of the interface operators must be positive");
        }
        Ok(())
    }
}

/// Solved pair with the boundary traces used downstream.
///
/// `∂y` traces use the same one-sided stencil as the assembled flux rows,
/// `∂x` traces are spectral.
#[derive(Debug, Clone)]
pub struct DiffractionSolution {
    pub v_plus: StripField,
    pub v_minus: StripField,
    pub tr0_vminus: PeriodicFn<f64>,
    pub tr0_dy_vminus: PeriodicFn<f64>,
    pub tr0_dx_vminus: PeriodicFn<f64>,
    pub tr0_dy_vplus: PeriodicFn<f64>,
    pub tr0_dx_vplus: PeriodicFn<f64>,
    pub tr1_dy_vplus: PeriodicFn<f64>,
    pub tr1_dx_vplus: PeriodicFn<f64>,
    /// Estimated 1-norm condition number of the assembled matrix.
    pub condition: f64,
}

impl DiffractionSolution {
    pub fn from_fields(v_plus: StripField, v_minus: StripField, condition: f64) -> Self {
        let sp = v_plus.strip;
        let sm = v_minus.strip;
        Self {
            tr0_vminus: v_minus.level(sm.interface_level()),
            tr0_dy_vminus: v_minus.dy_level(sm.interface_level()),
            tr0_dx_vminus: v_minus.dx_level(sm.interface_level()),
            tr0_dy_vplus: v_plus.dy_level(sp.interface_level()),
            tr0_dx_vplus: v_plus.dx_level(sp.interface_level()),
            tr1_dy_vplus: v_plus.dy_level(sp.outer_level()),
            tr1_dx_vplus: v_plus.dx_level(sp.outer_level()),
            v_plus,
            v_minus,
            condition,
        }
    }

    pub fn n_y(&self) -> usize {
        self.v_plus.strip.n_y
    }
}

/// Entries `0.5·(−1)^k·cot(k·Δx/2)` of the periodic spectral differentiation
/// matrix, indexed by the circular offset `k = i − l`.
fn spectral_dx_column(n: usize) -> Vec<f64> {
    let dx = std::f64::consts::TAU / n as f64;
    (0..n)
        .map(|k| {
            if k == 0 {
                0.0
            } else {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                0.5 * sign / (0.5 * k as f64 * dx).tan()
            }
        })
        .collect()
}

fn flux_row(
    op: &BoundaryOp,
    strip: &StripGrid,
    offset: usize,
    sign: f64,
    i: usize,
    col: &[f64],
    out: &mut Vec<(usize, f64)>,
) {
    let n = strip.n_x();
    let j = strip.interface_level();
    for (jj, w) in dy_weights(j, strip.n_y, strip.dy()) {
        out.push((offset + strip.idx(i, jj), sign * op.beta2.values()[i] * w));
    }
    let b1 = op.beta1.values()[i];
    if b1 != 0.0 {
        for l in 0..n {
            let w = col[(i + n - l) % n];
            if w != 0.0 {
                out.push((offset + strip.idx(l, j), sign * b1 * w));
            }
        }
    }
}

struct Assembled {
    matrix: SparseColMat<usize, f64>,
    rhs: Col<f64>,
    norm1: f64,
}

fn assemble(data: &DiffractionData) -> Result<Assembled> {
    let sm = data.op_minus.strip;
    let sp = data.op_plus.strip;
    let n = sm.n_x();
    let ny = sm.n_y;
    let nm = sm.len();
    let size = nm + sp.len();
    let col = spectral_dx_column(n);
    let mut trip = Vec::with_capacity(size * 14);
    let mut rhs = Col::<f64>::zeros(size);
    let mut st = Vec::with_capacity(n + 24);
    for j in 0..=ny {
        for i in 0..n {
            // minus strip
            let r = sm.idx(i, j);
            st.clear();
            if j == 0 {
                st.push((r, 1.0));
                rhs[r] = data.phi4.values()[i];
            } else if j == ny {
                st.push((nm + sp.idx(i, 0), 1.0));
                st.push((r, -1.0));
                rhs[r] = data.phi2.values()[i];
            } else {
                node_stencil(&sm, data.op_minus.node(r), i, j, &mut st);
                rhs[r] = data.f_minus.values[r];
            }
            trip.extend(st.iter().map(|&(c, w)| Triplet::new(r, c, w)));

            // plus strip
            let q = sp.idx(i, j);
            let r = nm + q;
            st.clear();
            if j == ny {
                st.push((r, 1.0));
                rhs[r] = data.phi3.values()[i];
            } else if j == 0 {
                flux_row(&data.b_plus, &sp, nm, 1.0, i, &col, &mut st);
                flux_row(&data.b_minus, &sm, 0, -1.0, i, &col, &mut st);
                rhs[r] = data.phi1.values()[i];
            } else {
                let mut local = Vec::with_capacity(24);
                node_stencil(&sp, data.op_plus.node(q), i, j, &mut local);
                st.extend(local.into_iter().map(|(c, w)| (nm + c, w)));
                rhs[r] = data.f_plus.values[q];
            }
            trip.extend(st.iter().map(|&(c, w)| Triplet::new(r, c, w)));
        }
    }
    let matrix =
        SparseColMat::<usize, f64>::try_new_from_triplets(size, size, &trip).map_err(|e| Error::SolverFailure {
            message: format!("assembly failed: {e:?}"),
            condition: f64::NAN,
        })?;
    let mut norm1: f64 = 0.0;
    for c in 0..size {
        let s: f64 = matrix.val_of_col(c).iter().map(|v| v.abs()).sum();
        norm1 = norm1.max(s);
    }
    Ok(Assembled { matrix, rhs, norm1 })
}

/// Hager's estimate of `‖A⁻¹‖₁` from solves with `A` and `Aᵀ`.
fn inverse_norm1_estimate(lu: &impl Solve<f64>, size: usize) -> f64 {
    let mut x = Col::<f64>::from_fn(size, |_| 1.0 / size as f64);
    let mut est = 0.0;
    for _ in 0..5 {
        let mut y = x.clone();
        lu.solve_in_place(y.as_mat_mut());
        est = y.iter().map(|v| v.abs()).sum::<f64>();
        let mut z = Col::<f64>::from_fn(size, |i| if y[i] >= 0.0 { 1.0 } else { -1.0 });
        lu.solve_transpose_in_place(z.as_mat_mut());
        let (jmax, zmax) = z.iter().enumerate().fold(
            (0, 0.0f64),
            |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc },
        );
        let ztx: f64 = z.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
        if zmax <= ztx {
            break;
        }
        x = Col::<f64>::zeros(size);
        x[jmax] = 1.0;
    }
    est
}

/// Solves the general transmission problem.
pub fn solve_general(data: &DiffractionData) -> Result<DiffractionSolution> {
    data.validate()?;
    let asm = assemble(data)?;
    let size = asm.rhs.nrows();
    let lu = asm.matrix.sp_lu().map_err(|e| Error::SolverFailure {
        message: format!("sparse LU failed: {e:?}"),
        condition: f64::INFINITY,
    })?;
    let condition = asm.norm1 * inverse_norm1_estimate(&lu, size);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::SolverFailure {
            message: "assembled matrix is singular or ill-conditioned".into(),
            condition,
        });
    }
    let mut x = lu.solve(&asm.rhs);
    // one step of iterative refinement
    let mut r = asm.rhs.clone();
    let ax = &asm.matrix * &x;
    r -= &ax;
    let dx = lu.solve(&r);
    x += &dx;

    let ax = &asm.matrix * &x;
    let mut r = asm.rhs.clone();
    r -= &ax;
    let scale = asm.norm1 * x.norm_max() + asm.rhs.norm_max();
    if !(r.norm_max() <= 1e-10 * scale.max(f64::MIN_POSITIVE)) {
        return Err(Error::SolverFailure {
            message: format!("residual {:.3e} exceeds tolerance", r.norm_max()),
            condition,
        });
    }
    let nm = data.op_minus.strip.len();
    let values: Vec<f64> = x.iter().copied().collect();
    let v_minus = StripField::new(data.op_minus.strip, values[..nm].to_vec())?;
    let v_plus = StripField::new(data.op_plus.strip, values[nm..].to_vec())?;
    Ok(DiffractionSolution::from_fields(v_plus, v_minus, condition))
}

/// Reference strips of the given depth over the interface grid.
pub fn strips_for(pair: &InterfacePair<f64>, n_y: usize) -> Result<(StripGrid, StripGrid)> {
    let g = pair.grid();
    Ok((
        StripGrid::new(g, n_y, Side::Plus)?,
        StripGrid::new(g, n_y, Side::Minus)?,
    ))
}

fn with_pair_depth(params: &FluidParams<f64>, pair: &InterfacePair<f64>) -> Result<FluidParams<f64>> {
    params.validate()?;
    Ok(FluidParams { d: pair.d, ..*params })
}

fn check_admissible(pair: &InterfacePair<f64>) -> Result<()> {
    let rep = pair.admissibility();
    if !rep.ok {
        return domain(format!(
            "interfaces not admissible: min(f - d) = {}, min(h - f) = {}",
            rep.gap_fd, rep.gap_hf
        ));
    }
    Ok(())
}

/// Operators of the pulled-back potential problem at `pair`.
fn potential_operators(
    pair: &InterfacePair<f64>,
    p: &FluidParams<f64>,
    n_y: usize,
) -> Result<(CoefficientField, CoefficientField, BoundaryOp, BoundaryOp)> {
    let (sp, sm) = strips_for(pair, n_y)?;
    Ok((
        coeffs_a_plus(&pair.f, &pair.h, p, sp)?,
        coeffs_a_minus(&pair.f, p, sm)?,
        boundary_op_plus(&pair.f, &pair.h, p)?,
        boundary_op_minus(&pair.f, p)?,
    ))
}

fn potentials_impl(
    pair: &InterfacePair<f64>,
    b: &PeriodicFn<f64>,
    params: &FluidParams<f64>,
    n_y: usize,
    surface_tension: bool,
) -> Result<DiffractionSolution> {
    check_admissible(pair)?;
    if b.grid() != pair.grid() {
        return invalid("bottom datum on a different grid");
    }
    let p = with_pair_depth(params, pair)?;
    let (op_plus, op_minus, b_plus, b_minus) = potential_operators(pair, &p, n_y)?;
    let mut phi2 = pair.f.scale(p.g * (p.rho_plus - p.rho_minus));
    let mut phi3 = pair.h.scale(p.g * p.rho_plus);
    if surface_tension {
        phi2 = phi2.axpy(p.gamma_f, &curvature(&pair.f));
        phi3 = phi3.axpy(-p.gamma_h, &curvature(&pair.h));
    }
    let data = DiffractionData {
        f_plus: StripField::zeros(op_plus.strip),
        f_minus: StripField::zeros(op_minus.strip),
        phi1: PeriodicFn::zeros(pair.grid()),
        phi2,
        phi3,
        phi4: b.clone(),
        op_plus,
        op_minus,
        b_plus,
        b_minus,
    };
    solve_general(&data)
}

/// Potentials `(v₊, v₋)` of the problem without surface tension.
pub fn solve_potentials(
    pair: &InterfacePair<f64>,
    b: &PeriodicFn<f64>,
    params: &FluidParams<f64>,
    n_y: usize,
) -> Result<DiffractionSolution> {
    potentials_impl(pair, b, params, n_y, false)
}

/// Potentials with the capillary jumps `γ_f κ(f)` on `Γ₀` and `−γ_h κ(h)` on `Γ₁`.
pub fn solve_potentials_st(
    pair: &InterfacePair<f64>,
    b: &PeriodicFn<f64>,
    params: &FluidParams<f64>,
    n_y: usize,
) -> Result<DiffractionSolution> {
    potentials_impl(pair, b, params, n_y, true)
}

fn neg_apply(c: &CoefficientField, v: &StripField) -> Result<StripField> {
    Ok(apply_operator(c, v)?.scale(-1.0))
}

/// Derivative of the potentials in the direction of a lower-interface
/// perturbation. Returns `(w₊, w₋)`.
pub fn solve_linearized_f(
    base: &InterfacePair<f64>,
    base_solution: &DiffractionSolution,
    direction: &PeriodicFn<f64>,
    params: &FluidParams<f64>,
    with_surface_tension: bool,
) -> Result<(StripField, StripField)> {
    check_admissible(base)?;
    if direction.grid() != base.grid() {
        return invalid("direction on a different grid");
    }
    let p = with_pair_depth(params, base)?;
    let n_y = base_solution.n_y();
    let (op_plus, op_minus, b_plus, b_minus) = potential_operators(base, &p, n_y)?;
    let (sp, sm) = (op_plus.strip, op_minus.strip);
    let vp = &base_solution.v_plus;
    let vm = &base_solution.v_minus;
    let f_plus = neg_apply(&frechet_a(FrechetA::PlusF, base, direction, &p, sp)?, vp)?;
    let f_minus = neg_apply(&frechet_a(FrechetA::MinusF, base, direction, &p, sm)?, vm)?;
    let dbp = frechet_b_op(FrechetB::BPlusF, base, direction, &p)?.apply(vp)?;
    let dbm = frechet_b_op(FrechetB::BMinusF, base, direction, &p)?.apply(vm)?;
    let mut phi2 = direction.scale(p.g * (p.rho_plus - p.rho_minus));
    if with_surface_tension {
        phi2 = phi2.axpy(p.gamma_f, &curvature_frechet(&base.f, direction)?);
    }
    let zero = PeriodicFn::zeros(base.grid());
    let data = DiffractionData {
        f_plus,
        f_minus,
        phi1: dbm.sub(&dbp),
        phi2,
        phi3: zero.clone(),
        phi4: zero,
        op_plus,
        op_minus,
        b_plus,
        b_minus,
    };
    let s = solve_general(&data)?;
    Ok((s.v_plus, s.v_minus))
}

/// Derivative of the potentials in the direction of an upper-interface
/// perturbation. Returns `(W₊, W₋)`.
pub fn solve_linearized_h(
    base: &InterfacePair<f64>,
    base_solution: &DiffractionSolution,
    direction: &PeriodicFn<f64>,
    params: &FluidParams<f64>,
    with_surface_tension: bool,
) -> Result<(StripField, StripField)> {
    check_admissible(base)?;
    if direction.grid() != base.grid() {
        return invalid("direction on a different grid");
    }
    let p = with_pair_depth(params, base)?;
    let n_y = base_solution.n_y();
    let (op_plus, op_minus, b_plus, b_minus) = potential_operators(base, &p, n_y)?;
    let sp = op_plus.strip;
    let vp = &base_solution.v_plus;
    let f_plus = neg_apply(&frechet_a(FrechetA::PlusH, base, direction, &p, sp)?, vp)?;
    let dbp = frechet_b_op(FrechetB::BPlusH, base, direction, &p)?.apply(vp)?;
    let mut phi3 = direction.scale(p.g * p.rho_plus);
    if with_surface_tension {
        phi3 = phi3.axpy(-p.gamma_h, &curvature_frechet(&base.h, direction)?);
    }
    let zero = PeriodicFn::zeros(base.grid());
    let data = DiffractionData {
        f_plus,
        f_minus: StripField::zeros(op_minus.strip),
        phi1: dbp.scale(-1.0),
        phi2: zero.clone(),
        phi3,
        phi4: zero,
        op_plus,
        op_minus,
        b_plus,
        b_minus,
    };
    let s = solve_general(&data)?;
    Ok((s.v_plus, s.v_minus))
}

/// Coefficients of one operator/boundary pair entering the complementing
/// condition: `a₁₁∂xx + 2a₁₂∂xy + a₂₂∂yy` with boundary part `β₁∂x + β₂∂y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplementingInput<T> {
    pub a11: T,
    pub a12: T,
    pub a22: T,
    pub beta1: T,
    pub beta2: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplementingReport<T> {
    pub delta2: (T, T),
    pub quantity: T,
}

impl<T: Real> ComplementingReport<T> {
    pub fn satisfied(&self) -> bool {
        self.quantity > T::zero()
    }
}

/// Evaluates the complementing-condition quantity for the pair of operators
/// `(ops[0], ops[1])` on the homotopy `(1−τ)·(given) + τ·(Laplacian, ∂y)`.
pub fn check_complementing<T: Real>(ops: [ComplementingInput<T>; 2], xi: T, tau: T) -> Result<ComplementingReport<T>> {
    if xi == T::zero() || !xi.is_finite() {
        return invalid("xi must be a nonzero real");
    }
    if !(tau >= T::zero() && tau <= T::one()) {
        return invalid("tau must lie in [0, 1]");
    }
    let one = T::one();
    let two = T::lit(2.0);
    let mut delta = [T::zero(); 2];
    let mut quantity = T::zero();
    for (k, op) in ops.iter().enumerate() {
        if !(op.a11 > T::zero() && op.a22 > T::zero() && op.a11 * op.a22 > op.a12 * op.a12) {
            return domain("operator is not elliptic");
        }
        if !(op.beta2 > T::zero()) {
            return domain("beta2 must be positive");
        }
        let den = (one - tau) * op.a22 + tau;
        let a1 = -two * (one - tau) * op.a12 * xi / den;
        let a2 = ((one - tau) * op.a11 + tau) * xi * xi / den;
        let d2 = (a2 - a1 * a1 / T::lit(4.0)).sqrt();
        delta[k] = d2;
        quantity = quantity + d2 * ((one - tau) * op.beta2 + tau);
    }
    Ok(ComplementingReport {
        delta2: (delta[0], delta[1]),
        quantity,
    })
}
