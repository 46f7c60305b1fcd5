//! Transformed elliptic and boundary operators on the reference strips.
//!
//! The lower fluid is pulled back to `Ω₋ = 𝕊×(−1,0)` by
//! `(x, y) ↦ (x, −d·y + (1+y)f(x))` and the upper one to `Ω₊ = 𝕊×(0,1)` by
//! `(x, y) ↦ (x, y·h(x) + (1−y)f(x))`. The Laplacian becomes a variable
//! coefficient operator whose coefficients are polynomial in `y`; they are
//! evaluated exactly at the nodes. Derivatives in the strip interior use
//! second-order finite differences, periodic in `x`, with one-sided stencils
//! at the top and bottom levels.

use crate::error::{domain, invalid, Result};
use crate::geometry::{d1_d2, spectral_derivative, InterfacePair, PeriodicFn, PeriodicGrid};
use crate::scalar::Real;

/// Physical constants of the two-layer system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidParams<T> {
    pub k: T,
    pub mu_minus: T,
    pub mu_plus: T,
    pub rho_minus: T,
    pub rho_plus: T,
    pub g: T,
    pub gamma_f: T,
    pub gamma_h: T,
    pub d: T,
}

impl<T: Real> FluidParams<T> {
    /// k = μ± = 1, g = 1, ρ₋ = 2, ρ₊ = 1, no surface tension, d = −1.
    pub fn unit() -> Self {
        Self {
            k: T::one(),
            mu_minus: T::one(),
            mu_plus: T::one(),
            rho_minus: T::lit(2.0),
            rho_plus: T::one(),
            g: T::one(),
            gamma_f: T::zero(),
            gamma_h: T::zero(),
            d: -T::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.k,
            self.mu_minus,
            self.mu_plus,
            self.rho_minus,
            self.rho_plus,
            self.g,
            self.gamma_f,
            self.gamma_h,
            self.d,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return invalid("non-finite fluid parameter");
        }
        if self.k <= T::zero() || self.mu_minus <= T::zero() || self.mu_plus <= T::zero() {
            return invalid("k and viscosities must be positive");
        }
        if self.rho_minus < T::zero() || self.rho_plus < T::zero() || self.g < T::zero() {
            return invalid("densities and gravity must be non-negative");
        }
        if self.gamma_f < T::zero() || self.gamma_h < T::zero() {
            return invalid("surface tension coefficients must be non-negative");
        }
        if self.d >= T::zero() {
            return invalid("bottom height d must be negative");
        }
        Ok(())
    }
}

/// Which reference strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `0 ≤ y ≤ 1`
    Plus,
    /// `−1 ≤ y ≤ 0`
    Minus,
}

/// Tensor grid on a closed reference strip. Level `j` sits at
/// `y = j/n_y` (plus) or `y = −1 + j/n_y` (minus).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StripGrid {
    pub grid: PeriodicGrid<f64>,
    pub n_y: usize,
    pub side: Side,
}

impl StripGrid {
    pub fn new(grid: PeriodicGrid<f64>, n_y: usize, side: Side) -> Result<Self> {
        if n_y < 8 {
            return invalid(format!("n_y must be >= 8, got {n_y}"));
        }
        Ok(Self { grid, n_y, side })
    }

    pub fn n_x(&self) -> usize {
        self.grid.n_x()
    }

    pub fn dx(&self) -> f64 {
        self.grid.spacing()
    }

    pub fn dy(&self) -> f64 {
        1.0 / self.n_y as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        match self.side {
            Side::Plus => j as f64 / self.n_y as f64,
            Side::Minus => -1.0 + j as f64 / self.n_y as f64,
        }
    }

    pub fn len(&self) -> usize {
        self.n_x() * (self.n_y + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n_x() + i
    }

    /// Level of the shared interface `y = 0`.
    pub fn interface_level(&self) -> usize {
        match self.side {
            Side::Plus => 0,
            Side::Minus => self.n_y,
        }
    }

    /// Level of the outer boundary (`y = 1` or `y = −1`).
    pub fn outer_level(&self) -> usize {
        match self.side {
            Side::Plus => self.n_y,
            Side::Minus => 0,
        }
    }

    pub fn with_side(&self, side: Side) -> Self {
        Self { side, ..*self }
    }
}

/// Scalar field on a strip, stored level by level.
#[derive(Debug, Clone, PartialEq)]
pub struct StripField {
    pub strip: StripGrid,
    pub values: Vec<f64>,
}

impl StripField {
    pub fn new(strip: StripGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != strip.len() {
            return invalid(format!("expected {} values, got {}", strip.len(), values.len()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("non-finite field value");
        }
        Ok(Self { strip, values })
    }

    pub fn zeros(strip: StripGrid) -> Self {
        Self {
            strip,
            values: vec![0.0; strip.len()],
        }
    }

    /// Samples `f(x, y)` in reference coordinates.
    pub fn from_fn(strip: StripGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(strip.len());
        for j in 0..=strip.n_y {
            let y = strip.y(j);
            for i in 0..strip.n_x() {
                values.push(f(strip.grid.node(i), y));
            }
        }
        Self { strip, values }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.strip.idx(i, j)]
    }

    pub fn level(&self, j: usize) -> PeriodicFn<f64> {
        let n = self.strip.n_x();
        PeriodicFn::new(self.strip.grid, self.values[j * n..(j + 1) * n].to_vec()).expect("finite level values")
    }

    /// One-sided (boundary) or centred (interior) `∂y` on level `j`.
    pub fn dy_level(&self, j: usize) -> PeriodicFn<f64> {
        let s = self.strip;
        let w = dy_weights(j, s.n_y, s.dy());
        let values = (0..s.n_x())
            .map(|i| w.iter().map(|&(jj, c)| c * self.at(i, jj)).sum())
            .collect();
        PeriodicFn::new(s.grid, values).expect("finite derivative")
    }

    /// Spectral `∂x` of level `j`.
    pub fn dx_level(&self, j: usize) -> PeriodicFn<f64> {
        spectral_derivative(&self.level(j), 1).expect("order 1")
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Sup norm over interior levels only.
    pub fn interior_sup_norm(&self) -> f64 {
        let n = self.strip.n_x();
        self.values[n..self.values.len() - n]
            .iter()
            .fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.strip, other.strip);
        Self {
            strip: self.strip,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            strip: self.strip,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }
}

/// Coefficients of `c_xx∂xx + c_xy∂xy + c_yy∂yy + c_x∂x + c_y∂y + c_0`.
/// Note that `c_xy` multiplies the full mixed derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    pub strip: StripGrid,
    pub c_xx: Vec<f64>,
    pub c_xy: Vec<f64>,
    pub c_yy: Vec<f64>,
    pub c_x: Vec<f64>,
    pub c_y: Vec<f64>,
    pub c_0: Vec<f64>,
}

impl CoefficientField {
    pub fn zeros(strip: StripGrid) -> Self {
        let z = vec![0.0; strip.len()];
        Self {
            strip,
            c_xx: z.clone(),
            c_xy: z.clone(),
            c_yy: z.clone(),
            c_x: z.clone(),
            c_y: z.clone(),
            c_0: z,
        }
    }

    pub fn laplacian(strip: StripGrid) -> Self {
        let mut c = Self::zeros(strip);
        c.c_xx.fill(1.0);
        c.c_yy.fill(1.0);
        c
    }

    /// `4·c_xx·c_yy > c_xy²` with positive diagonal at every node.
    pub fn is_elliptic(&self) -> bool {
        (0..self.strip.len()).all(|n| {
            self.c_xx[n] > 0.0
                && self.c_yy[n] > 0.0
                && 4.0 * self.c_xx[n] * self.c_yy[n] - self.c_xy[n] * self.c_xy[n] > 0.0
        })
    }

    pub(crate) fn node(&self, n: usize) -> [f64; 6] {
        [
            self.c_xx[n],
            self.c_xy[n],
            self.c_yy[n],
            self.c_x[n],
            self.c_y[n],
            self.c_0[n],
        ]
    }

    fn arrays(&self) -> [&Vec<f64>; 6] {
        [&self.c_xx, &self.c_xy, &self.c_yy, &self.c_x, &self.c_y, &self.c_0]
    }

    /// Largest coefficient difference over all six arrays.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.arrays()
            .iter()
            .zip(other.arrays().iter())
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    /// `(self − other) / eps`, the coefficient-wise difference quotient.
    pub fn difference_quotient(&self, other: &Self, eps: f64) -> Self {
        let dq = |a: &Vec<f64>, b: &Vec<f64>| a.iter().zip(b).map(|(x, y)| (x - y) / eps).collect();
        Self {
            strip: self.strip,
            c_xx: dq(&self.c_xx, &other.c_xx),
            c_xy: dq(&self.c_xy, &other.c_xy),
            c_yy: dq(&self.c_yy, &other.c_yy),
            c_x: dq(&self.c_x, &other.c_x),
            c_y: dq(&self.c_y, &other.c_y),
            c_0: dq(&self.c_0, &other.c_0),
        }
    }
}

pub(crate) fn dy_weights(j: usize, n_y: usize, dy: f64) -> Vec<(usize, f64)> {
    let h = 0.5 / dy;
    if j == 0 {
        vec![(0, -3.0 * h), (1, 4.0 * h), (2, -h)]
    } else if j == n_y {
        vec![(n_y, 3.0 * h), (n_y - 1, -4.0 * h), (n_y - 2, h)]
    } else {
        vec![(j - 1, -h), (j + 1, h)]
    }
}

fn dyy_weights(j: usize, n_y: usize, dy: f64) -> Vec<(usize, f64)> {
    let s = 1.0 / (dy * dy);
    if j == 0 {
        vec![(0, 2.0 * s), (1, -5.0 * s), (2, 4.0 * s), (3, -s)]
    } else if j == n_y {
        vec![(n_y, 2.0 * s), (n_y - 1, -5.0 * s), (n_y - 2, 4.0 * s), (n_y - 3, -s)]
    } else {
        vec![(j - 1, s), (j, -2.0 * s), (j + 1, s)]
    }
}

/// Finite-difference stencil of the operator at node `(i, j)` as
/// `(flat index, weight)` pairs (indices may repeat).
pub(crate) fn node_stencil(strip: &StripGrid, c: [f64; 6], i: usize, j: usize, out: &mut Vec<(usize, f64)>) {
    let [cxx, cxy, cyy, cx, cy, c0] = c;
    let n = strip.n_x();
    let dx = strip.dx();
    let ip = (i + 1) % n;
    let im = (i + n - 1) % n;
    let idx = |i: usize, j: usize| strip.idx(i, j);
    if cxx != 0.0 {
        let s = cxx / (dx * dx);
        out.push((idx(im, j), s));
        out.push((idx(i, j), -2.0 * s));
        out.push((idx(ip, j), s));
    }
    if cx != 0.0 {
        let s = cx / (2.0 * dx);
        out.push((idx(ip, j), s));
        out.push((idx(im, j), -s));
    }
    if cyy != 0.0 {
        for (jj, w) in dyy_weights(j, strip.n_y, strip.dy()) {
            out.push((idx(i, jj), cyy * w));
        }
    }
    if cy != 0.0 || cxy != 0.0 {
        for (jj, w) in dy_weights(j, strip.n_y, strip.dy()) {
            if cy != 0.0 {
                out.push((idx(i, jj), cy * w));
            }
            if cxy != 0.0 {
                let s = cxy * w / (2.0 * dx);
                out.push((idx(ip, jj), s));
                out.push((idx(im, jj), -s));
            }
        }
    }
    if c0 != 0.0 {
        out.push((idx(i, j), c0));
    }
}

/// Applies the discrete operator to a field at every node, boundary levels
/// included.
pub fn apply_operator(coeffs: &CoefficientField, field: &StripField) -> Result<StripField> {
    if coeffs.strip != field.strip {
        return invalid("coefficient field and strip field have different shapes");
    }
    let strip = field.strip;
    let mut out = vec![0.0; strip.len()];
    let mut st = Vec::with_capacity(24);
    for j in 0..=strip.n_y {
        for i in 0..strip.n_x() {
            let n = strip.idx(i, j);
            st.clear();
            node_stencil(&strip, coeffs.node(n), i, j, &mut st);
            out[n] = st.iter().map(|&(m, w)| w * field.values[m]).sum();
        }
    }
    StripField::new(strip, out)
}

fn check_side(strip: &StripGrid, side: Side) -> Result<()> {
    if strip.side != side {
        return invalid(format!("operator expects the {side:?} strip"));
    }
    Ok(())
}

fn check_y(y: f64, lo: f64, hi: f64) -> Result<()> {
    if !(lo..=hi).contains(&y) {
        return invalid(format!("y = {y} outside [{lo}, {hi}]"));
    }
    Ok(())
}

/// Image of a point of `Ω̄₋` in the lower fluid domain.
pub fn map_phi_minus(f: &PeriodicFn<f64>, d: f64, point: (f64, f64)) -> Result<(f64, f64)> {
    let (x, y) = point;
    check_y(y, -1.0, 0.0)?;
    Ok((x, -d * y + (1.0 + y) * f.eval(x)))
}

/// Image of a point of `Ω̄₊` in the upper fluid domain.
pub fn map_phi_plus(f: &PeriodicFn<f64>, h: &PeriodicFn<f64>, point: (f64, f64)) -> Result<(f64, f64)> {
    let (x, y) = point;
    check_y(y, 0.0, 1.0)?;
    Ok((x, y * h.eval(x) + (1.0 - y) * f.eval(x)))
}

/// Physical heights of the strip nodes under the pullback maps.
pub fn physical_heights(pair: &InterfacePair<f64>, strip: StripGrid) -> StripField {
    let mut out = StripField::zeros(strip);
    for j in 0..=strip.n_y {
        let y = strip.y(j);
        for i in 0..strip.n_x() {
            let f = pair.f.values()[i];
            out.values[strip.idx(i, j)] = match strip.side {
                Side::Minus => -pair.d * y + (1.0 + y) * f,
                Side::Plus => y * pair.h.values()[i] + (1.0 - y) * f,
            };
        }
    }
    out
}

/// Samples a physical function `u(x, Y)` at the pulled-back strip nodes.
pub fn pullback(pair: &InterfacePair<f64>, strip: StripGrid, u: impl Fn(f64, f64) -> f64) -> StripField {
    let heights = physical_heights(pair, strip);
    let mut out = heights.clone();
    for j in 0..=strip.n_y {
        for i in 0..strip.n_x() {
            let n = strip.idx(i, j);
            out.values[n] = u(strip.grid.node(i), heights.values[n]);
        }
    }
    out
}

fn positive_gap(gap: &PeriodicFn<f64>, what: &str) -> Result<()> {
    if gap.min() <= 0.0 {
        return domain(format!("{what} must be positive, min is {}", gap.min()));
    }
    Ok(())
}

/// Coefficients of the pulled-back Laplacian on `Ω₋`.
pub fn coeffs_a_minus(f: &PeriodicFn<f64>, params: &FluidParams<f64>, strip: StripGrid) -> Result<CoefficientField> {
    check_side(&strip, Side::Minus)?;
    let gap = f.map(|v| v - params.d);
    positive_gap(&gap, "f - d")?;
    let (f1, f2) = d1_d2(f);
    let mut c = CoefficientField::laplacian(strip);
    for j in 0..=strip.n_y {
        let yy = 1.0 + strip.y(j);
        for i in 0..strip.n_x() {
            let n = strip.idx(i, j);
            let (g, p, q) = (gap.values()[i], f1.values()[i], f2.values()[i]);
            c.c_xy[n] = -2.0 * yy * p / g;
            c.c_yy[n] = (yy * yy * p * p + 1.0) / (g * g);
            c.c_y[n] = -yy * (g * q - 2.0 * p * p) / (g * g);
        }
    }
    Ok(c)
}

/// Coefficients of the pulled-back Laplacian on `Ω₊`.
pub fn coeffs_a_plus(
    f: &PeriodicFn<f64>,
    h: &PeriodicFn<f64>,
    _params: &FluidParams<f64>,
    strip: StripGrid,
) -> Result<CoefficientField> {
    check_side(&strip, Side::Plus)?;
    let gap = h.sub(f);
    positive_gap(&gap, "h - f")?;
    let (f1, f2) = d1_d2(f);
    let (h1, h2) = d1_d2(h);
    let mut c = CoefficientField::laplacian(strip);
    for j in 0..=strip.n_y {
        let y = strip.y(j);
        for i in 0..strip.n_x() {
            let n = strip.idx(i, j);
            let g = gap.values()[i];
            let (fp, fpp, hp, hpp) = (f1.values()[i], f2.values()[i], h1.values()[i], h2.values()[i]);
            let s = y * hp + (1.0 - y) * fp;
            c.c_xy[n] = -2.0 * s / g;
            c.c_yy[n] = (s * s + 1.0) / (g * g);
            c.c_y[n] = -((y * hpp + (1.0 - y) * fpp) / g - 2.0 * (hp - fp) * s / (g * g));
        }
    }
    Ok(c)
}

/// Which boundary a [`BoundaryOp`] lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryLevel {
    /// `y = 0`
    Interface,
    /// `y = 1` of the plus strip
    Top,
}

/// First-order boundary operator `β₁·tr ∂x + β₂·tr ∂y` on one strip.
/// `∂y` is the one-sided second-order stencil, `∂x` spectral.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryOp {
    pub side: Side,
    pub level: BoundaryLevel,
    pub beta1: PeriodicFn<f64>,
    pub beta2: PeriodicFn<f64>,
}

impl BoundaryOp {
    pub fn level_index(&self, strip: &StripGrid) -> usize {
        match self.level {
            BoundaryLevel::Interface => strip.interface_level(),
            BoundaryLevel::Top => strip.outer_level(),
        }
    }

    pub fn apply(&self, field: &StripField) -> Result<PeriodicFn<f64>> {
        if field.strip.side != self.side {
            return invalid("boundary operator applied to the wrong strip");
        }
        if field.strip.grid != self.beta1.grid() {
            return invalid("boundary operator and field use different grids");
        }
        let j = self.level_index(&field.strip);
        let vy = field.dy_level(j);
        let vx = field.dx_level(j);
        let values = (0..vy.len())
            .map(|i| self.beta2.values()[i] * vy.values()[i] + self.beta1.values()[i] * vx.values()[i])
            .collect();
        PeriodicFn::new(vy.grid(), values)
    }
}

/// Coefficients of the flux operator on `Γ₀` seen from the lower strip.
pub fn boundary_op_minus(f: &PeriodicFn<f64>, params: &FluidParams<f64>) -> Result<BoundaryOp> {
    let gap = f.map(|v| v - params.d);
    positive_gap(&gap, "f - d")?;
    let f1 = spectral_derivative(f, 1)?;
    let c = params.k / params.mu_minus;
    Ok(BoundaryOp {
        side: Side::Minus,
        level: BoundaryLevel::Interface,
        beta1: f1.scale(-c),
        beta2: f1.zip_with(&gap, |p, g| c * (1.0 + p * p) / g),
    })
}

/// Coefficients of the flux operator on `Γ₀` seen from the upper strip.
pub fn boundary_op_plus(f: &PeriodicFn<f64>, h: &PeriodicFn<f64>, params: &FluidParams<f64>) -> Result<BoundaryOp> {
    let gap = h.sub(f);
    positive_gap(&gap, "h - f")?;
    let f1 = spectral_derivative(f, 1)?;
    let c = params.k / params.mu_plus;
    Ok(BoundaryOp {
        side: Side::Plus,
        level: BoundaryLevel::Interface,
        beta1: f1.scale(-c),
        beta2: f1.zip_with(&gap, |p, g| c * (1.0 + p * p) / g),
    })
}

/// Coefficients of the flux operator on `Γ₁`.
pub fn boundary_op_top(f: &PeriodicFn<f64>, h: &PeriodicFn<f64>, params: &FluidParams<f64>) -> Result<BoundaryOp> {
    let gap = h.sub(f);
    positive_gap(&gap, "h - f")?;
    let h1 = spectral_derivative(h, 1)?;
    let c = params.k / params.mu_plus;
    Ok(BoundaryOp {
        side: Side::Plus,
        level: BoundaryLevel::Top,
        beta1: h1.scale(-c),
        beta2: h1.zip_with(&gap, |p, g| c * (1.0 + p * p) / g),
    })
}

/// `ℬ(f)v₋` on `Γ₀`.
pub fn boundary_b_minus(f: &PeriodicFn<f64>, params: &FluidParams<f64>, field: &StripField) -> Result<PeriodicFn<f64>> {
    boundary_op_minus(f, params)?.apply(field)
}

/// `ℬ(f,h)v₊` on `Γ₀`.
pub fn boundary_b_plus(
    f: &PeriodicFn<f64>,
    h: &PeriodicFn<f64>,
    params: &FluidParams<f64>,
    field: &StripField,
) -> Result<PeriodicFn<f64>> {
    boundary_op_plus(f, h, params)?.apply(field)
}

/// `ℬ₁(f,h)v₊` on `Γ₁`.
pub fn boundary_b1(
    f: &PeriodicFn<f64>,
    h: &PeriodicFn<f64>,
    params: &FluidParams<f64>,
    field: &StripField,
) -> Result<PeriodicFn<f64>> {
    boundary_op_top(f, h, params)?.apply(field)
}

/// Selects a directional derivative of the elliptic operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrechetA {
    /// `∂_f 𝒜(f)` on the lower strip
    MinusF,
    /// `∂_f 𝒜(f,h)` on the upper strip
    PlusF,
    /// `∂_h 𝒜(f,h)` on the upper strip
    PlusH,
}

/// Selects a directional derivative of the boundary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrechetB {
    BMinusF,
    BPlusF,
    BPlusH,
    B1H,
}

fn base_gaps(base: &InterfacePair<f64>) -> Result<(PeriodicFn<f64>, PeriodicFn<f64>)> {
    let fd = base.f.map(|v| v - base.d);
    let hf = base.h.sub(&base.f);
    positive_gap(&fd, "f - d")?;
    positive_gap(&hf, "h - f")?;
    Ok((fd, hf))
}

/// Coefficients of the directional derivative of `𝒜(f)` or `𝒜(f,h)` at
/// `base` in the given direction. `c_xx`, `c_x` and `c_0` vanish.
pub fn frechet_a(
    which: FrechetA,
    base: &InterfacePair<f64>,
    direction: &PeriodicFn<f64>,
    _params: &FluidParams<f64>,
    strip: StripGrid,
) -> Result<CoefficientField> {
    let (gap_fd, gap_hf) = base_gaps(base)?;
    let (a1, a2) = d1_d2(&base.f);
    let (b1, b2) = d1_d2(&base.h);
    let (u1, u2) = d1_d2(direction);
    let u = direction.values();
    let mut c = CoefficientField::zeros(strip);
    match which {
        FrechetA::MinusF => {
            check_side(&strip, Side::Minus)?;
            for j in 0..=strip.n_y {
                let yy = 1.0 + strip.y(j);
                for i in 0..strip.n_x() {
                    let n = strip.idx(i, j);
                    let g = gap_fd.values()[i];
                    let (p, q) = (a1.values()[i], a2.values()[i]);
                    let (w, w1, w2) = (u[i], u1.values()[i], u2.values()[i]);
                    c.c_xy[n] = 2.0 * (yy * p * w / (g * g) - yy * w1 / g);
                    c.c_yy[n] = 2.0 * (yy * yy * p * w1 / (g * g) - (yy * yy * p * p + 1.0) * w / (g * g * g));
                    c.c_y[n] = -yy
                        * ((g * w2 + q * w - 4.0 * p * w1) / (g * g) - 2.0 * (g * q - 2.0 * p * p) * w / (g * g * g));
                }
            }
        }
        FrechetA::PlusF | FrechetA::PlusH => {
            check_side(&strip, Side::Plus)?;
            for j in 0..=strip.n_y {
                let y = strip.y(j);
                for i in 0..strip.n_x() {
                    let n = strip.idx(i, j);
                    let g = gap_hf.values()[i];
                    let (fp, fpp) = (a1.values()[i], a2.values()[i]);
                    let (hp, hpp) = (b1.values()[i], b2.values()[i]);
                    let (w, w1, w2) = (u[i], u1.values()[i], u2.values()[i]);
                    let s = y * hp + (1.0 - y) * fp;
                    let curv = y * hpp + (1.0 - y) * fpp;
                    let (g2, g3) = (g * g, g * g * g);
                    if which == FrechetA::PlusF {
                        c.c_xy[n] = -2.0 * ((1.0 - y) * w1 / g + s * w / g2);
                        c.c_yy[n] = 2.0 * (s * s + 1.0) * w / g3 + 2.0 * (1.0 - y) * s * w1 / g2;
                        c.c_y[n] = -((1.0 - y) * w2 / g + curv * w / g2
                            - 2.0 * ((1.0 - 2.0 * y) * (hp - fp) - fp) * w1 / g2
                            - 4.0 * (hp - fp) * s * w / g3);
                    } else {
                        c.c_xy[n] = 2.0 * (s * w / g2 - y * w1 / g);
                        c.c_yy[n] = 2.0 * (y * s * w1 / g2 - (s * s + 1.0) * w / g3);
                        c.c_y[n] =
                            -(y * w2 / g - curv * w / g2 - 2.0 * (2.0 * y * hp + (1.0 - 2.0 * y) * fp) * w1 / g2
                                + 4.0 * (hp - fp) * s * w / g3);
                    }
                }
            }
        }
    }
    Ok(c)
}

/// Coefficients of a directional derivative of a boundary operator.
pub fn frechet_b_op(
    which: FrechetB,
    base: &InterfacePair<f64>,
    direction: &PeriodicFn<f64>,
    params: &FluidParams<f64>,
) -> Result<BoundaryOp> {
    let (gap_fd, gap_hf) = base_gaps(base)?;
    let (u1, _) = d1_d2(direction);
    let u = direction.values();
    let f1 = spectral_derivative(&base.f, 1)?;
    let h1 = spectral_derivative(&base.h, 1)?;
    let n = direction.len();
    let grid = direction.grid();
    let km = params.k / params.mu_minus;
    let kp = params.k / params.mu_plus;
    let build = |side, level, beta1: Vec<f64>, beta2: Vec<f64>| -> Result<BoundaryOp> {
        Ok(BoundaryOp {
            side,
            level,
            beta1: PeriodicFn::new(grid, beta1)?,
            beta2: PeriodicFn::new(grid, beta2)?,
        })
    };
    let beta1_f: Vec<f64> = u1.values().to_vec();
    match which {
        FrechetB::BMinusF => {
            let beta2 = (0..n)
                .map(|i| {
                    let (g, p) = (gap_fd.values()[i], f1.values()[i]);
                    km * (2.0 * p * u1.values()[i] / g - (1.0 + p * p) * u[i] / (g * g))
                })
                .collect();
            build(
                Side::Minus,
                BoundaryLevel::Interface,
                beta1_f.iter().map(|v| -km * v).collect(),
                beta2,
            )
        }
        FrechetB::BPlusF => {
            let beta2 = (0..n)
                .map(|i| {
                    let (g, p) = (gap_hf.values()[i], f1.values()[i]);
                    kp * (2.0 * p * u1.values()[i] / g + (1.0 + p * p) * u[i] / (g * g))
                })
                .collect();
            build(
                Side::Plus,
                BoundaryLevel::Interface,
                beta1_f.iter().map(|v| -kp * v).collect(),
                beta2,
            )
        }
        FrechetB::BPlusH => {
            let beta2 = (0..n)
                .map(|i| {
                    let (g, p) = (gap_hf.values()[i], f1.values()[i]);
                    -kp * (1.0 + p * p) * u[i] / (g * g)
                })
                .collect();
            build(Side::Plus, BoundaryLevel::Interface, vec![0.0; n], beta2)
        }
        FrechetB::B1H => {
            let beta2 = (0..n)
                .map(|i| {
                    let (g, p) = (gap_hf.values()[i], h1.values()[i]);
                    kp * (2.0 * p * u1.values()[i] / g - (1.0 + p * p) * u[i] / (g * g))
                })
                .collect();
            build(
                Side::Plus,
                BoundaryLevel::Top,
                beta1_f.iter().map(|v| -kp * v).collect(),
                beta2,
            )
        }
    }
}

/// Directional derivative of a boundary operator applied to `field`.
pub fn frechet_b(
    which: FrechetB,
    base: &InterfacePair<f64>,
    direction: &PeriodicFn<f64>,
    params: &FluidParams<f64>,
    field: &StripField,
) -> Result<PeriodicFn<f64>> {
    frechet_b_op(which, base, direction, params)?.apply(field)
}

/// Evaluates the nonlinear boundary map selected by `which` at `pair`,
/// i.e. the operator whose derivative [`frechet_b`] computes.
pub fn boundary_map(
    which: FrechetB,
    pair: &InterfacePair<f64>,
    params: &FluidParams<f64>,
    field: &StripField,
) -> Result<PeriodicFn<f64>> {
    let p = FluidParams { d: pair.d, ..*params };
    match which {
        FrechetB::BMinusF => boundary_b_minus(&pair.f, &p, field),
        FrechetB::BPlusF | FrechetB::BPlusH => boundary_b_plus(&pair.f, &pair.h, &p, field),
        FrechetB::B1H => boundary_b1(&pair.f, &pair.h, &p, field),
    }
}

/// Evaluates the nonlinear coefficient map selected by `which` at `pair`.
pub fn coefficient_map(
    which: FrechetA,
    pair: &InterfacePair<f64>,
    params: &FluidParams<f64>,
    strip: StripGrid,
) -> Result<CoefficientField> {
    let p = FluidParams { d: pair.d, ..*params };
    match which {
        FrechetA::MinusF => coeffs_a_minus(&pair.f, &p, strip),
        FrechetA::PlusF | FrechetA::PlusH => coeffs_a_plus(&pair.f, &pair.h, &p, strip),
    }
}
