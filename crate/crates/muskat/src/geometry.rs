//! Periodic grids, spectral differentiation, admissibility and curvature.

use std::marker::PhantomData;

use num_complex::Complex;

use crate::error::{domain, invalid, Result};
use crate::scalar::Real;

/// Uniform grid on the unit circle, `x_i = 2πi/n_x`.
#[derive(Debug)]
pub struct PeriodicGrid<T> {
    n_x: usize,
    _scalar: PhantomData<T>,
}

impl<T> Clone for PeriodicGrid<T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for PeriodicGrid<T> {}

impl<T> PartialEq for PeriodicGrid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.n_x == other.n_x
    }
}

impl<T> Eq for PeriodicGrid<T> {}

impl<T: Real> PeriodicGrid<T> {
    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn spacing(&self) -> T {
        T::TAU() / T::of_usize(self.n_x)
    }

    pub fn node(&self, i: usize) -> T {
        T::TAU() * T::of_usize(i) / T::of_usize(self.n_x)
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.n_x).map(|i| self.node(i)).collect()
    }

    /// Signed wavenumber stored at FFT slot `k`.
    pub fn wavenumber(&self, k: usize) -> i64 {
        if k <= self.n_x / 2 {
            k as i64
        } else {
            k as i64 - self.n_x as i64
        }
    }
}

/// Builds the uniform grid with `n_x` nodes; `n_x` must be even and at least 8.
pub fn make_grid<T: Real>(n_x: usize) -> Result<PeriodicGrid<T>> {
    if n_x < 8 || n_x % 2 != 0 {
        return invalid(format!("grid size must be even and >= 8, got {n_x}"));
    }
    Ok(PeriodicGrid {
        n_x,
        _scalar: PhantomData,
    })
}

/// A 2π-periodic function sampled on a [`PeriodicGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicFn<T> {
    grid: PeriodicGrid<T>,
    values: Vec<T>,
}

impl<T: Real> PeriodicFn<T> {
    pub fn new(grid: PeriodicGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n_x() {
            return invalid(format!("expected {} samples, got {}", grid.n_x(), values.len()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("non-finite sample");
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: PeriodicGrid<T>, f: impl Fn(T) -> T) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub fn constant(grid: PeriodicGrid<T>, c: T) -> Self {
        Self {
            grid,
            values: vec![c; grid.n_x()],
        }
    }

    pub fn zeros(grid: PeriodicGrid<T>) -> Self {
        Self::constant(grid, T::zero())
    }

    pub fn grid(&self) -> PeriodicGrid<T> {
        self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Nodewise combination. Panics when the grids differ.
    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.grid, other.grid, "periodic functions on different grids");
        Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    /// `self + s * other`
    pub fn axpy(&self, s: T, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + s * b)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    /// Circular shift: the result at node `i` is the input at node `i - k`.
    pub fn shifted(&self, k: usize) -> Self {
        let n = self.len();
        let values = (0..n).map(|i| self.values[(i + n - k % n) % n]).collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    /// Unnormalised discrete Fourier coefficients.
    pub fn fourier(&self) -> Vec<Complex<T>> {
        let mut buf: Vec<Complex<T>> = self.values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        T::plan_fft(buf.len(), false).process(&mut buf);
        buf
    }

    /// Inverse of [`PeriodicFn::fourier`], keeping the real part.
    pub fn from_fourier(grid: PeriodicGrid<T>, mut coeffs: Vec<Complex<T>>) -> Self {
        assert_eq!(coeffs.len(), grid.n_x());
        T::plan_fft(coeffs.len(), true).process(&mut coeffs);
        let n = T::of_usize(grid.n_x());
        Self {
            grid,
            values: coeffs.into_iter().map(|c| c.re / n).collect(),
        }
    }

    /// Evaluates the trigonometric interpolant at an arbitrary point.
    /// The Nyquist mode is read as a pure cosine.
    pub fn eval(&self, x: T) -> T {
        let c = self.fourier();
        let n = self.len();
        let mut acc = T::zero();
        for (k, ck) in c.iter().enumerate() {
            let m = self.grid.wavenumber(k);
            if k == n / 2 {
                acc = acc + ck.re * (T::of_i64(m) * x).cos();
            } else {
                let phase = T::of_i64(m) * x;
                acc = acc + ck.re * phase.cos() - ck.im * phase.sin();
            }
        }
        acc / T::of_usize(n)
    }

    /// Amplitudes `(a, b)` of `a cos(mx) + b sin(mx)` in the interpolant.
    pub fn mode(&self, m: usize) -> (T, T) {
        let n = self.len();
        let c = self.fourier();
        let nn = T::of_usize(n);
        if m == 0 {
            (c[0].re / nn, T::zero())
        } else if 2 * m == n {
            (c[m].re / nn, T::zero())
        } else if 2 * m < n {
            let two = T::lit(2.0);
            (two * c[m].re / nn, -two * c[m].im / nn)
        } else {
            (T::zero(), T::zero())
        }
    }

    /// Zeroes every mode with `|m| > fraction * n_x / 2`.
    pub fn truncated(&self, fraction: T) -> Self {
        let mut c = self.fourier();
        let cutoff = fraction * T::of_usize(self.len() / 2);
        for (k, ck) in c.iter_mut().enumerate() {
            if T::of_i64(self.grid.wavenumber(k).abs()) > cutoff {
                *ck = Complex::new(T::zero(), T::zero());
            }
        }
        Self::from_fourier(self.grid, c)
    }
}

fn same_grid<T: Real>(a: &PeriodicFn<T>, b: &PeriodicFn<T>) -> Result<()> {
    if a.grid() != b.grid() {
        return invalid(format!("grid mismatch ({} vs {} nodes)", a.len(), b.len()));
    }
    Ok(())
}

/// Exact derivative of the trigonometric interpolant of `u`.
/// For odd orders the Nyquist coefficient is dropped.
pub fn spectral_derivative<T: Real>(u: &PeriodicFn<T>, order: u32) -> Result<PeriodicFn<T>> {
    if !(1..=4).contains(&order) {
        return invalid(format!("derivative order must be in 1..=4, got {order}"));
    }
    let grid = u.grid();
    let n = u.len();
    let mut c = u.fourier();
    for (k, ck) in c.iter_mut().enumerate() {
        if k == n / 2 && order % 2 == 1 {
            *ck = Complex::new(T::zero(), T::zero());
            continue;
        }
        let ik = Complex::new(T::zero(), T::of_i64(grid.wavenumber(k)));
        *ck = *ck * ik.powu(order);
    }
    Ok(PeriodicFn::from_fourier(grid, c))
}

/// First and second spectral derivatives.
pub(crate) fn d1_d2<T: Real>(u: &PeriodicFn<T>) -> (PeriodicFn<T>, PeriodicFn<T>) {
    (
        spectral_derivative(u, 1).expect("order 1"),
        spectral_derivative(u, 2).expect("order 2"),
    )
}

/// Curvature of the graph `y = ζ(x)`: `ζ'' / (1 + ζ'^2)^{3/2}`.
pub fn curvature<T: Real>(zeta: &PeriodicFn<T>) -> PeriodicFn<T> {
    let (d1, d2) = d1_d2(zeta);
    d1.zip_with(&d2, |a, b| b / (T::one() + a * a).powf(T::lit(1.5)))
}

/// Directional derivative of [`curvature`] at `zeta0` in direction `h`.
pub fn curvature_frechet<T: Real>(zeta0: &PeriodicFn<T>, h: &PeriodicFn<T>) -> Result<PeriodicFn<T>> {
    same_grid(zeta0, h)?;
    let (z1, z2) = d1_d2(zeta0);
    let (h1, h2) = d1_d2(h);
    let three = T::lit(3.0);
    let values = (0..h.len())
        .map(|i| {
            let q = T::one() + z1.values[i] * z1.values[i];
            h2.values[i] / q.powf(T::lit(1.5))
                - three * z1.values[i] * z2.values[i] * h1.values[i] / q.powf(T::lit(2.5))
        })
        .collect();
    PeriodicFn::new(h.grid(), values)
}

/// Result of [`check_admissible`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilityReport<T> {
    pub ok: bool,
    /// `min(f - d)`
    pub gap_fd: T,
    /// `min(h - f)`
    pub gap_hf: T,
}

/// Checks `d < f < h` at the grid nodes.
pub fn check_admissible<T: Real>(f: &PeriodicFn<T>, h: &PeriodicFn<T>, d: T) -> Result<AdmissibilityReport<T>> {
    same_grid(f, h)?;
    let gap_fd = f.map(|v| v - d).min();
    let gap_hf = h.sub(f).min();
    Ok(AdmissibilityReport {
        ok: gap_fd > T::zero() && gap_hf > T::zero(),
        gap_fd,
        gap_hf,
    })
}

/// Lower interface `f`, upper interface `h` and bottom height `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfacePair<T> {
    pub f: PeriodicFn<T>,
    pub h: PeriodicFn<T>,
    pub d: T,
}

impl<T: Real> InterfacePair<T> {
    /// Validated constructor; fails with a domain error unless `d < f < h`.
    pub fn new(f: PeriodicFn<T>, h: PeriodicFn<T>, d: T) -> Result<Self> {
        let report = check_admissible(&f, &h, d)?;
        if !report.ok {
            return domain(format!(
                "interfaces not admissible: min(f-d) = {}, min(h-f) = {}",
                report.gap_fd, report.gap_hf
            ));
        }
        Ok(Self { f, h, d })
    }

    /// Flat pair `f ≡ f0`, `h ≡ h0`.
    pub fn flat(grid: PeriodicGrid<T>, f0: T, h0: T, d: T) -> Result<Self> {
        Self::new(PeriodicFn::constant(grid, f0), PeriodicFn::constant(grid, h0), d)
    }

    pub fn grid(&self) -> PeriodicGrid<T> {
        self.f.grid()
    }

    pub fn admissibility(&self) -> AdmissibilityReport<T> {
        check_admissible(&self.f, &self.h, self.d).expect("pair shares a grid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grid_nodes_and_rejections() {
        let g = make_grid::<f64>(8).unwrap();
        let nodes = g.nodes();
        for (i, x) in nodes.iter().enumerate() {
            assert!((x - i as f64 * PI / 4.0).abs() < 1e-15);
        }
        assert!((make_grid::<f64>(64).unwrap().spacing() - 2.0 * PI / 64.0).abs() < 1e-16);
        assert!(matches!(make_grid::<f64>(7), Err(crate::Error::InvalidArgument(_))));
        assert!(make_grid::<f64>(6).is_err());
    }

    #[test]
    fn derivative_of_sine_and_constant() {
        let g = make_grid::<f64>(32).unwrap();
        let u = PeriodicFn::from_fn(g, f64::sin);
        let du = spectral_derivative(&u, 1).unwrap();
        for (x, v) in g.nodes().iter().zip(du.values()) {
            assert!((v - x.cos()).abs() < 1e-14);
        }
        let c = PeriodicFn::constant(g, 3.5);
        for order in 1..=4 {
            assert!(spectral_derivative(&c, order).unwrap().sup_norm() < 1e-13);
        }
        assert!(spectral_derivative(&c, 0).is_err());
        assert!(spectral_derivative(&c, 5).is_err());
    }

    #[test]
    fn derivative_works_in_single_precision() {
        let g = make_grid::<f32>(16).unwrap();
        let u = PeriodicFn::from_fn(g, |x| (2.0 * x).cos());
        let d2 = spectral_derivative(&u, 2).unwrap();
        for (x, v) in g.nodes().iter().zip(d2.values()) {
            assert!((v + 4.0 * (2.0 * x).cos()).abs() < 1e-4);
        }
    }

    #[test]
    fn nyquist_mode_handling() {
        let g = make_grid::<f64>(8).unwrap();
        let u = PeriodicFn::from_fn(g, |x| (4.0 * x).cos());
        assert!(spectral_derivative(&u, 1).unwrap().sup_norm() < 1e-13);
        let d2 = spectral_derivative(&u, 2).unwrap();
        for (x, v) in g.nodes().iter().zip(d2.values()) {
            assert!((v + 16.0 * (4.0 * x).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn curvature_examples() {
        let g = make_grid::<f64>(32).unwrap();
        assert!(curvature(&PeriodicFn::zeros(g)).sup_norm() < 1e-15);
        let k = curvature(&PeriodicFn::from_fn(g, f64::sin));
        // x = π/2 is node 8 of 32
        assert!((k.values()[8] + 1.0).abs() < 1e-13);
        let z = PeriodicFn::from_fn(g, |x| 0.01 * (2.0 * x).sin());
        let k = curvature(&z);
        for (x, v) in g.nodes().iter().zip(k.values()) {
            let lin = -0.04 * (2.0 * x).sin();
            assert!((v - lin).abs() <= 1e-3 * 0.04);
        }
    }

    #[test]
    fn curvature_frechet_examples() {
        let g = make_grid::<f64>(32).unwrap();
        let h = PeriodicFn::from_fn(g, |x| (3.0 * x).cos() + 0.2 * x.sin());
        let at_zero = curvature_frechet(&PeriodicFn::zeros(g), &h).unwrap();
        let h2 = spectral_derivative(&h, 2).unwrap();
        assert!(at_zero.sub(&h2).sup_norm() < 1e-12);
        let z0 = PeriodicFn::from_fn(g, |x| 0.3 * x.sin());
        assert!(curvature_frechet(&z0, &PeriodicFn::zeros(g)).unwrap().sup_norm() < 1e-15);
        let other = make_grid::<f64>(16).unwrap();
        assert!(curvature_frechet(&z0, &PeriodicFn::zeros(other)).is_err());
    }

    #[test]
    fn admissibility_examples() {
        let g = make_grid::<f64>(16).unwrap();
        let r = check_admissible(&PeriodicFn::zeros(g), &PeriodicFn::constant(g, 1.0), -1.0).unwrap();
        assert!(r.ok && r.gap_fd == 1.0 && r.gap_hf == 1.0);
        let r = check_admissible(&PeriodicFn::zeros(g), &PeriodicFn::zeros(g), -1.0).unwrap();
        assert!(!r.ok && r.gap_hf == 0.0);
        // sin reaches ±1 at nodes 4 and 12 of 16
        let f = PeriodicFn::from_fn(g, |x| 0.5 * x.sin());
        let r = check_admissible(&f, &PeriodicFn::constant(g, 1.0), -1.0).unwrap();
        assert!(r.ok);
        assert!((r.gap_fd - 0.5).abs() < 1e-15 && (r.gap_hf - 0.5).abs() < 1e-15);
        assert!(InterfacePair::flat(g, 0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn interpolation_and_modes() {
        let g = make_grid::<f64>(16).unwrap();
        let u = PeriodicFn::from_fn(g, |x| 0.3 + 2.0 * (3.0 * x).cos() - 0.7 * (5.0 * x).sin());
        for x in [0.1f64, 1.3, 4.4] {
            let exact = 0.3 + 2.0 * (3.0 * x).cos() - 0.7 * (5.0 * x).sin();
            assert!((u.eval(x) - exact).abs() < 1e-13);
        }
        let (a, b) = u.mode(3);
        assert!((a - 2.0).abs() < 1e-13 && b.abs() < 1e-13);
        let (a, b) = u.mode(5);
        assert!(a.abs() < 1e-13 && (b + 0.7).abs() < 1e-13);
        assert!((u.mode(0).0 - 0.3).abs() < 1e-14);
        let t = u.truncated(0.5);
        assert!(t.mode(5).1.abs() < 1e-14 && (t.mode(3).0 - 2.0).abs() < 1e-13);
    }
}
