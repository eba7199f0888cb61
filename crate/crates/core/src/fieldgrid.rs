//! Uniform periodic grids on `(t, x)` and sampled complex fields.
//!
//! Every derivative in the crate is spectral: a field is treated as one period
//! of a band-limited function, and the Fourier mode `k` is multiplied by
//! `(ik)^order`. Test states are required to decay at the box edges.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Edge amplitude (relative to the max-norm) below which a field counts as periodic.
pub const EDGE_DECAY: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    T,
    X,
}

/// Uniform grid with `n_t * n_x` nodes and the noncommutativity scale `theta`.
///
/// Nodes are `t_i = t_min + i dt` for `i < n_t` (the right endpoint is the
/// periodic image of the left one), likewise for `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_t: usize,
    pub n_x: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub theta: f64,
}

impl GridSpec {
    pub fn new(
        n_t: usize,
        n_x: usize,
        (t_min, t_max): (f64, f64),
        (x_min, x_max): (f64, f64),
        theta: f64,
    ) -> Result<Self> {
        let spec = Self { n_t, n_x, t_min, t_max, x_min, x_max, theta };
        spec.validate()?;
        Ok(spec)
    }

    /// Grid centred on the origin with half-widths `half_t`, `half_x`.
    pub fn centered(n_t: usize, n_x: usize, half_t: f64, half_x: f64, theta: f64) -> Result<Self> {
        Self::new(n_t, n_x, (-half_t, half_t), (-half_x, half_x), theta)
    }

    /// A grid for fixed-time work: the x axis as given, and a short t axis
    /// of 8 nodes around `t` that satisfies the resolution floor.
    pub fn for_slice(n_x: usize, (x_min, x_max): (f64, f64), theta: f64, t: f64) -> Result<Self> {
        let dt = if theta > 0.0 { theta.sqrt() / 4.0 } else { 0.125 };
        Self::new(8, n_x, (t - 4.0 * dt, t + 4.0 * dt), (x_min, x_max), theta)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("n_t", self.n_t), ("n_x", self.n_x)] {
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::Grid(format!("{name} = {n} must be a power of two >= 8")));
            }
        }
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return Err(Error::Grid(format!("theta = {} must be finite and >= 0", self.theta)));
        }
        let (dt, dx) = (self.dt(), self.dx());
        if !(dt > 0.0 && dt.is_finite()) || !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::Grid(format!("spacings must be positive (dt = {dt}, dx = {dx})")));
        }
        if self.theta > 0.0 {
            let floor = self.theta.sqrt() / 4.0 * (1.0 + 1e-12);
            if dt > floor || dx > floor {
                return Err(Error::Grid(format!(
                    "spacings (dt = {dt:.4e}, dx = {dx:.4e}) exceed sqrt(theta)/4 = {:.4e}",
                    self.theta.sqrt() / 4.0
                )));
            }
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        (self.t_max - self.t_min) / self.n_t as f64
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_x as f64
    }

    pub fn len_t(&self) -> f64 {
        self.t_max - self.t_min
    }

    pub fn len_x(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t_min + i as f64 * self.dt()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn t_nodes(&self) -> Vec<f64> {
        (0..self.n_t).map(|i| self.t(i)).collect()
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        (0..self.n_x).map(|i| self.x(i)).collect()
    }

    /// Angular wavenumbers of the DFT bins along `axis`, in FFT order.
    pub fn wavenumbers(&self, axis: Axis) -> Vec<f64> {
        match axis {
            Axis::T => wavenumbers(self.n_t, self.len_t()),
            Axis::X => wavenumbers(self.n_x, self.len_x()),
        }
    }

    pub fn same_shape(&self, other: &GridSpec) -> bool {
        self == other
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        let mut s = *self;
        s.theta = theta;
        s.validate()?;
        Ok(s)
    }
}

/// Angular wavenumbers `2 pi m / len` for bins `m` in FFT order.
pub fn wavenumbers(n: usize, len: f64) -> Vec<f64> {
    let dk = 2.0 * std::f64::consts::PI / len;
    (0..n)
        .map(|m| {
            let m = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
            m * dk
        })
        .collect()
}

pub(crate) fn fft_inplace(buf: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(buf.len())
    } else {
        planner.plan_fft_forward(buf.len())
    };
    fft.process(buf);
}

/// Normalized forward transform: coefficients `c_m` with `f(x_j) = sum_m c_m e^{i k_m (x_j - x_0)}`.
pub(crate) fn modes_1d(values: &[Complex64]) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    fft_inplace(&mut buf, false);
    let inv = 1.0 / values.len() as f64;
    buf.iter_mut().for_each(|c| *c *= inv);
    buf
}

/// Inverse of [`modes_1d`].
pub(crate) fn synth_1d(modes: &[Complex64]) -> Vec<Complex64> {
    let mut buf = modes.to_vec();
    fft_inplace(&mut buf, true);
    buf
}

/// Row-major 2-D transform over `(n_t, n_x)`; normalized like [`modes_1d`] when forward.
pub(crate) fn fft2(values: &[Complex64], n_t: usize, n_x: usize, inverse: bool) -> Vec<Complex64> {
    let mut planner = FftPlanner::<f64>::new();
    let (fx, ft) = if inverse {
        (planner.plan_fft_inverse(n_x), planner.plan_fft_inverse(n_t))
    } else {
        (planner.plan_fft_forward(n_x), planner.plan_fft_forward(n_t))
    };
    let mut buf = values.to_vec();
    buf.par_chunks_mut(n_x).for_each(|row| fx.process(row));
    let mut cols = vec![Complex64::new(0.0, 0.0); n_t * n_x];
    cols.par_chunks_mut(n_t).enumerate().for_each(|(ix, col)| {
        for it in 0..n_t {
            col[it] = buf[it * n_x + ix];
        }
        ft.process(col);
    });
    let scale = if inverse { 1.0 } else { 1.0 / (n_t * n_x) as f64 };
    buf.par_chunks_mut(n_x).enumerate().for_each(|(it, row)| {
        for ix in 0..n_x {
            row[ix] = cols[ix * n_t + it] * scale;
        }
    });
    buf
}

/// Multiplier `(ik)^order`, with the Nyquist bin zeroed for odd orders.
fn derivative_multiplier(k: f64, m: usize, n: usize, order: u32) -> Complex64 {
    if order % 2 == 1 && m == n / 2 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(0.0, k).powu(order)
}

/// Sampled complex field on a full `(t, x)` grid, row-major in `(i_t, i_x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field2D {
    pub spec: GridSpec,
    pub values: Vec<Complex64>,
}

impl Field2D {
    pub fn zeros(spec: GridSpec) -> Self {
        Self { spec, values: vec![Complex64::new(0.0, 0.0); spec.n_t * spec.n_x] }
    }

    pub fn from_values(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.n_t * spec.n_x {
            return Err(Error::SpecMismatch(format!(
                "{} values for a {}x{} grid",
                values.len(),
                spec.n_t,
                spec.n_x
            )));
        }
        if let Some(pos) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite { i_t: pos / spec.n_x, i_x: pos % spec.n_x });
        }
        Ok(Self { spec, values })
    }

    #[inline]
    pub fn at(&self, i_t: usize, i_x: usize) -> Complex64 {
        self.values[i_t * self.spec.n_x + i_x]
    }

    /// Row `i_t` as a fixed-time slice.
    pub fn row(&self, i_t: usize) -> Field1D {
        let n = self.spec.n_x;
        Field1D {
            spec: self.spec,
            t_slice: self.spec.t(i_t),
            values: self.values[i_t * n..(i_t + 1) * n].to_vec(),
            energy: None,
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64 + Sync) -> Self {
        Self { spec: self.spec, values: self.values.par_iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise map with access to the node coordinates `(t, x)`.
    pub fn map_nodes(&self, f: impl Fn(f64, f64, Complex64) -> Complex64 + Sync) -> Self {
        let s = self.spec;
        let values = self
            .values
            .par_iter()
            .enumerate()
            .map(|(i, &v)| f(s.t(i / s.n_x), s.x(i % s.n_x), v))
            .collect();
        Self { spec: s, values }
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn scale(&self, a: Complex64) -> Self {
        self.map(|v| v * a)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64 + Sync) -> Self {
        debug_assert_eq!(self.spec, other.spec);
        let values = self.values.par_iter().zip(other.values.par_iter()).map(|(&a, &b)| f(a, b)).collect();
        Self { spec: self.spec, values }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest boundary amplitude relative to the max-norm (0 for the zero field).
    pub fn edge_ratio(&self) -> f64 {
        let (nt, nx) = (self.spec.n_t, self.spec.n_x);
        let peak = self.max_norm();
        if peak == 0.0 {
            return 0.0;
        }
        let mut edge = 0.0f64;
        for ix in 0..nx {
            edge = edge.max(self.at(0, ix).norm()).max(self.at(nt - 1, ix).norm());
        }
        for it in 0..nt {
            edge = edge.max(self.at(it, 0).norm()).max(self.at(it, nx - 1).norm());
        }
        edge / peak
    }

    /// Boundary amplitude relative to the max-norm on the two edges normal to `axis`.
    pub fn edge_ratio_along(&self, axis: Axis) -> f64 {
        let (nt, nx) = (self.spec.n_t, self.spec.n_x);
        let peak = self.max_norm();
        if peak == 0.0 {
            return 0.0;
        }
        let edge = match axis {
            Axis::T => (0..nx).map(|ix| self.at(0, ix).norm().max(self.at(nt - 1, ix).norm())).fold(0.0, f64::max),
            Axis::X => (0..nt).map(|it| self.at(it, 0).norm().max(self.at(it, nx - 1).norm())).fold(0.0, f64::max),
        };
        edge / peak
    }

    /// Normalized Fourier coefficients, row-major in `(m_t, m_x)`.
    pub fn modes(&self) -> Vec<Complex64> {
        fft2(&self.values, self.spec.n_t, self.spec.n_x, false)
    }

    pub fn from_modes(spec: GridSpec, modes: &[Complex64]) -> Self {
        Self { spec, values: fft2(modes, spec.n_t, spec.n_x, true) }
    }

    /// Applies the Fourier multiplier `m(k_t, k_x)`.
    pub fn fourier_multiply(&self, m: impl Fn(f64, f64, usize, usize) -> Complex64 + Sync) -> Self {
        let s = self.spec;
        let (kt, kx) = (s.wavenumbers(Axis::T), s.wavenumbers(Axis::X));
        let mut modes = self.modes();
        modes.par_chunks_mut(s.n_x).enumerate().for_each(|(it, row)| {
            for (ix, c) in row.iter_mut().enumerate() {
                *c *= m(kt[it], kx[ix], it, ix);
            }
        });
        Self::from_modes(s, &modes)
    }

    /// Spectral derivative without the edge check.
    pub fn deriv(&self, axis: Axis, order: u32) -> Self {
        let (nt, nx) = (self.spec.n_t, self.spec.n_x);
        self.fourier_multiply(|kt, kx, it, ix| match axis {
            Axis::T => derivative_multiplier(kt, it, nt, order),
            Axis::X => derivative_multiplier(kx, ix, nx, order),
        })
    }

    /// Writes `t,x,re,im` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,x,re,im")?;
        for it in 0..self.spec.n_t {
            for ix in 0..self.spec.n_x {
                let v = self.at(it, ix);
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e}",
                    self.spec.t(it),
                    self.spec.x(ix),
                    v.re,
                    v.im
                )?;
            }
        }
        Ok(())
    }

    /// Writes `t,x,value` rows using the real part.
    pub fn write_real_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,x,value")?;
        for it in 0..self.spec.n_t {
            for ix in 0..self.spec.n_x {
                writeln!(w, "{:.16e},{:.16e},{:.16e}", self.spec.t(it), self.spec.x(ix), self.at(it, ix).re)?;
            }
        }
        Ok(())
    }
}

/// Complex field on the x axis at a fixed time, optionally tagged with the
/// energy `E` of a stationary state (`d_t -> -iE`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field1D {
    pub spec: GridSpec,
    pub t_slice: f64,
    pub values: Vec<Complex64>,
    pub energy: Option<f64>,
}

impl Field1D {
    pub fn new(spec: GridSpec, t_slice: f64, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.n_x {
            return Err(Error::SpecMismatch(format!("{} values for n_x = {}", values.len(), spec.n_x)));
        }
        if !(spec.t_min..=spec.t_max).contains(&t_slice) {
            return Err(Error::InvalidArgument(format!(
                "t_slice = {t_slice} outside [{}, {}]",
                spec.t_min, spec.t_max
            )));
        }
        if let Some(i_x) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite { i_t: 0, i_x });
        }
        Ok(Self { spec, t_slice, values, energy: None })
    }

    pub fn from_fn(spec: GridSpec, t_slice: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(spec, t_slice, spec.x_nodes().into_iter().map(f).collect())
    }

    pub fn with_energy(mut self, e: f64) -> Self {
        self.energy = Some(e);
        self
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn edge_ratio(&self) -> f64 {
        let peak = self.max_norm();
        if peak == 0.0 {
            return 0.0;
        }
        let n = self.values.len();
        self.values[0].norm().max(self.values[n - 1].norm()) / peak
    }

    pub fn deriv(&self, order: u32) -> Self {
        let n = self.spec.n_x;
        let k = self.spec.wavenumbers(Axis::X);
        let mut m = modes_1d(&self.values);
        for (i, c) in m.iter_mut().enumerate() {
            *c *= derivative_multiplier(k[i], i, n, order);
        }
        Self { values: synth_1d(&m), ..self.clone() }
    }

    /// `sum_i |v_i|^2 dx`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.spec.dx()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,x,re,im")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", self.t_slice, self.spec.x(i), v.re, v.im)?;
        }
        Ok(())
    }
}

/// Samples `f(t, x)` on every node.
pub fn sample_field(f: impl Fn(f64, f64) -> Complex64 + Sync, spec: GridSpec) -> Result<Field2D> {
    spec.validate()?;
    let values: Vec<Complex64> = (0..spec.n_t * spec.n_x)
        .into_par_iter()
        .map(|i| f(spec.t(i / spec.n_x), spec.x(i % spec.n_x)))
        .collect();
    Field2D::from_values(spec, values)
}

/// Result of [`spectral_derivative`]: the derivative and whether the input
/// violated the edge-decay precondition.
#[derive(Debug, Clone)]
pub struct Derivative {
    pub field: Field2D,
    pub edge_warning: bool,
}

/// Spectral derivative of `order` along `axis`.
pub fn spectral_derivative(field: &Field2D, axis: Axis, order: u32) -> Result<Derivative> {
    if order == 0 {
        return Err(Error::InvalidArgument("derivative order must be positive".into()));
    }
    Ok(Derivative { field: field.deriv(axis, order), edge_warning: field.edge_ratio_along(axis) > EDGE_DECAY })
}

/// Quadrature over all axes of a sampled field (periodic trapezoid rule).
pub trait Integrate {
    fn integrate(&self) -> Complex64;
}

impl Integrate for Field2D {
    fn integrate(&self) -> Complex64 {
        self.values.par_iter().sum::<Complex64>() * (self.spec.dt() * self.spec.dx())
    }
}

impl Integrate for Field1D {
    fn integrate(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.spec.dx()
    }
}

pub fn integrate(field: &impl Integrate) -> Complex64 {
    field.integrate()
}

impl Field2D {
    /// Integrates over `axis`, returning one value per node of the other axis.
    pub fn integrate_axis(&self, axis: Axis) -> Vec<Complex64> {
        let s = self.spec;
        match axis {
            Axis::X => (0..s.n_t)
                .map(|it| self.values[it * s.n_x..(it + 1) * s.n_x].iter().sum::<Complex64>() * s.dx())
                .collect(),
            Axis::T => (0..s.n_x)
                .map(|ix| (0..s.n_t).map(|it| self.at(it, ix)).sum::<Complex64>() * s.dt())
                .collect(),
        }
    }
}

/// Normalized Gaussian `delta_sigma(x) = exp(-x^2 / 2 sigma^2) / (sigma sqrt(2 pi))`.
pub fn delta_sigma(sigma: f64, x: f64) -> f64 {
    (-(x * x) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn grid(n: usize, half: f64) -> GridSpec {
        GridSpec::centered(n, n, half, half, 0.0).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::centered(12, 16, 1.0, 1.0, 0.0).is_err());
        assert!(GridSpec::centered(4, 16, 1.0, 1.0, 0.0).is_err());
        assert!(GridSpec::centered(16, 16, 1.0, 1.0, -1.0).is_err());
        assert!(GridSpec::new(16, 16, (1.0, 1.0), (0.0, 1.0), 0.0).is_err());
        // dx = 0.125 > sqrt(0.1)/4
        assert!(GridSpec::centered(16, 16, 1.0, 1.0, 0.1).is_err());
        assert!(GridSpec::centered(64, 64, 1.0, 1.0, 0.1).is_ok());
    }

    #[test]
    fn sampling_cases() {
        let s = grid(16, 4.0);
        let z = sample_field(|_, _| c(0.0), s).unwrap();
        assert_eq!(z.max_norm(), 0.0);
        let one = sample_field(|t, x| (-Complex64::i() * (0.0 * t - 0.0 * x)).exp(), s).unwrap();
        assert!(one.values.iter().all(|v| *v == c(1.0)));
        let g = sample_field(|_, x| c((-x * x).exp()), s).unwrap();
        // x nodes: -4 + 0.5 i, so x = 0 at i = 8 and x = 1 at i = 10
        assert_eq!(g.at(3, 8), c(1.0));
        assert!((g.at(3, 10).re - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn sampling_rejects_nan() {
        let s = grid(8, 1.0);
        let err = sample_field(|t, x| if t == s.t(2) && x == s.x(5) { c(f64::NAN) } else { c(1.0) }, s);
        match err {
            Err(Error::NonFinite { i_t, i_x }) => assert_eq!((i_t, i_x), (2, 5)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn plane_wave_derivative() {
        let s = grid(32, 4.0);
        let k = s.wavenumbers(Axis::X)[3];
        let f = sample_field(|_, x| Complex64::new(0.0, k * x).exp(), s).unwrap();
        let d = spectral_derivative(&f, Axis::X, 1).unwrap().field;
        let want = f.scale(Complex64::new(0.0, k));
        assert!(d.sub(&want).max_norm() < 1e-12);
    }

    #[test]
    fn gaussian_derivative() {
        let s = grid(128, 8.0);
        let f = sample_field(|_, x| c((-x * x).exp()), s).unwrap();
        let d = spectral_derivative(&f, Axis::X, 1).unwrap();
        assert!(!d.edge_warning);
        let want = sample_field(|_, x| c(-2.0 * x * (-x * x).exp()), s).unwrap();
        assert!(d.field.sub(&want).max_norm() < 1e-8);
    }

    #[test]
    fn constant_derivative_is_zero_and_order_zero_rejected() {
        let s = grid(16, 2.0);
        let f = sample_field(|_, _| c(3.0), s).unwrap();
        assert!(spectral_derivative(&f, Axis::T, 1).unwrap().field.max_norm() < 1e-14);
        assert!(spectral_derivative(&f, Axis::T, 0).is_err());
        // a constant does not decay, so the edge flag is raised
        assert!(spectral_derivative(&f, Axis::T, 1).unwrap().edge_warning);
    }

    #[test]
    fn mixed_derivatives_commute() {
        let s = grid(64, 8.0);
        let f = sample_field(|t, x| Complex64::new(0.0, 0.7 * x - 0.3 * t).exp() * (-(t * t + x * x) / 2.0).exp(), s)
            .unwrap();
        let a = f.deriv(Axis::T, 1).deriv(Axis::X, 1);
        let b = f.deriv(Axis::X, 1).deriv(Axis::T, 1);
        assert!(a.sub(&b).max_norm() < 1e-10);
    }

    #[test]
    fn quadrature_oracles() {
        let sigma = 0.5;
        let s = GridSpec::centered(8, 64, 1.0, 8.0 * sigma, 0.0).unwrap();
        let f = Field1D::from_fn(s, 0.0, |x| c(delta_sigma(sigma, x))).unwrap();
        assert!((f.integrate().re - 1.0).abs() < 1e-8);

        let s = GridSpec::centered(8, 128, 1.0, 8.0, 0.0).unwrap();
        let g = Field1D::from_fn(s, 0.0, |x| c((-x * x).exp())).unwrap();
        assert!((g.integrate().re - std::f64::consts::PI.sqrt()).abs() < 1e-8);
        let z = Field1D::from_fn(s, 0.0, |_| c(0.0)).unwrap();
        assert_eq!(z.integrate(), c(0.0));
    }

    #[test]
    fn refinement_is_stable() {
        let coarse = GridSpec::centered(8, 64, 1.0, 8.0, 0.0).unwrap();
        let fine = GridSpec::centered(8, 128, 1.0, 8.0, 0.0).unwrap();
        let a = Field1D::from_fn(coarse, 0.0, |x| c((-x * x).exp())).unwrap().integrate();
        let b = Field1D::from_fn(fine, 0.0, |x| c((-x * x).exp())).unwrap().integrate();
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let s = grid(8, 1.0);
        let f = sample_field(Complex64::new, s).unwrap();
        let mut out = Vec::new();
        f.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,x,re,im"));
        assert_eq!(text.lines().count(), 65);
        let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(first, vec![-1.0, -1.0, -1.0, -1.0]);
    }

    #[test]
    fn integrate_axis_matches_total() {
        let s = grid(32, 6.0);
        let f = sample_field(|t, x| c((-(t * t) - x * x / 2.0).exp()), s).unwrap();
        let rows: Complex64 = f.integrate_axis(Axis::X).iter().sum::<Complex64>() * s.dt();
        assert!((rows - f.integrate()).norm() < 1e-12);
    }
}
