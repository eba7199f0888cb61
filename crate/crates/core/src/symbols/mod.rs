//! Coherent-state symbol calculus.
//!
//! Symbols `psi(x, t)` of Hilbert-Schmidt states compose through the Voros
//! product. This module provides the momentum symbols and the Gaussian
//! overlaps of the coherent basis, the slice algebra ([`SliceSymbol`]) used
//! for fixed-time work, the star density and current, and the projection
//! onto the non-relativistic mass shell.

mod slice;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use slice::{induced_inner_product, Component, SliceSymbol};

use crate::fieldgrid::{delta_sigma, sample_field, Axis, Field2D, GridSpec};
use crate::star::{star, Flavor, StarKernel};
use crate::{Error, Result};

use std::f64::consts::PI;

/// Relative size of the last retained term of the positive density series.
pub const DENSITY_SERIES_TOL: f64 = 1e-12;

/// Relative mode magnitude treated as roundoff by the density series.
const ROUNDOFF_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumLabel {
    pub e: f64,
    pub p: f64,
}

/// Coherent point `|x, t)` with `z = (t + i x) / sqrt(2 theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentPoint {
    pub t: f64,
    pub x: f64,
    pub theta: f64,
}

impl CoherentPoint {
    pub fn new(t: f64, x: f64, theta: f64) -> Result<Self> {
        if !(theta > 0.0) {
            return Err(Error::InvalidArgument(format!("coherent point needs theta > 0, got {theta}")));
        }
        Ok(Self { t, x, theta })
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.t, self.x) / (2.0 * self.theta).sqrt()
    }
}

/// `(x,t|p,E) = (1/2 pi) e^{-theta (E^2 + p^2)/4} e^{-i(Et - px)}`.
pub fn momentum_symbol(label: MomentumLabel, theta: f64) -> impl Fn(f64, f64) -> Complex64 + Sync + Copy {
    let amp = (-(theta / 4.0) * (label.e * label.e + label.p * label.p)).exp() / (2.0 * PI);
    move |t, x| Complex64::from_polar(amp, -(label.e * t - label.p * x))
}

/// `(x',t'|x,t) = delta_sqrt(theta)(t' - t) delta_sqrt(theta)(x' - x)`.
pub fn basis_overlap(a: &CoherentPoint, b: &CoherentPoint) -> Result<f64> {
    if a.theta != b.theta {
        return Err(Error::InvalidArgument(format!("theta mismatch: {} vs {}", a.theta, b.theta)));
    }
    let s = a.theta.sqrt();
    Ok(delta_sigma(s, a.t - b.t) * delta_sigma(s, a.x - b.x))
}

fn require_voros(kernel: &StarKernel) -> Result<()> {
    if kernel.flavor == Flavor::Moyal {
        return Err(Error::Unsupported(
            "the Moyal product does not guarantee a positive density; use the Voros flavor".into(),
        ));
    }
    Ok(())
}

/// Star density together with the number of series terms used.
#[derive(Debug, Clone)]
pub struct Density {
    pub rho: Field2D,
    pub terms: usize,
}

/// `rho = psi^* * psi = sum_n (1/n!) |d_zbar^n psi|^2`, truncated once a term
/// falls below [`DENSITY_SERIES_TOL`] of the running sum. The result is
/// normalized so that its x-integral at a slice equals the induced norm.
pub fn probability_density(kernel: &StarKernel, psi: &Field2D) -> Result<Density> {
    require_voros(kernel)?;
    if kernel.theta != psi.spec.theta {
        return Err(Error::SpecMismatch("kernel theta differs from grid theta".into()));
    }
    let a = (kernel.theta / 2.0).sqrt();
    let mut sum: Vec<f64> = psi.values.iter().map(|v| v.norm_sqr()).collect();
    let mut terms = 1;
    if kernel.theta > 0.0 {
        // Iterate in mode space: a round trip per derivative would refill the
        // high modes with roundoff that the derivatives then amplify.
        let spec = psi.spec;
        let mut modes = psi.modes();
        let floor = ROUNDOFF_FLOOR * modes.iter().map(|c| c.norm()).fold(0.0, f64::max);
        modes.iter_mut().filter(|c| c.norm() < floor).for_each(|c| *c = Complex64::new(0.0, 0.0));
        let (kt, kx) = (spec.wavenumbers(Axis::T), spec.wavenumbers(Axis::X));
        let mut fact = 1.0;
        for n in 1..400 {
            modes.iter_mut().enumerate().for_each(|(i, c)| {
                *c *= Complex64::new(-a * kx[i % spec.n_x], a * kt[i / spec.n_x]);
            });
            let d = Field2D::from_modes(spec, &modes);
            fact *= n as f64;
            let term: Vec<f64> = d.values.iter().map(|v| v.norm_sqr() / fact).collect();
            let tmax = term.iter().cloned().fold(0.0, f64::max);
            sum.iter_mut().zip(&term).for_each(|(s, t)| *s += t);
            terms += 1;
            let smax = sum.iter().cloned().fold(0.0, f64::max);
            if tmax <= DENSITY_SERIES_TOL * smax {
                break;
            }
        }
    }
    let rho = Field2D { spec: psi.spec, values: sum.into_iter().map(|v| Complex64::new(v, 0.0)).collect() };
    Ok(Density { rho, terms })
}

/// Max-norm gap between the series density and the direct product `star(psi^*, psi)`.
pub fn density_series_gap(kernel: &StarKernel, psi: &Field2D) -> Result<f64> {
    let series = probability_density(kernel, psi)?.rho;
    let direct = star(kernel, &psi.conj(), psi)?;
    Ok(series.sub(&direct).max_norm())
}

/// `j = -(i/2m)(psi^* * d_x psi - d_x psi^* * psi) = Im(psi^* * d_x psi) / m`.
pub fn probability_current(kernel: &StarKernel, psi: &Field2D, m: f64) -> Result<Field2D> {
    require_voros(kernel)?;
    if !(m > 0.0) {
        return Err(Error::InvalidArgument(format!("mass must be positive, got {m}")));
    }
    let h = star(kernel, &psi.conj(), &psi.deriv(Axis::X, 1))?;
    Ok(h.map(|v| Complex64::new(v.im / m, 0.0)))
}

/// Slice density `psi^* * psi`.
pub fn slice_density(psi: &SliceSymbol) -> Result<Vec<f64>> {
    psi.density()
}

/// Slice current `Im(psi^* * d_x psi) / m`.
pub fn slice_current(psi: &SliceSymbol, m: f64) -> Result<Vec<f64>> {
    let h = psi.conj().star(&psi.d_x())?;
    Ok(h.eval().iter().map(|v| v.im / m).collect())
}

/// Exact `d_t (psi^* * psi)` on the slice.
pub fn slice_density_rate(psi: &SliceSymbol) -> Result<Vec<f64>> {
    let dpsi = psi.d_t();
    let a = dpsi.conj().star(psi)?;
    let b = psi.conj().star(&dpsi)?;
    Ok(a.add(&b).eval().iter().map(|v| v.re).collect())
}

/// Max-norm of `d_t rho + d_x j` on a slice.
pub fn continuity_residual(psi: &SliceSymbol, m: f64) -> Result<f64> {
    let rate = slice_density_rate(psi)?;
    let j = slice_current(psi, m)?;
    let jc: Vec<Complex64> = j.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    let dj = SliceSymbol::static_field(psi.spec, psi.t, jc).d_x().eval();
    Ok(rate.iter().zip(&dj).map(|(a, b)| (a + b.re).abs()).fold(0.0, f64::max))
}

/// Uniform momentum samples `psi(p_j)`, `p_j = p_min + j dp`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumSamples {
    pub p_min: f64,
    pub dp: f64,
    pub values: Vec<Complex64>,
}

impl MomentumSamples {
    /// Symmetric grid of `n` points on `[-p_max, p_max]`.
    pub fn from_fn(n: usize, p_max: f64, f: impl Fn(f64) -> Complex64) -> Self {
        let dp = 2.0 * p_max / (n - 1) as f64;
        let values = (0..n).map(|j| f(-p_max + j as f64 * dp)).collect();
        Self { p_min: -p_max, dp, values }
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp
    }

    pub fn p_max(&self) -> f64 {
        self.p(self.values.len() - 1)
    }
}

/// `Psi(x,t) = int dp psi(p) (x,t|p,E_p)` with `E_p = p^2/2m`, on the window `spec`.
pub fn onshell_project(samples: &MomentumSamples, m: f64, spec: GridSpec) -> Result<Field2D> {
    if !(m > 0.0) {
        return Err(Error::InvalidArgument(format!("mass must be positive, got {m}")));
    }
    let n = samples.values.len();
    if n == 0 || (samples.p_min + samples.p_max()).abs() > 1e-9 * samples.p_max().abs().max(1.0) {
        return Err(Error::InvalidArgument("momentum grid must be symmetric about 0".into()));
    }
    // phase step |x - p t / m| dp at the window corners
    let mut worst = 0.0f64;
    for &t in &[spec.t_min, spec.t_max] {
        for &x in &[spec.x_min, spec.x_max] {
            for &p in &[samples.p_min, 0.0, samples.p_max()] {
                worst = worst.max((x - p * t / m).abs() * samples.dp);
            }
        }
    }
    if worst > PI {
        let need = samples.dp * PI / worst;
        return Err(Error::InvalidArgument(format!(
            "momentum step {:.3e} too coarse for the window (phase step {worst:.3} > pi); need dp <= {need:.3e}",
            samples.dp
        )));
    }
    let theta = spec.theta;
    let terms: Vec<(f64, f64, Complex64)> = (0..n)
        .filter(|&j| samples.values[j] != Complex64::new(0.0, 0.0))
        .map(|j| {
            let p = samples.p(j);
            let e = p * p / (2.0 * m);
            (e, p, samples.values[j] * samples.dp)
        })
        .collect();
    sample_field(
        |t, x| {
            terms
                .iter()
                .map(|&(e, p, w)| w * momentum_symbol(MomentumLabel { e, p }, theta)(t, x))
                .sum()
        },
        spec,
    )
}

/// Complex Gaussian `delta_sigma(z)` (analytic continuation).
fn delta_complex(sigma: f64, z: Complex64) -> Complex64 {
    (-(z * z) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt())
}

/// `pi_t psi` with `pi_t = int_t dx |x,t) * (x,t|`, applied mode by mode in closed form.
pub fn apply_pi_t(psi: &Field2D, t: f64) -> Result<Field2D> {
    let s = psi.spec;
    let theta = s.theta;
    if !(theta > 0.0) {
        return Err(Error::InvalidArgument("pi_t needs theta > 0".into()));
    }
    let (nt, nx) = (s.n_t, s.n_x);
    let (kt, kx) = (s.wavenumbers(Axis::T), s.wavenumbers(Axis::X));
    let modes = psi.modes();
    let sig = theta.sqrt();
    let peak = modes.iter().map(|c| c.norm()).fold(0.0, f64::max);
    // the kernel grows like e^{theta q0^2/8}; modes below the amplified floor carry only roundoff
    let floor = |q0: f64| crate::star::DEFAULT_CUTOFF * peak * (theta * q0 * q0 / 8.0).exp();
    let active: Vec<usize> = (0..nt * nx).filter(|&m| peak > 0.0 && modes[m].norm() > floor(kt[m / nx])).collect();
    // per-mode factors independent of the output node; the x-phase is carried by the inverse FFT
    let pre: Vec<(usize, Complex64, Complex64)> = active
        .iter()
        .map(|&m| {
            let (q0, q1) = (kt[m / nx], kx[m % nx]);
            let a0 = Complex64::new(-0.5 * theta * q1, 0.5 * theta * q0);
            let a1 = Complex64::new(0.5 * theta * q0, 0.5 * theta * q1);
            let tail = (Complex64::new(0.0, -q1) * a1 - 0.5 * theta * q1 * q1).exp();
            let c = modes[m] * Complex64::new(0.0, q0 * (t - s.t_min)).exp() * tail;
            (m, c, a0)
        })
        .collect();
    let values: Vec<Complex64> = (0..nt)
        .into_par_iter()
        .flat_map_iter(|it| {
            let tp = s.t(it);
            let mut row = vec![Complex64::new(0.0, 0.0); nx];
            for &(m, c, a0) in &pre {
                row[m % nx] += c * delta_complex(sig, Complex64::new(t - tp, 0.0) + a0);
            }
            crate::fieldgrid::synth_1d(&row)
        })
        .collect();
    Ok(Field2D { spec: s, values })
}

/// Outcome of the quasi-projection check `pi_{t'} pi_t ~ delta_sqrt(theta)(t'-t) pi_{t'}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionDiscrepancy {
    /// Max-norm of `(pi_{t'} pi_t - delta(t'-t) pi_{t'}) psi` over the test states.
    pub discrepancy: f64,
    /// `max ||pi_{t'} psi|| delta_sqrt(theta)(0)`.
    pub reference: f64,
    pub ratio: f64,
}

pub fn quasi_projection_discrepancy(t: f64, t_prime: f64, states: &[Field2D]) -> Result<ProjectionDiscrepancy> {
    let mut out = ProjectionDiscrepancy { discrepancy: 0.0, reference: 0.0, ratio: 0.0 };
    for psi in states {
        let theta = psi.spec.theta;
        let sig = theta.sqrt();
        let pt = apply_pi_t(psi, t)?;
        let lhs = apply_pi_t(&pt, t_prime)?;
        let ptp = apply_pi_t(psi, t_prime)?;
        let rhs = ptp.scale(Complex64::new(delta_sigma(sig, t_prime - t), 0.0));
        out.discrepancy = out.discrepancy.max(lhs.sub(&rhs).max_norm());
        out.reference = out.reference.max(ptp.max_norm() * delta_sigma(sig, 0.0));
    }
    out.ratio = if out.reference > 0.0 { out.discrepancy / out.reference } else { 0.0 };
    Ok(out)
}

/// `int dt' dx' (delta delta)(t - t', x - x') *' psi(x', t')` at node `(i_t, i_x)`.
pub fn reproduce_at(psi: &Field2D, i_t: usize, i_x: usize) -> Result<Complex64> {
    let s = psi.spec;
    let sig = s.theta.sqrt();
    let (t, x) = (s.t(i_t), s.x(i_x));
    // periodic images keep the kernel smooth across the box edge
    let wrap = |d: f64, len: f64| d - len * (d / len).round();
    let k = sample_field(
        |tp, xp| Complex64::new(delta_sigma(sig, wrap(t - tp, s.len_t())) * delta_sigma(sig, wrap(x - xp, s.len_x())), 0.0),
        s,
    )?;
    crate::star::star_integral(&StarKernel::voros(s.theta), &k, psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldgrid::{Field1D, Integrate};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn momentum_symbol_examples() {
        let f = momentum_symbol(MomentumLabel { e: 0.0, p: 0.0 }, 0.7);
        assert!((f(0.3, -1.2) - c(1.0 / (2.0 * PI), 0.0)).norm() < 1e-15);
        let f = momentum_symbol(MomentumLabel { e: 1.0, p: 1.0 }, 0.0);
        assert!((f(0.0, 0.0).re - 0.15915494).abs() < 1e-8);
        let f = momentum_symbol(MomentumLabel { e: 1.0, p: 2.0 }, 0.4);
        assert!((f(0.4, 0.9).norm() - 0.0965324).abs() < 1e-7);
        assert!((f(0.4, 0.9).norm() - f(-3.0, 2.0).norm()).abs() < 1e-15);
    }

    #[test]
    fn overlap_examples() {
        let a = CoherentPoint::new(0.0, 0.0, 1.0).unwrap();
        assert!((basis_overlap(&a, &a).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let a = CoherentPoint::new(0.5, 0.0, 0.5).unwrap();
        let b = CoherentPoint::new(0.0, 0.0, 0.5).unwrap();
        assert!((basis_overlap(&a, &b).unwrap() - 0.2479000).abs() < 1e-7);
        assert_eq!(basis_overlap(&a, &b).unwrap(), basis_overlap(&b, &a).unwrap());
        let far = CoherentPoint::new(100.0, 0.0, 0.5).unwrap();
        assert!(basis_overlap(&far, &b).unwrap() < 1e-300);
        let other = CoherentPoint::new(0.0, 0.0, 0.4).unwrap();
        assert!(basis_overlap(&a, &other).is_err());
        assert!(CoherentPoint::new(0.0, 0.0, 0.0).is_err());
    }

    fn gauss2(spec: GridSpec, t0: f64, x0: f64, w: f64, kt: f64, kx: f64) -> Field2D {
        sample_field(
            |t, x| c(-((t - t0).powi(2) + (x - x0).powi(2)) / (2.0 * w * w), kt * t + kx * x).exp(),
            spec,
        )
        .unwrap()
    }

    #[test]
    fn density_series_agrees_with_direct_product() {
        let theta = 0.1;
        let s = GridSpec::centered(256, 256, 9.0, 9.0, theta).unwrap();
        let k = StarKernel::voros(theta);
        let psi = gauss2(s, 0.2, -0.1, 1.0, 0.6, -0.8);
        assert!(density_series_gap(&k, &psi).unwrap() < 1e-8);
        let d = probability_density(&k, &psi).unwrap();
        assert!(d.rho.values.iter().all(|v| v.re >= -1e-10));
        assert!(d.terms > 3);
        let zero = Field2D::zeros(s);
        assert_eq!(probability_density(&k, &zero).unwrap().rho.max_norm(), 0.0);
        assert!(probability_density(&StarKernel::moyal(theta), &psi).is_err());
    }

    #[test]
    fn real_symbol_current_is_first_order_in_theta() {
        // j = (theta/2m){psi, d_x psi} + O(theta^2) = theta t psi^2 / 2m for psi = e^{-(t^2+x^2)/2}
        let theta = 0.1;
        let m = 1.0;
        let s = GridSpec::centered(256, 256, 9.0, 9.0, theta).unwrap();
        let k = StarKernel::voros(theta);
        let real = gauss2(s, 0.0, 0.0, 1.0, 0.0, 0.0);
        let j = probability_current(&k, &real, m).unwrap();
        let lead = real.map_nodes(|t, _, v| Complex64::new(theta * t * v.re * v.re / (2.0 * m), 0.0));
        assert!(j.max_norm() > 0.1 * lead.max_norm());
        assert!(j.sub(&lead).max_norm() < 2.0 * theta * lead.max_norm(), "{}", j.sub(&lead).max_norm());
        let flat = Field2D { spec: s.with_theta(0.0).unwrap(), values: real.values.clone() };
        assert!(probability_current(&StarKernel::voros(0.0), &flat, m).unwrap().max_norm() < 1e-14);
    }

    #[test]
    fn current_cases() {
        let theta = 0.1;
        let s = GridSpec::centered(256, 256, 2.0 * PI, 2.0 * PI, theta).unwrap();
        let k = StarKernel::voros(theta);

        // plane wave e^{-i(Et - px)} on a period-4 pi box (mode spacing 1/2)
        let (e, p, m) = (1.0, 1.5, 2.0);
        let wave = sample_field(|t, x| c(0.0, -(e * t - p * x)).exp(), s).unwrap();
        let j = probability_current(&k, &wave, m).unwrap();
        let rho = star(&k, &wave.conj(), &wave).unwrap();
        let want = rho.scale(c(p / m, 0.0));
        assert!(j.sub(&want).max_norm() < 1e-12);
        // rho = e^{theta (E^2 + p^2)/2}
        assert!((rho.at(3, 5).re - (theta * (e * e + p * p) / 2.0).exp()).abs() < 1e-12);
    }

    #[test]
    fn current_reduces_at_theta_zero() {
        let s = GridSpec::centered(64, 128, 4.0, 10.0, 0.0).unwrap();
        let psi = gauss2(s, 0.0, 0.5, 1.5, 0.0, 0.9);
        let j = probability_current(&StarKernel::voros(0.0), &psi, 1.3).unwrap();
        let d = psi.deriv(Axis::X, 1);
        let want = psi.zip_with(&d, |a, b| c((a.conj() * b).im / 1.3, 0.0));
        assert!(j.sub(&want).max_norm() < 1e-8);
    }

    #[test]
    fn onshell_gaussian_commutative_limit() {
        let sigma: f64 = 1.0;
        let m = 1.0;
        let samples = MomentumSamples::from_fn(801, 12.0, |p| {
            c(sigma.sqrt() / PI.powf(0.25) * (-(sigma * sigma) * p * p / 2.0).exp(), 0.0)
        });
        let spec = GridSpec::new(8, 256, (0.0, 0.5), (-10.0, 10.0), 0.0).unwrap();
        let psi = onshell_project(&samples, m, spec).unwrap();
        let row = psi.row(0);
        let w: Vec<f64> = row.values.iter().map(|v| v.norm_sqr()).collect();
        let norm: f64 = w.iter().sum();
        let xs = spec.x_nodes();
        let mean: f64 = w.iter().zip(&xs).map(|(w, x)| w * x).sum::<f64>() / norm;
        let var: f64 = w.iter().zip(&xs).map(|(w, x)| w * (x - mean).powi(2)).sum::<f64>() / norm;
        assert!((var - sigma * sigma / 2.0).abs() < 1e-6, "var {var}");
    }

    #[test]
    fn onshell_single_mode_is_damped_plane_wave() {
        let theta = 0.2;
        let m = 1.0;
        let mut samples = MomentumSamples::from_fn(41, 2.0, |_| c(0.0, 0.0));
        let j0 = 30;
        let p0 = samples.p(j0);
        samples.values[j0] = c(1.0 / samples.dp, 0.0);
        let spec = GridSpec::centered(16, 16, 0.5, 0.5, theta).unwrap();
        let psi = onshell_project(&samples, m, spec).unwrap();
        let e0 = p0 * p0 / (2.0 * m);
        let want = sample_field(momentum_symbol(MomentumLabel { e: e0, p: p0 }, theta), spec).unwrap();
        assert!(psi.sub(&want).max_norm() < 1e-14);
        let damping = (-(theta / 4.0) * (e0 * e0 + p0 * p0)).exp() / (2.0 * PI);
        assert!((psi.at(4, 9).norm() - damping).abs() < 1e-14);
    }

    #[test]
    fn onshell_rejects_coarse_grid() {
        let samples = MomentumSamples::from_fn(11, 5.0, |_| c(1.0, 0.0));
        let spec = GridSpec::centered(8, 64, 1.0, 20.0, 0.0).unwrap();
        assert!(matches!(onshell_project(&samples, 1.0, spec), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn momentum_symbols_are_orthogonal_on_slices() {
        let theta = 0.2;
        let m = 1.0;
        let s = GridSpec::for_slice(128, (-PI, PI), theta, 0.3).unwrap();
        let mk = |p: f64| {
            let e = p * p / (2.0 * m);
            let f = momentum_symbol(MomentumLabel { e, p }, theta);
            Field1D::from_fn(s, 0.3, |x| f(0.3, x)).unwrap().with_energy(e)
        };
        let ip = induced_inner_product(&mk(2.0), &mk(3.0)).unwrap();
        assert!(ip.norm() < 1e-8);
        // same label: (2 pi)^-1 / dp with dp = 2 pi / L
        let same = induced_inner_product(&mk(2.0), &mk(2.0)).unwrap();
        let dp = 2.0 * PI / s.len_x();
        assert!((same.re - 1.0 / (2.0 * PI) / dp).abs() < 1e-12);
    }

    #[test]
    fn momentum_symbols_orthonormal_in_two_dimensions() {
        let theta = 0.2;
        let s = GridSpec::centered(128, 128, PI, PI, theta).unwrap();
        let k = StarKernel::voros(theta);
        let a = sample_field(momentum_symbol(MomentumLabel { e: 1.0, p: 2.0 }, theta), s).unwrap();
        let b = sample_field(momentum_symbol(MomentumLabel { e: 1.0, p: -1.0 }, theta), s).unwrap();
        let same = crate::star::star_integral(&k, &a.conj(), &a).unwrap();
        let diff = crate::star::star_integral(&k, &a.conj(), &b).unwrap();
        // Kronecker / (dp dE) with unit mode spacing
        assert!((same.re - 1.0).abs() < 1e-12);
        assert!(diff.norm() < 1e-12);
    }

    #[test]
    fn reproducing_kernel() {
        let theta = 0.1;
        let s = GridSpec::centered(256, 256, 8.0, 8.0, theta).unwrap();
        let psi = gauss2(s, 0.3, -0.2, 1.0, 0.7, 0.4);
        for &(it, ix) in &[(64, 64), (70, 50), (40, 90), (100, 64)] {
            let got = reproduce_at(&psi, it, ix).unwrap();
            assert!((got - psi.at(it, ix)).norm() < 1e-6, "({it},{ix})");
        }
        // plane-wave reproduction on a period-2 pi box
        let s = GridSpec::centered(128, 128, PI, PI, theta).unwrap();
        let wave = sample_field(|t, x| c(0.0, -(2.0 * t - 3.0 * x)).exp(), s).unwrap();
        for &(it, ix) in &[(0, 0), (17, 40), (63, 5)] {
            let got = reproduce_at(&wave, it, ix).unwrap();
            assert!((got - wave.at(it, ix)).norm() < 1e-8);
        }
    }

    #[test]
    fn quasi_projection_far_apart_vanishes() {
        let theta = 0.05;
        let s = GridSpec::centered(256, 256, 6.0, 6.0, theta).unwrap();
        let psi = gauss2(s, 0.0, 0.0, 1.0, 0.5, 0.5);
        let d = quasi_projection_discrepancy(-3.0, 3.0, &[psi]).unwrap();
        assert!(d.discrepancy < 1e-8, "{d:?}");
    }

    #[test]
    fn pi_t_integral_matches_induced_product() {
        // (psi|pi_t|phi) = (psi, phi)_t for a stationary pair
        let theta = 0.1;
        let s = GridSpec::centered(256, 256, 2.0 * PI, 8.0, theta).unwrap();
        let e = 1.0;
        let phi = sample_field(|t, x| c(-(x * x) / 2.0, -e * t).exp(), s).unwrap();
        let pphi = apply_pi_t(&phi, 0.0).unwrap();
        let full = crate::star::star_integral(&StarKernel::voros(theta), &phi.conj(), &pphi).unwrap();
        let slice = SliceSymbol::stationary(
            GridSpec::for_slice(256, (-8.0, 8.0), theta, 0.0).unwrap(),
            0.0,
            e,
            s.x_nodes().iter().map(|x| c(-(x * x) / 2.0, 0.0).exp()).collect(),
        );
        let induced = slice.inner(&slice).unwrap();
        assert!((full - induced).norm() < 1e-8 * induced.norm(), "{full} vs {induced}");
        let _ = pphi.integrate();
    }
}
