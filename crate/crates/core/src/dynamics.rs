//! Solvers for the effective Schrödinger equation
//! `i d_t psi = -(1/2m) d_x^2 psi + V * psi`.
//!
//! For a time-independent potential and a stationary symbol with energy `E`,
//! `V * psi = V(A_E) psi` with `A_E = x + (theta/2)(d_x - E)`. Writing
//! `S = e^{(theta/4) d_x^2}` and `T_E` for translation by `theta E/2`, one has
//! `A_E = S T_E x T_E^{-1} S^{-1}`, so deformed eigen-symbols are
//! `psi_n = e^{-theta E_n^2/4} T_{E_n} S eta_n` with `eta_n` the commutative
//! eigenfunctions. The stationary solver, the time stepper and the oscillator
//! all work in this `eta` frame and map back to symbols slice by slice.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fieldgrid::{modes_1d, synth_1d, Axis, Field1D, GridSpec};
use crate::operators::{apply, OpKind, SymbolOperator};
use crate::star::DEFAULT_CUTOFF;
use crate::symbols::SliceSymbol;
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Modes whose inverse map amplifies by more than this are dropped.
pub const MAX_AMPLIFICATION: f64 = 1e12;

/// A purely time-dependent pulse `V(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape")]
pub enum Pulse {
    /// `v0 exp(-(t - center)^2 / tau^2)`.
    Gaussian { v0: f64, tau: f64, center: f64 },
    /// Uniform samples, linearly interpolated and held constant outside.
    Samples { t_min: f64, dt: f64, values: Vec<f64> },
}

impl Pulse {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Pulse::Gaussian { v0, tau, center } => v0 * (-((t - center) / tau).powi(2)).exp(),
            Pulse::Samples { t_min, dt, values } => interp(values, *t_min, *dt, t),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Pulse::Gaussian { tau, center, .. } => -2.0 * (t - center) / (tau * tau) * self.value(t),
            Pulse::Samples { dt, .. } => (self.value(t + dt / 2.0) - self.value(t - dt / 2.0)) / dt,
        }
    }
}

fn interp(values: &[f64], x0: f64, dx: f64, x: f64) -> f64 {
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    let s = ((x - x0) / dx).clamp(0.0, (n - 1) as f64);
    let i = (s.floor() as usize).min(n.saturating_sub(2));
    if n == 1 {
        return values[0];
    }
    let w = s - i as f64;
    values[i] * (1.0 - w) + values[i + 1] * w
}

/// Real potentials `V(x, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Potential {
    None,
    /// `m omega^2 x^2 / 2`.
    Harmonic { m: f64, omega: f64 },
    /// `sum_k coeffs[k] x^k`.
    Polynomial { coeffs: Vec<f64> },
    /// Samples of `V(x)` on a uniform x grid, linearly interpolated.
    Samples { x_min: f64, dx: f64, values: Vec<f64> },
    /// A spatially uniform pulse `V(t)`.
    TimePulse { pulse: Pulse },
    /// Samples of `V(x, t)`, row-major in `t`, bilinearly interpolated.
    Custom { t_min: f64, dt: f64, x_min: f64, dx: f64, n_x: usize, values: Vec<f64> },
}

impl Potential {
    pub fn is_time_dependent(&self) -> bool {
        matches!(self, Potential::TimePulse { .. } | Potential::Custom { .. })
    }

    pub fn value(&self, x: f64, t: f64) -> f64 {
        match self {
            Potential::None => 0.0,
            Potential::Harmonic { m, omega } => 0.5 * m * omega * omega * x * x,
            Potential::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
            Potential::Samples { x_min, dx, values } => interp(values, *x_min, *dx, x),
            Potential::TimePulse { pulse } => pulse.value(t),
            Potential::Custom { t_min, dt, x_min, dx, n_x, values } => {
                let rows = values.len() / n_x.max(&1);
                if rows == 0 {
                    return 0.0;
                }
                let s = ((t - t_min) / dt).clamp(0.0, (rows - 1) as f64);
                let i = (s.floor() as usize).min(rows.saturating_sub(2));
                let row = |r: usize| interp(&values[r * n_x..(r + 1) * n_x], *x_min, *dx, x);
                if rows == 1 {
                    return row(0);
                }
                let w = s - i as f64;
                row(i) * (1.0 - w) + row(i + 1) * w
            }
        }
    }

    /// Power-series coefficients when the potential is a polynomial in `x`.
    pub fn polynomial(&self) -> Option<Vec<f64>> {
        match self {
            Potential::None => Some(Vec::new()),
            Potential::Harmonic { m, omega } => Some(vec![0.0, 0.0, 0.5 * m * omega * omega]),
            Potential::Polynomial { coeffs } => Some(coeffs.clone()),
            _ => None,
        }
    }

    /// `d V / d x` for polynomial potentials.
    pub fn derivative(&self) -> Option<Potential> {
        let p = self.polynomial()?;
        let coeffs = p.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect();
        Some(Potential::Polynomial { coeffs })
    }

    fn check_real(&self) -> Result<()> {
        let ok = match self {
            Potential::Polynomial { coeffs } => coeffs.iter().all(|v| v.is_finite()),
            Potential::Samples { values, .. } | Potential::Custom { values, .. } => values.iter().all(|v| v.is_finite()),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument("potential samples must be finite reals".into()))
        }
    }
}

// ---------------------------------------------------------------- free packet

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketParams {
    pub sigma: f64,
    pub m: f64,
    pub theta: f64,
}

impl PacketParams {
    pub fn new(sigma: f64, m: f64, theta: f64) -> Result<Self> {
        let p = Self { sigma, m, theta };
        if !(sigma >= 0.0 && m > 0.0 && theta >= 0.0) || sigma == 0.0 && theta == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "packet needs sigma >= 0, m > 0, theta >= 0 and sigma^2 + theta > 0 (got {sigma}, {m}, {theta})"
            )));
        }
        Ok(p)
    }

    /// `lambda(t) = sigma^2/2 + theta/4 + i t/(2m)`.
    pub fn lambda(&self, t: f64) -> Complex64 {
        Complex64::new(self.sigma * self.sigma / 2.0 + self.theta / 4.0, t / (2.0 * self.m))
    }

    /// Momentum amplitude `e^{-theta p^4/16m^2 - lambda p^2}` without the prefactor.
    fn integrand(&self, t: f64, p: f64) -> Complex64 {
        let q = self.theta * p.powi(4) / (16.0 * self.m * self.m);
        (-q - self.lambda(t) * p * p).exp()
    }

    fn prefactor(&self) -> f64 {
        self.sigma.sqrt() / (2.0 * PI.powf(1.25))
    }
}

/// Closed-form width `d = [(sigma^2 + theta/2)^2 + (t/m)^2]^{1/4}`.
pub fn packet_width(params: &PacketParams, t: f64) -> f64 {
    let a = params.sigma.powi(2) + params.theta / 2.0;
    (a * a + (t / params.m).powi(2)).powf(0.25)
}

/// `sqrt(2 var)` of the normalized profile `|psi|^2` on a slice.
pub fn measured_width(values: &[Complex64], spec: &GridSpec) -> f64 {
    let (_, var) = profile_moments(&values.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>(), spec);
    (2.0 * var).sqrt()
}

/// Mean and variance of a nonnegative profile sampled on the x grid.
pub fn profile_moments(rho: &[f64], spec: &GridSpec) -> (f64, f64) {
    let xs = spec.x_nodes();
    let n: f64 = rho.iter().sum();
    let mean = rho.iter().zip(&xs).map(|(r, x)| r * x).sum::<f64>() / n;
    let var = rho.iter().zip(&xs).map(|(r, x)| r * (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreePacket {
    pub field: Field1D,
    pub cutoff: f64,
    pub dp: f64,
}

const QUADRATURE_LIMIT: usize = 1 << 20;

/// Momentum-space quadrature of the deformed Gaussian packet at time `t`.
pub fn free_packet(params: &PacketParams, t: f64, spec: GridSpec) -> Result<FreePacket> {
    let p = PacketParams::new(params.sigma, params.m, params.theta)?;
    // cutoff where the magnitude falls below 1e-14
    let target = 14.0 * std::f64::consts::LN_10;
    let a = p.lambda(0.0).re;
    let b = p.theta / (16.0 * p.m * p.m);
    let u = if b == 0.0 { target / a } else { (-a + (a * a + 4.0 * b * target).sqrt()) / (2.0 * b) };
    let cutoff = u.sqrt();
    let x_extent = spec.x_min.abs().max(spec.x_max.abs());
    let spread = x_extent + t.abs() * cutoff / p.m + 10.0 * (p.lambda(t).norm() / a.sqrt()).max(1.0);
    let dp = PI / spread;
    let half = (cutoff / dp).ceil() as usize;
    if 2 * half + 1 > QUADRATURE_LIMIT {
        return Err(Error::Numerical(format!(
            "momentum cutoff {cutoff:.3} with step {dp:.3e} needs more than {QUADRATURE_LIMIT} nodes"
        )));
    }
    let amps: Vec<(f64, Complex64)> = (0..=2 * half)
        .map(|j| {
            let pj = (j as f64 - half as f64) * dp;
            (pj, p.integrand(t, pj))
        })
        .collect();
    let pref = p.prefactor() * dp;
    let values: Vec<Complex64> = spec
        .x_nodes()
        .par_iter()
        .map(|&x| amps.iter().map(|(pj, a)| a * Complex64::new(0.0, pj * x).exp()).sum::<Complex64>() * pref)
        .collect();
    let field = Field1D { spec, t_slice: t, values, energy: None };
    Ok(FreePacket { field, cutoff, dp })
}

/// First-order packet `(1/2 pi^{3/4}) sqrt(sigma/lambda) [1 + theta f] e^{-x^2/4 lambda}`.
pub fn first_order_packet(params: &PacketParams, t: f64, x: f64) -> Complex64 {
    let lam = params.lambda(t);
    let pref = (c(params.sigma) / lam).sqrt() / (2.0 * PI.powf(0.75));
    pref * (c(1.0) + params.theta * first_order_f(params.m, lam, x)) * (-(x * x) / (4.0 * lam)).exp()
}

/// `f(x; lambda) = (1/16m^2)(-3/4 lambda^2 + 3x^2/4 lambda^3 - x^4/16 lambda^4)`.
pub fn first_order_f(m: f64, lam: Complex64, x: f64) -> Complex64 {
    let l2 = lam * lam;
    (-3.0 / (4.0 * l2) + 3.0 * x * x / (4.0 * l2 * lam) - x.powi(4) / (16.0 * l2 * l2)) / (16.0 * m * m)
}

/// Whether `theta` is small against `sigma^2` (first-order regime).
pub fn first_order_regime(params: &PacketParams) -> bool {
    params.theta <= 0.1 * params.sigma * params.sigma
}

/// Energy-decomposed symbol of the free packet on a slice: one stationary
/// component per box wavenumber `k`, tagged `k^2/2m`.
pub fn free_packet_symbol(params: &PacketParams, spec: GridSpec, t: f64) -> Result<SliceSymbol> {
    let p = PacketParams::new(params.sigma, params.m, params.theta)?;
    let ks = spec.wavenumbers(Axis::X);
    let dk = 2.0 * PI / spec.len_x();
    let xs = spec.x_nodes();
    let mut out = SliceSymbol::zero(spec, t);
    for &k in &ks {
        let amp = p.integrand(t, k) * p.prefactor() * dk;
        if amp.norm() < 1e-300 {
            continue;
        }
        let values = xs.iter().map(|&x| amp * Complex64::new(0.0, k * x).exp()).collect();
        out = out.add(&SliceSymbol::stationary(spec, t, k * k / (2.0 * p.m), values));
    }
    Ok(out.compact())
}

// ----------------------------------------------------------------- oscillator

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub m: f64,
    pub omega: f64,
    pub theta: f64,
}

impl OscillatorParams {
    pub fn new(m: f64, omega: f64, theta: f64) -> Result<Self> {
        if !(m > 0.0 && omega > 0.0 && theta >= 0.0) {
            return Err(Error::InvalidArgument(format!("oscillator needs m, omega > 0 and theta >= 0 (got {m}, {omega}, {theta})")));
        }
        Ok(Self { m, omega, theta })
    }

    /// `sigma_theta^2 = theta/2 + 1/(m omega)`.
    pub fn sigma_theta_sq(&self) -> f64 {
        self.theta / 2.0 + 1.0 / (self.m * self.omega)
    }

    /// Density variance `(sigma_theta^2/2)(1 + theta/(2 sigma_theta^2))`.
    pub fn sigma_tilde_sq(&self) -> f64 {
        let s = self.sigma_theta_sq();
        s / 2.0 * (1.0 + self.theta / (2.0 * s))
    }

    pub fn energy(&self, n: usize) -> f64 {
        (n as f64 + 0.5) * self.omega
    }

    pub fn potential(&self) -> Potential {
        Potential::Harmonic { m: self.m, omega: self.omega }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// `(n + 1/2) omega`.
    pub closed_form: Vec<f64>,
    /// Eigenvalues of the momentum-space operator at self-consistent `E`.
    pub numeric: Vec<f64>,
    /// Max deviation of the gauge-stripped eigenfunctions from Hermite functions.
    pub gauge_errors: Vec<f64>,
    pub iterations: Vec<usize>,
}

impl Spectrum {
    pub fn max_discrepancy(&self) -> f64 {
        self.closed_form.iter().zip(&self.numeric).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,E")?;
        for (n, e) in self.numeric.iter().enumerate() {
            writeln!(w, "{n},{e:.15e}")?;
        }
        Ok(())
    }
}

/// Hermite functions `h_0..=h_n` of `u`, each with unit L2 norm in `u`.
fn hermite_functions(n: usize, u: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n + 1);
    h.push(PI.powf(-0.25) * (-u * u / 2.0).exp());
    if n >= 1 {
        h.push(2f64.sqrt() * u * h[0]);
    }
    for k in 1..n {
        let next = (2.0 / (k + 1) as f64).sqrt() * u * h[k] - (k as f64 / (k + 1) as f64).sqrt() * h[k - 1];
        h.push(next);
    }
    h
}

/// Matrix of `(1/2m)[p^2 - m^2 omega^2 (d_p + i theta E/2)^2]` on a periodic p grid.
fn momentum_hamiltonian(params: &OscillatorParams, ps: &[f64], dp: f64, e: f64) -> DMatrix<Complex64> {
    let n = ps.len();
    let q = crate::fieldgrid::wavenumbers(n, n as f64 * dp);
    let shift = params.theta * e / 2.0;
    let mw2 = (params.m * params.omega).powi(2);
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let mut e_j = vec![c(0.0); n];
        e_j[j] = c(1.0);
        let mut modes = modes_1d(&e_j);
        modes.iter_mut().zip(&q).for_each(|(m, q)| *m *= c((q + shift).powi(2)));
        let col = synth_1d(&modes);
        for i in 0..n {
            h[(i, j)] = col[i] * mw2 / (2.0 * params.m);
        }
        h[(j, j)] += c(ps[j] * ps[j] / (2.0 * params.m));
    }
    // symmetrize roundoff
    let ht = h.adjoint();
    (h + ht) * c(0.5)
}

const SPECTRUM_NODES: usize = 128;
const FIXED_POINT_TOL: f64 = 1e-12;
const FIXED_POINT_MAX: usize = 50;

/// Oscillator spectrum in closed form and by self-consistent diagonalization
/// of the momentum-space operator, with the gauge factor checked.
pub fn oscillator_spectrum(params: &OscillatorParams, n_max: usize) -> Result<Spectrum> {
    let p = OscillatorParams::new(params.m, params.omega, params.theta)?;
    let scale = (p.m * p.omega).sqrt();
    let n = SPECTRUM_NODES;
    let half = 12.0 * scale;
    let dp = 2.0 * half / n as f64;
    let ps: Vec<f64> = (0..n).map(|j| -half + j as f64 * dp).collect();
    let closed_form: Vec<f64> = (0..=n_max).map(|k| p.energy(k)).collect();
    let mut numeric = Vec::new();
    let mut gauge_errors = Vec::new();
    let mut iterations = Vec::new();
    for level in 0..=n_max {
        let mut e = 0.0;
        let mut trace = vec![e];
        let mut solved = None;
        for it in 1..=FIXED_POINT_MAX {
            let h = momentum_hamiltonian(&p, &ps, dp, e);
            let eig = SymmetricEigen::new(h);
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
            let next = eig.eigenvalues[order[level]];
            trace.push(next);
            let converged = (next - e).abs() < FIXED_POINT_TOL * next.abs().max(1.0);
            e = next;
            if converged {
                let v = eig.eigenvectors.column(order[level]).iter().copied().collect::<Vec<_>>();
                solved = Some((v, it));
                break;
            }
        }
        let (v, it) = solved.ok_or_else(|| {
            Error::Numerical(format!("energy fixed point for level {level} did not converge; trace {trace:?}"))
        })?;
        // strip the gauge factor and compare with the Hermite function
        let mut g: Vec<Complex64> =
            v.iter().zip(&ps).map(|(v, p_)| v * Complex64::new(0.0, p.theta * e * p_ / 2.0).exp()).collect();
        let norm = (g.iter().map(|z| z.norm_sqr()).sum::<f64>() * dp).sqrt();
        let herm: Vec<f64> = ps.iter().map(|p_| hermite_functions(level, p_ / scale)[level] / scale.sqrt()).collect();
        let overlap: Complex64 = g.iter().zip(&herm).map(|(g, h)| g.conj() * h).sum::<Complex64>() * dp;
        let phase = overlap / overlap.norm();
        g.iter_mut().for_each(|z| *z *= phase / norm);
        let err = g.iter().zip(&herm).map(|(g, h)| (g - h).norm()).fold(0.0, f64::max);
        numeric.push(e);
        gauge_errors.push(err);
        iterations.push(it);
    }
    Ok(Spectrum { closed_form, numeric, gauge_errors, iterations })
}

/// Ground symbol of the oscillator with its star density.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorGround {
    pub energy: f64,
    pub symbol: SliceSymbol,
    pub density: Field1D,
    pub mean: f64,
    pub variance: f64,
}

/// `psi_0 = e^{-theta E_0^2/4} (m omega/pi)^{1/4} sqrt(a/sigma_theta^2) e^{-(x - theta E_0/2)^2 / 2 sigma_theta^2}`
/// with `a = 1/(m omega)`, normalized under the induced inner product.
pub fn oscillator_ground_profile(params: &OscillatorParams, x: f64) -> f64 {
    let e0 = params.energy(0);
    let a = 1.0 / (params.m * params.omega);
    let s2 = params.sigma_theta_sq();
    (-params.theta * e0 * e0 / 4.0).exp()
        * (params.m * params.omega / PI).powf(0.25)
        * (a / s2).sqrt()
        * (-(x - params.theta * e0 / 2.0).powi(2) / (2.0 * s2)).exp()
}

pub fn oscillator_ground(params: &OscillatorParams, spec: GridSpec, t: f64) -> Result<OscillatorGround> {
    let p = OscillatorParams::new(params.m, params.omega, params.theta)?;
    if spec.theta != p.theta {
        return Err(Error::SpecMismatch(format!("grid theta {} vs oscillator theta {}", spec.theta, p.theta)));
    }
    let width = p.sigma_tilde_sq().sqrt();
    if spec.dx() * 4.0 > width {
        return Err(Error::Grid(format!("dx = {:.3e} does not resolve the density width {width:.3e}", spec.dx())));
    }
    let e0 = p.energy(0);
    let values: Vec<Complex64> = spec.x_nodes().iter().map(|&x| c(oscillator_ground_profile(&p, x))).collect();
    let symbol = SliceSymbol::stationary(spec, t, e0, values);
    let rho = symbol.density()?;
    let (mean, variance) = profile_moments(&rho, &spec);
    let density = Field1D { spec, t_slice: t, values: rho.iter().map(|r| c(*r)).collect(), energy: None };
    Ok(OscillatorGround { energy: e0, symbol, density, mean, variance })
}

// ------------------------------------------------------------ eigen basis

#[derive(Debug, Clone, PartialEq)]
enum BasisKind {
    /// Plane waves (free particle).
    Fourier,
    /// Columns are eigenvectors normalized as `sum |v|^2 dx = 1`.
    Dense(DMatrix<f64>),
}

/// Commutative eigenbasis of `h = -(1/2m) d_x^2 + V(x)` on the slice grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    pub spec: GridSpec,
    pub m: f64,
    pub energies: Vec<f64>,
    kind: BasisKind,
}

impl EigenBasis {
    pub fn new(potential: &Potential, m: f64, spec: GridSpec) -> Result<Self> {
        if !(m > 0.0) {
            return Err(Error::InvalidArgument(format!("mass must be positive, got {m}")));
        }
        if potential.is_time_dependent() {
            return Err(Error::Unsupported("the eigenbasis needs a time-independent potential".into()));
        }
        potential.check_real()?;
        let n = spec.n_x;
        if matches!(potential, Potential::None) {
            let energies = spec.wavenumbers(Axis::X).iter().map(|k| k * k / (2.0 * m)).collect();
            return Ok(Self { spec, m, energies, kind: BasisKind::Fourier });
        }
        let k = spec.wavenumbers(Axis::X);
        let xs = spec.x_nodes();
        let mut h = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            let mut e_j = vec![c(0.0); n];
            e_j[j] = c(1.0);
            let mut modes = modes_1d(&e_j);
            modes.iter_mut().zip(&k).for_each(|(m_, k)| *m_ *= k * k);
            let col = synth_1d(&modes);
            for i in 0..n {
                h[(i, j)] = col[i].re / (2.0 * m);
            }
            h[(j, j)] += potential.value(xs[j], 0.0);
        }
        let h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
        let scale = 1.0 / spec.dx().sqrt();
        let mut vecs = DMatrix::<f64>::zeros(n, n);
        let mut energies = Vec::with_capacity(n);
        for (col, &o) in order.iter().enumerate() {
            let v = eig.eigenvectors.column(o);
            // fix the sign so the largest entry is positive
            let imax = v.iamax();
            let sign = v[imax].signum();
            for i in 0..n {
                vecs[(i, col)] = v[i] * sign * scale;
            }
            energies.push(eig.eigenvalues[o]);
        }
        Ok(Self { spec, m, energies, kind: BasisKind::Dense(vecs) })
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Commutative eigenfunction `eta_n` on the grid.
    pub fn vector(&self, n: usize) -> Vec<Complex64> {
        match &self.kind {
            BasisKind::Fourier => {
                let mut modes = vec![c(0.0); self.spec.n_x];
                modes[n] = c(1.0 / self.spec.len_x().sqrt());
                synth_1d(&modes)
            }
            BasisKind::Dense(v) => v.column(n).iter().map(|a| c(*a)).collect(),
        }
    }

    /// Coefficients `c_n = (eta_n, eta)`.
    pub fn project(&self, eta: &[Complex64]) -> Vec<Complex64> {
        match &self.kind {
            BasisKind::Fourier => {
                let f = self.spec.len_x().sqrt();
                modes_1d(eta).into_iter().map(|m| m * f).collect()
            }
            BasisKind::Dense(v) => {
                let dx = self.spec.dx();
                (0..self.len())
                    .into_par_iter()
                    .map(|n| v.column(n).iter().zip(eta).map(|(a, b)| b * *a).sum::<Complex64>() * dx)
                    .collect()
            }
        }
    }

    /// `sum_n c_n eta_n`.
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        match &self.kind {
            BasisKind::Fourier => {
                let f = 1.0 / self.spec.len_x().sqrt();
                synth_1d(&coeffs.iter().map(|a| a * f).collect::<Vec<_>>())
            }
            BasisKind::Dense(v) => {
                let n = self.spec.n_x;
                let mut out = vec![c(0.0); n];
                for (k, a) in coeffs.iter().enumerate() {
                    if *a == c(0.0) {
                        continue;
                    }
                    for i in 0..n {
                        out[i] += a * v[(i, k)];
                    }
                }
                out
            }
        }
    }

    /// Deformed eigen-symbol profile `e^{-theta E^2/4} T_E S eta` of a commutative profile.
    fn deform(&self, eta: &[Complex64], e: f64) -> Vec<Complex64> {
        let theta = self.spec.theta;
        if theta == 0.0 {
            return eta.to_vec();
        }
        let k = self.spec.wavenumbers(Axis::X);
        let pre = (-theta * e * e / 4.0).exp();
        let mut modes = modes_1d(eta);
        modes.iter_mut().zip(&k).for_each(|(m, k)| {
            *m *= pre * (-theta * k * k / 4.0).exp() * Complex64::new(0.0, -k * theta * e / 2.0).exp()
        });
        synth_1d(&modes)
    }

    /// Inverse of [`Self::deform`] on significant modes; modes amplified past
    /// [`MAX_AMPLIFICATION`] are dropped and counted.
    fn undeform(&self, psi: &[Complex64], e: f64) -> (Vec<Complex64>, usize) {
        let theta = self.spec.theta;
        if theta == 0.0 {
            return (psi.to_vec(), 0);
        }
        let k = self.spec.wavenumbers(Axis::X);
        let mut modes = modes_1d(psi);
        let peak = modes.iter().map(|m| m.norm()).fold(0.0, f64::max);
        let mut dropped = 0;
        modes.iter_mut().zip(&k).for_each(|(m, k)| {
            let amp = (theta * (e * e + k * k) / 4.0).exp();
            if m.norm() <= DEFAULT_CUTOFF * peak {
                *m = c(0.0);
            } else if amp > MAX_AMPLIFICATION {
                *m = c(0.0);
                dropped += 1;
            } else {
                *m *= amp * Complex64::new(0.0, k * theta * e / 2.0).exp();
            }
        });
        (synth_1d(&modes), dropped)
    }

    /// Deformed eigen-symbol of mode `n` on the slice at `t`.
    pub fn eigen_symbol(&self, n: usize, t: f64) -> SliceSymbol {
        let e = self.energies[n];
        SliceSymbol::stationary(self.spec, t, e, self.deform(&self.vector(n), e))
    }

    /// Symbol `sum_n c_n psi_n` on the slice at `t`, skipping negligible coefficients.
    pub fn symbol_from_coeffs(&self, coeffs: &[Complex64], t: f64) -> SliceSymbol {
        let peak = coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let mut out = SliceSymbol::zero(self.spec, t);
        if peak == 0.0 {
            return out;
        }
        if matches!(self.kind, BasisKind::Fourier) {
            // plane waves with equal energy share one component
            let keep: Vec<usize> = (0..self.len()).filter(|&n| coeffs[n].norm() > DEFAULT_CUTOFF * peak).collect();
            for &n in &keep {
                let mut single = vec![c(0.0); self.len()];
                single[n] = coeffs[n];
                let e = self.energies[n];
                let eta = self.synthesize(&single);
                out = out.add(&SliceSymbol::stationary(self.spec, t, e, self.deform(&eta, e)));
            }
            return out.compact();
        }
        let parts: Vec<SliceSymbol> = (0..self.len())
            .into_par_iter()
            .filter(|&n| coeffs[n].norm() > DEFAULT_CUTOFF * peak)
            .map(|n| self.eigen_symbol(n, t).scale(coeffs[n]))
            .collect();
        for p in parts {
            out = out.add(&p);
        }
        out.compact()
    }

    /// Coefficients of a symbol whose components are tagged with basis energies.
    pub fn coeffs_from_symbol(&self, psi: &SliceSymbol) -> Result<(Vec<Complex64>, usize)> {
        if psi.spec != self.spec {
            return Err(Error::SpecMismatch("symbol and basis live on different grids".into()));
        }
        let mut coeffs = vec![c(0.0); self.len()];
        let mut dropped = 0;
        let tol = 1e-8;
        for comp in &psi.comps {
            let single = SliceSymbol { spec: psi.spec, t: psi.t, comps: vec![comp.clone()] };
            if comp.coeffs.len() > 1 && comp.coeffs[1..].iter().any(|f| f.iter().any(|v| v.norm() > 0.0)) {
                return Err(Error::Unsupported("initial symbols must be sums of stationary components".into()));
            }
            let matching: Vec<usize> =
                (0..self.len()).filter(|&n| (self.energies[n] - comp.nu).abs() <= tol * comp.nu.abs().max(1.0)).collect();
            if matching.is_empty() {
                return Err(Error::MissingEnergy(format!(
                    "component tag {} does not match any eigenenergy of the grid Hamiltonian",
                    comp.nu
                )));
            }
            let (eta, d) = self.undeform(&single.eval(), comp.nu);
            dropped += d;
            let proj = self.project(&eta);
            for n in matching {
                coeffs[n] += proj[n];
            }
        }
        Ok((coeffs, dropped))
    }
}

// ------------------------------------------------------------- stationary

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryState {
    pub level: usize,
    pub energy: f64,
    pub symbol: SliceSymbol,
    /// `||E psi - H psi|| / ||psi||` with `H` applied to the symbol directly.
    pub residual: f64,
    /// Energy iterates of the fixed point.
    pub trace: Vec<f64>,
}

pub const STATIONARY_RESIDUAL_TOL: f64 = 1e-6;

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Levels of `E psi = -(1/2m) psi'' + V * psi` with energies in `window`.
///
/// Each level is found by a fixed point on `E`: build the symbol tagged with
/// the current guess, take the induced Rayleigh quotient of the deformed
/// Hamiltonian, repeat.
pub fn stationary_solve(potential: &Potential, m: f64, spec: GridSpec, window: (f64, f64)) -> Result<Vec<StationaryState>> {
    let basis = EigenBasis::new(potential, m, spec)?;
    let h = SymbolOperator::new(OpKind::Hamiltonian { m, potential: potential.clone() }, spec.theta);
    let levels: Vec<usize> = (0..basis.len()).filter(|&n| (window.0..=window.1).contains(&basis.energies[n])).collect();
    let mut out = Vec::with_capacity(levels.len());
    for (i, n) in levels.into_iter().enumerate() {
        let eta = basis.vector(n);
        let mut e = out.last().map(|s: &StationaryState| s.energy).unwrap_or(0.0);
        let mut trace = vec![e];
        let mut converged = None;
        for _ in 0..FIXED_POINT_MAX {
            let psi = SliceSymbol::stationary(spec, 0.0, e, basis.deform(&eta, e));
            let hpsi = apply(&h, &psi)?;
            let next = (psi.inner(&hpsi)? / psi.inner(&psi)?).re;
            trace.push(next);
            let done = (next - e).abs() < FIXED_POINT_TOL * next.abs().max(1.0);
            e = next;
            if done {
                converged = Some(());
                break;
            }
        }
        if converged.is_none() {
            return Err(Error::Numerical(format!("energy fixed point for level {i} diverged; trace {trace:?}")));
        }
        let psi = SliceSymbol::stationary(spec, 0.0, e, basis.deform(&eta, e));
        let hpsi = apply(&h, &psi)?.eval();
        let v = psi.eval();
        let diff: Vec<Complex64> = v.iter().zip(&hpsi).map(|(a, b)| a * e - b).collect();
        let residual = l2(&diff) / l2(&v);
        out.push(StationaryState { level: n, energy: e, symbol: psi, residual, trace });
    }
    Ok(out)
}

// ----------------------------------------------------------------- evolve

/// Initial data for [`evolve`].
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// Commutative profile `eta_0` on the grid.
    Commutative(Vec<Complex64>),
    /// Sum of stationary components tagged with eigenenergies of the grid Hamiltonian.
    Symbol(SliceSymbol),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveConfig {
    pub m: f64,
    pub dt: f64,
    pub steps: usize,
    pub store_every: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoredSlice {
    pub step: usize,
    pub t: f64,
    /// Eigenbasis coefficients of the commutative profile.
    pub coeffs: Vec<Complex64>,
    pub symbol: SliceSymbol,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub spec: GridSpec,
    pub config: EvolveConfig,
    pub potential: Potential,
    pub basis: EigenBasis,
    pub slices: Vec<StoredSlice>,
    /// Modes dropped when mapping the initial symbol.
    pub dropped_modes: usize,
}

impl Trajectory {
    /// Induced norms `(psi_t, psi_t)_t` of the stored slices.
    pub fn norms(&self) -> Result<Vec<f64>> {
        self.slices.iter().map(|s| Ok(s.symbol.inner(&s.symbol)?.re)).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "step,t,x,re,im,rho")?;
        let xs = self.spec.x_nodes();
        for s in &self.slices {
            let v = s.symbol.eval();
            let rho = s.symbol.density()?;
            for ((x, z), r) in xs.iter().zip(&v).zip(&rho) {
                writeln!(w, "{},{:.10e},{x:.10e},{:.15e},{:.15e},{r:.15e}", s.step, s.t, z.re, z.im)?;
            }
        }
        Ok(())
    }
}

/// Split-step evolution of the effective Schrödinger equation for a
/// time-independent real potential.
///
/// The commutative profile advances by Strang splitting (half kinetic step,
/// potential step, half kinetic step); stored slices are mapped to symbols
/// through the eigenbasis.
pub fn evolve(psi0: &InitialState, potential: &Potential, config: &EvolveConfig, spec: GridSpec) -> Result<Trajectory> {
    let EvolveConfig { m, dt, steps, store_every } = *config;
    if !(dt > 0.0) || store_every == 0 {
        return Err(Error::InvalidArgument(format!("need dt > 0 and store_every > 0 (dt = {dt}, store_every = {store_every})")));
    }
    let basis = EigenBasis::new(potential, m, spec)?;
    let xs = spec.x_nodes();
    let ks = spec.wavenumbers(Axis::X);
    let vmax = xs.iter().map(|&x| potential.value(x, 0.0).abs()).fold(0.0, f64::max);
    let kmax = ks.iter().map(|k| k.abs()).fold(0.0, f64::max);
    let stiffness = dt * (vmax + kmax * kmax / (2.0 * m));
    if stiffness >= 0.5 {
        return Err(Error::InvalidArgument(format!(
            "step too large: dt (max|V| + k_max^2/2m) = {stiffness:.3} must stay below 0.5"
        )));
    }
    let (mut eta, dropped) = match psi0 {
        InitialState::Commutative(v) => {
            if v.len() != spec.n_x {
                return Err(Error::SpecMismatch(format!("{} samples for n_x = {}", v.len(), spec.n_x)));
            }
            (v.clone(), 0)
        }
        InitialState::Symbol(s) => {
            let (coeffs, dropped) = basis.coeffs_from_symbol(s)?;
            (basis.synthesize(&coeffs), dropped)
        }
    };
    let t0 = match psi0 {
        InitialState::Symbol(s) => s.t,
        InitialState::Commutative(_) => 0.0,
    };
    let half_kin: Vec<Complex64> = ks.iter().map(|k| Complex64::new(0.0, -k * k * dt / (4.0 * m)).exp()).collect();
    let pot: Vec<Complex64> = xs.iter().map(|&x| Complex64::new(0.0, -potential.value(x, 0.0) * dt).exp()).collect();
    let free = matches!(potential, Potential::None);
    let store = |step: usize, eta: &[Complex64]| {
        let t = t0 + step as f64 * dt;
        let coeffs = basis.project(eta);
        let symbol = basis.symbol_from_coeffs(&coeffs, t);
        StoredSlice { step, t, coeffs, symbol }
    };
    let mut slices = vec![store(0, &eta)];
    for step in 1..=steps {
        let mut modes = modes_1d(&eta);
        if free {
            modes.iter_mut().zip(&half_kin).for_each(|(a, b)| *a *= b * b);
            eta = synth_1d(&modes);
        } else {
            modes.iter_mut().zip(&half_kin).for_each(|(a, b)| *a *= b);
            let mut mid = synth_1d(&modes);
            mid.iter_mut().zip(&pot).for_each(|(a, b)| *a *= b);
            let mut modes = modes_1d(&mid);
            modes.iter_mut().zip(&half_kin).for_each(|(a, b)| *a *= b);
            eta = synth_1d(&modes);
        }
        if step % store_every == 0 || step == steps {
            slices.push(store(step, &eta));
        }
    }
    Ok(Trajectory { spec, config: *config, potential: potential.clone(), basis, slices, dropped_modes: dropped })
}

// ------------------------------------------------------------- transitions

/// Matrix elements between deformed eigen-symbols on the `t = 0` slice.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionBasis {
    pub energies: Vec<f64>,
    /// `(phi_m, phi_n)` under the induced inner product.
    pub overlap: DMatrix<Complex64>,
    /// `(phi_m, d_x phi_n)`.
    pub dx: DMatrix<Complex64>,
    pub theta: f64,
}

impl TransitionBasis {
    /// The lowest `n_states` levels of a time-independent potential.
    pub fn new(potential: &Potential, m: f64, spec: GridSpec, n_states: usize) -> Result<Self> {
        let basis = EigenBasis::new(potential, m, spec)?;
        if n_states == 0 || n_states > basis.len() {
            return Err(Error::InvalidArgument(format!("n_states = {n_states} outside 1..={}", basis.len())));
        }
        let states: Vec<SliceSymbol> = (0..n_states).map(|n| basis.eigen_symbol(n, 0.0)).collect();
        let mut overlap = DMatrix::zeros(n_states, n_states);
        let mut dx = DMatrix::zeros(n_states, n_states);
        for a in 0..n_states {
            for b in 0..n_states {
                overlap[(a, b)] = states[a].inner(&states[b])?;
                dx[(a, b)] = states[a].inner(&states[b].d_x())?;
            }
        }
        Ok(Self { energies: basis.energies[..n_states].to_vec(), overlap, dx, theta: spec.theta })
    }

    /// Coupling `<f| V(t) + (theta/2) V'(t)(d_t + i d_x) |i>` without the time phase.
    pub fn coupling(&self, pulse: &Pulse, f: usize, i: usize, t: f64) -> Complex64 {
        let ov = self.overlap[(f, i)];
        let d = self.dx[(f, i)];
        let e_i = self.energies[i];
        ov * pulse.value(t) + 0.5 * self.theta * pulse.derivative(t) * (-I * e_i * ov + I * d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionResult {
    pub amplitude: Complex64,
    /// `theta max_t |dC_f/dt|`.
    pub regime: f64,
    /// Set when `regime > 0.1`.
    pub regime_flag: bool,
}

pub const REGIME_LIMIT: f64 = 0.1;

/// First-order amplitude `C_f/C_i` for a pulse acting over `[0, T]`,
/// integrated with composite Simpson on `n_steps` (rounded up to even) panels.
pub fn transition_amplitude(
    pulse: &Pulse,
    basis: &TransitionBasis,
    i: usize,
    f: usize,
    t_end: f64,
    n_steps: usize,
) -> Result<TransitionResult> {
    let n_states = basis.energies.len();
    if i >= n_states || f >= n_states {
        return Err(Error::InvalidArgument(format!("states ({i}, {f}) outside the basis of {n_states}")));
    }
    if !(t_end > 0.0) {
        return Err(Error::InvalidArgument(format!("T must be positive, got {t_end}")));
    }
    let n = n_steps.max(2).div_ceil(2) * 2;
    let h = t_end / n as f64;
    let w_fi = basis.energies[f] - basis.energies[i];
    let mut sum = c(0.0);
    let mut peak: f64 = 0.0;
    for k in 0..=n {
        let t = k as f64 * h;
        let g = -I * basis.coupling(pulse, f, i, t) * Complex64::new(0.0, w_fi * t).exp();
        peak = peak.max(g.norm());
        let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += g * w;
    }
    let amplitude = sum * h / 3.0;
    let regime = basis.theta * peak;
    Ok(TransitionResult { amplitude, regime, regime_flag: regime > REGIME_LIMIT })
}

/// `|amplitude|^2 / T`.
pub fn transition_rate(amplitude: Complex64, t_end: f64) -> Result<f64> {
    if !(t_end > 0.0) {
        return Err(Error::InvalidArgument(format!("T must be positive, got {t_end}")));
    }
    Ok(amplitude.norm_sqr() / t_end)
}
