//! Symbols near a fixed-time slice.
//!
//! A [`SliceSymbol`] is a finite sum of components
//! `e^{-i nu t} sum_j t^j f_j(x)`. This family is closed under `d_t`, `d_x`,
//! multiplication by `x` or `t`, conjugation and the Voros product, so
//! operators containing `d_t` act exactly without a full `(t, x)` grid. A
//! stationary state with energy `E` is the single component `nu = E`, `j = 0`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fieldgrid::{modes_1d, synth_1d, Axis, Field1D, GridSpec};
use crate::star::{significant, DEFAULT_CUTOFF};
use crate::{Error, Result};

const TAG_TOL: f64 = 1e-12;

/// One energy-tagged component `e^{-i nu t} sum_j t^j coeffs[j](x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub nu: f64,
    pub coeffs: Vec<Vec<Complex64>>,
}

impl Component {
    fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceSymbol {
    pub spec: GridSpec,
    pub t: f64,
    pub comps: Vec<Component>,
}

fn zero_vec(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); n]
}

fn axpy(y: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += a * x);
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn falling(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64)
}

impl SliceSymbol {
    pub fn zero(spec: GridSpec, t: f64) -> Self {
        Self { spec, t, comps: Vec::new() }
    }

    /// Stationary component `e^{-i E (t' - t)} values(x)`, so that the symbol
    /// equals `values` on the slice.
    pub fn stationary(spec: GridSpec, t: f64, energy: f64, values: Vec<Complex64>) -> Self {
        let phase = Complex64::new(0.0, energy * t).exp();
        let coeffs = vec![values.into_iter().map(|v| v * phase).collect()];
        Self { spec, t, comps: vec![Component { nu: energy, coeffs }] }
    }

    /// Component whose `t`-dependence is exactly `e^{-i nu t'}` (no rephasing).
    pub fn tagged(spec: GridSpec, t: f64, nu: f64, values: Vec<Complex64>) -> Self {
        Self { spec, t, comps: vec![Component { nu, coeffs: vec![values] }] }
    }

    /// A time-independent function of `x` (tag 0).
    pub fn static_field(spec: GridSpec, t: f64, values: Vec<Complex64>) -> Self {
        Self::tagged(spec, t, 0.0, values)
    }

    /// Converts an energy-tagged slice. Untagged slices are accepted only at
    /// `theta = 0`, where no `d_t` enters the product.
    pub fn from_field(f: &Field1D) -> Result<Self> {
        match f.energy {
            Some(e) => Ok(Self::stationary(f.spec, f.t_slice, e, f.values.clone())),
            None if f.spec.theta == 0.0 => Ok(Self::static_field(f.spec, f.t_slice, f.values.clone())),
            None => Err(Error::MissingEnergy(
                "slice has no energy tag; tag stationary states with Field1D::with_energy or build a SliceSymbol \
                 from components"
                    .into(),
            )),
        }
    }

    pub fn theta(&self) -> f64 {
        self.spec.theta
    }

    pub fn n(&self) -> usize {
        self.spec.n_x
    }

    /// Values on the slice.
    pub fn eval(&self) -> Vec<Complex64> {
        self.eval_at(self.t)
    }

    /// Values at another time `t` using the component representation.
    pub fn eval_at(&self, t: f64) -> Vec<Complex64> {
        let mut out = zero_vec(self.n());
        for c in &self.comps {
            let phase = Complex64::new(0.0, -c.nu * t).exp();
            let mut tp = 1.0;
            for f in &c.coeffs {
                axpy(&mut out, phase * tp, f);
                tp *= t;
            }
        }
        out
    }

    pub fn to_field(&self) -> Field1D {
        Field1D { spec: self.spec, t_slice: self.t, values: self.eval(), energy: self.single_energy() }
    }

    /// The tag when the symbol is a single stationary component.
    pub fn single_energy(&self) -> Option<f64> {
        match self.comps.as_slice() {
            [c] if c.degree() == 0 => Some(c.nu),
            _ => None,
        }
    }

    fn same_slice(&self, other: &Self) -> Result<()> {
        if self.spec != other.spec || self.t != other.t {
            return Err(Error::SpecMismatch("slice symbols on different grids or times".into()));
        }
        Ok(())
    }

    /// Merges components with equal tags and drops empty ones.
    pub fn compact(mut self) -> Self {
        let mut out: Vec<Component> = Vec::new();
        for c in self.comps.drain(..) {
            match out.iter_mut().find(|o| (o.nu - c.nu).abs() <= TAG_TOL * (1.0 + c.nu.abs())) {
                Some(o) => {
                    while o.coeffs.len() < c.coeffs.len() {
                        o.coeffs.push(zero_vec(self.spec.n_x));
                    }
                    for (j, f) in c.coeffs.iter().enumerate() {
                        axpy(&mut o.coeffs[j], Complex64::new(1.0, 0.0), f);
                    }
                }
                None => out.push(c),
            }
        }
        out.retain(|c| c.coeffs.iter().any(|f| f.iter().any(|v| *v != Complex64::new(0.0, 0.0))));
        self.comps = out;
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert!(self.same_slice(other).is_ok());
        let mut comps = self.comps.clone();
        comps.extend(other.comps.iter().cloned());
        Self { comps, ..self.clone() }.compact()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, a: Complex64) -> Self {
        self.map_coeffs(|_, f| f.iter().map(|v| v * a).collect())
    }

    fn map_coeffs(&self, g: impl Fn(f64, &[Complex64]) -> Vec<Complex64>) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|c| Component { nu: c.nu, coeffs: c.coeffs.iter().map(|f| g(c.nu, f)).collect() })
            .collect();
        Self { comps, ..self.clone() }
    }

    pub fn conj(&self) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|c| Component {
                nu: -c.nu,
                coeffs: c.coeffs.iter().map(|f| f.iter().map(|v| v.conj()).collect()).collect(),
            })
            .collect();
        Self { comps, ..self.clone() }
    }

    pub fn mul_x(&self) -> Self {
        let xs = self.spec.x_nodes();
        self.map_coeffs(|_, f| f.iter().zip(&xs).map(|(v, x)| v * x).collect())
    }

    /// Pointwise multiplication by a function of `x` alone (commutative product).
    pub fn mul_fn(&self, w: &[Complex64]) -> Self {
        self.map_coeffs(|_, f| f.iter().zip(w).map(|(v, w)| v * w).collect())
    }

    pub fn mul_t(&self) -> Self {
        let n = self.n();
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let mut coeffs = vec![zero_vec(n)];
                coeffs.extend(c.coeffs.iter().cloned());
                Component { nu: c.nu, coeffs }
            })
            .collect();
        Self { comps, ..self.clone() }
    }

    pub fn d_x(&self) -> Self {
        self.d_x_n(1)
    }

    pub fn d_x_n(&self, order: u32) -> Self {
        let k = self.spec.wavenumbers(Axis::X);
        let n = self.n();
        self.map_coeffs(|_, f| {
            let mut m = modes_1d(f);
            for (i, c) in m.iter_mut().enumerate() {
                *c *= if order % 2 == 1 && i == n / 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, k[i]).powu(order)
                };
            }
            synth_1d(&m)
        })
    }

    /// Exact `d_t` on the component representation.
    pub fn d_t(&self) -> Self {
        let n = self.n();
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let deg = c.degree();
                let coeffs = (0..=deg)
                    .map(|j| {
                        let mut v: Vec<Complex64> = c.coeffs[j].iter().map(|f| f * Complex64::new(0.0, -c.nu)).collect();
                        if j < deg {
                            axpy(&mut v, Complex64::new((j + 1) as f64, 0.0), &c.coeffs[j + 1]);
                        }
                        v
                    })
                    .collect::<Vec<_>>();
                let _ = n;
                Component { nu: c.nu, coeffs }
            })
            .collect();
        Self { comps, ..self.clone() }.compact()
    }

    /// Fourier multiplier on every coefficient field.
    pub fn fourier_multiply(&self, m: impl Fn(f64, f64) -> Complex64) -> Self {
        let k = self.spec.wavenumbers(Axis::X);
        self.map_coeffs(|nu, f| {
            let mut modes = modes_1d(f);
            modes.iter_mut().zip(&k).for_each(|(c, k)| *c *= m(nu, *k));
            synth_1d(&modes)
        })
    }

    /// Voros product `self * other`.
    pub fn star(&self, other: &Self) -> Result<Self> {
        self.same_slice(other)?;
        let theta = self.theta();
        let coupling = Coupling::new(&self.spec, theta);
        let pairs: Vec<(&Component, &Component)> =
            self.comps.iter().flat_map(|a| other.comps.iter().map(move |b| (a, b))).collect();
        let comps: Vec<Component> = pairs
            .par_iter()
            .map(|(a, b)| {
                let mut coeffs: Vec<Vec<Complex64>> = vec![zero_vec(self.n()); a.degree() + b.degree() + 1];
                expand_pair(&self.spec, theta, a, b, |power, f, g, weight| {
                    let h = kernel_full_with(&coupling, &self.spec, theta, a.nu, b.nu, f, g);
                    axpy(&mut coeffs[power], Complex64::new(weight, 0.0), &h);
                });
                Component { nu: a.nu + b.nu, coeffs }
            })
            .collect();
        Ok(Self { spec: self.spec, t: self.t, comps }.compact())
    }

    /// `int dx (self * other)` on the slice.
    pub fn star_integral(&self, other: &Self) -> Result<Complex64> {
        self.same_slice(other)?;
        let theta = self.theta();
        let t = self.t;
        let pairs: Vec<(&Component, &Component)> =
            self.comps.iter().flat_map(|a| other.comps.iter().map(move |b| (a, b))).collect();
        Ok(pairs
            .par_iter()
            .map(|(a, b)| {
                let mut acc = Complex64::new(0.0, 0.0);
                expand_pair(&self.spec, theta, a, b, |power, f, g, weight| {
                    acc += kernel_integral(&self.spec, theta, a.nu, b.nu, f, g) * weight * t.powi(power as i32);
                });
                acc * Complex64::new(0.0, -(a.nu + b.nu) * t).exp()
            })
            .sum())
    }

    /// Induced inner product `(self, other)_t = int dx self^* * other`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.conj().star_integral(other)
    }

    /// `self^* * self` on the slice (real part; the imaginary part is roundoff).
    pub fn density(&self) -> Result<Vec<f64>> {
        let rho = self.conj().star(self)?;
        Ok(rho.eval().iter().map(|v| v.re).collect())
    }

    pub fn max_norm(&self) -> f64 {
        self.eval().iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Expands `(sum_i t^i f_i e_nu) * (sum_j t^j g_j e_mu)` into kernel calls.
///
/// Uses `(t^i F) * (t^j G) = sum_r C(i,r) j!/(j-r)! (theta/2)^r (t + a)^{i-r} (t + b)^{j-r} F * G`
/// where `a = (i theta/2)(d_x - mu)` acts on `G` and `b = -(i theta/2)(d_x + nu)` acts on `F`.
fn expand_pair(
    spec: &GridSpec,
    theta: f64,
    a: &Component,
    b: &Component,
    mut emit: impl FnMut(usize, &[Complex64], &[Complex64], f64),
) {
    let k = spec.wavenumbers(Axis::X);
    let n = spec.n_x;
    let half = 0.5 * theta;
    // repeated application of an x-Fourier multiplier
    let powers = |f: &[Complex64], m: &dyn Fn(f64) -> Complex64, upto: usize| -> Vec<Vec<Complex64>> {
        let mut out = vec![f.to_vec()];
        if upto == 0 || theta == 0.0 {
            return out;
        }
        let mut modes = modes_1d(f);
        for _ in 0..upto {
            for (i, c) in modes.iter_mut().enumerate() {
                let kk = if i == n / 2 { 0.0 } else { k[i] };
                *c *= m(kk);
            }
            out.push(synth_1d(&modes));
        }
        out
    };
    let (nu, mu) = (a.nu, b.nu);
    let op_a = move |kk: f64| Complex64::new(0.0, half) * Complex64::new(-mu, kk);
    let op_b = move |kk: f64| Complex64::new(0.0, -half) * Complex64::new(nu, kk);
    let (da, db) = (a.degree(), b.degree());
    let b_pows: Vec<Vec<Vec<Complex64>>> = a.coeffs.iter().map(|f| powers(f, &op_b, db)).collect();
    let a_pows: Vec<Vec<Vec<Complex64>>> = b.coeffs.iter().map(|g| powers(g, &op_a, da)).collect();
    for i in 0..=da {
        for j in 0..=db {
            for r in 0..=i.min(j) {
                let wr = binom(i, r) * falling(j, r) * half.powi(r as i32);
                if wr == 0.0 {
                    continue;
                }
                for s in 0..=(i - r) {
                    for u in 0..=(j - r) {
                        if theta == 0.0 && (s > 0 || u > 0 || r > 0) {
                            continue;
                        }
                        let w = wr * binom(i - r, s) * binom(j - r, u);
                        let power = (i - r - s) + (j - r - u);
                        emit(power, &b_pows[i][u], &a_pows[j][s], w);
                    }
                }
            }
        }
    }
}

/// `F_nu * G_mu` on the slice, without the `e^{-i(nu+mu)t}` factor:
/// `sum_{k,k'} F_k G_k' W e^{i(k+k')x}`,
/// `W = exp[-(theta/2)(nu mu + k k') + (i theta/2)(nu k' - mu k)]`.
/// `exp(-theta k_i k_j / 2)` over all mode pairs, shared by the component
/// pairs of one product.
pub(crate) struct Coupling {
    n: usize,
    w: Vec<f64>,
}

impl Coupling {
    pub(crate) fn new(spec: &GridSpec, theta: f64) -> Self {
        let n = spec.n_x;
        let k = spec.wavenumbers(Axis::X);
        let w = (0..n * n).map(|p| (-0.5 * theta * k[p / n] * k[p % n]).exp()).collect();
        Self { n, w }
    }
}

/// `F_nu * G_mu` with weights `exp[-theta nu mu/2 - theta k k'/2 + i theta (nu k' - mu k)/2]`.
pub(crate) fn kernel_full_with(
    coupling: &Coupling,
    spec: &GridSpec,
    theta: f64,
    nu: f64,
    mu: f64,
    f: &[Complex64],
    g: &[Complex64],
) -> Vec<Complex64> {
    if theta == 0.0 {
        return f.iter().zip(g).map(|(a, b)| a * b).collect();
    }
    let n = spec.n_x;
    debug_assert_eq!(coupling.n, n);
    let k = spec.wavenumbers(Axis::X);
    let (fm, gm) = (modes_1d(f), modes_1d(g));
    let (fa, gb) = (significant(&fm, DEFAULT_CUTOFF), significant(&gm, DEFAULT_CUTOFF));
    let base = (-0.5 * theta * nu * mu).exp();
    let gp: Vec<Complex64> = gm.iter().zip(&k).map(|(c, kj)| c * Complex64::new(0.0, 0.5 * theta * nu * kj).exp()).collect();
    let mut out = zero_vec(n);
    for &i in &fa {
        let fi = fm[i] * Complex64::new(0.0, -0.5 * theta * mu * k[i]).exp() * base;
        let row = &coupling.w[i * n..(i + 1) * n];
        for &j in &gb {
            out[(i + j) % n] += fi * gp[j] * row[j];
        }
    }
    synth_1d(&out)
}

/// `int dx F_nu * G_mu` (zero mode of [`kernel_full_with`] times the box length).
pub(crate) fn kernel_integral(spec: &GridSpec, theta: f64, nu: f64, mu: f64, f: &[Complex64], g: &[Complex64]) -> Complex64 {
    let n = spec.n_x;
    if theta == 0.0 {
        return f.iter().zip(g).map(|(a, b)| a * b).sum::<Complex64>() * spec.dx();
    }
    let k = spec.wavenumbers(Axis::X);
    let (fm, gm) = (modes_1d(f), modes_1d(g));
    let base = -0.5 * theta * nu * mu;
    let floor = |m: &[Complex64]| DEFAULT_CUTOFF * m.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let (ff, gf) = (floor(&fm), floor(&gm));
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let j = (n - i) % n;
        if fm[i].norm() <= ff || gm[j].norm() <= gf {
            continue;
        }
        let (ki, kj) = (k[i], k[j]);
        let w = Complex64::new(base - 0.5 * theta * ki * kj, 0.5 * theta * (nu * kj - mu * ki)).exp();
        acc += fm[i] * gm[j] * w;
    }
    acc * spec.len_x()
}

/// Induced inner product of two slices. Each slice must carry an energy tag
/// unless `theta = 0`.
pub fn induced_inner_product(psi: &Field1D, phi: &Field1D) -> Result<Complex64> {
    if psi.spec != phi.spec || psi.t_slice != phi.t_slice {
        return Err(Error::SpecMismatch("slices on different grids or times".into()));
    }
    SliceSymbol::from_field(psi)?.inner(&SliceSymbol::from_field(phi)?)
}
