//! Voros and Moyal star products on sampled fields.
//!
//! For Fourier modes `k = (k_t, k_x)` of `f` and `q` of `g` the Voros product
//! carries the multiplier
//!
//! ```text
//! exp[-(theta/2) k.q - (i theta/2)(k_t q_x - k_x q_t)]
//! ```
//!
//! into mode `k + q`; the Moyal product keeps only the imaginary part of the
//! exponent. [`Method::FourierKernel`] applies this exactly on the retained
//! modes and is the reference; [`Method::Series`] truncates the
//! bidifferential exponential at total order `K`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fieldgrid::{Axis, Field2D};
use crate::{Error, Result};

/// Relative mode magnitude below which the Fourier kernel drops a mode.
pub const DEFAULT_CUTOFF: f64 = 1e-14;

/// Ratio `|term K| / |term 0|` above which a truncated series is rejected.
pub const SERIES_GATE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flavor {
    Voros,
    Moyal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    FourierKernel,
    Series(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarKernel {
    pub theta: f64,
    pub flavor: Flavor,
    pub method: Method,
    /// Relative mode cutoff for [`Method::FourierKernel`]; 0 keeps every mode.
    pub cutoff: f64,
}

impl StarKernel {
    pub fn voros(theta: f64) -> Self {
        Self { theta, flavor: Flavor::Voros, method: Method::FourierKernel, cutoff: DEFAULT_CUTOFF }
    }

    pub fn moyal(theta: f64) -> Self {
        Self { flavor: Flavor::Moyal, ..Self::voros(theta) }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return Err(Error::InvalidArgument(format!("theta = {} must be finite and >= 0", self.theta)));
        }
        if let Method::Series(0) = self.method {
            return Err(Error::InvalidArgument("series order K must be >= 1".into()));
        }
        Ok(())
    }

    /// Fourier multiplier for the mode pair `(k, q)`.
    #[inline]
    pub fn multiplier(&self, k_t: f64, k_x: f64, q_t: f64, q_x: f64) -> Complex64 {
        mode_multiplier(self.flavor, self.theta, k_t, k_x, q_t, q_x)
    }
}

#[inline]
pub fn mode_multiplier(flavor: Flavor, theta: f64, k_t: f64, k_x: f64, q_t: f64, q_x: f64) -> Complex64 {
    let cross = -0.5 * theta * (k_t * q_x - k_x * q_t);
    match flavor {
        Flavor::Voros => Complex64::new(-0.5 * theta * (k_t * q_t + k_x * q_x), cross).exp(),
        Flavor::Moyal => Complex64::new(0.0, cross).exp(),
    }
}

/// Diagnostic record emitted as `{method, K, term_norms}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarDiagnostics {
    pub method: String,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub term_norms: Vec<f64>,
    /// Retained modes of `(f, g)` for the Fourier kernel.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes_kept: Option<(usize, usize)>,
}

impl StarDiagnostics {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("diagnostics serialize")
    }
}

fn check_inputs(kernel: &StarKernel, f: &Field2D, g: &Field2D) -> Result<()> {
    kernel.validate()?;
    if f.spec != g.spec {
        return Err(Error::SpecMismatch("star operands live on different grids".into()));
    }
    if (kernel.theta - f.spec.theta).abs() > 1e-15 * kernel.theta.max(1.0) {
        return Err(Error::SpecMismatch(format!(
            "kernel theta {} differs from grid theta {}",
            kernel.theta, f.spec.theta
        )));
    }
    Ok(())
}

/// `f * g` with the configured flavor and method.
pub fn star(kernel: &StarKernel, f: &Field2D, g: &Field2D) -> Result<Field2D> {
    star_with_diagnostics(kernel, f, g).map(|(h, _)| h)
}

pub fn star_with_diagnostics(kernel: &StarKernel, f: &Field2D, g: &Field2D) -> Result<(Field2D, StarDiagnostics)> {
    check_inputs(kernel, f, g)?;
    if kernel.theta == 0.0 {
        let (name, k) = match kernel.method {
            Method::FourierKernel => ("FourierKernel", None),
            Method::Series(k) => ("Series", Some(k)),
        };
        let h = f.mul(g);
        let diag = StarDiagnostics { method: name.into(), k, term_norms: vec![h.max_norm()], modes_kept: None };
        return Ok((h, diag));
    }
    match kernel.method {
        Method::FourierKernel => Ok(fourier_kernel(kernel, f, g)),
        Method::Series(k) => series(kernel, f, g, k),
    }
}

/// Indices of modes above `cutoff` times the peak magnitude.
pub(crate) fn significant(modes: &[Complex64], cutoff: f64) -> Vec<usize> {
    let peak = modes.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Vec::new();
    }
    let floor = cutoff * peak;
    modes.iter().enumerate().filter(|(_, c)| c.norm() > floor).map(|(i, _)| i).collect()
}

fn fourier_kernel(kernel: &StarKernel, f: &Field2D, g: &Field2D) -> (Field2D, StarDiagnostics) {
    let s = f.spec;
    let (nt, nx) = (s.n_t, s.n_x);
    let (kt, kx) = (s.wavenumbers(Axis::T), s.wavenumbers(Axis::X));
    let (fm, gm) = (f.modes(), g.modes());
    let (fa, gb) = (significant(&fm, kernel.cutoff), significant(&gm, kernel.cutoff));

    let threads = rayon::current_num_threads().max(1);
    let chunk = fa.len().div_ceil(threads).max(1);
    let out = fa
        .par_chunks(chunk)
        .map(|ia_chunk| {
            let mut acc = vec![Complex64::new(0.0, 0.0); nt * nx];
            for &ia in ia_chunk {
                let (ta, xa) = (ia / nx, ia % nx);
                let ca = fm[ia];
                for &ib in &gb {
                    let (tb, xb) = (ib / nx, ib % nx);
                    let w = kernel.multiplier(kt[ta], kx[xa], kt[tb], kx[xb]);
                    acc[((ta + tb) % nt) * nx + (xa + xb) % nx] += ca * gm[ib] * w;
                }
            }
            acc
        })
        .reduce(
            || vec![Complex64::new(0.0, 0.0); nt * nx],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let h = Field2D::from_modes(s, &out);
    let diag = StarDiagnostics {
        method: "FourierKernel".into(),
        k: None,
        term_norms: vec![h.max_norm()],
        modes_kept: Some((fa.len(), gb.len())),
    };
    (h, diag)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn series(kernel: &StarKernel, f: &Field2D, g: &Field2D, order: usize) -> Result<(Field2D, StarDiagnostics)> {
    let theta = kernel.theta;
    let mut sum = Field2D::zeros(f.spec);
    let mut norms = Vec::with_capacity(order + 1);
    match kernel.flavor {
        Flavor::Voros => {
            // d_z = a (d_t - i d_x), d_zbar = a (d_t + i d_x), a = sqrt(theta/2)
            let a = (theta / 2.0).sqrt();
            let dz = |h: &Field2D| h.fourier_multiply(|k_t, k_x, _, _| Complex64::new(a * k_x, a * k_t));
            let dzb = |h: &Field2D| h.fourier_multiply(|k_t, k_x, _, _| Complex64::new(-a * k_x, a * k_t));
            let (mut fz, mut gz) = (f.clone(), g.clone());
            for n in 0..=order {
                if n > 0 {
                    fz = dz(&fz);
                    gz = dzb(&gz);
                }
                let term = fz.mul(&gz).scale(Complex64::new(1.0 / factorial(n), 0.0));
                norms.push(term.max_norm());
                sum = sum.add(&term);
            }
        }
        Flavor::Moyal => {
            // exp[(i theta/2)(<d_t ->d_x - <d_x ->d_t)]
            for n in 0..=order {
                let pref = Complex64::new(0.0, theta / 2.0).powu(n as u32) / factorial(n);
                let mut term = Field2D::zeros(f.spec);
                for a in 0..=n {
                    let sign = if (n - a) % 2 == 0 { 1.0 } else { -1.0 };
                    let fd = deriv_mixed(f, a as u32, (n - a) as u32);
                    let gd = deriv_mixed(g, (n - a) as u32, a as u32);
                    term = term.add(&fd.mul(&gd).scale(Complex64::new(sign * binomial(n, a), 0.0)));
                }
                let term = term.scale(pref);
                norms.push(term.max_norm());
                sum = sum.add(&term);
            }
        }
    }
    let diag = StarDiagnostics { method: "Series".into(), k: Some(order), term_norms: norms.clone(), modes_kept: None };
    if norms[0] > 0.0 && norms[order] > SERIES_GATE * norms[0] {
        return Err(Error::SeriesDiverged { order, term_norms: norms });
    }
    Ok((sum, diag))
}

/// `d_t^a d_x^b h`.
fn deriv_mixed(h: &Field2D, a: u32, b: u32) -> Field2D {
    if a == 0 && b == 0 {
        return h.clone();
    }
    h.fourier_multiply(|k_t, k_x, _, _| Complex64::new(0.0, k_t).powu(a) * Complex64::new(0.0, k_x).powu(b))
}

/// Exact Voros factor with
/// `e^{-i(Et-px)} * e^{-i(E't-p'x)} = factor e^{-i((E+E')t-(p+p')x)}`.
pub fn plane_wave_star_factor(e: f64, p: f64, e2: f64, p2: f64, theta: f64) -> Complex64 {
    (-(theta / 2.0) * Complex64::new(e, p) * Complex64::new(e2, -p2)).exp()
}

/// Max-norm discrepancy between two methods, relative to the larger result.
pub fn cross_validate(a: &StarKernel, b: &StarKernel, f: &Field2D, g: &Field2D) -> Result<f64> {
    if a.flavor != b.flavor || a.theta != b.theta {
        return Err(Error::InvalidArgument("cross_validate needs the same flavor and theta".into()));
    }
    let ha = star(a, f, g)?;
    let hb = star(b, f, g)?;
    let scale = ha.max_norm().max(hb.max_norm());
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(ha.sub(&hb).max_norm() / scale)
}

/// `int dt dx (f * g)` over the periodic box, evaluated on the zero mode only:
/// `L_t L_x sum_k f_{-k} g_k W(-k, k)`.
pub fn star_integral(kernel: &StarKernel, f: &Field2D, g: &Field2D) -> Result<Complex64> {
    check_inputs(kernel, f, g)?;
    let s = f.spec;
    let (nt, nx) = (s.n_t, s.n_x);
    let (kt, kx) = (s.wavenumbers(Axis::T), s.wavenumbers(Axis::X));
    let (fm, gm) = (f.modes(), g.modes());
    let floor = |m: &[Complex64]| kernel.cutoff * m.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let (ff, gf) = (floor(&fm), floor(&gm));
    let total: Complex64 = (0..nt * nx)
        .into_par_iter()
        .map(|i| {
            let (it, ix) = (i / nx, i % nx);
            let j = ((nt - it) % nt) * nx + (nx - ix) % nx;
            if fm[j].norm() <= ff || gm[i].norm() <= gf {
                return Complex64::new(0.0, 0.0);
            }
            fm[j] * gm[i] * kernel.multiplier(-kt[it], -kx[ix], kt[it], kx[ix])
        })
        .sum();
    Ok(total * s.len_t() * s.len_x())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldgrid::{sample_field, GridSpec};
    use proptest::prelude::*;

    fn cplx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plane(e: f64, p: f64) -> impl Fn(f64, f64) -> Complex64 + Sync {
        move |t, x| Complex64::new(0.0, -(e * t - p * x)).exp()
    }

    /// Box of length 2 pi (unit mode spacing) resolving theta.
    fn unit_box(theta: f64, n: usize) -> GridSpec {
        GridSpec::centered(n, n, std::f64::consts::PI, std::f64::consts::PI, theta).unwrap()
    }

    fn gauss(t0: f64, x0: f64, w: f64, kt: f64, kx: f64) -> impl Fn(f64, f64) -> Complex64 + Sync {
        move |t, x| {
            let r2 = (t - t0).powi(2) + (x - x0).powi(2);
            Complex64::new(-r2 / (2.0 * w * w), kt * t + kx * x).exp()
        }
    }

    fn gauss_grid(theta: f64) -> GridSpec {
        GridSpec::centered(256, 256, 9.0, 9.0, theta).unwrap()
    }

    #[test]
    fn theta_zero_is_pointwise() {
        let s = GridSpec::centered(32, 32, 4.0, 4.0, 0.0).unwrap();
        let f = sample_field(gauss(0.3, -0.2, 1.0, 0.5, 1.0), s).unwrap();
        let g = sample_field(gauss(-0.1, 0.4, 0.8, -1.0, 0.2), s).unwrap();
        for k in [
            StarKernel::voros(0.0),
            StarKernel::moyal(0.0),
            StarKernel::voros(0.0).with_method(Method::Series(4)),
            StarKernel::moyal(0.0).with_method(Method::Series(4)),
        ] {
            assert_eq!(star(&k, &f, &g).unwrap(), f.mul(&g));
        }
    }

    #[test]
    fn unit_is_identity() {
        let s = unit_box(0.3, 64);
        let one = sample_field(|_, _| cplx(1.0, 0.0), s).unwrap();
        let h = star(&StarKernel::voros(0.3), &one, &one).unwrap();
        assert!(h.sub(&one).max_norm() < 1e-13);
    }

    #[test]
    fn plane_wave_example() {
        let theta = 0.2;
        let s = unit_box(theta, 64);
        let f = sample_field(plane(1.0, 0.0), s).unwrap();
        let g = sample_field(plane(0.0, 1.0), s).unwrap();
        let h = star(&StarKernel::voros(theta), &f, &g).unwrap();
        let factor = plane_wave_star_factor(1.0, 0.0, 0.0, 1.0, theta);
        assert!((factor - cplx(0.9950042, 0.0998334)).norm() < 1e-7);
        let want = sample_field(plane(1.0, 1.0), s).unwrap().scale(factor);
        assert!(h.sub(&want).max_norm() < 1e-12);
    }

    #[test]
    fn factor_examples() {
        assert_eq!(plane_wave_star_factor(0.0, 0.0, 0.0, 0.0, 0.7), cplx(1.0, 0.0));
        assert_eq!(plane_wave_star_factor(1.3, -0.4, 2.0, 0.1, 0.0), cplx(1.0, 0.0));
        let f = plane_wave_star_factor(-1.0, -2.0, 1.0, 2.0, 0.1);
        assert!((f - cplx(0.25f64.exp(), 0.0)).norm() < 1e-14);
        assert!((f.re - 1.2840254).abs() < 1e-7);
    }

    #[test]
    fn series_matches_kernel_on_gaussians() {
        let theta = 0.1;
        let s = gauss_grid(theta);
        let f = sample_field(gauss(0.2, 0.0, 1.0, 0.3, -0.5), s).unwrap();
        let g = sample_field(gauss(-0.1, 0.3, 0.9, 0.0, 0.4), s).unwrap();
        let a = StarKernel::voros(theta);
        let d = cross_validate(&a, &a.with_method(Method::Series(8)), &f, &g).unwrap();
        assert!(d < 1e-6, "discrepancy {d}");
        let m = StarKernel::moyal(theta);
        let d = cross_validate(&m, &m.with_method(Method::Series(8)), &f, &g).unwrap();
        assert!(d < 1e-6, "moyal discrepancy {d}");
    }

    #[test]
    fn cross_validate_zero_theta_and_plane_oracle() {
        let s = GridSpec::centered(16, 16, 3.0, 3.0, 0.0).unwrap();
        let f = sample_field(gauss(0.0, 0.0, 1.0, 0.0, 0.0), s).unwrap();
        let a = StarKernel::voros(0.0);
        assert_eq!(cross_validate(&a, &a.with_method(Method::Series(3)), &f, &f).unwrap(), 0.0);
        assert!(cross_validate(&a, &StarKernel::moyal(0.0), &f, &f).is_err());

        let theta = 0.5;
        let s = unit_box(theta, 64);
        let f = sample_field(plane(2.0, -1.0), s).unwrap();
        let g = sample_field(plane(-1.0, 3.0), s).unwrap();
        let h = star(&StarKernel::voros(theta), &f, &g).unwrap();
        let want = sample_field(plane(1.0, 2.0), s).unwrap().scale(plane_wave_star_factor(2.0, -1.0, -1.0, 3.0, theta));
        assert!(h.sub(&want).max_norm() / want.max_norm() < 1e-10);
    }

    #[test]
    fn series_gate_reports_term_norms() {
        let theta = 0.5;
        let s = unit_box(theta, 64);
        let f = sample_field(plane(6.0, 5.0), s).unwrap();
        let g = sample_field(plane(-5.0, 6.0), s).unwrap();
        let k = StarKernel::voros(theta).with_method(Method::Series(1));
        match star(&k, &f, &g) {
            Err(Error::SeriesDiverged { order, term_norms }) => {
                assert_eq!(order, 1);
                assert_eq!(term_norms.len(), 2);
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn associativity_and_conjugation() {
        let theta = 0.1;
        let s = gauss_grid(theta);
        let k = StarKernel::voros(theta);
        let f = sample_field(gauss(0.3, 0.0, 1.0, 0.5, 0.0), s).unwrap();
        let g = sample_field(gauss(0.0, -0.4, 0.9, 0.0, 1.0), s).unwrap();
        let h = sample_field(gauss(-0.2, 0.1, 0.8, -0.7, 0.3), s).unwrap();
        let left = star(&k, &star(&k, &f, &g).unwrap(), &h).unwrap();
        let right = star(&k, &f, &star(&k, &g, &h).unwrap()).unwrap();
        assert!(left.sub(&right).max_norm() < 1e-8);

        let fg = star(&k, &f, &g).unwrap().conj();
        let gf = star(&k, &g.conj(), &f.conj()).unwrap();
        assert!(fg.sub(&gf).max_norm() < 1e-10);
    }

    #[test]
    fn voros_is_smoothed_moyal() {
        // Voros = sum_n (theta/2)^n/n! sum_a C(n,a) Moyal(d_t^a d_x^(n-a) f, d_t^a d_x^(n-a) g)
        let theta = 0.1;
        let s = unit_box(theta, 128);
        let fw = [(cplx(1.0, 0.0), 1.0, 2.0), (cplx(0.5, 0.0), -2.0, 1.0), (cplx(1.0, 0.0), 0.0, -1.0)];
        let gw = [(cplx(1.0, 0.0), 2.0, 0.0), (cplx(0.0, -0.3), 1.0, -2.0), (cplx(1.0, 0.0), -1.0, -1.0)];
        // d_t^a d_x^b of sum c e^{-i(Et - px)}, sampled exactly
        let field = |w: &[(Complex64, f64, f64)], a: i32, b: i32| {
            let w = w.to_vec();
            sample_field(
                move |t, x| w.iter().map(|&(c, e, p)| c * cplx(0.0, -e).powi(a) * cplx(0.0, p).powi(b) * plane(e, p)(t, x)).sum(),
                s,
            )
            .unwrap()
        };
        let v = star(&StarKernel::voros(theta), &field(&fw, 0, 0), &field(&gw, 0, 0)).unwrap();
        let m = StarKernel::moyal(theta);
        let mut acc = Field2D::zeros(s);
        for n in 0..=14usize {
            let pref = (theta / 2.0).powi(n as i32) / factorial(n);
            for a in 0..=n {
                let (ta, xb) = (a as i32, (n - a) as i32);
                let term = star(&m, &field(&fw, ta, xb), &field(&gw, ta, xb)).unwrap();
                acc = acc.add(&term.scale(cplx(pref * binomial(n, a), 0.0)));
            }
        }
        assert!(acc.sub(&v).max_norm() < 1e-8 * v.max_norm());
    }

    #[test]
    fn star_integral_matches_quadrature() {
        let theta = 0.2;
        let s = GridSpec::centered(256, 256, 9.0, 9.0, theta).unwrap();
        let k = StarKernel::voros(theta);
        let f = sample_field(gauss(0.3, 0.0, 1.0, 0.5, 0.0), s).unwrap();
        let g = sample_field(gauss(0.0, -0.4, 0.9, 0.0, 1.0), s).unwrap();
        use crate::fieldgrid::Integrate;
        let direct = star(&k, &f, &g).unwrap().integrate();
        let fast = star_integral(&k, &f, &g).unwrap();
        assert!((direct - fast).norm() < 1e-10, "{direct} vs {fast}");
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let a = GridSpec::centered(128, 128, 3.0, 3.0, 0.1).unwrap();
        let b = GridSpec::centered(128, 128, 3.0, 3.1, 0.1).unwrap();
        let f = Field2D::zeros(a);
        let g = Field2D::zeros(b);
        assert!(matches!(star(&StarKernel::voros(0.1), &f, &g), Err(Error::SpecMismatch(_))));
        assert!(matches!(star(&StarKernel::voros(0.2), &f, &f), Err(Error::SpecMismatch(_))));
        let k = StarKernel::voros(0.1).with_method(Method::Series(0));
        assert!(star(&k, &f, &f).is_err());
    }

    #[test]
    fn diagnostics_json_shape() {
        let theta = 0.1;
        let s = gauss_grid(theta);
        let f = sample_field(gauss(0.0, 0.0, 1.0, 0.0, 0.0), s).unwrap();
        let k = StarKernel::voros(theta).with_method(Method::Series(4));
        let (_, d) = star_with_diagnostics(&k, &f, &f).unwrap();
        let v: serde_json::Value = serde_json::from_str(&d.to_json()).unwrap();
        assert_eq!(v["method"], "Series");
        assert_eq!(v["K"], 4);
        assert_eq!(v["term_norms"].as_array().unwrap().len(), 5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn plane_waves_reproduce_factor(e in -3i32..=3, p in -3i32..=3, e2 in -3i32..=3, p2 in -3i32..=3, th in 0.05f64..0.5) {
            let s = unit_box(th, 128);
            let (e, p, e2, p2) = (e as f64, p as f64, e2 as f64, p2 as f64);
            let f = sample_field(plane(e, p), s).unwrap();
            let g = sample_field(plane(e2, p2), s).unwrap();
            let h = star(&StarKernel::voros(th), &f, &g).unwrap();
            let want = sample_field(plane(e + e2, p + p2), s).unwrap().scale(plane_wave_star_factor(e, p, e2, p2, th));
            prop_assert!(h.sub(&want).max_norm() / want.max_norm() < 1e-10);
        }

        #[test]
        fn bilinear_and_conjugation_symmetric(a in -2.0f64..2.0, b in -2.0f64..2.0, th in 0.05f64..0.4) {
            let s = unit_box(th, 128);
            let k = StarKernel::voros(th);
            let f = sample_field(|t, x| plane(1.0, 2.0)(t, x) + plane(-1.0, 0.0)(t, x) * 0.5, s).unwrap();
            let g = sample_field(plane(2.0, -1.0), s).unwrap();
            let h = sample_field(|t, x| plane(0.0, 1.0)(t, x) * cplx(0.0, 1.0), s).unwrap();
            let lhs = star(&k, &f, &g.scale(cplx(a, 0.0)).add(&h.scale(cplx(0.0, b)))).unwrap();
            let rhs = star(&k, &f, &g).unwrap().scale(cplx(a, 0.0)).add(&star(&k, &f, &h).unwrap().scale(cplx(0.0, b)));
            prop_assert!(lhs.sub(&rhs).max_norm() < 1e-10 * (1.0 + rhs.max_norm()));
            let c1 = star(&k, &f, &g).unwrap().conj();
            let c2 = star(&k, &g.conj(), &f.conj()).unwrap();
            prop_assert!(c1.sub(&c2).max_norm() < 1e-10 * (1.0 + c1.max_norm()));
        }
    }
}
