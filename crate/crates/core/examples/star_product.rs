//! Voros star products on a periodic grid: plane-wave factor, associativity,
//! and the Fourier kernel against the truncated series.

use std::f64::consts::PI;

use ncqm::fieldgrid::sample_field;
use ncqm::star::{cross_validate, plane_wave_star_factor, star, star_with_diagnostics};
use ncqm::{Complex64, GridSpec, Method, StarKernel};

fn main() -> ncqm::Result<()> {
    let theta = 0.1;
    let spec = GridSpec::centered(64, 64, PI / 2.0, PI / 2.0, theta)?;
    let kernel = StarKernel::voros(theta);

    let wave = |e: f64, p: f64| move |t: f64, x: f64| Complex64::new(0.0, -(e * t - p * x)).exp();
    let f = sample_field(wave(2.0, -4.0), spec)?;
    let g = sample_field(wave(-2.0, 2.0), spec)?;
    let h = star(&kernel, &f, &g)?;
    let factor = plane_wave_star_factor(2.0, -4.0, -2.0, 2.0, theta);
    let err = h.sub(&f.mul(&g).scale(factor)).max_norm() / factor.norm();
    println!("plane waves: factor = {factor:.6}, max relative error = {err:.2e}");

    let bump = sample_field(|t, x| Complex64::new((2.0 * t).cos() + (2.0 * x).sin(), 0.5 * (2.0 * (t - x)).cos()), spec)?;
    let left = star(&kernel, &star(&kernel, &f, &bump)?, &g)?;
    let right = star(&kernel, &f, &star(&kernel, &bump, &g)?)?;
    println!("associativity gap: {:.2e}", left.sub(&right).max_norm() / left.max_norm());

    let series = StarKernel::voros(theta).with_method(Method::Series(12));
    println!("kernel vs 12-term series: {:.2e}", cross_validate(&kernel, &series, &bump, &f)?);
    let (_, diag) = star_with_diagnostics(&series, &bump, &f)?;
    println!("series diagnostics: {}", diag.to_json());

    let moyal = StarKernel::moyal(theta);
    let hm = star(&moyal, &f, &g)?;
    println!("Moyal / Voros ratio at origin: {:.6}", hm.at(32, 32) / h.at(32, 32));
    Ok(())
}
