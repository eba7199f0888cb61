//! The star density `psi^* * psi` is a sum of squares, hence nonnegative.

use std::f64::consts::PI;

use ncqm::cli::band_limited_state;
use ncqm::symbols::{density_series_gap, probability_density};
use ncqm::{GridSpec, StarKernel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ncqm::Result<()> {
    let theta = 0.2;
    let spec = GridSpec::centered(128, 128, PI, PI, theta)?;
    let kernel = StarKernel::voros(theta);
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    println!("{:>5} {:>12} {:>12} {:>6}", "state", "min rho", "series gap", "terms");
    for n in 0..8 {
        let psi = band_limited_state(spec, 3, &mut rng)?;
        let d = probability_density(&kernel, &psi)?;
        let min = d.rho.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
        // |psi|^2 itself can vanish; the star density cannot
        let bare = psi.values.iter().map(|v| v.norm_sqr()).fold(f64::INFINITY, f64::min);
        println!("{n:>5} {min:>12.4e} {:>12.2e} {:>6}   (min |psi|^2 = {bare:.3e})", density_series_gap(&kernel, &psi)?, d.terms);
    }
    Ok(())
}
