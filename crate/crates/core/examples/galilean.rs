//! Galilean boost generator: algebra residuals and a small boost.

use ncqm::cli::galilean_residuals;
use ncqm::fieldgrid::sample_field;
use ncqm::operators::boost_transform;
use ncqm::{Complex64, GridSpec};

fn main() -> ncqm::Result<()> {
    for theta in [0.05, 0.2] {
        let [h, p, pt] = galilean_residuals(theta, 1.0, 3)?;
        println!("theta = {theta}: [G,H]-iP_x {h:.1e}, [G,P_x]-im {p:.1e}, [G,P_t]+iP_x {pt:.1e}");
    }
    let spec = GridSpec::centered(256, 256, 9.0, 9.0, 0.1)?;
    let psi = sample_field(|t, x| Complex64::new(-(t * t + x * x) / 2.0, 0.0).exp(), spec)?;
    let b = boost_transform(&psi, 0.01, 1.0)?;
    println!("boost v = 0.01: neglected second-order size {:.2e}", b.error_estimate);
    Ok(())
}
