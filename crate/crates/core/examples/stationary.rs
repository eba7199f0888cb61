//! Stationary levels of the deformed Hamiltonian for an anharmonic well.
//!
//! The star action of a time-independent potential on an energy-tagged slice
//! is similar to the commutative one, so the levels agree across theta.

use ncqm::dynamics::{stationary_solve, Potential};
use ncqm::GridSpec;

fn main() -> ncqm::Result<()> {
    let quartic = Potential::Polynomial { coeffs: vec![0.0, 0.0, 0.5, 0.0, 0.1] };
    let mut reference: Vec<f64> = Vec::new();
    for theta in [0.0, 0.05, 0.1] {
        let spec = GridSpec::for_slice(512, (-9.0, 9.0), theta, 0.0)?;
        let levels = stationary_solve(&quartic, 1.0, spec, (0.0, 4.0))?;
        if reference.is_empty() {
            reference = levels.iter().map(|s| s.energy).collect();
        }
        for (s, e0) in levels.iter().zip(&reference) {
            println!(
                "theta = {theta:<4} n = {} E = {:.10} shift {:+.1e} residual {:.1e} iterations {}",
                s.level,
                s.energy,
                s.energy - e0,
                s.residual,
                s.trace.len()
            );
        }
    }
    Ok(())
}
