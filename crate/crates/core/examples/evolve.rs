//! Split-step evolution of a displaced oscillator state with conservation
//! and Ehrenfest diagnostics.

use ncqm::cli::{conservation, ehrenfest_maxima};
use ncqm::dynamics::{evolve, EvolveConfig, InitialState, Potential};
use ncqm::moments::expectation;
use ncqm::operators::{OpKind, SymbolOperator};
use ncqm::{Complex64, GridSpec};

fn main() -> ncqm::Result<()> {
    let theta = 0.1;
    let spec = GridSpec::for_slice(256, (-9.0, 9.0), theta, 0.0)?;
    let eta: Vec<Complex64> = spec
        .x_nodes()
        .iter()
        .map(|x| Complex64::new(std::f64::consts::PI.powf(-0.25) * (-(x - 1.0).powi(2) / 2.0).exp(), 0.0))
        .collect();
    let config = EvolveConfig { m: 1.0, dt: 4e-4, steps: 1000, store_every: 50 };
    let traj = evolve(&InitialState::Commutative(eta), &Potential::Harmonic { m: 1.0, omega: 1.0 }, &config, spec)?;

    let x = SymbolOperator::new(OpKind::XL, theta);
    let x0 = expectation(&x, &traj.slices[0].symbol)?.re;
    println!("{:>6} {:>12} {:>14}", "t", "<X>", "<X>(0) cos t");
    for s in traj.slices.iter().step_by(4) {
        println!("{:>6.3} {:>12.6} {:>14.6}", s.t, expectation(&x, &s.symbol)?.re, x0 * s.t.cos());
    }
    let (cont, drift) = conservation(&traj, 1.0)?;
    println!("continuity residual {cont:.2e}, norm drift per 1000 steps {drift:.2e}");
    let [rx, rp, rt] = ehrenfest_maxima(&traj, 1.0, theta)?;
    println!("Ehrenfest residuals: X {rx:.2e}, P_x {rp:.2e}, T {rt:.2e}");
    traj.write_csv(std::io::sink())?;
    Ok(())
}
