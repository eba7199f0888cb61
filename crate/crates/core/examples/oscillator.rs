//! Harmonic oscillator: undeformed spectrum and the shifted ground density.

use ncqm::dynamics::{oscillator_ground, oscillator_spectrum, OscillatorParams};
use ncqm::GridSpec;

fn main() -> ncqm::Result<()> {
    for theta in [0.0, 0.1, 0.3] {
        let params = OscillatorParams::new(1.0, 1.0, theta)?;
        let s = oscillator_spectrum(&params, 5)?;
        let levels: Vec<String> = s.numeric.iter().map(|e| format!("{e:.8}")).collect();
        println!("theta = {theta}: E = [{}], max deviation {:.1e}", levels.join(", "), s.max_discrepancy());
    }

    let params = OscillatorParams::new(1.0, 1.0, 0.1)?;
    let spec = GridSpec::for_slice(256, (-9.0, 9.0), 0.1, 0.0)?;
    let g = oscillator_ground(&params, spec, 0.0)?;
    println!("\nground density: mean {:.6} (theta E0 = {:.6})", g.mean, 0.1 * g.energy);
    println!("                variance {:.6} (sigma~^2 = {:.6})", g.variance, params.sigma_tilde_sq());

    let stiff = OscillatorParams::new(1.0, 1e8, 0.1)?;
    println!(
        "\nomega -> inf: sigma~ = {:.5}; sqrt(theta/2) = {:.5}, sqrt(theta) = {:.5}",
        stiff.sigma_tilde_sq().sqrt(),
        (0.05f64).sqrt(),
        (0.1f64).sqrt()
    );
    Ok(())
}
