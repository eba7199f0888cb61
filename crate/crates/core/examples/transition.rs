//! Transition driven by a spatially uniform pulse: only the theta term
//! couples different levels.

use ncqm::cli::{default_pulse, oscillator_transition_rate};

fn main() -> ncqm::Result<()> {
    let t_end = 10.0;
    println!("pulse {:?}", default_pulse(t_end));
    println!("{:>6} {:>14} {:>14}", "theta", "rate", "rate/theta^2");
    for theta in [0.0, 0.02, 0.03, 0.04, 0.06, 0.08] {
        let rate = oscillator_transition_rate(1.0, 1.0, theta, t_end)?;
        let scaled = if theta > 0.0 { format!("{:.6e}", rate / (theta * theta)) } else { "-".into() };
        println!("{theta:>6} {rate:>14.6e} {scaled:>14}");
    }
    Ok(())
}
