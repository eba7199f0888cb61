//! Free Gaussian packet: closed-form width against the measured `|Psi|^2`
//! width, and the first-order correction.

use ncqm::dynamics::{first_order_regime, free_packet, measured_width, packet_width, PacketParams};
use ncqm::GridSpec;

fn main() -> ncqm::Result<()> {
    println!("{:>6} {:>5} {:>12} {:>12}", "theta", "t", "closed form", "measured");
    for theta in [0.0, 0.02, 0.05] {
        let params = PacketParams::new(1.0, 1.0, theta)?;
        for t in [0.0, 0.5, 1.0, 2.0] {
            let spec = GridSpec::for_slice(1024, (-16.0, 16.0), theta, t)?;
            let fp = free_packet(&params, t, spec)?;
            println!("{theta:>6} {t:>5} {:>12.6} {:>12.6}", packet_width(&params, t), measured_width(&fp.field.values, &spec));
        }
    }

    let theta = 0.05;
    println!("\nnarrow packets at theta = {theta} (sqrt(theta/2) = {:.4}):", (theta / 2.0f64).sqrt());
    for ratio in [1.0, 0.1, 0.01] {
        let sigma = (ratio * theta).sqrt();
        let params = PacketParams::new(sigma, 1.0, theta)?;
        let spec = GridSpec::for_slice(1024, (-4.0, 4.0), theta, 0.0)?;
        let fp = free_packet(&params, 0.0, spec)?;
        println!(
            "  sigma^2 = {ratio} theta: closed form {:.4}, measured {:.4}, first-order regime: {}",
            packet_width(&params, 0.0),
            measured_width(&fp.field.values, &spec),
            first_order_regime(&params)
        );
    }
    Ok(())
}
