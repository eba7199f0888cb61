//! Moments and uncertainty products in the oscillator ground state.

use ncqm::dynamics::{oscillator_ground, OscillatorParams};
use ncqm::moments::{expectation, robertson_schrodinger_check, uncertainty_product};
use ncqm::operators::{OpKind, SymbolOperator};
use ncqm::GridSpec;

fn main() -> ncqm::Result<()> {
    let theta = 0.1;
    let params = OscillatorParams::new(1.0, 1.0, theta)?;
    let psi = oscillator_ground(&params, GridSpec::for_slice(256, (-9.0, 9.0), theta, 0.0)?, 0.0)?.symbol;
    let op = |k: OpKind| SymbolOperator::new(k, theta);
    let sq = |k: OpKind| op(OpKind::Product(vec![k.clone(), k]));

    println!("<X>     = {:.3e}", expectation(&op(OpKind::XL), &psi)?.re);
    println!("<T^2>   = {:.8}", expectation(&sq(OpKind::TL), &psi)?.re);
    println!("<P_x^2> = {:.8}", expectation(&sq(OpKind::Px), &psi)?.re);
    println!("dX dP_x = {:.8}", uncertainty_product(&op(OpKind::XL), &op(OpKind::Px), &psi)?);
    println!("dX dT   = {:.8}", uncertainty_product(&op(OpKind::XL), &op(OpKind::TL), &psi)?);

    let r = robertson_schrodinger_check(&op(OpKind::XL), &op(OpKind::TL), &psi)?;
    println!("\ndX dT = {:.6} >= Robertson {:.6}, Schrodinger {:.6}: {}", r.lhs, r.robertson_rhs, r.schrodinger_rhs, r.holds);
    Ok(())
}
