//! Muckenhoupt characteristics of cascade and power weights, and the exact
//! weighted square-function identity.
//!
//! cargo run --example weights

use dyadlab::generators::random_mean_zero;
use dyadlab::verification::square::weighted_square_sides;
use dyadlab::weights::{generate_cascade_weight, power_weight};
use dyadlab::{Result, Weight};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn describe(name: &str, w: &Weight) -> Result<()> {
    println!(
        "{name:<24} A2 {:>8.4}  A3 {:>8.4}  A_inf {:>7.4}  A2 of inverse {:>8.4}",
        w.a_p_characteristic(2.0)?,
        w.a_p_characteristic(3.0)?,
        w.a_infty_characteristic(),
        w.inverse().a_p_characteristic(2.0)?
    );
    Ok(())
}

fn main() -> Result<()> {
    let depth = 8;
    describe("constant", &Weight::constant(depth, 3.0)?)?;
    for rho in [0.2, 0.5, 0.8] {
        describe(&format!("cascade rho {rho}"), &generate_cascade_weight(7, rho, depth)?)?;
    }
    for alpha in [-0.5, 0.5, 0.9] {
        describe(&format!("|x - 1/3|^{alpha}"), &power_weight(alpha, 1.0 / 3.0, depth)?)?;
    }

    let w = generate_cascade_weight(11, 0.5, depth)?;
    let f = random_mean_zero(depth, &mut ChaCha8Rng::seed_from_u64(1))?;
    let (lhs, rhs) = weighted_square_sides(&f, &w)?;
    println!("||Sf||^2 in L2(w) = {lhs:.12}, sum f_I^2 <w>_I = {rhs:.12}");
    Ok(())
}
