//! Haar analysis and synthesis of a step function, Parseval, and the
//! oscillation identity on a few intervals.
//!
//! cargo run --example haar_transform

use dyadlab::{DyadicInterval, Result, StepFunction};

fn main() -> Result<()> {
    let depth = 4;
    let f = StepFunction::from_fn(depth, |x| (6.0 * x).sin() + if x < 0.3 { 1.0 } else { 0.0 })?;
    let e = f.analyze();

    println!("mean c0 = {:.6}", e.mean);
    for (interval, c) in e.coeffs.iter().filter(|(i, _)| i.level() <= 1) {
        println!("  f_I on {interval:?} = {c:+.6}");
    }
    println!("||f||^2 = {:.12}, c0^2 + sum f_I^2 = {:.12}", f.l2_norm().powi(2), e.energy());

    let back = e.synthesize();
    println!("round trip error = {:.3e}", back.sub(&f).l2_norm());

    for interval in [DyadicInterval::ROOT, DyadicInterval::new(1, 1)?, DyadicInterval::new(2, 0)?] {
        let descendant: f64 = e
            .coeffs
            .iter()
            .filter(|(j, _)| interval.contains(j))
            .map(|(_, c)| c * c)
            .sum::<f64>()
            / interval.len();
        println!(
            "oscillation on {interval:?}: direct {:.10}, from coefficients {:.10}",
            f.mean_oscillation_sq(&interval),
            descendant
        );
    }
    Ok(())
}
