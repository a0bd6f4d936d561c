//! Sparse upper bound for the composition: the per-trial constant in the
//! bilinear sparse estimate and the weighted norm of the sparse operator.
//!
//! cargo run --release --example upper_bound

use dyadlab::generators::{random_function, random_mean_zero, SymbolSpec};
use dyadlab::verification::experiments::upper_bound_sample;
use dyadlab::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for depth in [4, 6, 8] {
        let b = SymbolSpec::Uniform.draw(depth, 0, &mut rng)?;
        let d = SymbolSpec::Uniform.draw(depth, 0, &mut rng)?;
        let f = random_mean_zero(depth, &mut rng)?.map(|v| v.powi(5)).without_mean();
        let g = random_function(depth, &mut rng)?.map(|v| v.powi(3));
        let s = upper_bound_sample(&b, &d, &f, &g)?;
        println!(
            "depth {depth}: |<Tf, g>| {:.4e} <= C {:.4} x norms {:.4} x sparse form {:.4e}; families {} / {} / {} intervals, pointwise constant {:.3}",
            s.lhs,
            s.constant,
            s.norm_sum,
            s.sparse_form,
            s.pair.len(),
            s.lacey.len(),
            s.merged.len(),
            s.lacey_constant
        );
    }
    Ok(())
}
