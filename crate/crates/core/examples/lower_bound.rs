//! Weighted lower bound: characteristic-normalized constants, the diagonal
//! duality check and both readings of the testing-function chain.
//!
//! cargo run --release --example lower_bound

use dyadlab::generators::SymbolSpec;
use dyadlab::verification::experiments::lower_bound_sample;
use dyadlab::weights::generate_cascade_weight;
use dyadlab::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let depth = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..5u64 {
        let b = SymbolSpec::Uniform.draw(depth, 0, &mut rng)?;
        let d = SymbolSpec::Uniform.draw(depth, 0, &mut rng)?;
        let w = generate_cascade_weight(trial, 0.4, depth)?;
        let s = lower_bound_sample(&b, &d, &w)?;
        println!(
            "A2 {:.3} A_inf {:.3}: c_main {:.4}, c_simple {:.4}, diagonal slack {:.3}, chain deviation parent {:.1e} / itself {:.1e}",
            s.a2, s.a_infty, s.c_main, s.c_simple, s.diagonal_slack, s.parent.equality_deviation, s.itself.equality_deviation
        );
    }
    Ok(())
}
