//! Dense operator matrices and weighted norms: exact L2(w) norms by power
//! iteration, certified lower bounds for other exponents.
//!
//! cargo run --release --example operator_norms

use dyadlab::generators::SymbolSpec;
use dyadlab::verification::norms::{operator_norm_l2w, operator_norm_lpw_lower, DEFAULT_MAX_ITER, DEFAULT_TOL};
use dyadlab::weights::generate_cascade_weight;
use dyadlab::{to_matrix, OperatorDescription, Result, Weight};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let depth = 7;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let b = SymbolSpec::Uniform.draw(depth, 0, &mut rng)?;
    let d = SymbolSpec::Uniform.draw(depth, 0, &mut rng)?;
    let m = to_matrix(&OperatorDescription::Compose { b, d })?;
    let unweighted = Weight::constant(depth, 1.0)?;
    let w = generate_cascade_weight(2, 0.4, depth)?;

    for (name, weight) in [("w = 1", &unweighted), ("cascade", &w)] {
        let est = operator_norm_l2w(&m, weight, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
        println!("{name:<8} L2 norm {:.8} after {} iterations (gap {:.1e})", est.value, est.iterations, est.gap);
        for p in [1.5, 3.0] {
            println!("         L^{p} norm >= {:.6}", operator_norm_lpw_lower(&m, p, weight, 16, 1)?);
        }
    }
    Ok(())
}
