//! Stopping-time sparse families, pointwise domination of a martingale
//! transform, merging, and exact sparsity certificates.
//!
//! cargo run --example sparse_domination

use dyadlab::generators::{random_function, SymbolSpec};
use dyadlab::sparse::{
    carleson_constant, carleson_to_sparse, lacey_pointwise_sparse, merge_three, sparse_bilinear, stopping_sparse_pair,
    verify_sparse, Share,
};
use dyadlab::{DyadicInterval, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let depth = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f1 = random_function(depth, &mut rng)?.map(|v| v.powi(7));
    let f2 = random_function(depth, &mut rng)?;
    let eps = SymbolSpec::Uniform.draw(depth, 0, &mut rng)?;
    let root = DyadicInterval::ROOT;

    let pair = stopping_sparse_pair(&f1, &f2, root)?;
    let check = verify_sparse(&pair);
    println!("stopping family: {} intervals, valid {}, worst |E_Q|/|Q| = {}", pair.len(), check.is_valid(), check.worst_ratio);

    let (lacey, c) = lacey_pointwise_sparse(&eps, &f1, root)?;
    println!("pointwise family: {} intervals, |T f| <= {c:.3} ||eps|| A_S|f| on every cell", lacey.len());

    let merged = merge_three(&pair, &pair, &lacey)?;
    let check = verify_sparse(&merged);
    println!(
        "merged: {} intervals at eta {}, valid {}, Carleson constant {}",
        merged.len(),
        merged.eta(),
        check.is_valid(),
        carleson_constant(depth, &merged.intervals())?
    );
    println!(
        "bilinear forms: pair {:.5}, pointwise {:.5}, merged {:.5}",
        sparse_bilinear(&pair, &f1, &f2)?,
        sparse_bilinear(&lacey, &f1, &f2)?,
        sparse_bilinear(&merged, &f1, &f2)?
    );

    // A nested chain is 1/2-sparse but no better.
    let chain: Vec<DyadicInterval> = (0..depth).map(|l| DyadicInterval::new(l, 0)).collect::<Result<_>>()?;
    let s = carleson_to_sparse(depth, &chain, Share::new(1, 2))?;
    println!("chain of {} intervals: worst ratio {}", chain.len(), verify_sparse(&s).worst_ratio);
    println!("{}", serde_json::to_string(&carleson_to_sparse(2, &chain[..2], Share::new(1, 2))?).unwrap());
    Ok(())
}
