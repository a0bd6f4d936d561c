//! Paraproducts, their composition and the three-term decomposition of the
//! composition into two paraproducts with the sweep and a martingale
//! transform with the E sequence.
//!
//! cargo run --example paraproducts

use dyadlab::generators::{random_function, SymbolSpec};
use dyadlab::paraproduct::{bilinear_form, compose, pi, pi_star, pott_smith_apply};
use dyadlab::{Convention, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let depth = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let b = SymbolSpec::Uniform.draw(depth, 0, &mut rng)?;
    let d = SymbolSpec::Uniform.draw(depth, 0, &mut rng)?;
    let f = random_function(depth, &mut rng)?;
    let g = random_function(depth, &mut rng)?;

    let adj = pi(&b, &f)?.inner(&g) - f.inner(&pi_star(&b, &g)?);
    println!("<Pi_b f, g> - <f, Pi*_b g> = {adj:.3e}");

    let bd = b.schur(&d)?;
    let closed = compose(&b, &d, &f)?.inner(&g) - bilinear_form(&bd, &f, &g)?;
    println!("composition against its closed form: {closed:.3e}");

    let f0 = f.without_mean();
    let direct = compose(&b, &d, &f0)?;
    for convention in [Convention::Strict, Convention::Inclusive] {
        let split = pott_smith_apply(&bd, &f0, convention)?;
        println!(
            "three-term decomposition, {convention:?} E: relative residual {:.3e}",
            split.sub(&direct).l2_norm() / direct.l2_norm()
        );
    }
    let gap = compose(&b, &d, &f)?.sub(&pott_smith_apply(&bd, &f, Convention::Strict)?);
    println!(
        "with the mean kept the gap is constant: {:.6} on every cell (mean times sum of b∘d = {:.6})",
        gap.values()[0],
        f.mean() * bd.entries().iter().sum::<f64>()
    );
    Ok(())
}
