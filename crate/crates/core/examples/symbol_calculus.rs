//! Schur products, sweeps, E sequences and the sequence norms, including the
//! disjoint-singleton pair whose product vanishes.
//!
//! cargo run --example symbol_calculus

use dyadlab::{Convention, DyadicInterval, Result, SymbolSequence};

fn main() -> Result<()> {
    let depth = 3;
    let left = DyadicInterval::new(1, 0)?;
    let a = SymbolSequence::delta(depth, left)?;
    println!("a = delta on {left:?}");
    println!("  sweep at root        = {}", a.sweep().get(&DyadicInterval::ROOT).unwrap());
    println!("  E strict at root     = {}", a.e_sequence(Convention::Strict).get(&DyadicInterval::ROOT).unwrap());
    println!("  E inclusive at left  = {}", a.e_sequence(Convention::Inclusive).get(&left).unwrap());
    println!("  CM norm              = {:.6} (sqrt 2 = {:.6})", a.cm_norm(), 2f64.sqrt());

    let b = SymbolSequence::delta(depth, left)?;
    let d = SymbolSequence::delta(depth, DyadicInterval::new(1, 1)?)?;
    let bd = b.schur(&d)?;
    println!("disjoint singletons: b∘d is zero = {}", bd.is_zero());
    println!(
        "  ||S(b∘d)||_CM + ||E(b∘d)||_inf = {} while ||b||_CM ||d||_CM = {}",
        bd.composition_norm(),
        b.cm_norm() * d.cm_norm()
    );

    let ramp = SymbolSequence::from_fn(depth, |i| (i.level() as f64 + 1.0) * if i.position() % 2 == 0 { 1.0 } else { -1.0 })?;
    println!("ramp: linf {:.3}, CM {:.3}, composition norm of ramp∘ramp {:.3}", ramp.linf_norm(), ramp.cm_norm(), ramp.schur(&ramp)?.composition_norm());
    Ok(())
}
