//! Two-sided comparison of the composition norm with the sequence norms of
//! b∘d, across depths and symbol families, plus the root boundary term.
//!
//! cargo run --release --example theorem_ratios

use dyadlab::generators::SymbolSpec;
use dyadlab::rng::{trial_rng, Role};
use dyadlab::verification::experiments::theorem11_sample;
use dyadlab::Result;

fn main() -> Result<()> {
    for spec in [SymbolSpec::Uniform, SymbolSpec::Lacunary { gap: 2 }, SymbolSpec::Chain] {
        for depth in [4, 6, 8] {
            let (mut lo, mut hi, mut lo_c, mut hi_c) = (f64::INFINITY, 0.0f64, f64::INFINITY, 0.0f64);
            for t in 0..50 {
                let b = spec.draw(depth, t, &mut trial_rng(1, depth, t, Role::SymbolB))?;
                let d = spec.draw(depth, t, &mut trial_rng(1, depth, t, Role::SymbolD))?;
                let s = theorem11_sample(&b, &d)?;
                if let Some(r) = s.ratio {
                    lo = lo.min(r);
                    hi = hi.max(r);
                }
                if let Some(r) = s.root_corrected {
                    lo_c = lo_c.min(r);
                    hi_c = hi_c.max(r);
                }
            }
            println!(
                "{:<9} depth {depth}: ratio in [{lo:.3}, {hi:.3}], with root term [{lo_c:.3}, {hi_c:.3}]",
                spec.name()
            );
        }
    }
    Ok(())
}
