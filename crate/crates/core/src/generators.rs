//! Random symbols and functions for the ensemble experiments.

use crate::error::{DyadError, Result};
use crate::lattice::{DyadicInterval, Lattice};
use crate::step::StepFunction;
use crate::symbol::SymbolSequence;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// How `b` and `d` are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SymbolSpec {
    /// Entries i.i.d. uniform on `[−1, 1]`.
    #[default]
    Uniform,
    /// `u_I · |I|^{1/2}` with `u_I` uniform: Carleson norm bounded in depth.
    Scaled,
    /// One interval, uniform position and level, value uniform in `±[1/2, 1]`.
    Single,
    /// Uniform entries along one root-to-cell branch, zero elsewhere.
    Chain,
    /// Uniform entries on every `gap`-th level, zero elsewhere.
    Lacunary {
        #[serde(default = "default_gap")]
        gap: u32,
    },
    /// Cycles through the kinds above by trial index.
    Mixed,
}

fn default_gap() -> u32 {
    2
}

impl SymbolSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SymbolSpec::Uniform => "uniform",
            SymbolSpec::Scaled => "scaled",
            SymbolSpec::Single => "single",
            SymbolSpec::Chain => "chain",
            SymbolSpec::Lacunary { .. } => "lacunary",
            SymbolSpec::Mixed => "mixed",
        }
    }

    /// Draws one symbol. `trial` only matters for [`SymbolSpec::Mixed`].
    pub fn draw(&self, depth: u32, trial: usize, rng: &mut impl Rng) -> Result<SymbolSequence> {
        let lat = Lattice::new(depth)?;
        match *self {
            SymbolSpec::Uniform => SymbolSequence::from_fn(depth, |_| rng.gen_range(-1.0..=1.0)),
            SymbolSpec::Scaled => SymbolSequence::from_fn(depth, |i| rng.gen_range(-1.0..=1.0) * i.len().sqrt()),
            SymbolSpec::Single => {
                let level = rng.gen_range(0..depth);
                let position = rng.gen_range(0..1u64 << level);
                let value = rng.gen_range(0.5..=1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                Ok(SymbolSequence::delta(depth, DyadicInterval::new(level, position)?)?.scale(value))
            }
            SymbolSpec::Chain => {
                let cell = rng.gen_range(0..lat.cell_count()) as u64;
                SymbolSequence::from_fn(depth, |i| {
                    if i.position() == cell >> (depth - i.level()) {
                        rng.gen_range(-1.0..=1.0)
                    } else {
                        0.0
                    }
                })
            }
            SymbolSpec::Lacunary { gap } => {
                if gap == 0 {
                    return Err(DyadError::InvalidParameter("lacunary gap must be positive".into()));
                }
                SymbolSequence::from_fn(depth, |i| {
                    if i.level() % gap == 0 {
                        rng.gen_range(-1.0..=1.0)
                    } else {
                        0.0
                    }
                })
            }
            SymbolSpec::Mixed => {
                const CYCLE: [SymbolSpec; 5] = [
                    SymbolSpec::Uniform,
                    SymbolSpec::Scaled,
                    SymbolSpec::Single,
                    SymbolSpec::Chain,
                    SymbolSpec::Lacunary { gap: 2 },
                ];
                CYCLE[trial % CYCLE.len()].draw(depth, trial, rng)
            }
        }
    }
}

/// Cell values i.i.d. uniform on `[−1, 1]`.
pub fn random_function(depth: u32, rng: &mut impl Rng) -> Result<StepFunction> {
    StepFunction::new(depth, (0..1usize << depth).map(|_| rng.gen_range(-1.0..=1.0)).collect())
}

/// A random function with mean exactly removed.
pub fn random_mean_zero(depth: u32, rng: &mut impl Rng) -> Result<StepFunction> {
    Ok(random_function(depth, rng)?.without_mean())
}
