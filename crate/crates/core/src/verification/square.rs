//! The dyadic square function and the testing functions of the weighted
//! lower bound.

use crate::error::{DyadError, Result};
use crate::lattice::DyadicInterval;
use crate::step::{push_down, HaarExpansion, StepFunction};
use crate::symbol::SymbolSequence;
use crate::weights::{lp_w_norm, Weight};

/// `Sf = (Σ_I f_I² 1_I / |I|)^{1/2}`; the mean is not part of it.
pub fn square_function(f: &StepFunction) -> StepFunction {
    let coeffs = f.analyze().coeffs;
    let addend: Vec<f64> = coeffs
        .iter()
        .map(|(interval, c)| c * c / interval.len())
        .collect();
    let sq = push_down(&addend, f.cell_count());
    StepFunction::from_vec_unchecked(f.depth(), sq.into_iter().map(f64::sqrt).collect())
}

/// `(‖Sf‖²_{L²(w)}, Σ_I f_I² ⟨w⟩_I)`: a direct cell sum and a coefficient sum.
pub fn weighted_square_sides(f: &StepFunction, w: &Weight) -> Result<(f64, f64)> {
    let lhs = lp_w_norm(&square_function(f), 2.0, w)?.powi(2);
    let rhs = f
        .analyze()
        .coeffs
        .iter()
        .map(|(interval, c)| c * c * w.average(&interval))
        .sum();
    Ok((lhs, rhs))
}

/// Relative residual `|‖Sf‖²_{L²(w)} − Σ_I f_I²⟨w⟩_I| / max(lhs, rhs)`
/// (zero when both sides vanish).
pub fn weighted_square_identity(f: &StepFunction, w: &Weight) -> Result<f64> {
    let (lhs, rhs) = weighted_square_sides(f, w)?;
    let scale = lhs.abs().max(rhs.abs());
    Ok(if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale })
}

/// `F = Σ Ŝ(bd)_J h_J` over `J ⊆ K` with `|J| > 2^{-k}|I|`. The sum is
/// empty (and `F = 0`) unless `|K| > 2^{-k}|I|`.
pub fn testing_function(bd: &SymbolSequence, outer: DyadicInterval, k: u32, inner: DyadicInterval) -> Result<StepFunction> {
    let depth = bd.depth();
    if outer.level() + k > depth {
        return Err(DyadError::InvalidParameter(format!(
            "k = {k} below {outer} goes past the lattice depth {depth}"
        )));
    }
    if !outer.contains(&inner) {
        return Err(DyadError::InvalidParameter(format!("{inner} is not contained in {outer}")));
    }
    let sweep = bd.sweep();
    let cutoff = outer.level() + k;
    let coeffs = sweep
        .iter()
        .map(|(j, v)| if inner.contains(&j) && j.level() < cutoff { v } else { 0.0 })
        .collect();
    Ok(HaarExpansion::new(0.0, SymbolSequence::from_vec_unchecked(depth, coeffs)).synthesize())
}
