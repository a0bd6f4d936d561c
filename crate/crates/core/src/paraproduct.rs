//! Paraproducts, their adjoints, martingale transforms and the composition
//! `Π*_b Π_d`, all applied in `O(2^n)` through the Haar tree.
//!
//! Conventions (real scalars):
//!
//! * `Π_b f = Σ_I b_I ⟨f⟩_I h_I`
//! * `Π*_b g = Σ_I b_I ⟨g, h_I⟩ 1_I / |I|`
//! * `T_ε f = Σ_I ε_I ⟨f, h_I⟩ h_I` (the mean of `f` is annihilated)
//!
//! With these, `⟨Π*_b Π_d f, g⟩ = Σ_I b_I d_I ⟨f⟩_I ⟨g⟩_I`, and on mean-zero
//! inputs `Π*_b Π_d = Π_{Ŝ(b∘d)} + Π*_{Ŝ(b∘d)} + T_{E(b∘d)}` with strict `E`.

use crate::error::{DyadError, Result};
use crate::lattice::DyadicInterval;
use crate::step::{push_down, HaarExpansion, StepFunction};
use crate::symbol::{Convention, SymbolSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

fn check_depth(symbol: &SymbolSequence, f: &StepFunction) -> Result<()> {
    if symbol.depth() != f.depth() {
        return Err(DyadError::DepthMismatch {
            expected: symbol.depth(),
            found: f.depth(),
        });
    }
    Ok(())
}

/// `Π_b f`.
pub fn pi(b: &SymbolSequence, f: &StepFunction) -> Result<StepFunction> {
    check_depth(b, f)?;
    let averages = f.tree_averages();
    let coeffs = b
        .entries()
        .iter()
        .zip(&averages)
        .map(|(bi, avg)| bi * avg)
        .collect();
    Ok(HaarExpansion::new(0.0, SymbolSequence::from_vec_unchecked(b.depth(), coeffs)).synthesize())
}

/// `Π*_b g`.
pub fn pi_star(b: &SymbolSequence, g: &StepFunction) -> Result<StepFunction> {
    check_depth(b, g)?;
    let coeffs = g.analyze().coeffs;
    let addend: Vec<f64> = b
        .entries()
        .iter()
        .zip(coeffs.entries())
        .enumerate()
        .map(|(i, (bi, gi))| bi * gi / DyadicInterval::from_heap_index(i).len())
        .collect();
    Ok(StepFunction::from_vec_unchecked(
        g.depth(),
        push_down(&addend, g.cell_count()),
    ))
}

/// The martingale transform `T_ε f`.
pub fn martingale(eps: &SymbolSequence, f: &StepFunction) -> Result<StepFunction> {
    check_depth(eps, f)?;
    let coeffs = f.analyze().coeffs.schur(eps)?;
    Ok(HaarExpansion::new(0.0, coeffs).synthesize())
}

/// `Π*_b (Π_d f)`.
pub fn compose(b: &SymbolSequence, d: &SymbolSequence, f: &StepFunction) -> Result<StepFunction> {
    pi_star(b, &pi(d, f)?)
}

/// `Σ_I bd_I ⟨f⟩_I ⟨g⟩_I`, the closed form of `⟨Π*_b Π_d f, g⟩` when `bd = b∘d`.
pub fn bilinear_form(bd: &SymbolSequence, f: &StepFunction, g: &StepFunction) -> Result<f64> {
    check_depth(bd, f)?;
    check_depth(bd, g)?;
    let (af, ag) = (f.tree_averages(), g.tree_averages());
    Ok(bd
        .entries()
        .iter()
        .zip(af.iter().zip(&ag))
        .map(|(c, (x, y))| c * x * y)
        .sum())
}

/// `Π_{Ŝ(bd)} f + Π*_{Ŝ(bd)} f + T_{E(bd)} f`.
pub fn pott_smith_apply(bd: &SymbolSequence, f: &StepFunction, convention: Convention) -> Result<StepFunction> {
    check_depth(bd, f)?;
    let sweep = bd.sweep();
    let e = bd.e_sequence(convention);
    Ok(pi(&sweep, f)?.add(&pi_star(&sweep, f)?).add(&martingale(&e, f)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PottSmithResidual {
    /// `max ‖Π*_bΠ_d f − PS(f)‖ / (1 + ‖f‖)` over mean-zero `f`.
    pub mean_zero: f64,
    /// Same quantity over general `f`; the excess lives in the mean sector.
    pub general: f64,
    /// Deviation of the general-`f` discrepancy from `⟨f⟩_{[0,1)} · Σ_I (b∘d)_I · 1`.
    pub mean_sector_gap: f64,
}

/// Randomized verification of the decomposition on `trials` mean-zero inputs
/// (and as many general inputs) with strict `E`.
pub fn verify_pott_smith(b: &SymbolSequence, d: &SymbolSequence, trials: usize, seed: u64) -> Result<PottSmithResidual> {
    verify_pott_smith_with(b, d, trials, seed, Convention::Strict)
}

pub fn verify_pott_smith_with(
    b: &SymbolSequence,
    d: &SymbolSequence,
    trials: usize,
    seed: u64,
    convention: Convention,
) -> Result<PottSmithResidual> {
    if trials == 0 {
        return Err(DyadError::InvalidParameter("trials must be at least 1".into()));
    }
    let bd = b.schur(d)?;
    let total: f64 = bd.entries().iter().sum();
    let depth = b.depth();
    let cells = 1usize << depth;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PottSmithResidual {
        mean_zero: 0.0,
        general: 0.0,
        mean_sector_gap: 0.0,
    };
    for _ in 0..trials {
        let f = StepFunction::new(depth, (0..cells).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
        let centered = f.without_mean();

        let diff = compose(b, d, &centered)?.sub(&pott_smith_apply(&bd, &centered, convention)?);
        out.mean_zero = out.mean_zero.max(diff.l2_norm() / (1.0 + centered.l2_norm()));

        let diff = compose(b, d, &f)?.sub(&pott_smith_apply(&bd, &f, convention)?);
        out.general = out.general.max(diff.l2_norm() / (1.0 + f.l2_norm()));
        let predicted = f.mean() * total;
        let gap = diff.map(|v| v - predicted).l2_norm() / (1.0 + f.l2_norm());
        out.mean_sector_gap = out.mean_sector_gap.max(gap);
    }
    Ok(out)
}

/// `(⟨Π*_bΠ_d h_I, h_I⟩, E_strict(b∘d)_I)`.
pub fn diagonal_identity_check(b: &SymbolSequence, d: &SymbolSequence, interval: DyadicInterval) -> Result<(f64, f64)> {
    let h = StepFunction::haar(b.depth(), interval)?;
    let lhs = compose(b, d, &h)?.inner(&h);
    let rhs = b.schur(d)?.e_sequence(Convention::Strict)[interval];
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;

    fn iv(level: u32, position: u64) -> DyadicInterval {
        DyadicInterval::new(level, position).unwrap()
    }

    fn random_symbol(depth: u32, rng: &mut impl Rng) -> SymbolSequence {
        SymbolSequence::from_fn(depth, |_| rng.gen_range(-1.0..1.0)).unwrap()
    }

    fn random_fn(depth: u32, rng: &mut impl Rng) -> StepFunction {
        StepFunction::new(depth, (0..1usize << depth).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    fn assert_close(a: &StepFunction, b: &StepFunction, tol: f64) {
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() <= tol, "{x} vs {y}");
        }
    }

    #[test]
    fn pi_examples() {
        let i0 = iv(2, 1);
        let b = SymbolSequence::delta(5, i0).unwrap();
        let one = StepFunction::constant(5, 1.0).unwrap();
        assert_close(&pi(&b, &one).unwrap(), &StepFunction::haar(5, i0).unwrap(), 1e-14);

        let b = SymbolSequence::delta(5, DyadicInterval::ROOT).unwrap();
        let h = StepFunction::haar(5, DyadicInterval::ROOT).unwrap();
        assert!(pi(&b, &h).unwrap().values().iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn pi_star_examples() {
        let i0 = iv(2, 1);
        let b = SymbolSequence::delta(5, i0).unwrap();
        let h = StepFunction::haar(5, i0).unwrap();
        let expected = StepFunction::indicator(5, i0).unwrap().scale(1.0 / i0.len());
        assert_close(&pi_star(&b, &h).unwrap(), &expected, 1e-13);
        let other = StepFunction::haar(5, iv(3, 0)).unwrap();
        assert!(pi_star(&b, &other).unwrap().values().iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn adjointness() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let b = random_symbol(6, &mut rng);
            let (f, g) = (random_fn(6, &mut rng), random_fn(6, &mut rng));
            let lhs = pi(&b, &f).unwrap().inner(&g);
            let rhs = f.inner(&pi_star(&b, &g).unwrap());
            assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn martingale_examples() {
        let ones = SymbolSequence::from_fn(6, |_| 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_fn(6, &mut rng).without_mean();
        assert_close(&martingale(&ones, &f).unwrap(), &f, 1e-13);
        let one = StepFunction::constant(6, 1.0).unwrap();
        assert!(martingale(&ones, &one).unwrap().values().iter().all(|v| v.abs() < 1e-14));
        for _ in 0..20 {
            let eps = random_symbol(6, &mut rng);
            let f = random_fn(6, &mut rng);
            let lhs = martingale(&eps, &f).unwrap().l2_norm();
            assert!(lhs <= eps.linf_norm() * f.without_mean().l2_norm() + 1e-12);
        }
    }

    #[test]
    fn compose_examples() {
        let i0 = iv(2, 2);
        let b = SymbolSequence::delta(5, i0).unwrap();
        let one = StepFunction::constant(5, 1.0).unwrap();
        let expected = StepFunction::indicator(5, i0).unwrap().scale(1.0 / i0.len());
        assert_close(&compose(&b, &b, &one).unwrap(), &expected, 1e-12);

        let d = SymbolSequence::delta(5, iv(2, 0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let (f, g) = (random_fn(5, &mut rng), random_fn(5, &mut rng));
            assert!(compose(&b, &d, &f).unwrap().inner(&g).abs() < 1e-13);
        }
    }

    #[test]
    fn bilinear_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let i0 = iv(3, 3);
        let f = random_fn(6, &mut rng);
        let g = random_fn(6, &mut rng);
        let single = bilinear_form(&SymbolSequence::delta(6, i0).unwrap(), &f, &g).unwrap();
        assert!((single - f.average(&i0) * g.average(&i0)).abs() < 1e-14);
        let zero = StepFunction::zeros(6).unwrap();
        assert_eq!(bilinear_form(&random_symbol(6, &mut rng), &zero, &g).unwrap(), 0.0);
        for _ in 0..100 {
            let (b, d) = (random_symbol(6, &mut rng), random_symbol(6, &mut rng));
            let (f, g) = (random_fn(6, &mut rng), random_fn(6, &mut rng));
            let direct = compose(&b, &d, &f).unwrap().inner(&g);
            let closed = bilinear_form(&b.schur(&d).unwrap(), &f, &g).unwrap();
            assert!((direct - closed).abs() <= 1e-12 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn pott_smith_examples() {
        let z = SymbolSequence::zeros(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let f = random_fn(6, &mut rng).without_mean();
        assert!(pott_smith_apply(&z, &f, Convention::Strict).unwrap().values().iter().all(|&v| v == 0.0));

        let bd = SymbolSequence::delta(6, iv(1, 0)).unwrap();
        let lhs = compose(&bd, &bd, &f).unwrap();
        assert_close(&pott_smith_apply(&bd, &f, Convention::Strict).unwrap(), &lhs, 1e-12);

        let r = verify_pott_smith(&bd, &bd, 5, 1).unwrap();
        assert!(r.mean_zero <= 1e-12);
        assert!(r.mean_sector_gap <= 1e-12);

        // f ≡ 1: the decomposition misses exactly Σ_I (b∘d)_I · 1.
        let one = StepFunction::constant(6, 1.0).unwrap();
        let diff = compose(&bd, &bd, &one).unwrap().sub(&pott_smith_apply(&bd, &one, Convention::Strict).unwrap());
        assert_close(&diff, &one, 1e-12);
    }

    #[test]
    fn pott_smith_random_and_convention_pin() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (b, d) = (random_symbol(8, &mut rng), random_symbol(8, &mut rng));
        let strict = verify_pott_smith(&b, &d, 10, 5).unwrap();
        assert!(strict.mean_zero <= 1e-10, "{strict:?}");
        assert!(strict.mean_sector_gap <= 1e-10);
        let inclusive = verify_pott_smith_with(&b, &d, 10, 5, Convention::Inclusive).unwrap();
        assert!(inclusive.mean_zero > 1e-3);
        let zero = SymbolSequence::zeros(8).unwrap();
        assert_eq!(verify_pott_smith(&zero, &zero, 3, 1).unwrap().mean_zero, 0.0);
        assert!(verify_pott_smith(&zero, &zero, 0, 1).is_err());
    }

    #[test]
    fn diagonal_identity() {
        // b∘d = δ_{J0} with I ⊋ J0 gives (b∘d)_{J0}/|I| on both sides.
        let j0 = iv(3, 1);
        let i = iv(1, 0);
        let bd = SymbolSequence::delta(6, j0).unwrap().scale(3.0);
        let one = SymbolSequence::from_fn(6, |_| 1.0).unwrap();
        let (lhs, rhs) = diagonal_identity_check(&bd, &one, i).unwrap();
        assert!((lhs - 3.0 / i.len()).abs() < 1e-12);
        assert!((rhs - 3.0 / i.len()).abs() < 1e-12);
        let (lhs, rhs) = diagonal_identity_check(&bd, &one, iv(2, 3)).unwrap();
        assert!(lhs.abs() < 1e-12 && rhs == 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (b, d) = (random_symbol(6, &mut rng), random_symbol(6, &mut rng));
        for interval in Lattice::new(6).unwrap().symbol_intervals() {
            let (lhs, rhs) = diagonal_identity_check(&b, &d, interval).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12, "{interval}: {lhs} {rhs}");
        }
    }

    #[test]
    fn depends_only_on_schur_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let b = random_symbol(5, &mut rng);
        let d = random_symbol(5, &mut rng);
        let bd = b.schur(&d).unwrap();
        let ones = SymbolSequence::from_fn(5, |_| 1.0).unwrap();
        for _ in 0..5 {
            let f = random_fn(5, &mut rng);
            assert_close(&compose(&b, &d, &f).unwrap(), &compose(&bd, &ones, &f).unwrap(), 1e-12);
        }
    }

    #[test]
    fn depth_mismatch() {
        let b = SymbolSequence::zeros(4).unwrap();
        let f = StepFunction::zeros(5).unwrap();
        assert!(matches!(pi(&b, &f), Err(DyadError::DepthMismatch { .. })));
        assert!(pi_star(&b, &f).is_err());
        assert!(martingale(&b, &f).is_err());
    }
}
