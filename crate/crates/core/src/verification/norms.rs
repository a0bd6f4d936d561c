//! Operator norms on weighted spaces.
//!
//! With `D = diag(w)`, the `L²(w)` norm of a cell-basis matrix `M` is the
//! Euclidean norm of `B = D^{1/2} M D^{-1/2}` (the cell measure cancels).
//! Power iteration on `BᵀB` gives it to a relative tolerance. For `p ≠ 2`
//! only lower bounds are produced, by maximizing the ratio over test
//! functions and refining with a nonlinear power method.

use crate::error::{DyadError, Result};
use crate::lattice::Lattice;
use crate::operator::OperatorMatrix;
use crate::weights::Weight;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 100_000;

const START_SEED: u64 = 0x5eed_d1a0;
const REFINE_STEPS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    /// Relative change of the last step.
    pub gap: f64,
}

fn check_weight(m: &OperatorMatrix, w: &Weight) -> Result<()> {
    if m.depth() != w.depth() {
        return Err(DyadError::DepthMismatch {
            expected: m.depth(),
            found: w.depth(),
        });
    }
    Ok(())
}

/// `D^{s} M D^{-s}`.
fn conjugate(m: &OperatorMatrix, w: &Weight, s: f64) -> Result<OperatorMatrix> {
    let side = m.side();
    let scale: Vec<f64> = w.values().iter().map(|v| v.powf(s)).collect();
    let mut data = Vec::with_capacity(side * side);
    for r in 0..side {
        data.extend(m.row(r).iter().zip(&scale).map(|(a, sc)| scale[r] * a / sc));
    }
    OperatorMatrix::from_rows(m.depth(), data)
}

fn euclid(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `‖M‖_{L²(w) → L²(w)}` by power iteration from a fixed pseudo-random start.
/// Every iterate is a lower bound; the value is returned once two successive
/// estimates agree to `tol` relatively.
pub fn operator_norm_l2w(m: &OperatorMatrix, w: &Weight, tol: f64, max_iter: usize) -> Result<NormEstimate> {
    check_weight(m, w)?;
    if !(tol > 0.0) {
        return Err(DyadError::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let b = if w.is_constant() { m.clone() } else { conjugate(m, w, 0.5)? };
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut x: Vec<f64> = (0..b.side()).map(|_| rng.gen_range(0.5..1.5) * rng.gen_range(-1.0f64..1.0).signum()).collect();
    let norm = euclid(&x);
    x.iter_mut().for_each(|v| *v /= norm);

    let mut estimate = 0.0;
    let mut gap = f64::INFINITY;
    for iteration in 1..=max_iter {
        let bx = b.mul_vec(&x);
        let current = euclid(&bx);
        if current == 0.0 {
            return Ok(NormEstimate { value: 0.0, iterations: iteration, gap: 0.0 });
        }
        gap = (current - estimate).abs() / current;
        estimate = estimate.max(current);
        if gap < tol {
            return Ok(NormEstimate { value: estimate, iterations: iteration, gap });
        }
        let mut next = b.mul_vec_transposed(&bx);
        let norm = euclid(&next);
        if norm == 0.0 {
            return Ok(NormEstimate { value: estimate, iterations: iteration, gap: 0.0 });
        }
        next.iter_mut().for_each(|v| *v /= norm);
        x = next;
    }
    Err(DyadError::NoConvergence {
        estimate,
        gap,
        iterations: max_iter,
    })
}

fn lp(x: &[f64], p: f64) -> f64 {
    x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(p.recip())
}

/// `sign(y)|y|^{s}`.
fn duality_map(y: &[f64], s: f64) -> Vec<f64> {
    y.iter().map(|v| v.signum() * v.abs().powf(s)).collect()
}

fn ratio(b: &OperatorMatrix, x: &[f64], p: f64) -> f64 {
    let den = lp(x, p);
    if den == 0.0 {
        return 0.0;
    }
    lp(&b.mul_vec(x), p) / den
}

/// A lower bound for `‖M‖_{L^p(w) → L^p(w)}`: the best ratio
/// `‖Mf‖/‖f‖` over Haar functions, indicators of every dyadic interval and
/// `trials` random functions, refined by the nonlinear power iteration
/// `x ← ψ_{p'}(Bᵀ ψ_p(Bx))` on `B = D^{1/p} M D^{-1/p}`.
pub fn operator_norm_lpw_lower(m: &OperatorMatrix, p: f64, w: &Weight, trials: usize, seed: u64) -> Result<f64> {
    check_weight(m, w)?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(DyadError::InvalidParameter(format!("L^p lower bound needs 1 < p < ∞, got {p}")));
    }
    let depth = m.depth();
    let b = if w.is_constant() { m.clone() } else { conjugate(m, w, p.recip())? };
    // In the conjugated coordinates a function f becomes D^{1/p} f.
    let to_coords = |f: &[f64]| -> Vec<f64> { f.iter().zip(w.values()).map(|(v, wv)| v * wv.powf(p.recip())).collect() };

    let lat = Lattice::new(depth)?;
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for interval in lat.enumerate(0..=depth) {
        let range = interval.cell_range(depth);
        let mut ind = vec![0.0; m.side()];
        ind[range.clone()].iter_mut().for_each(|v| *v = 1.0);
        if interval.level() < depth {
            let mid = range.start + range.len() / 2;
            let mut haar = ind.clone();
            haar[mid..range.end].iter_mut().for_each(|v| *v = -1.0);
            candidates.push(to_coords(&haar));
        }
        candidates.push(to_coords(&ind));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let f: Vec<f64> = (0..m.side()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        candidates.push(to_coords(&f));
    }

    let (mut best, mut x) = candidates
        .into_iter()
        .map(|x| (ratio(&b, &x, p), x))
        .fold((0.0, Vec::new()), |acc, c| if c.0 > acc.0 { c } else { acc });
    if best == 0.0 {
        return Ok(0.0);
    }
    let q = p / (p - 1.0);
    for _ in 0..REFINE_STEPS {
        let y = duality_map(&b.mul_vec(&x), p - 1.0);
        let next = duality_map(&b.mul_vec_transposed(&y), q - 1.0);
        let norm = lp(&next, p);
        if norm == 0.0 || !norm.is_finite() {
            break;
        }
        x = next.into_iter().map(|v| v / norm).collect();
        let r = ratio(&b, &x, p);
        if r <= best * (1.0 + 1e-13) {
            best = best.max(r);
            break;
        }
        best = r;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{to_matrix, OperatorDescription};
    use crate::symbol::SymbolSequence;
    use crate::lattice::DyadicInterval;
    use crate::weights::generate_cascade_weight;

    fn diag(depth: u32, entries: &[f64]) -> OperatorMatrix {
        let side = 1usize << depth;
        let mut data = vec![0.0; side * side];
        for (i, e) in entries.iter().enumerate() {
            data[i * side + i] = *e;
        }
        OperatorMatrix::from_rows(depth, data).unwrap()
    }

    #[test]
    fn identity_and_diagonal() {
        let w = generate_cascade_weight(3, 0.4, 5).unwrap();
        let id = OperatorMatrix::identity(5);
        let est = operator_norm_l2w(&id, &w, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);

        let one = Weight::constant(3, 1.0).unwrap();
        let d = diag(3, &[3.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        let est = operator_norm_l2w(&d, &one, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!((est.value - 3.0).abs() < 1e-9);
        let zero = OperatorMatrix::zeros(3);
        assert_eq!(operator_norm_l2w(&zero, &one, DEFAULT_TOL, 10).unwrap().value, 0.0);
        assert!(operator_norm_l2w(&d, &one, 0.0, 10).is_err());
    }

    #[test]
    fn rank_one_composition() {
        let i0 = DyadicInterval::new(1, 0).unwrap();
        let b = SymbolSequence::delta(6, i0).unwrap();
        let m = to_matrix(&OperatorDescription::Compose { b: b.clone(), d: b }).unwrap();
        let one = Weight::constant(6, 1.0).unwrap();
        let est = operator_norm_l2w(&m, &one, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!((est.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn non_convergence_is_reported() {
        let one = Weight::constant(3, 1.0).unwrap();
        let d = diag(3, &[1.0, 0.999_999, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5]);
        match operator_norm_l2w(&d, &one, 1e-15, 3) {
            Err(DyadError::NoConvergence { iterations, .. }) => assert_eq!(iterations, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lp_lower_bounds() {
        let w = generate_cascade_weight(8, 0.3, 5).unwrap();
        let id = OperatorMatrix::identity(5);
        assert!(operator_norm_lpw_lower(&id, 3.0, &w, 4, 1).unwrap() >= 1.0 - 1e-12);
        assert_eq!(operator_norm_lpw_lower(&OperatorMatrix::zeros(5), 1.5, &w, 4, 1).unwrap(), 0.0);
        assert!(operator_norm_lpw_lower(&id, 1.0, &w, 4, 1).is_err());
    }
}
