//! Property tests for the structural invariants, each checked against an
//! independent brute-force computation where one exists.

use dyadlab::paraproduct::{bilinear_form, compose, pi, pi_star, pott_smith_apply};
use dyadlab::sparse::{
    carleson_constant, carleson_to_sparse, lacey_pointwise_sparse, merge_three, sparse_bilinear, sparse_operator_apply,
    stopping_sparse_pair, verify_sparse, Share,
};
use dyadlab::verification::square::weighted_square_sides;
use dyadlab::{Convention, DyadicInterval, Lattice, StepFunction, SymbolSequence, Weight};
use proptest::prelude::*;

fn function(depth: u32) -> impl Strategy<Value = StepFunction> {
    prop::collection::vec(-1.0f64..1.0, 1usize << depth).prop_map(move |v| StepFunction::new(depth, v).unwrap())
}

fn symbol(depth: u32) -> impl Strategy<Value = SymbolSequence> {
    prop::collection::vec(-1.0f64..1.0, (1usize << depth) - 1).prop_map(move |v| SymbolSequence::new(depth, v).unwrap())
}

fn weight(depth: u32) -> impl Strategy<Value = Weight> {
    prop::collection::vec(0.05f64..20.0, 1usize << depth).prop_map(move |v| Weight::from_values(depth, v).unwrap())
}

fn intervals(depth: u32) -> Vec<DyadicInterval> {
    Lattice::new(depth).unwrap().symbol_intervals().collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// `⟨f, h_I⟩` as a direct cell sum.
fn naive_coefficient(f: &StepFunction, i: DyadicInterval) -> f64 {
    f.inner(&StepFunction::haar(f.depth(), i).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn haar_round_trip_and_parseval(f in (1u32..=10).prop_flat_map(function)) {
        let e = f.analyze();
        let norm2 = f.l2_norm().powi(2);
        prop_assert!(close(e.energy(), norm2, 1e-12));
        prop_assert!(e.synthesize().sub(&f).l2_norm() <= 1e-12 * (1.0 + f.l2_norm()));
        let again = e.synthesize().analyze();
        prop_assert!((again.mean - e.mean).abs() <= 1e-12);
        for (x, y) in again.coeffs.entries().iter().zip(e.coeffs.entries()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn fast_coefficients_match_cell_sums(f in (1u32..=6).prop_flat_map(function)) {
        let e = f.analyze();
        prop_assert!((e.mean - f.mean()).abs() <= 1e-13);
        for (i, c) in e.coeffs.iter() {
            prop_assert!((c - naive_coefficient(&f, i)).abs() <= 1e-12);
        }
    }

    #[test]
    fn oscillation_equals_descendant_energy(f in (1u32..=7).prop_flat_map(function)) {
        let e = f.analyze();
        for i in intervals(f.depth()) {
            let energy: f64 = e.coeffs.iter().filter(|(j, _)| i.contains(j)).map(|(_, c)| c * c).sum();
            let energy = energy / i.len();
            let direct = f.mean_oscillation_sq(&i);
            prop_assert!((direct - energy).abs() <= 1e-12 * (1.0 + direct));
        }
    }

    #[test]
    fn sweep_and_e_match_double_loops(a in (1u32..=7).prop_flat_map(symbol)) {
        let sweep = a.sweep();
        let strict = a.e_sequence(Convention::Strict);
        let inclusive = a.e_sequence(Convention::Inclusive);
        for i in intervals(a.depth()) {
            let (mut s, mut e) = (0.0, 0.0);
            for (j, v) in a.iter() {
                if i.strictly_contains(&j) {
                    s += v * i.haar_on(&j).unwrap();
                    e += v;
                }
            }
            let own = a.get(&i).unwrap();
            prop_assert!((sweep.get(&i).unwrap() - s).abs() <= 1e-13 / i.len().sqrt());
            prop_assert!((strict.get(&i).unwrap() - e / i.len()).abs() <= 1e-13 / i.len());
            prop_assert!((inclusive.get(&i).unwrap() - (e + own) / i.len()).abs() <= 1e-13 / i.len());
        }
    }

    #[test]
    fn cm_norm_is_monotone_under_domination(
        (a, shrink) in (1u32..=7).prop_flat_map(|d| (symbol(d), prop::collection::vec(0.0f64..=1.0, (1usize << d) - 1)))
    ) {
        let smaller = SymbolSequence::new(
            a.depth(),
            a.entries().iter().zip(&shrink).map(|(x, s)| x * s).collect(),
        ).unwrap();
        prop_assert!(smaller.cm_norm() <= a.cm_norm() * (1.0 + 1e-15));
        prop_assert!(a.linf_norm() <= a.cm_norm() + 1e-15);
    }

    #[test]
    fn schur_commutes(
        (b, d) in (1u32..=7).prop_flat_map(|n| (symbol(n), symbol(n)))
    ) {
        prop_assert_eq!(b.schur(&d).unwrap(), d.schur(&b).unwrap());
    }

    #[test]
    fn paraproduct_adjointness(
        (b, f, g) in (1u32..=8).prop_flat_map(|n| (symbol(n), function(n), function(n)))
    ) {
        let lhs = pi(&b, &f).unwrap().inner(&g);
        let rhs = f.inner(&pi_star(&b, &g).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn composition_bilinear_closed_form(
        (b, d, f, g) in (1u32..=8).prop_flat_map(|n| (symbol(n), symbol(n), function(n), function(n)))
    ) {
        let lhs = compose(&b, &d, &f).unwrap().inner(&g);
        let rhs = bilinear_form(&b.schur(&d).unwrap(), &f, &g).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn three_term_decomposition_on_mean_zero(
        (b, d, f) in (1u32..=8).prop_flat_map(|n| (symbol(n), symbol(n), function(n)))
    ) {
        let f = f.without_mean();
        let direct = compose(&b, &d, &f).unwrap();
        let split = pott_smith_apply(&b.schur(&d).unwrap(), &f, Convention::Strict).unwrap();
        prop_assert!(split.sub(&direct).l2_norm() <= 1e-10 * (1.0 + direct.l2_norm()));
    }

    #[test]
    fn a_p_is_at_least_one_and_scale_invariant(
        (w, p, k) in (1u32..=7).prop_flat_map(|n| (weight(n), 1.1f64..6.0, -8i32..8))
    ) {
        let a = w.a_p_characteristic(p).unwrap();
        prop_assert!(a >= 1.0 - 1e-10);
        let scaled = w.scaled(2f64.powi(k)).unwrap().a_p_characteristic(p).unwrap();
        prop_assert!(close(a, scaled, 1e-13));
        let a2 = w.a_p_characteristic(2.0).unwrap();
        prop_assert_eq!(a2, w.inverse().a_p_characteristic(2.0).unwrap());
        // Haar functions see the A_2 characteristic through their weighted norms.
        for i in intervals(w.depth()) {
            let h = StepFunction::haar(w.depth(), i).unwrap();
            let up: f64 = h.values().iter().zip(w.values()).map(|(x, v)| x * x * v).sum::<f64>() * h.cell_measure();
            let down: f64 = h.values().iter().zip(w.values()).map(|(x, v)| x * x / v).sum::<f64>() * h.cell_measure();
            prop_assert!((up * down).sqrt() <= a2.sqrt() * (1.0 + 1e-12));
        }
        prop_assert!(w.a_infty_characteristic() >= 1.0 - 1e-10);
    }

    #[test]
    fn constant_weights_have_unit_characteristic(n in 1u32..=8, c in 0.01f64..100.0) {
        let w = Weight::constant(n, c).unwrap();
        prop_assert!((w.a_p_characteristic(2.0).unwrap() - 1.0).abs() <= 1e-12);
        prop_assert!((w.a_p_characteristic(3.0).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn weighted_square_identity_holds((f, w) in (1u32..=8).prop_flat_map(|n| (function(n), weight(n)))) {
        let (lhs, rhs) = weighted_square_sides(&f, &w).unwrap();
        prop_assert!(close(lhs, rhs, 1e-12));
    }

    #[test]
    fn stopping_families_are_half_sparse(
        (f1, f2) in (1u32..=8).prop_flat_map(|n| (function(n), function(n)))
    ) {
        let s = stopping_sparse_pair(&f1.map(|v| v.powi(3)), &f2, DyadicInterval::ROOT).unwrap();
        let check = verify_sparse(&s);
        prop_assert!(check.is_valid());
        prop_assert!(check.worst_ratio >= Share::new(1, 2));
        let carleson = carleson_constant(s.depth(), &s.intervals()).unwrap();
        prop_assert!(carleson >= Share::from_integer(1));
        prop_assert!(carleson <= s.eta().recip());
    }

    #[test]
    fn lacey_domination_on_every_cell(
        (eps, f) in (1u32..=8).prop_flat_map(|n| (symbol(n), function(n)))
    ) {
        let f = f.map(|v| v.powi(5));
        let (s, c) = lacey_pointwise_sparse(&eps, &f, DyadicInterval::ROOT).unwrap();
        let check = verify_sparse(&s);
        prop_assert!(check.is_valid() && check.worst_ratio >= Share::new(1, 2));
        prop_assert!(c.is_finite() && c <= 16.0);
        // Independent pointwise comparison.
        let t = dyadlab::paraproduct::martingale(&eps, &f).unwrap();
        let a = sparse_operator_apply(&s, &f.abs()).unwrap();
        let norm = eps.linf_norm();
        for (x, y) in t.values().iter().zip(a.values()) {
            prop_assert!(x.abs() <= c * norm * y * (1.0 + 1e-12) + 1e-300);
        }
    }

    #[test]
    fn merged_family_dominates_its_parts(
        (f1, f2, f3, eps) in (1u32..=7).prop_flat_map(|n| (function(n), function(n), function(n), symbol(n)))
    ) {
        let root = DyadicInterval::ROOT;
        let a = stopping_sparse_pair(&f1, &f2, root).unwrap();
        let b = stopping_sparse_pair(&f2, &f3, root).unwrap();
        let (c, _) = lacey_pointwise_sparse(&eps, &f3, root).unwrap();
        let merged = merge_three(&a, &b, &c).unwrap();
        let check = verify_sparse(&merged);
        prop_assert!(check.is_valid() && check.worst_ratio >= Share::new(1, 6));
        let form = sparse_bilinear(&merged, &f1, &f2).unwrap();
        for part in [&a, &b, &c] {
            prop_assert!(sparse_bilinear(part, &f1, &f2).unwrap() <= form * (1.0 + 1e-12));
        }
    }

    #[test]
    fn carleson_packing_yields_valid_collections(
        (depth, picks) in (1u32..=6).prop_flat_map(|n| (Just(n), prop::collection::vec(any::<bool>(), (2usize << n) - 1)))
    ) {
        let lat = Lattice::new(depth).unwrap();
        let family: Vec<DyadicInterval> = lat
            .enumerate(0..=depth)
            .zip(&picks)
            .filter_map(|(i, &keep)| keep.then_some(i))
            .collect();
        let carleson = carleson_constant(depth, &family).unwrap();
        if family.is_empty() {
            return Ok(());
        }
        let eta = carleson.recip();
        let s = carleson_to_sparse(depth, &family, eta).unwrap();
        let check = verify_sparse(&s);
        prop_assert!(check.is_valid());
        prop_assert!(check.worst_ratio >= eta);
    }
}

#[test]
fn theorem_ratio_consistency_between_experiments() {
    // The unweighted lower-bound constant is the reciprocal of the two-sided
    // ratio for the same symbols.
    use dyadlab::verification::experiments::{lower_bound_sample, theorem11_sample};
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let b = SymbolSequence::from_fn(5, |_| rng.gen_range(-1.0..1.0)).unwrap();
        let d = SymbolSequence::from_fn(5, |_| rng.gen_range(-1.0..1.0)).unwrap();
        let r = theorem11_sample(&b, &d).unwrap().ratio.unwrap();
        let s = lower_bound_sample(&b, &d, &Weight::constant(5, 1.0).unwrap()).unwrap();
        assert!((s.c_simple * r - 1.0).abs() <= 1e-9, "c_simple {} ratio {}", s.c_simple, r);
    }
}
