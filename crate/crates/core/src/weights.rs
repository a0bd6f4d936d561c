//! Weights on the lattice: Muckenhoupt characteristics, weighted norms,
//! weighted BMO and test-weight generators.

use crate::error::{DyadError, Result};
use crate::lattice::{DyadicInterval, Lattice};
use crate::step::StepFunction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A strictly positive step density with cached interval masses `w(I)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    density: StepFunction,
    /// `w(I) = ∫_I w` for every interval of levels `0..=n`, heap order.
    masses: Vec<f64>,
    /// Cellwise `1/w` with its masses, kept so that inverting twice gives
    /// back the same bits and `[w]_{A_2} = [w^{-1}]_{A_2}` holds exactly.
    reciprocal: StepFunction,
    reciprocal_masses: Vec<f64>,
}

impl Weight {
    pub fn new(density: StepFunction) -> Result<Self> {
        if let Some((cell, &value)) = density.values().iter().enumerate().find(|(_, &v)| v <= 0.0 || !v.is_finite()) {
            return Err(DyadError::NonPositiveWeight { cell, value });
        }
        let masses = interval_masses(&density);
        let reciprocal = density.map(f64::recip);
        let reciprocal_masses = interval_masses(&reciprocal);
        Ok(Weight {
            density,
            masses,
            reciprocal,
            reciprocal_masses,
        })
    }

    pub fn constant(depth: u32, c: f64) -> Result<Self> {
        Self::new(StepFunction::constant(depth, c)?)
    }

    pub fn from_values(depth: u32, values: Vec<f64>) -> Result<Self> {
        Self::new(StepFunction::new(depth, values)?)
    }

    pub fn depth(&self) -> u32 {
        self.density.depth()
    }

    pub fn density(&self) -> &StepFunction {
        &self.density
    }

    pub fn values(&self) -> &[f64] {
        self.density.values()
    }

    /// `w(I)`.
    pub fn mass(&self, interval: &DyadicInterval) -> f64 {
        self.masses[interval.heap_index()]
    }

    /// `⟨w⟩_I = w(I)/|I|`.
    pub fn average(&self, interval: &DyadicInterval) -> f64 {
        self.mass(interval) / interval.len()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Cellwise `w^{-1}`.
    pub fn inverse(&self) -> Weight {
        Weight {
            density: self.reciprocal.clone(),
            masses: self.reciprocal_masses.clone(),
            reciprocal: self.density.clone(),
            reciprocal_masses: self.masses.clone(),
        }
    }

    /// Cellwise `w^s`.
    pub fn powf(&self, s: f64) -> Weight {
        if s == -1.0 {
            return self.inverse();
        }
        Weight::new(self.density.map(|v| v.powf(s))).expect("powers of a positive weight are positive")
    }

    pub fn scaled(&self, c: f64) -> Result<Weight> {
        Weight::new(self.density.scale(c))
    }

    pub fn is_constant(&self) -> bool {
        let v = self.values();
        v.iter().all(|&x| x == v[0])
    }

    /// Dyadic `[w]_{A_p} = sup_I ⟨w⟩_I ⟨w^{-1/(p-1)}⟩_I^{p-1}`.
    pub fn a_p_characteristic(&self, p: f64) -> Result<f64> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(DyadError::InvalidParameter(format!("A_p needs 1 < p < ∞, got {p}")));
        }
        let dual = if p == 2.0 { None } else { Some(self.powf(-1.0 / (p - 1.0))) };
        let dual_masses = dual.as_ref().map_or(&self.reciprocal_masses, |d| &d.masses);
        let sup = (0..self.masses.len())
            .map(|i| {
                let len = DyadicInterval::from_heap_index(i).len();
                let a = self.masses[i] / len;
                let b = dual_masses[i] / len;
                if p == 2.0 {
                    a * b
                } else {
                    a * b.powf(p - 1.0)
                }
            })
            .fold(0.0, f64::max);
        Ok(sup)
    }

    /// Dyadic Fujii–Wilson characteristic
    /// `sup_I (1/w(I)) ∫_I M(w 1_I)`, with `M` the dyadic maximal operator.
    pub fn a_infty_characteristic(&self) -> f64 {
        let depth = self.depth();
        let lat = Lattice::new(depth).expect("weight depth is valid");
        let cell_len = (-(depth as f64)).exp2();
        lat.enumerate(0..=depth)
            .map(|top| {
                // Depth-first walk of the subtree of `top` carrying the running max of ⟨w⟩_J.
                let mut integral = 0.0;
                let mut stack = vec![(top, self.average(&top))];
                while let Some((j, running)) = stack.pop() {
                    if j.level() == depth {
                        integral += running * cell_len;
                        continue;
                    }
                    for child in [j.left(), j.right()] {
                        stack.push((child, running.max(self.average(&child))));
                    }
                }
                integral / self.mass(&top)
            })
            .fold(0.0, f64::max)
    }
}

fn interval_masses(density: &StepFunction) -> Vec<f64> {
    let cells = density.cell_count();
    let h = density.cell_measure();
    let mut tree = vec![0.0; 2 * cells - 1];
    for (slot, v) in tree[cells - 1..].iter_mut().zip(density.values()) {
        *slot = v * h;
    }
    for i in (0..cells - 1).rev() {
        tree[i] = tree[2 * i + 1] + tree[2 * i + 2];
    }
    tree
}

/// `(∫ |f|^p w)^{1/p}` as an exact cell sum.
pub fn lp_w_norm(f: &StepFunction, p: f64, w: &Weight) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(DyadError::InvalidParameter(format!("L^p needs p ≥ 1, got {p}")));
    }
    if f.depth() != w.depth() {
        return Err(DyadError::DepthMismatch {
            expected: w.depth(),
            found: f.depth(),
        });
    }
    let h = f.cell_measure();
    let sum: f64 = f
        .values()
        .iter()
        .zip(w.values())
        .map(|(v, wv)| if p == 2.0 { v * v * wv } else { v.abs().powf(p) * wv })
        .sum();
    Ok(if p == 2.0 { (sum * h).sqrt() } else { (sum * h).powf(p.recip()) })
}

/// `sup_I (1/w(I)) ∫_I |f − ⟨f⟩_I| w`.
pub fn weighted_bmo_norm(f: &StepFunction, w: &Weight) -> Result<f64> {
    if f.depth() != w.depth() {
        return Err(DyadError::DepthMismatch {
            expected: w.depth(),
            found: f.depth(),
        });
    }
    let depth = f.depth();
    let h = f.cell_measure();
    let lat = Lattice::new(depth)?;
    Ok(lat
        .symbol_intervals()
        .map(|interval| {
            let avg = f.average(&interval);
            let range = interval.cell_range(depth);
            let s: f64 = f.values()[range.clone()]
                .iter()
                .zip(&w.values()[range])
                .map(|(v, wv)| (v - avg).abs() * wv)
                .sum();
            s * h / w.mass(&interval)
        })
        .fold(0.0, f64::max))
}

/// Multiplicative cascade: the density of each child is the parent's times
/// `1 + x` (left) or `1 − x` (right), `x ~ U[−ρ, ρ]`, drawn in heap order.
pub fn generate_cascade_weight(seed: u64, rho: f64, depth: u32) -> Result<Weight> {
    if !(0.0..1.0).contains(&rho) {
        return Err(DyadError::InvalidParameter(format!("cascade needs 0 ≤ ρ < 1, got {rho}")));
    }
    let lat = Lattice::new(depth)?;
    let cells = lat.cell_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tree = vec![1.0; 2 * cells - 1];
    for i in 0..cells - 1 {
        let x = if rho == 0.0 { 0.0 } else { rng.gen_range(-rho..=rho) };
        tree[2 * i + 1] = tree[i] * (1.0 + x);
        tree[2 * i + 2] = tree[i] * (1.0 - x);
    }
    Weight::from_values(depth, tree.split_off(cells - 1))
}

/// `|x − x0|^α` sampled at cell midpoints.
pub fn power_weight(alpha: f64, x0: f64, depth: u32) -> Result<Weight> {
    if !(alpha > -1.0 && alpha < 1.0) {
        return Err(DyadError::InvalidParameter(format!("power weight needs −1 < α < 1, got {alpha}")));
    }
    Weight::new(StepFunction::from_fn(depth, |x| (x - x0).abs().powf(alpha))?)
}

/// Weight selection for experiments and the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightSpec {
    Constant,
    Cascade {
        rho: f64,
        /// Base seed; when absent the run seed is used.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Power {
        alpha: f64,
        x0: f64,
    },
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec::Cascade { rho: 0.3, seed: None }
    }
}

impl WeightSpec {
    /// Builds the weight for one trial. Cascades draw a fresh weight per
    /// `stream`; the other kinds are deterministic.
    pub fn build(&self, depth: u32, stream: u64) -> Result<Weight> {
        match *self {
            WeightSpec::Constant => Weight::constant(depth, 1.0),
            WeightSpec::Cascade { rho, seed } => {
                generate_cascade_weight(crate::rng::mix(seed.unwrap_or(0), stream), rho, depth)
            }
            WeightSpec::Power { alpha, x0 } => power_weight(alpha, x0, depth),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `⟨w⟩_I ⟨w^{-1}⟩_I` over every dyadic interval by direct cell loops.
    fn a2_brute_force(values: &[f64]) -> f64 {
        let n = values.len();
        let mut best: f64 = 0.0;
        let mut size = n;
        while size >= 1 {
            for start in (0..n).step_by(size) {
                let s = &values[start..start + size];
                let a = s.iter().sum::<f64>() / size as f64;
                let b = s.iter().map(|v| 1.0 / v).sum::<f64>() / size as f64;
                best = best.max(a * b);
            }
            size /= 2;
        }
        best
    }

    #[test]
    fn constant_weights_have_unit_characteristic() {
        for c in [1.0, 0.25, 7.0] {
            let w = Weight::constant(5, c).unwrap();
            for p in [1.5, 2.0, 3.0] {
                assert!((w.a_p_characteristic(p).unwrap() - 1.0).abs() < 1e-14);
            }
            assert!((w.a_infty_characteristic() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn depth_one_example() {
        let w = Weight::from_values(1, vec![2.0 / 3.0, 4.0 / 3.0]).unwrap();
        let expected = a2_brute_force(w.values());
        // root: ⟨w⟩ = 1, ⟨w^{-1}⟩ = (3/2 + 3/4)/2 = 9/8
        assert!((expected - 9.0 / 8.0).abs() < 1e-15);
        assert!((w.a_p_characteristic(2.0).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn a2_matches_brute_force_on_cascades() {
        for seed in 0..10 {
            let w = generate_cascade_weight(seed, 0.6, 7).unwrap();
            let brute = a2_brute_force(w.values());
            assert!((w.a_p_characteristic(2.0).unwrap() - brute).abs() <= 1e-12 * brute);
        }
    }

    #[test]
    fn a_p_properties() {
        for seed in 0..20 {
            let w = generate_cascade_weight(seed, 0.5, 6).unwrap();
            for p in [1.5, 2.0, 4.0] {
                let a = w.a_p_characteristic(p).unwrap();
                assert!(a >= 1.0 - 1e-12);
                assert!(a > 1.0 + 1e-10, "non-constant weight should exceed 1");
                // Power-of-two scaling is exact in floating point when the
                // dual exponent is an integer.
                for c in [4.0, 0.5] {
                    let scaled = w.scaled(c).unwrap().a_p_characteristic(p).unwrap();
                    if p == 2.0 || p == 1.5 {
                        assert_eq!(scaled, a);
                    } else {
                        assert!((scaled - a).abs() <= 1e-14 * a);
                    }
                }
                let c = 3.7;
                let scaled = w.scaled(c).unwrap().a_p_characteristic(p).unwrap();
                assert!((scaled - a).abs() <= 1e-13 * a);
            }
            let a2 = w.a_p_characteristic(2.0).unwrap();
            let dual = w.inverse().a_p_characteristic(2.0).unwrap();
            assert!((a2 - dual).abs() <= 1e-14 * a2);
        }
        assert!(Weight::constant(3, 1.0).unwrap().a_p_characteristic(1.0).is_err());
    }

    #[test]
    fn a_infty_at_least_one_and_bounded_by_a2() {
        for seed in 0..30 {
            let w = generate_cascade_weight(seed, 0.3, 8).unwrap();
            let ai = w.a_infty_characteristic();
            assert!(ai >= 1.0);
            assert!(ai <= 2.0 * w.a_p_characteristic(2.0).unwrap());
        }
    }

    #[test]
    fn masses_are_additive() {
        let w = generate_cascade_weight(2, 0.4, 6).unwrap();
        for i in 0..(1 << 6) - 1 {
            assert_eq!(w.masses()[i], w.masses()[2 * i + 1] + w.masses()[2 * i + 2]);
            assert!(w.masses()[i] > 0.0);
        }
    }

    #[test]
    fn lp_norms() {
        let f = StepFunction::new(3, vec![1.0, -2.0, 0.5, 0.0, 3.0, 1.0, -1.0, 2.0]).unwrap();
        let one = Weight::constant(3, 1.0).unwrap();
        assert!((lp_w_norm(&f, 2.0, &one).unwrap() - f.l2_norm()).abs() < 1e-15);
        let w = generate_cascade_weight(1, 0.5, 3).unwrap();
        let i = DyadicInterval::new(1, 1).unwrap();
        let ind = StepFunction::indicator(3, i).unwrap();
        for p in [1.0, 1.5, 2.0, 3.0] {
            let n = lp_w_norm(&ind, p, &w).unwrap();
            assert!((n - w.mass(&i).powf(1.0 / p)).abs() < 1e-14);
        }
        let h = StepFunction::haar(3, i).unwrap();
        assert!((lp_w_norm(&h, 2.0, &w).unwrap() - w.average(&i).sqrt()).abs() < 1e-14);
        assert!(lp_w_norm(&f, 0.5, &w).is_err());
    }

    #[test]
    fn weighted_bmo_examples() {
        let w = generate_cascade_weight(3, 0.5, 6).unwrap();
        let c = StepFunction::constant(6, 5.0).unwrap();
        assert_eq!(weighted_bmo_norm(&c, &w).unwrap(), 0.0);
        let f = StepFunction::from_fn(6, |x| (7.0 * x).sin()).unwrap();
        let one = Weight::constant(6, 1.0).unwrap();
        let unweighted = crate::symbol::bmo_norm(&f, crate::symbol::BmoFlavor::L1);
        assert!((weighted_bmo_norm(&f, &one).unwrap() - unweighted).abs() < 1e-14);
    }

    #[test]
    fn cascade_generator() {
        let w = generate_cascade_weight(9, 0.0, 5).unwrap();
        assert!(w.values().iter().all(|&v| v == 1.0));
        let a = generate_cascade_weight(7, 0.3, 8).unwrap();
        let b = generate_cascade_weight(7, 0.3, 8).unwrap();
        assert_eq!(
            a.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
        assert!(a.a_p_characteristic(2.0).unwrap().is_finite());
        assert!(generate_cascade_weight(1, 1.0, 4).is_err());
        assert!(generate_cascade_weight(1, -0.1, 4).is_err());
    }

    #[test]
    fn power_weights() {
        let w = power_weight(0.0, 0.3, 5).unwrap();
        assert!(w.is_constant());
        let w = power_weight(0.5, 0.5, 4).unwrap();
        assert!((w.values()[0] - (0.5f64 - 1.0 / 32.0).sqrt()).abs() < 1e-15);
        assert!(w.values().iter().all(|&v| v > 0.0));
        assert!(power_weight(1.0, 0.5, 4).is_err());

        // α and −α are cellwise inverses; A_2 is invariant under inversion.
        let plus = power_weight(0.5, 0.5, 8).unwrap().a_p_characteristic(2.0).unwrap();
        let minus = power_weight(-0.5, 0.5, 8).unwrap().a_p_characteristic(2.0).unwrap();
        assert!((plus - minus).abs() <= 1e-12 * plus);
        // Reflection x ↦ 1 − x preserves the dyadic lattice.
        let left = power_weight(0.5, 0.3, 8).unwrap().a_p_characteristic(2.0).unwrap();
        let right = power_weight(0.5, 0.7, 8).unwrap().a_p_characteristic(2.0).unwrap();
        assert!((left - right).abs() <= 1e-12 * left);
        // Larger |α| gives a larger characteristic.
        let mut last = 1.0;
        for alpha in [0.2, 0.4, 0.6, 0.8] {
            let a = power_weight(alpha, 0.5, 8).unwrap().a_p_characteristic(2.0).unwrap();
            assert!(a > last);
            last = a;
        }
    }

    #[test]
    fn haar_weighted_norm_product_bounded_by_a2() {
        let w = generate_cascade_weight(4, 0.5, 7).unwrap();
        let winv = w.inverse();
        let a2 = w.a_p_characteristic(2.0).unwrap();
        let lat = Lattice::new(7).unwrap();
        for i in lat.symbol_intervals() {
            let h = StepFunction::haar(7, i).unwrap();
            let prod = lp_w_norm(&h, 2.0, &w).unwrap() * lp_w_norm(&h, 2.0, &winv).unwrap();
            let direct = (w.average(&i) * winv.average(&i)).sqrt();
            assert!((prod - direct).abs() < 1e-12 * direct);
            assert!(prod <= a2.sqrt() + 1e-12);
        }
    }

    #[test]
    fn rejects_nonpositive_density() {
        assert!(matches!(
            Weight::from_values(1, vec![1.0, 0.0]),
            Err(DyadError::NonPositiveWeight { cell: 1, .. })
        ));
    }

    #[test]
    fn spec_json() {
        let spec: WeightSpec = serde_json::from_str(r#"{"kind":"cascade","rho":0.3,"seed":7}"#).unwrap();
        assert_eq!(spec, WeightSpec::Cascade { rho: 0.3, seed: Some(7) });
        let spec: WeightSpec = serde_json::from_str(r#"{"kind":"power","alpha":0.5,"x0":0.5}"#).unwrap();
        assert_eq!(spec, WeightSpec::Power { alpha: 0.5, x0: 0.5 });
        let spec: WeightSpec = serde_json::from_str(r#"{"kind":"constant"}"#).unwrap();
        assert_eq!(spec, WeightSpec::Constant);
    }
}
