//! Step functions on the finest cells, Haar analysis and synthesis.

use crate::error::{DyadError, Result};
use crate::lattice::{check_depth, DyadicInterval};
use crate::symbol::SymbolSequence;
use serde::{Deserialize, Serialize};

/// A function constant on each of the `2^n` finest cells of `[0,1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStep", into = "RawStep")]
pub struct StepFunction {
    depth: u32,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawStep {
    depth: u32,
    values: Vec<f64>,
}

impl TryFrom<RawStep> for StepFunction {
    type Error = DyadError;
    fn try_from(raw: RawStep) -> Result<Self> {
        StepFunction::new(raw.depth, raw.values)
    }
}

impl From<StepFunction> for RawStep {
    fn from(f: StepFunction) -> Self {
        RawStep {
            depth: f.depth,
            values: f.values,
        }
    }
}

impl StepFunction {
    pub fn new(depth: u32, values: Vec<f64>) -> Result<Self> {
        check_depth(depth)?;
        let expected = 1usize << depth;
        if values.len() != expected {
            return Err(DyadError::LengthMismatch {
                expected,
                found: values.len(),
            });
        }
        if let Some((cell, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(DyadError::NonFinite { cell, value });
        }
        Ok(StepFunction { depth, values })
    }

    pub(crate) fn from_vec_unchecked(depth: u32, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), 1usize << depth);
        StepFunction { depth, values }
    }

    pub fn zeros(depth: u32) -> Result<Self> {
        Self::constant(depth, 0.0)
    }

    pub fn constant(depth: u32, c: f64) -> Result<Self> {
        check_depth(depth)?;
        Self::new(depth, vec![c; 1usize << depth])
    }

    pub fn indicator(depth: u32, interval: DyadicInterval) -> Result<Self> {
        let mut f = Self::zeros(depth)?;
        check_in_lattice(depth, &interval)?;
        for v in &mut f.values[interval.cell_range(depth)] {
            *v = 1.0;
        }
        Ok(f)
    }

    /// The Haar function `h_I`; `I` must have level `< depth`.
    pub fn haar(depth: u32, interval: DyadicInterval) -> Result<Self> {
        if interval.level() >= depth {
            return Err(DyadError::NoChildren(interval));
        }
        let mut f = Self::zeros(depth)?;
        let amp = interval.len().sqrt().recip();
        for v in &mut f.values[interval.left().cell_range(depth)] {
            *v = amp;
        }
        for v in &mut f.values[interval.right().cell_range(depth)] {
            *v = -amp;
        }
        Ok(f)
    }

    /// Samples `g` at cell midpoints.
    pub fn from_fn(depth: u32, g: impl Fn(f64) -> f64) -> Result<Self> {
        check_depth(depth)?;
        let n = 1usize << depth;
        let values = (0..n).map(|c| g((c as f64 + 0.5) / n as f64)).collect();
        Self::new(depth, values)
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn cell_count(&self) -> usize {
        self.values.len()
    }

    /// Measure of one finest cell, `2^-n`.
    pub fn cell_measure(&self) -> f64 {
        (-(self.depth as f64)).exp2()
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_measure()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn inner(&self, other: &StepFunction) -> f64 {
        debug_assert_eq!(self.depth, other.depth);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.cell_measure()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// `⟨f⟩_I`, the average over `I`, as an exact cell sum.
    pub fn average(&self, interval: &DyadicInterval) -> f64 {
        let range = interval.cell_range(self.depth);
        let count = range.len() as f64;
        self.values[range].iter().sum::<f64>() / count
    }

    /// Averages over every interval of levels `0..=n`, heap order.
    pub fn tree_averages(&self) -> Vec<f64> {
        subtree_means(&self.values)
    }

    pub fn abs(&self) -> StepFunction {
        self.map(f64::abs)
    }

    pub fn map(&self, g: impl Fn(f64) -> f64) -> StepFunction {
        StepFunction {
            depth: self.depth,
            values: self.values.iter().map(|&v| g(v)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> StepFunction {
        self.map(|v| c * v)
    }

    pub fn add(&self, other: &StepFunction) -> StepFunction {
        debug_assert_eq!(self.depth, other.depth);
        StepFunction {
            depth: self.depth,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &StepFunction) -> StepFunction {
        self.add(&other.scale(-1.0))
    }

    /// `f · 1_I`.
    pub fn restrict(&self, interval: &DyadicInterval) -> StepFunction {
        let range = interval.cell_range(self.depth);
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(c, &v)| if range.contains(&c) { v } else { 0.0 })
            .collect();
        StepFunction {
            depth: self.depth,
            values,
        }
    }

    /// `f − ⟨f⟩_{[0,1)}`.
    pub fn without_mean(&self) -> StepFunction {
        let m = self.mean();
        self.map(|v| v - m)
    }

    /// `(1/|I|) ∫_I |f − ⟨f⟩_I|^2` as a direct cell sum.
    pub fn mean_oscillation_sq(&self, interval: &DyadicInterval) -> f64 {
        let avg = self.average(interval);
        let range = interval.cell_range(self.depth);
        let count = range.len() as f64;
        self.values[range].iter().map(|v| (v - avg) * (v - avg)).sum::<f64>() / count
    }

    /// `(1/|I|) ∫_I |f − ⟨f⟩_I|`.
    pub fn mean_oscillation(&self, interval: &DyadicInterval) -> f64 {
        let avg = self.average(interval);
        let range = interval.cell_range(self.depth);
        let count = range.len() as f64;
        self.values[range].iter().map(|v| (v - avg).abs()).sum::<f64>() / count
    }

    /// Fast Haar analysis in `O(2^n)`.
    pub fn analyze(&self) -> HaarExpansion {
        let means = self.tree_averages();
        let symbols = self.values.len() - 1;
        let mut coeffs = vec![0.0; symbols];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let len = DyadicInterval::from_heap_index(i).len();
            // ⟨f, h_I⟩ = sqrt(|I|)/2 · (⟨f⟩_{I+} − ⟨f⟩_{I-})
            *c = 0.5 * len.sqrt() * (means[2 * i + 1] - means[2 * i + 2]);
        }
        HaarExpansion {
            mean: means[0],
            coeffs: SymbolSequence::from_vec_unchecked(self.depth, coeffs),
        }
    }
}

pub(crate) fn check_in_lattice(depth: u32, interval: &DyadicInterval) -> Result<()> {
    if interval.level() > depth {
        return Err(DyadError::InvalidInterval {
            level: interval.level(),
            position: interval.position(),
        });
    }
    Ok(())
}

/// Averages over all intervals of a tree whose leaves are `cells`, heap order.
pub(crate) fn subtree_means(cells: &[f64]) -> Vec<f64> {
    let n = cells.len();
    let mut tree = vec![0.0; 2 * n - 1];
    tree[n - 1..].copy_from_slice(cells);
    for i in (0..n - 1).rev() {
        tree[i] = 0.5 * (tree[2 * i + 1] + tree[2 * i + 2]);
    }
    tree
}

/// Push a heap-ordered array of per-interval addends down to the leaves:
/// `out[c] = Σ_{I ∋ c} addend[I]`.
pub(crate) fn push_down(addend: &[f64], cells: usize) -> Vec<f64> {
    let mut acc = addend.to_vec();
    acc.resize(2 * cells - 1, 0.0);
    for i in 0..cells - 1 {
        let v = acc[i];
        acc[2 * i + 1] += v;
        acc[2 * i + 2] += v;
    }
    acc.split_off(cells - 1)
}

/// Mean plus Haar coefficients `f_I = ⟨f, h_I⟩` over the symbol-index intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarExpansion {
    pub mean: f64,
    pub coeffs: SymbolSequence,
}

impl HaarExpansion {
    pub fn new(mean: f64, coeffs: SymbolSequence) -> Self {
        HaarExpansion { mean, coeffs }
    }

    pub fn depth(&self) -> u32 {
        self.coeffs.depth()
    }

    /// `c0² + Σ f_I²`.
    pub fn energy(&self) -> f64 {
        self.mean * self.mean + self.coeffs.entries().iter().map(|c| c * c).sum::<f64>()
    }

    /// Inverse of [`StepFunction::analyze`], `O(2^n)`.
    pub fn synthesize(&self) -> StepFunction {
        let depth = self.depth();
        let cells = 1usize << depth;
        let mut tree = vec![0.0; 2 * cells - 1];
        tree[0] = self.mean;
        for (i, &c) in self.coeffs.entries().iter().enumerate() {
            let step = c / DyadicInterval::from_heap_index(i).len().sqrt();
            tree[2 * i + 1] = tree[i] + step;
            tree[2 * i + 2] = tree[i] - step;
        }
        StepFunction::from_vec_unchecked(depth, tree.split_off(cells - 1))
    }
}

/// `|⟨f⟩_I − (c0 + Σ_{J ⊋ I} f_J h_J(I))|`: the average expansion over ancestors.
pub fn expand_average_check(f: &StepFunction, interval: &DyadicInterval) -> f64 {
    let expansion = f.analyze();
    let mut sum = expansion.mean;
    let mut current = *interval;
    while let Ok(parent) = current.parent() {
        let coeff = expansion.coeffs[parent];
        sum += coeff * parent.haar_sign(interval) / parent.len().sqrt();
        current = parent;
    }
    (f.average(interval) - sum).abs()
}
