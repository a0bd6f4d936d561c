//! Sequences indexed by the symbol intervals (levels `0..n`) and the
//! calculus on them: Schur product, sweep, `E`, and the Carleson, `ℓ∞` and
//! dyadic BMO norms.

use crate::error::{DyadError, Result};
use crate::lattice::{check_depth, DyadicInterval, Lattice};
use crate::step::StepFunction;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::ops::{Index, IndexMut};

#[derive(Clone, Debug, PartialEq)]
pub struct SymbolSequence {
    depth: u32,
    entries: Vec<f64>,
}

/// Which descendants `J` of `I` enter the sum defining `E(a)_I`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `J ⊊ I`
    #[default]
    Strict,
    /// `J ⊆ I`
    Inclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BmoFlavor {
    L2,
    L1,
}

impl SymbolSequence {
    pub fn new(depth: u32, entries: Vec<f64>) -> Result<Self> {
        check_depth(depth)?;
        let expected = (1usize << depth) - 1;
        if entries.len() != expected {
            return Err(DyadError::LengthMismatch {
                expected,
                found: entries.len(),
            });
        }
        if let Some((cell, &value)) = entries.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(DyadError::NonFinite { cell, value });
        }
        Ok(SymbolSequence { depth, entries })
    }

    pub(crate) fn from_vec_unchecked(depth: u32, entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), (1usize << depth) - 1);
        SymbolSequence { depth, entries }
    }

    pub fn zeros(depth: u32) -> Result<Self> {
        check_depth(depth)?;
        Ok(Self::from_vec_unchecked(depth, vec![0.0; (1usize << depth) - 1]))
    }

    /// `δ_I`: one at `I`, zero elsewhere.
    pub fn delta(depth: u32, interval: DyadicInterval) -> Result<Self> {
        let mut s = Self::zeros(depth)?;
        if interval.level() >= depth {
            return Err(DyadError::InvalidInterval {
                level: interval.level(),
                position: interval.position(),
            });
        }
        s[interval] = 1.0;
        Ok(s)
    }

    pub fn from_fn(depth: u32, g: impl FnMut(DyadicInterval) -> f64) -> Result<Self> {
        let lat = Lattice::new(depth)?;
        Self::new(depth, lat.symbol_intervals().map(g).collect())
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, interval: &DyadicInterval) -> Option<f64> {
        (interval.level() < self.depth).then(|| self.entries[interval.heap_index()])
    }

    pub fn iter(&self) -> impl Iterator<Item = (DyadicInterval, f64)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, &v)| (DyadicInterval::from_heap_index(i), v))
    }

    pub fn scale(&self, c: f64) -> SymbolSequence {
        self.map(|v| c * v)
    }

    pub fn map(&self, g: impl Fn(f64) -> f64) -> SymbolSequence {
        Self::from_vec_unchecked(self.depth, self.entries.iter().map(|&v| g(v)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0)
    }

    fn check_same_depth(&self, other: &SymbolSequence) -> Result<()> {
        if self.depth != other.depth {
            return Err(DyadError::DepthMismatch {
                expected: self.depth,
                found: other.depth,
            });
        }
        Ok(())
    }

    /// Entrywise product `b∘d`.
    pub fn schur(&self, other: &SymbolSequence) -> Result<SymbolSequence> {
        self.check_same_depth(other)?;
        Ok(Self::from_vec_unchecked(
            self.depth,
            self.entries.iter().zip(&other.entries).map(|(a, b)| a * b).collect(),
        ))
    }

    /// `σ(K) = Σ_{J ⊆ K} a_J` for every symbol interval `K`, heap order.
    pub fn subtree_sums(&self) -> Vec<f64> {
        subtree_sums(&self.entries)
    }

    /// The sweep `Ŝ(a)_I = Σ_{J ⊊ I} a_J h_I(J)`, `O(2^n)`.
    pub fn sweep(&self) -> SymbolSequence {
        let sigma = self.subtree_sums();
        let len = self.entries.len();
        let out = (0..len)
            .map(|i| {
                let (l, r) = (2 * i + 1, 2 * i + 2);
                if r >= len {
                    return 0.0;
                }
                (sigma[l] - sigma[r]) / DyadicInterval::from_heap_index(i).len().sqrt()
            })
            .collect();
        Self::from_vec_unchecked(self.depth, out)
    }

    /// `E(a)_I = (1/|I|) Σ_J a_J` over strict or inclusive descendants.
    pub fn e_sequence(&self, convention: Convention) -> SymbolSequence {
        let sigma = self.subtree_sums();
        let out = sigma
            .iter()
            .zip(&self.entries)
            .enumerate()
            .map(|(i, (&s, &a))| {
                let inv_len = DyadicInterval::from_heap_index(i).len().recip();
                match convention {
                    Convention::Strict => (s - a) * inv_len,
                    Convention::Inclusive => s * inv_len,
                }
            })
            .collect();
        Self::from_vec_unchecked(self.depth, out)
    }

    /// `sup_I ((1/|I|) Σ_{J ⊆ I} a_J²)^{1/2}`.
    pub fn cm_norm(&self) -> f64 {
        let squares: Vec<f64> = self.entries.iter().map(|a| a * a).collect();
        subtree_sums(&squares)
            .iter()
            .enumerate()
            .map(|(i, s)| s / DyadicInterval::from_heap_index(i).len())
            .fold(0.0, f64::max)
            .sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    /// `‖Ŝ(a)‖_CM + ‖E(a)‖_ℓ∞` with the strict `E` convention.
    pub fn composition_norm(&self) -> f64 {
        self.sweep().cm_norm() + self.e_sequence(Convention::Strict).linf_norm()
    }
}

pub(crate) fn subtree_sums(entries: &[f64]) -> Vec<f64> {
    let len = entries.len();
    let mut sigma = entries.to_vec();
    for i in (0..len).rev() {
        let (l, r) = (2 * i + 1, 2 * i + 2);
        if r < len {
            sigma[i] += sigma[l] + sigma[r];
        }
    }
    sigma
}

impl Index<DyadicInterval> for SymbolSequence {
    type Output = f64;
    fn index(&self, interval: DyadicInterval) -> &f64 {
        assert!(interval.level() < self.depth, "{interval} is not a symbol interval");
        &self.entries[interval.heap_index()]
    }
}

impl IndexMut<DyadicInterval> for SymbolSequence {
    fn index_mut(&mut self, interval: DyadicInterval) -> &mut f64 {
        assert!(interval.level() < self.depth, "{interval} is not a symbol interval");
        &mut self.entries[interval.heap_index()]
    }
}

/// Serialized as `[["level:position", value], ...]` in level-major order.
impl Serialize for SymbolSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.entries.len()))?;
        for (interval, v) in self.iter() {
            seq.serialize_element(&(interval.to_string(), v))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for SymbolSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let pairs: Vec<(DyadicInterval, f64)> = Vec::deserialize(deserializer)?;
        let len = pairs.len();
        if !(len + 1).is_power_of_two() || len == 0 {
            return Err(D::Error::custom(format!("{len} entries is not 2^n - 1")));
        }
        let depth = (len + 1).trailing_zeros();
        let mut entries = vec![f64::NAN; len];
        for (interval, v) in pairs {
            if interval.level() >= depth {
                return Err(D::Error::custom(format!("{interval} outside depth {depth}")));
            }
            entries[interval.heap_index()] = v;
        }
        SymbolSequence::new(depth, entries).map_err(D::Error::custom)
    }
}

/// Dyadic BMO norm of `f`: `sup_I` of the `L²` or `L¹` mean oscillation over `I`.
pub fn bmo_norm(f: &StepFunction, flavor: BmoFlavor) -> f64 {
    let lat = Lattice::new(f.depth()).expect("valid step function depth");
    lat.symbol_intervals()
        .map(|interval| match flavor {
            BmoFlavor::L2 => f.mean_oscillation_sq(&interval).sqrt(),
            BmoFlavor::L1 => f.mean_oscillation(&interval),
        })
        .fold(0.0, f64::max)
}
