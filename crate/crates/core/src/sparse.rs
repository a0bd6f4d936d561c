//! Sparse collections, Carleson constants and the stopping-time
//! constructions behind bilinear and pointwise sparse bounds.
//!
//! Every `E_Q` is a set of finest cells, each taken with a rational share in
//! `(0, 1]`. The stopping-time builders only produce whole cells; fractional
//! shares appear when a Carleson family has to be packed tighter than cell
//! granularity allows (a share `s` of cell `c` stands for a sub-interval of
//! `c` of measure `s·|c|`, and shares of one cell are laid out side by side,
//! so disjointness reduces to "shares of each cell sum to at most one").
//! All checks are exact rational arithmetic.

use crate::error::{DyadError, Result};
use crate::lattice::DyadicInterval;
use crate::operator::{to_matrix, OperatorDescription};
use crate::step::{push_down, StepFunction};
use crate::symbol::SymbolSequence;
use crate::verification::norms::{operator_norm_l2w, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::weights::Weight;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub type Share = Ratio<u64>;

/// Stopping threshold on averages (and on partial martingale sums).
pub const STOPPING_FACTOR: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellShare {
    pub cell: usize,
    pub share: Share,
}

/// One `(Q, E_Q)` pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMember {
    pub interval: DyadicInterval,
    pub set: Vec<CellShare>,
}

impl SparseMember {
    pub fn whole(interval: DyadicInterval, cells: impl IntoIterator<Item = usize>) -> Self {
        SparseMember {
            interval,
            set: cells
                .into_iter()
                .map(|cell| CellShare { cell, share: Share::one() })
                .collect(),
        }
    }

    /// `|E_Q|` in units of finest cells.
    pub fn measure(&self) -> Share {
        self.set.iter().fold(Share::zero(), |acc, c| acc + c.share)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseCollection {
    depth: u32,
    eta: Share,
    members: Vec<SparseMember>,
}

impl SparseCollection {
    /// Unchecked constructor; see [`verify_sparse`].
    pub fn new(depth: u32, eta: Share, members: Vec<SparseMember>) -> Self {
        SparseCollection { depth, eta, members }
    }

    pub fn empty(depth: u32) -> Self {
        SparseCollection::new(depth, Share::one(), Vec::new())
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn eta(&self) -> Share {
        self.eta
    }

    pub fn members(&self) -> &[SparseMember] {
        &self.members
    }

    pub fn intervals(&self) -> Vec<DyadicInterval> {
        self.members.iter().map(|m| m.interval).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Outcome of [`verify_sparse`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SparseCheck {
    pub contained: bool,
    pub disjoint: bool,
    pub meets_eta: bool,
    /// `min_Q |E_Q| / |Q|` (one for an empty collection).
    pub worst_ratio: Share,
}

impl SparseCheck {
    pub fn is_valid(&self) -> bool {
        self.contained && self.disjoint && self.meets_eta
    }

    pub fn worst_ratio_f64(&self) -> f64 {
        self.worst_ratio.to_f64().unwrap_or(f64::NAN)
    }
}

/// Checks `E_Q ⊆ Q`, pairwise disjointness and `|E_Q| ≥ η|Q|` exactly.
pub fn verify_sparse(s: &SparseCollection) -> SparseCheck {
    let cells = 1usize << s.depth;
    let mut used = vec![Share::zero(); cells];
    let mut contained = true;
    let mut worst = Share::one();
    let mut meets = true;
    for m in &s.members {
        if m.interval.level() > s.depth {
            contained = false;
            continue;
        }
        let range = m.interval.cell_range(s.depth);
        for c in &m.set {
            if !range.contains(&c.cell) || c.share > Share::one() || c.share.is_zero() {
                contained = false;
                continue;
            }
            used[c.cell] += c.share;
        }
        let ratio = m.measure() / Share::from_integer(range.len() as u64);
        worst = worst.min(ratio);
        if ratio < s.eta {
            meets = false;
        }
    }
    let disjoint = used.iter().all(|u| *u <= Share::one());
    SparseCheck {
        contained,
        disjoint,
        meets_eta: meets,
        worst_ratio: worst,
    }
}

fn dedup(family: &[DyadicInterval]) -> Vec<DyadicInterval> {
    family.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

fn check_family(depth: u32, family: &[DyadicInterval]) -> Result<()> {
    if let Some(q) = family.iter().find(|q| q.level() > depth) {
        return Err(DyadError::InvalidInterval {
            level: q.level(),
            position: q.position(),
        });
    }
    Ok(())
}

/// `sup_I (1/|I|) Σ_{Q ∈ family, Q ⊆ I} |Q|` over all dyadic `I` of the lattice.
pub fn carleson_constant(depth: u32, family: &[DyadicInterval]) -> Result<Share> {
    check_family(depth, family)?;
    crate::lattice::check_depth(depth)?;
    let nodes = (1usize << (depth + 1)) - 1;
    let mut load = vec![0u64; nodes];
    for q in dedup(family) {
        load[q.heap_index()] += q.cell_count(depth) as u64;
    }
    for i in (0..nodes).rev() {
        if 2 * i + 2 < nodes {
            load[i] += load[2 * i + 1] + load[2 * i + 2];
        }
    }
    Ok((0..nodes)
        .map(|i| {
            let size = DyadicInterval::from_heap_index(i).cell_count(depth) as u64;
            Share::new(load[i], size)
        })
        .max()
        .unwrap_or_else(Share::zero))
}

/// Packs a Carleson family into an `eta`-sparse collection.
///
/// First tries whole cells, giving each cell to the smallest member that
/// contains it. If some member ends up below `eta`, falls back to a bottom-up
/// allocation with fractional shares, which always succeeds when
/// `eta ≤ 1/Λ` for the family's Carleson constant `Λ`.
pub fn carleson_to_sparse(depth: u32, family: &[DyadicInterval], eta: Share) -> Result<SparseCollection> {
    check_family(depth, family)?;
    crate::lattice::check_depth(depth)?;
    if eta.is_zero() || eta > Share::one() {
        return Err(DyadError::InvalidParameter(format!("eta must lie in (0, 1], got {eta}")));
    }
    let family = dedup(family);
    let cells = 1usize << depth;

    // Whole cells: deepest containing member wins.
    let mut owner: Vec<Option<usize>> = vec![None; cells];
    let mut by_level: Vec<usize> = (0..family.len()).collect();
    by_level.sort_by_key(|&k| family[k].level());
    for &k in &by_level {
        for c in family[k].cell_range(depth) {
            owner[c] = Some(k);
        }
    }
    let mut sets: Vec<Vec<usize>> = vec![Vec::new(); family.len()];
    for (c, o) in owner.iter().enumerate() {
        if let Some(k) = o {
            sets[*k].push(c);
        }
    }
    let whole = SparseCollection::new(
        depth,
        eta,
        family
            .iter()
            .zip(sets)
            .map(|(q, set)| SparseMember::whole(*q, set))
            .collect(),
    );
    if verify_sparse(&whole).is_valid() {
        return Ok(whole);
    }

    // Fractional bottom-up allocation, smallest members first.
    let mut free = vec![Share::one(); cells];
    let mut members = Vec::with_capacity(family.len());
    let mut achieved = Share::one();
    let mut order = by_level;
    order.reverse();
    for &k in &order {
        let q = family[k];
        let range = q.cell_range(depth);
        let target = eta * Share::from_integer(range.len() as u64);
        let mut remaining = target;
        let mut set = Vec::new();
        for c in range.clone() {
            if remaining.is_zero() {
                break;
            }
            if free[c].is_zero() {
                continue;
            }
            let take = free[c].min(remaining);
            free[c] -= take;
            remaining -= take;
            set.push(CellShare { cell: c, share: take });
        }
        achieved = achieved.min((target - remaining) / Share::from_integer(range.len() as u64));
        members.push((k, SparseMember { interval: q, set }));
    }
    members.sort_by_key(|(k, _)| *k);
    let packed = SparseCollection::new(depth, eta, members.into_iter().map(|(_, m)| m).collect());
    let check = verify_sparse(&packed);
    if !check.is_valid() {
        return Err(DyadError::InfeasibleSparsity {
            target: eta.to_f64().unwrap_or(f64::NAN),
            achieved: achieved.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(packed)
}

fn check_same_depth(a: u32, b: u32) -> Result<()> {
    if a != b {
        return Err(DyadError::DepthMismatch { expected: a, found: b });
    }
    Ok(())
}

/// Collects `(Q, stopping children of Q)` generation by generation from `root`.
/// `select` returns the maximal strict subintervals of `Q` that stop.
fn stopping_tree(
    depth: u32,
    root: DyadicInterval,
    mut select: impl FnMut(DyadicInterval) -> Vec<DyadicInterval>,
) -> SparseCollection {
    let mut members = Vec::new();
    let mut queue = vec![root];
    while let Some(q) = queue.pop() {
        let children = select(q);
        let mut covered = vec![false; q.cell_count(depth)];
        let start = q.cell_range(depth).start;
        for j in &children {
            for c in j.cell_range(depth) {
                covered[c - start] = true;
            }
        }
        let set = q
            .cell_range(depth)
            .filter(|c| !covered[c - start])
            .collect::<Vec<_>>();
        members.push(SparseMember::whole(q, set));
        queue.extend(children);
    }
    members.sort_by_key(|m| m.interval);
    SparseCollection::new(depth, Share::new(1, 2), members)
}

/// Stopping family for the bilinear paraproduct bound: a maximal `J ⊊ Q`
/// stops when `⟨|f1|⟩_J > 4⟨|f1|⟩_Q` or `⟨|f2|⟩_J > 4⟨|f2|⟩_Q`. The result
/// is `1/2`-sparse; inputs are restricted to `I0`.
pub fn stopping_sparse_pair(f1: &StepFunction, f2: &StepFunction, root: DyadicInterval) -> Result<SparseCollection> {
    check_same_depth(f1.depth(), f2.depth())?;
    let depth = f1.depth();
    crate::step::check_in_lattice(depth, &root)?;
    let a1 = f1.restrict(&root).abs().tree_averages();
    let a2 = f2.restrict(&root).abs().tree_averages();
    let collection = stopping_tree(depth, root, |q| {
        let (t1, t2) = (STOPPING_FACTOR * a1[q.heap_index()], STOPPING_FACTOR * a2[q.heap_index()]);
        let mut out = Vec::new();
        if q.level() == depth {
            return out;
        }
        let mut stack = vec![q.left(), q.right()];
        while let Some(j) = stack.pop() {
            let k = j.heap_index();
            if a1[k] > t1 || a2[k] > t2 {
                out.push(j);
            } else if j.level() < depth {
                stack.push(j.left());
                stack.push(j.right());
            }
        }
        out
    });
    debug_assert!(verify_sparse(&collection).is_valid());
    Ok(collection)
}

/// Pointwise sparse domination of a martingale transform.
///
/// A maximal `J ⊊ Q` stops when `⟨|f|⟩_J > 4⟨|f|⟩_Q` or when the partial
/// transform `Σ_{J ⊊ K ⊆ Q} ε_K f_K h_K(J)` exceeds `τ‖ε‖_∞⟨|f|⟩_Q`, with
/// `τ = 4`. If the stopping children of `Q` would cover more than half of it,
/// `τ` is doubled for that `Q` until they do not (the averages alone cover at
/// most a quarter), so the family is always `1/2`-sparse.
///
/// Returns the family and the smallest `C` with
/// `|T_ε f(x)| ≤ C‖ε‖_∞ Σ_Q ⟨|f|⟩_Q 1_Q(x)` on every cell of `I0`.
pub fn lacey_pointwise_sparse(
    eps: &SymbolSequence,
    f: &StepFunction,
    root: DyadicInterval,
) -> Result<(SparseCollection, f64)> {
    check_same_depth(eps.depth(), f.depth())?;
    let depth = f.depth();
    crate::step::check_in_lattice(depth, &root)?;
    let f = f.restrict(&root);
    let avg = f.abs().tree_averages();
    let coeffs = f.analyze().coeffs;
    let norm = eps.linf_norm();
    let symbols = coeffs.len();
    // ε_K f_K |K|^{-1/2}, the magnitude of the K-term on either half of K.
    let step: Vec<f64> = (0..symbols)
        .map(|k| eps.entries()[k] * coeffs.entries()[k] / DyadicInterval::from_heap_index(k).len().sqrt())
        .collect();

    let collection = stopping_tree(depth, root, |q| {
        if q.level() == depth {
            return Vec::new();
        }
        let base = avg[q.heap_index()];
        let size = q.cell_count(depth);
        let mut tau = STOPPING_FACTOR;
        loop {
            let limit = tau * norm * base;
            let mut out = Vec::new();
            let mut partial_fired = false;
            let qk = q.heap_index();
            let mut stack = vec![(q.left(), step[qk]), (q.right(), -step[qk])];
            while let Some((j, partial)) = stack.pop() {
                let k = j.heap_index();
                let by_average = avg[k] > STOPPING_FACTOR * base;
                let by_partial = partial.abs() > limit;
                if by_average || by_partial {
                    partial_fired |= by_partial && !by_average;
                    out.push(j);
                } else if j.level() < depth {
                    stack.push((j.left(), partial + step[k]));
                    stack.push((j.right(), partial - step[k]));
                }
            }
            let covered: usize = out.iter().map(|j| j.cell_count(depth)).sum();
            if 2 * covered <= size || !partial_fired {
                return out;
            }
            tau *= 2.0;
        }
    });

    if norm == 0.0 {
        return Ok((collection, 0.0));
    }
    let transformed = crate::paraproduct::martingale(eps, &f)?;
    let dominating = sparse_operator_apply(&collection, &f.abs())?;
    let constant = root
        .cell_range(depth)
        .filter(|&c| transformed.values()[c] != 0.0)
        .map(|c| transformed.values()[c].abs() / (norm * dominating.values()[c]))
        .fold(0.0, f64::max);
    Ok((collection, constant))
}

/// `A_S f = Σ_Q ⟨f⟩_Q 1_Q`.
pub fn sparse_operator_apply(s: &SparseCollection, f: &StepFunction) -> Result<StepFunction> {
    check_same_depth(s.depth, f.depth())?;
    let averages = f.tree_averages();
    let mut addend = vec![0.0; averages.len()];
    for m in &s.members {
        let k = m.interval.heap_index();
        addend[k] += averages[k];
    }
    Ok(StepFunction::from_vec_unchecked(f.depth(), push_down(&addend, f.cell_count())))
}

/// `Σ_Q |Q| ⟨|f|⟩_Q ⟨|g|⟩_Q`.
pub fn sparse_bilinear(s: &SparseCollection, f: &StepFunction, g: &StepFunction) -> Result<f64> {
    check_same_depth(s.depth, f.depth())?;
    check_same_depth(s.depth, g.depth())?;
    let (af, ag) = (f.abs().tree_averages(), g.abs().tree_averages());
    Ok(s.members
        .iter()
        .map(|m| {
            let k = m.interval.heap_index();
            m.interval.len() * af[k] * ag[k]
        })
        .sum())
}

/// Merges three sparse families into one with
/// `η ≥ 1/(1/η₁ + 1/η₂ + 1/η₃)` through Carleson additivity.
pub fn merge_three(s1: &SparseCollection, s2: &SparseCollection, s3: &SparseCollection) -> Result<SparseCollection> {
    check_same_depth(s1.depth, s2.depth)?;
    check_same_depth(s1.depth, s3.depth)?;
    let total = s1.eta.recip() + s2.eta.recip() + s3.eta.recip();
    let union: Vec<DyadicInterval> = [s1, s2, s3].iter().flat_map(|s| s.intervals()).collect();
    carleson_to_sparse(s1.depth, &union, total.recip())
}

/// `‖A_S‖_{L²(w)}` through the dense oracle and weighted power iteration.
pub fn sparse_norm_l2w(s: &SparseCollection, w: &Weight) -> Result<f64> {
    if s.is_empty() {
        return Ok(0.0);
    }
    let m = to_matrix(&OperatorDescription::Sparse(s.clone()))?;
    Ok(operator_norm_l2w(&m, w, DEFAULT_TOL, DEFAULT_MAX_ITER)?.value)
}

#[derive(Serialize, Deserialize)]
struct RawMember {
    #[serde(rename = "Q")]
    q: DyadicInterval,
    #[serde(rename = "E")]
    e: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    share: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct RawCollection {
    depth: u32,
    eta: f64,
    eta_exact: String,
    members: Vec<RawMember>,
}

impl Serialize for SparseCollection {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let members = self
            .members
            .iter()
            .map(|m| {
                let fractional = m.set.iter().any(|c| !c.share.is_one());
                RawMember {
                    q: m.interval,
                    e: m.set.iter().map(|c| c.cell).collect(),
                    share: fractional.then(|| m.set.iter().map(|c| c.share.to_string()).collect()),
                }
            })
            .collect();
        RawCollection {
            depth: self.depth,
            eta: self.eta.to_f64().unwrap_or(f64::NAN),
            eta_exact: self.eta.to_string(),
            members,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SparseCollection {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let raw = RawCollection::deserialize(deserializer)?;
        let parse = |s: &str| s.parse::<Share>().map_err(|e| D::Error::custom(format!("bad ratio `{s}`: {e}")));
        let eta = parse(&raw.eta_exact)?;
        let mut members = Vec::with_capacity(raw.members.len());
        for m in raw.members {
            let set = match m.share {
                None => m.e.iter().map(|&cell| CellShare { cell, share: Share::one() }).collect(),
                Some(shares) => {
                    if shares.len() != m.e.len() {
                        return Err(D::Error::custom("share and E lengths differ"));
                    }
                    m.e.iter()
                        .zip(&shares)
                        .map(|(&cell, s)| Ok(CellShare { cell, share: parse(s)? }))
                        .collect::<std::result::Result<Vec<_>, D::Error>>()?
                }
            };
            members.push(SparseMember { interval: m.q, set });
        }
        Ok(SparseCollection::new(raw.depth, eta, members))
    }
}
