//! Dense matrix realizations of the lattice operators, used as brute-force
//! oracles and as input to the weighted norm estimators.

use crate::error::{DyadError, Result};
use crate::paraproduct::{compose, martingale, pi, pi_star, pott_smith_apply};
use crate::sparse::{sparse_operator_apply, SparseCollection};
use crate::step::StepFunction;
use crate::symbol::{Convention, SymbolSequence};

/// Default depth cap for dense realizations (matrix side 4096).
pub const ORACLE_DEPTH_CAP: u32 = 12;

/// A linear operator on step functions, addressable by name.
#[derive(Clone, Debug)]
pub enum OperatorDescription {
    Identity { depth: u32 },
    Pi(SymbolSequence),
    PiStar(SymbolSequence),
    Martingale(SymbolSequence),
    Compose { b: SymbolSequence, d: SymbolSequence },
    /// The three-term decomposition applied to the Schur product `bd`.
    PottSmith(SymbolSequence),
    Sparse(SparseCollection),
}

impl OperatorDescription {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorDescription::Identity { .. } => "identity",
            OperatorDescription::Pi(_) => "pi",
            OperatorDescription::PiStar(_) => "pi_star",
            OperatorDescription::Martingale(_) => "martingale",
            OperatorDescription::Compose { .. } => "compose",
            OperatorDescription::PottSmith(_) => "pott_smith",
            OperatorDescription::Sparse(_) => "sparse",
        }
    }

    pub fn depth(&self) -> u32 {
        match self {
            OperatorDescription::Identity { depth } => *depth,
            OperatorDescription::Pi(s)
            | OperatorDescription::PiStar(s)
            | OperatorDescription::Martingale(s)
            | OperatorDescription::PottSmith(s) => s.depth(),
            OperatorDescription::Compose { b, .. } => b.depth(),
            OperatorDescription::Sparse(s) => s.depth(),
        }
    }

    pub fn apply(&self, f: &StepFunction) -> Result<StepFunction> {
        match self {
            OperatorDescription::Identity { depth } => {
                if *depth != f.depth() {
                    return Err(DyadError::DepthMismatch {
                        expected: *depth,
                        found: f.depth(),
                    });
                }
                Ok(f.clone())
            }
            OperatorDescription::Pi(b) => pi(b, f),
            OperatorDescription::PiStar(b) => pi_star(b, f),
            OperatorDescription::Martingale(eps) => martingale(eps, f),
            OperatorDescription::Compose { b, d } => compose(b, d, f),
            OperatorDescription::PottSmith(bd) => pott_smith_apply(bd, f, Convention::Strict),
            OperatorDescription::Sparse(s) => sparse_operator_apply(s, f),
        }
    }
}

/// Dense `2^n × 2^n` matrix acting on cell values, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    depth: u32,
    side: usize,
    data: Vec<f64>,
}

impl OperatorMatrix {
    pub fn zeros(depth: u32) -> Self {
        let side = 1usize << depth;
        OperatorMatrix {
            depth,
            side,
            data: vec![0.0; side * side],
        }
    }

    pub fn identity(depth: u32) -> Self {
        let mut m = Self::zeros(depth);
        for i in 0..m.side {
            m.data[i * m.side + i] = 1.0;
        }
        m
    }

    pub fn from_rows(depth: u32, data: Vec<f64>) -> Result<Self> {
        let side = 1usize << depth;
        if data.len() != side * side {
            return Err(DyadError::LengthMismatch {
                expected: side * side,
                found: data.len(),
            });
        }
        Ok(OperatorMatrix { depth, side, data })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.side + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.side..(row + 1) * self.side]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.side)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Mᵀ x`.
    pub fn mul_vec_transposed(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.side];
        for (row, &xi) in self.data.chunks_exact(self.side).zip(x) {
            if xi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * xi;
            }
        }
        out
    }

    pub fn apply(&self, f: &StepFunction) -> StepFunction {
        StepFunction::from_vec_unchecked(self.depth, self.mul_vec(f.values()))
    }

    pub fn transpose(&self) -> OperatorMatrix {
        let mut out = Self::zeros(self.depth);
        for r in 0..self.side {
            for c in 0..self.side {
                out.data[c * self.side + r] = self.data[r * self.side + c];
            }
        }
        out
    }

    pub fn matmul(&self, other: &OperatorMatrix) -> OperatorMatrix {
        let n = self.side;
        let mut out = Self::zeros(self.depth);
        for r in 0..n {
            let out_row = &mut out.data[r * n..(r + 1) * n];
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == 0.0 {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(&other.data[k * n..(k + 1) * n]) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Dense realization by applying the operator to every cell indicator.
pub fn to_matrix(description: &OperatorDescription) -> Result<OperatorMatrix> {
    to_matrix_capped(description, ORACLE_DEPTH_CAP)
}

pub fn to_matrix_capped(description: &OperatorDescription, cap: u32) -> Result<OperatorMatrix> {
    let depth = description.depth();
    if depth > cap {
        return Err(DyadError::DepthAboveCap { depth, cap });
    }
    let mut m = OperatorMatrix::zeros(depth);
    let side = m.side;
    let mut e = vec![0.0; side];
    for c in 0..side {
        e[c] = 1.0;
        let column = description.apply(&StepFunction::from_vec_unchecked(depth, e.clone()))?;
        e[c] = 0.0;
        for (r, v) in column.values().iter().enumerate() {
            m.data[r * side + c] = *v;
        }
    }
    Ok(m)
}
