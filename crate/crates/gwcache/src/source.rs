//! Source models for the file library and exact entropy oracles.
//!
//! Every model is small enough that subset entropies are computed exactly,
//! either by enumerating the joint pmf (at most 2^3 outcomes) or by summing
//! the lengths of independent uniform components.

use serde::{Deserialize, Serialize};

use crate::error::{check_nonneg, check_range, Error, Result};

/// `x log2 x` with the convention `0 log 0 = 0`.
pub(crate) fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Binary entropy h(p) in bits.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_range("p", p, 0.0, 1.0, "[0, 1]")?;
    Ok(-xlog2x(p) - xlog2x(1.0 - p))
}

/// Inverse of the binary entropy restricted to [0, 0.5], by bisection.
pub fn inv_binary_entropy(y: f64) -> Result<f64> {
    check_range("y", y, 0.0, 1.0, "[0, 1]")?;
    // h is flat at its maximum: every p within ~1e-8 of ½ evaluates to 1.0
    if y == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if -xlog2x(mid) - xlog2x(1.0 - mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Joint source model for the library files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum SourceModel {
    /// Doubly symmetric binary source: two uniform bits that differ with probability `p0`.
    Dsbs { p0: f64 },
    /// Three BSC(p0) outputs driven by the same uniform input V.
    TripleBsc { p0: f64 },
    /// X1 = (X1', V), X2 = (X2', V) with independent uniform components.
    Structured2 {
        #[serde(rename = "lV")]
        l_v: f64,
        l1: f64,
        l2: f64,
    },
    /// X1 = (V, U1, U2, X1'), X2 = (V, U2, U3, X2'), X3 = (V, U1, U3, X3').
    Structured3 {
        #[serde(rename = "lV")]
        l_v: f64,
        #[serde(rename = "lU")]
        l_u: f64,
        #[serde(rename = "lX")]
        l_x: f64,
    },
}

/// A nonempty set of file indices, stored as a bitmask (bit `i-1` is file `i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FileSubset(u32);

impl FileSubset {
    /// Builds a subset from 1-based file indices.
    pub fn new(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &i in indices {
            if i == 0 || i > 31 {
                return Err(Error::InvalidSubset(format!("file index {i}")));
            }
            mask |= 1 << (i - 1);
        }
        Self::from_mask(mask)
    }

    pub fn from_mask(mask: u32) -> Result<Self> {
        if mask == 0 {
            return Err(Error::InvalidSubset("empty subset".into()));
        }
        Ok(Self(mask))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    /// 1-based file indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|b| self.0 >> b & 1 == 1).map(|b| b + 1).collect()
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }
}

/// Anything that can report joint entropies of file subsets.
///
/// Subsets are bitmasks over files; the empty mask has entropy 0.
pub trait EntropyOracle: Sync {
    fn num_files(&self) -> usize;
    fn entropy(&self, mask: u32) -> f64;

    fn conditional(&self, a: u32, b: u32) -> f64 {
        (self.entropy(a | b) - self.entropy(b)).max(0.0)
    }
}

/// Independent files of given lengths (used for the two-request network).
#[derive(Debug, Clone, PartialEq)]
pub struct IndependentLibrary {
    pub lengths: Vec<f64>,
}

impl EntropyOracle for IndependentLibrary {
    fn num_files(&self) -> usize {
        self.lengths.len()
    }

    fn entropy(&self, mask: u32) -> f64 {
        self.lengths
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, l)| l)
            .sum()
    }
}

/// Precomputed entropies of all subsets of an oracle.
#[derive(Debug, Clone)]
pub struct EntropyTable {
    n: usize,
    values: Vec<f64>,
}

impl EntropyTable {
    pub fn new(oracle: &dyn EntropyOracle) -> Self {
        let n = oracle.num_files();
        let values = (0..1u32 << n).map(|m| oracle.entropy(m)).collect();
        Self { n, values }
    }
}

impl EntropyOracle for EntropyTable {
    fn num_files(&self) -> usize {
        self.n
    }

    fn entropy(&self, mask: u32) -> f64 {
        self.values[mask as usize]
    }
}

impl SourceModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SourceModel::Dsbs { p0 } | SourceModel::TripleBsc { p0 } => {
                check_range("p0", p0, 0.0, 0.5, "[0, 0.5]")
            }
            SourceModel::Structured2 { l_v, l1, l2 } => {
                check_nonneg("lV", l_v)?;
                check_nonneg("l1", l1)?;
                check_nonneg("l2", l2)
            }
            SourceModel::Structured3 { l_v, l_u, l_x } => {
                check_nonneg("lV", l_v)?;
                check_nonneg("lU", l_u)?;
                check_nonneg("lX", l_x)
            }
        }
    }

    pub fn num_files(&self) -> usize {
        match self {
            SourceModel::Dsbs { .. } | SourceModel::Structured2 { .. } => 2,
            SourceModel::TripleBsc { .. } | SourceModel::Structured3 { .. } => 3,
        }
    }

    /// Mask of all files.
    pub fn all(&self) -> u32 {
        (1 << self.num_files()) - 1
    }

    /// Independent components as (bit length, mask of files containing it).
    pub fn components(&self) -> Option<Vec<(f64, u32)>> {
        match *self {
            SourceModel::Structured2 { l_v, l1, l2 } => Some(vec![(l_v, 0b11), (l1, 0b01), (l2, 0b10)]),
            SourceModel::Structured3 { l_v, l_u, l_x } => Some(vec![
                (l_v, 0b111),
                // U1 in files 1,3; U2 in files 1,2; U3 in files 2,3
                (l_u, 0b101),
                (l_u, 0b011),
                (l_u, 0b110),
                (l_x, 0b001),
                (l_x, 0b010),
                (l_x, 0b100),
            ]),
            _ => None,
        }
    }

    /// Joint pmf over (x1, .., xN) indexed by the bit pattern of the outcome.
    fn pmf(&self) -> Option<Vec<f64>> {
        match *self {
            SourceModel::Dsbs { p0 } => Some(
                (0..4u32)
                    .map(|x| if (x & 1) == (x >> 1) { 0.5 * (1.0 - p0) } else { 0.5 * p0 })
                    .collect(),
            ),
            SourceModel::TripleBsc { p0 } => Some(
                (0..8u32)
                    .map(|x| {
                        let s = x.count_ones() as i32;
                        0.5 * p0.powi(s) * (1.0 - p0).powi(3 - s) + 0.5 * p0.powi(3 - s) * (1.0 - p0).powi(s)
                    })
                    .collect(),
            ),
            _ => None,
        }
    }

    fn entropy_mask(&self, mask: u32) -> f64 {
        if let Some(comps) = self.components() {
            return comps.iter().filter(|(_, m)| m & mask != 0).map(|(l, _)| l).sum();
        }
        let pmf = self.pmf().expect("pmf models");
        let mut marginal = vec![0.0; pmf.len()];
        for (x, p) in pmf.iter().enumerate() {
            marginal[x & mask as usize] += p;
        }
        -marginal.iter().map(|&p| xlog2x(p)).sum::<f64>()
    }

    fn check_subset(&self, s: FileSubset) -> Result<()> {
        if s.mask() & !self.all() != 0 {
            return Err(Error::InvalidSubset(format!(
                "{:?} for a {}-file model",
                s.indices(),
                self.num_files()
            )));
        }
        Ok(())
    }
}

impl EntropyOracle for SourceModel {
    fn num_files(&self) -> usize {
        SourceModel::num_files(self)
    }

    fn entropy(&self, mask: u32) -> f64 {
        if mask == 0 {
            0.0
        } else {
            self.entropy_mask(mask)
        }
    }
}

/// Joint entropy per source symbol of the files in `s`.
pub fn subset_entropy(model: &SourceModel, s: FileSubset) -> Result<f64> {
    model.validate()?;
    model.check_subset(s)?;
    Ok(model.entropy_mask(s.mask()))
}

/// H(A | B) = H(A ∪ B) − H(B).
pub fn conditional_entropy(model: &SourceModel, a: FileSubset, b: FileSubset) -> Result<f64> {
    let joint = subset_entropy(model, a.union(b))?;
    let cond = subset_entropy(model, b)?;
    Ok((joint - cond).max(0.0))
}
