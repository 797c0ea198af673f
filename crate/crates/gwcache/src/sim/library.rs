//! Bit-level libraries: random realizations of structured sources and their
//! Gray-Wyner descriptions.

use bitvec::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::source::SourceModel;

/// Converts a per-symbol length to bits, rejecting non-integral results.
pub fn to_bits(x: f64, f: u64, what: &str) -> Result<usize> {
    let v = x * f as f64;
    let r = v.round();
    if !v.is_finite() || r < 0.0 || (v - r).abs() > 1e-6 {
        return Err(Error::Divisibility { f, what: format!("{what}: {x} * {f} = {v}") });
    }
    Ok(r as usize)
}

/// One Gray-Wyner description: a bit string shared by the files in `files`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Description {
    pub label: String,
    /// Bitmask of the files this description belongs to.
    pub files: u32,
    pub bits: BitVec,
}

/// Descriptions of a library realization with `f` source symbols per file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitLibrary {
    pub f: u64,
    pub descriptions: Vec<Description>,
    /// For each file, the description indices that make it up, in order.
    pub layout: Vec<Vec<usize>>,
}

fn random_bits(rng: &mut ChaCha8Rng, len: usize) -> BitVec {
    (0..len).map(|_| rng.random::<bool>()).collect()
}

impl BitLibrary {
    /// Independent files, one description each (the two-request network).
    pub fn independent(lengths: &[usize], f: u64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let descriptions = lengths
            .iter()
            .enumerate()
            .map(|(i, &l)| Description { label: format!("W{}", i + 1), files: 1 << i, bits: random_bits(&mut rng, l) })
            .collect();
        let layout = (0..lengths.len()).map(|i| vec![i]).collect();
        Self { f, descriptions, layout }
    }

    pub fn num_files(&self) -> usize {
        self.layout.len()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.descriptions.iter().map(|d| d.bits.len()).collect()
    }

    /// The file `i` (0-based) as the concatenation of its descriptions.
    pub fn file(&self, i: usize) -> BitVec {
        reassemble(self.layout[i].iter().map(|&d| self.descriptions[d].bits.as_bitslice()))
    }
}

/// Gray-Wyner decoder for the structured sources: concatenates descriptions.
pub fn reassemble<'a>(parts: impl IntoIterator<Item = &'a BitSlice>) -> BitVec {
    let mut out = BitVec::new();
    for p in parts {
        out.extend_from_bitslice(p);
    }
    out
}

/// Draws a realization of a structured source and encodes it at the
/// component operating point, whose descriptions are the components themselves.
///
/// Structured2 yields `W12 = V`, `W1 = X1'`, `W2 = X2'`. Structured3 yields
/// `W123 = V`, `W12 = U2`, `W13 = U1`, `W23 = U3` and `Wi = Xi'`.
pub fn gw_encode_structured(model: &SourceModel, seed: u64, f: u64) -> Result<BitLibrary> {
    model.validate()?;
    if f == 0 {
        return Err(Error::Invalid("F must be positive".into()));
    }
    let (labels, layout): (Vec<&str>, Vec<Vec<usize>>) = match model {
        SourceModel::Structured2 { .. } => (vec!["W12", "W1", "W2"], vec![vec![1, 0], vec![2, 0]]),
        SourceModel::Structured3 { .. } => (
            vec!["W123", "W12", "W13", "W23", "W1", "W2", "W3"],
            // X1 = (V, U1, U2, X1'), X2 = (V, U2, U3, X2'), X3 = (V, U1, U3, X3')
            vec![vec![0, 2, 1, 4], vec![0, 1, 3, 5], vec![0, 2, 3, 6]],
        ),
        _ => {
            return Err(Error::Unsupported(format!(
                "bit-level simulation needs a structured source, got {model:?}"
            )))
        }
    };
    let comps = model.components().expect("structured models have components");
    let components = match model {
        SourceModel::Structured3 { .. } => {
            // reorder (V, U1, U2, U3, X1', X2', X3') to (V, U2, U1, U3, ...)
            vec![comps[0], comps[2], comps[1], comps[3], comps[4], comps[5], comps[6]]
        }
        _ => comps,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut descriptions = Vec::with_capacity(components.len());
    for (label, (len, files)) in labels.iter().zip(components) {
        let bits = to_bits(len, f, label)?;
        descriptions.push(Description { label: label.to_string(), files, bits: random_bits(&mut rng, bits) });
    }
    Ok(BitLibrary { f, descriptions, layout })
}
