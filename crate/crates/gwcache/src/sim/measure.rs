//! Rate measurement over demand sets and library realizations.

use serde::Serialize;

use super::library::BitLibrary;
use super::Scheme;
use crate::error::{Error, Result};
use crate::par::Exec;

/// Every demand in which each of `k` receivers requests `per_receiver` of `n` files.
///
/// The first receiver varies slowest, so `(1, 1), (1, 2), (2, 1), (2, 2)` for
/// two files and receivers.
pub fn all_demands(n: usize, k: usize, per_receiver: u32) -> Vec<Vec<u32>> {
    let choices: Vec<u32> = (1..1u32 << n).filter(|m| m.count_ones() == per_receiver).collect();
    let total = choices.len().pow(k as u32);
    (0..total)
        .map(|mut idx| {
            let mut d = vec![0; k];
            for slot in d.iter_mut().rev() {
                *slot = choices[idx % choices.len()];
                idx /= choices.len();
            }
            d
        })
        .collect()
}

/// Measured codeword lengths of a scheme.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    /// (demand, codeword bits) in [`all_demands`] order.
    pub per_demand: Vec<(Vec<u32>, usize)>,
    /// max over demands of bits / F.
    pub peak: f64,
    /// Uniform mean over demands of bits / F.
    pub average: f64,
    /// Number of successful (demand, realization) decodes.
    pub runs: usize,
}

/// Runs every demand on every library realization, verifying decoding, and
/// reports peak and average rates in bits per symbol.
pub fn measure_rate(scheme: &Scheme, libs: &[BitLibrary], exec: Exec) -> Result<Measurement> {
    if libs.is_empty() {
        return Err(Error::Invalid("no library realizations".into()));
    }
    let demands = all_demands(scheme.num_files(), scheme.receivers(), scheme.requests_per_receiver);
    let n = demands.len() * libs.len();
    let results = exec.map_range(n, |i| scheme.run(&libs[i % libs.len()], &demands[i / libs.len()]));
    let mut per_demand = Vec::with_capacity(demands.len());
    for (d, chunk) in demands.iter().zip(results.chunks(libs.len())) {
        let mut bits = None;
        for r in chunk {
            let b = r.clone()?;
            if bits.is_some_and(|x| x != b) {
                return Err(Error::Invalid(format!("codeword length for {d:?} depends on the realization")));
            }
            bits = Some(b);
        }
        per_demand.push((d.clone(), bits.expect("at least one realization")));
    }
    let f = scheme.f() as f64;
    let peak = per_demand.iter().map(|(_, b)| *b).max().unwrap_or(0) as f64 / f;
    let average = per_demand.iter().map(|(_, b)| *b as f64).sum::<f64>() / (per_demand.len() as f64 * f);
    Ok(Measurement { per_demand, peak, average, runs: n })
}
