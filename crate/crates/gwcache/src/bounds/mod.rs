//! Lower bounds on the rate-memory functions and gap reporting.

mod caps;
mod cutset;
mod gap;

pub use caps::{
    cap_mr_avg_two_file, cap_mr_peak_two_file, cap_three_file, cap_two_file, corollary8_cap, theorem12_cap, Cap,
};
pub use cutset::{
    appendix_witnesses, avg_lb_two_file_cutset, cutset_sum_rate_bound, search_best_peak_bound,
    search_best_peak_bound_with, BoundInstance, CutsetSearch, Demand, DemandKind, SearchResult, Witness,
};
pub use gap::{gap_report, gap_report_with, GapReport, GapRow};

use crate::error::{Error, Result};
use crate::gray_wyner::GwTuple2;
use crate::source::{EntropyOracle, SourceModel};

fn floor0(x: f64) -> f64 {
    x.max(0.0)
}

fn need_files(model: &SourceModel, n: usize) -> Result<()> {
    model.validate()?;
    if model.num_files() != n {
        return Err(Error::Unsupported(format!("{n}-file bound for {model:?}")));
    }
    Ok(())
}

/// Theorem 7 peak pieces for any two-file entropy oracle.
pub fn peak_lb_two_file_pieces(o: &dyn EntropyOracle, m: f64) -> [f64; 3] {
    let h12 = o.entropy(0b11);
    let hmax = o.entropy(0b01).max(o.entropy(0b10));
    [h12 - 2.0 * m, 0.5 * (h12 + hmax) - m, 0.5 * (h12 - m)]
}

/// Theorem 7 average pieces for any two-file entropy oracle.
pub fn avg_lb_two_file_pieces(o: &dyn EntropyOracle, k: usize, m: f64) -> [f64; 4] {
    let h12 = o.entropy(0b11);
    let (h1, h2) = (o.entropy(0b01), o.entropy(0b10));
    let q = 0.5f64.powi(k as i32);
    [
        (1.0 - 2.0 * q) * h12 + q * (h1 + h2) - 2.0 * (1.0 - q) * m,
        0.5 * h12 + 0.25 * (h1 + h2) - m,
        0.5 * h12 + 0.25 * h1.max(h2) - 0.75 * m,
        0.5 * (h12 - m),
    ]
}

fn max_piece(pieces: &[f64]) -> f64 {
    floor0(pieces.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// Theorem 7: lower bound on the optimal peak rate, two files.
pub fn peak_lb_two_file(model: &SourceModel, m: f64) -> Result<f64> {
    need_files(model, 2)?;
    Ok(max_piece(&peak_lb_two_file_pieces(model, m)))
}

/// Theorem 7: lower bound on the optimal average rate, two files and K receivers.
pub fn avg_lb_two_file(model: &SourceModel, k: usize, m: f64) -> Result<f64> {
    need_files(model, 2)?;
    if k < 2 {
        return Err(Error::Invalid(format!("K = {k}, need K >= 2")));
    }
    Ok(max_piece(&avg_lb_two_file_pieces(model, k, m)))
}

/// The structured two-file library whose components are a tuple's descriptions.
pub fn tuple_as_model(t: &GwTuple2) -> SourceModel {
    SourceModel::Structured2 { l_v: t.rho0, l1: t.rho1, l2: t.rho2 }
}

/// Theorem 2: lower bound on the MR peak rate at tuple `t`.
pub fn mr_peak_lb(t: &GwTuple2, m: f64) -> Result<f64> {
    t.validate()?;
    Ok(max_piece(&peak_lb_two_file_pieces(&tuple_as_model(t), m)))
}

/// Theorem 2: lower bound on the MR average rate at tuple `t`.
pub fn mr_avg_lb(t: &GwTuple2, k: usize, m: f64) -> Result<f64> {
    t.validate()?;
    avg_lb_two_file(&tuple_as_model(t), k, m)
}

/// Theorem 11 pieces for any three-file entropy oracle.
pub fn peak_lb_three_file_pieces(o: &dyn EntropyOracle, m: f64) -> [f64; 4] {
    let h123 = o.entropy(0b111);
    let max_pair = [0b011, 0b101, 0b110].iter().map(|&s| o.entropy(s)).fold(0.0, f64::max);
    let max_single = [0b001, 0b010, 0b100].iter().map(|&s| o.entropy(s)).fold(0.0, f64::max);
    [
        max_pair - 2.0 * m,
        0.5 * (max_pair - m),
        (h123 - m) / 3.0,
        0.5 * (h123 + max_single) - m,
    ]
}

/// Theorem 11: lower bound on the optimal peak rate, three files and two receivers.
pub fn peak_lb_three_file(model: &SourceModel, m: f64) -> Result<f64> {
    need_files(model, 3)?;
    Ok(max_piece(&peak_lb_three_file_pieces(model, m)))
}

/// Appendix M pieces for the two-request network.
pub fn two_request_lb_pieces(rho_p: f64, m: f64) -> [f64; 3] {
    [3.0 * rho_p - 2.0 * m, 2.5 * rho_p - m, 1.5 * rho_p - 0.5 * m]
}

/// Appendix M: lower bound on the two-request network's peak rate.
pub fn two_request_lb(rho_p: f64, m: f64) -> Result<f64> {
    crate::error::check_nonneg("rhoP", rho_p)?;
    Ok(max_piece(&two_request_lb_pieces(rho_p, m)))
}

/// Closed-form optimal-rate lower bound for a model under a criterion.
pub fn opt_lb(model: &SourceModel, k: usize, criterion: crate::rates::Criterion, m: f64) -> Result<f64> {
    use crate::rates::Criterion;
    match (model.num_files(), criterion) {
        (2, Criterion::Peak) => peak_lb_two_file(model, m),
        (2, Criterion::Average) => avg_lb_two_file(model, k, m),
        (3, Criterion::Peak) if k == 2 => peak_lb_three_file(model, m),
        _ => Err(Error::Unsupported(format!("lower bound for {model:?}, K = {k}, {criterion:?}"))),
    }
}
