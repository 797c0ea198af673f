//! Gap caps from the optimality theorems, evaluated pointwise in M.
//!
//! Each function returns the cap that applies at `m`; inside a region the
//! theorem declares optimal the cap is 0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gray_wyner::{mk_threshold, select_operating_point_three_file, select_operating_point_two_file, GwTuple2};
use crate::rates::Criterion;
use crate::source::{EntropyOracle, SourceModel};

/// Boundary slack for the optimal regions.
const EDGE_TOL: f64 = 1e-12;

/// A named upper bound on `R_ach − R_lb` at one memory value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cap {
    pub name: &'static str,
    pub value: f64,
}

impl Cap {
    fn new(name: &'static str, value: f64) -> Self {
        Self { name, value: value.max(0.0) }
    }

    /// The smaller of two caps (the first wins ties).
    pub fn tightest(self, other: Cap) -> Cap {
        if other.value < self.value {
            other
        } else {
            self
        }
    }
}

fn inside(m: f64, lo: f64, hi: f64) -> bool {
    m >= lo - EDGE_TOL && m <= hi + EDGE_TOL
}

/// MR peak gap to the Theorem 2 bound: (½ − 1/K)·min{ρ1, ρ2}, zero on [0, γ] ∪ [λ, ρ0+ρ1+ρ2].
pub fn cap_mr_peak_two_file(t: &GwTuple2, k: usize, m: f64) -> Cap {
    let g = t.min_private() / k as f64;
    let total = t.sum();
    let v = if inside(m, 0.0, g) || inside(m, total - 2.0 * g, total) {
        0.0
    } else {
        (0.5 - 1.0 / k as f64) * t.min_private()
    };
    Cap::new("mr-peak", v)
}

/// MR average gap to the Theorem 2 bound: (¼ − 2^−K)(ρ1 + ρ2), zero on [λ, ρ0+ρ1+ρ2].
pub fn cap_mr_avg_two_file(t: &GwTuple2, k: usize, m: f64) -> Cap {
    let g = t.min_private() / k as f64;
    let total = t.sum();
    let v = if inside(m, total - 2.0 * g, total) {
        0.0
    } else {
        (0.25 - 0.5f64.powi(k as i32)) * t.private_sum()
    };
    Cap::new("mr-avg", v)
}

/// GW-MR gap to the optimal-rate bound for two files (Theorems 8 and 9).
///
/// M_K and Δ_K are taken at the selected operating point.
pub fn cap_two_file(model: &SourceModel, k: usize, criterion: Criterion, m: f64) -> Result<Cap> {
    let t = select_operating_point_two_file(model)?;
    let mk = mk_threshold(model, k)?;
    let h = model.entropy(0b11);
    let h1g2 = model.conditional(0b01, 0b10);
    let h2g1 = model.conditional(0b10, 0b01);
    let high = inside(m, h - 2.0 * mk, h);
    Ok(match criterion {
        Criterion::Peak => {
            let v = if high || inside(m, 0.0, mk) { 0.0 } else { 0.5 * h1g2.min(h2g1) - mk };
            Cap::new("peak-gap", v)
        }
        Criterion::Average => {
            let delta = 0.5f64.powi(k as i32) * t.private_sum();
            let v = if high { 0.0 } else { 0.25 * (h1g2 + h2g1) - delta };
            Cap::new("avg-gap", v)
        }
    })
}

/// Three-file, two-receiver gap at the selected ρ̃ (Theorem 12).
pub fn theorem12_cap(model: &SourceModel, m: f64) -> Result<Cap> {
    let t = select_operating_point_three_file(model)?;
    let h = model.entropy(0b111);
    let min_pair_cond = [0b001u32, 0b010, 0b100]
        .iter()
        .map(|&i| model.conditional(0b111 & !i, i))
        .fold(f64::INFINITY, f64::min);
    let zeta = t.rho0 + 1.5 * (t.rho_p + t.rho);
    let opt_from = h - 1.5 * t.rho;
    let v = if m >= opt_from - EDGE_TOL {
        0.0
    } else if m < zeta {
        0.5 * min_pair_cond - t.rho
    } else {
        0.25 * min_pair_cond - 0.5 * t.rho
    };
    Ok(Cap::new("three-file-gap", v))
}

/// Corollary 8 cap for the structured three-file source: ¼H_u off the optimal
/// region [0, M̃] ∪ [M̃ + 3/2·H_u, H].
pub fn corollary8_cap(model: &SourceModel, m: f64) -> Result<Cap> {
    let SourceModel::Structured3 { l_v, l_u, l_x } = *model else {
        return Err(Error::Unsupported(format!("Corollary 8 cap for {model:?}")));
    };
    let m_tilde = l_v + 1.5 * l_u + 1.5 * l_x;
    let h = model.entropy(0b111);
    let v = if inside(m, 0.0, m_tilde) || inside(m, m_tilde + 1.5 * l_u, h) { 0.0 } else { 0.25 * l_u };
    Ok(Cap::new("structured3-gap", v))
}

/// Tightest applicable three-file cap.
pub fn cap_three_file(model: &SourceModel, m: f64) -> Result<Cap> {
    let cap = theorem12_cap(model, m)?;
    match model {
        SourceModel::Structured3 { .. } => Ok(cap.tightest(corollary8_cap(model, m)?)),
        _ => Ok(cap),
    }
}
