//! Splitting the cache across sublibraries.
//!
//! Two files: water-filling between the LFU-cached common description (slope
//! −1) and the private curve. Three files: the region-wise solution of the
//! Appendix L linear program.

use serde::Serialize;

use crate::curve::RateCurve;
use crate::error::{check_range, Result};
use crate::gray_wyner::{GwTuple2, GwTuple3Sym};
use crate::rates::{single_request_three_file_rate, two_request_rate};

const SLOPE_TOL: f64 = 1e-12;

/// Cache encoder threshold M*: the first breakpoint from which the curve
/// descends more slowly than the common sublibrary (|slope| < 1).
///
/// Returns the right endpoint when no such segment exists.
pub fn cache_threshold(curve: &RateCurve) -> f64 {
    let pts = curve.points();
    for (i, s) in curve.slopes().iter().enumerate() {
        if s.abs() < 1.0 - SLOPE_TOL {
            return pts[i].0;
        }
    }
    curve.max_m()
}

/// Two-file split: μ0 bits/symbol of the common description and μ of the private ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Allocation2 {
    pub mu0: f64,
    pub mu: f64,
}

/// Three-file split across L3 (μ0), L2 (μ′) and L1 (μ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Allocation3 {
    pub mu0: f64,
    #[serde(rename = "muP")]
    pub mu_p: f64,
    pub mu: f64,
}

/// Appendix A allocation for a given private-sublibrary curve.
pub fn allocate_two_file(m: f64, t: &GwTuple2, private: &RateCurve) -> Result<Allocation2> {
    t.validate()?;
    let total = t.sum();
    check_range("M", m, 0.0, total + 1e-12, "[0, rho0+rho1+rho2]")?;
    let m = m.min(total);
    let s = t.private_sum();
    let m_star = cache_threshold(private).min(s);
    let a = if m < m_star {
        Allocation2 { mu0: (m - s).max(0.0), mu: m.min(s) }
    } else if m <= t.rho0 + m_star {
        Allocation2 { mu0: m - m_star, mu: m_star }
    } else {
        Allocation2 { mu0: t.rho0, mu: (m - t.rho0).min(s) }
    };
    Ok(a)
}

/// Total rate ρ0 − μ0 + R_private(μ) of an allocation.
pub fn composed_rate_two_file(t: &GwTuple2, private: &RateCurve, a: &Allocation2) -> f64 {
    t.rho0 - a.mu0 + private.eval_clamped(a.mu)
}

/// §VII.A allocation for the symmetric three-file tuple.
///
/// L2 takes memory up to 3/2 ρ′; then L3 (LFU) and L1 share the slope −1 region
/// in that order; then L2 is filled; the remainder goes to L1.
pub fn allocate_three_file(m: f64, t: &GwTuple3Sym) -> Result<Allocation3> {
    t.validate()?;
    let total = t.sum();
    check_range("M", m, 0.0, total + 1e-12, "[0, rho0+3rho'+3rho]")?;
    let m = m.min(total);
    let l2_first = 1.5 * t.rho_p;
    let zeta = t.rho0 + 1.5 * (t.rho_p + t.rho);
    let chi = t.rho0 + 3.0 * t.rho_p + 1.5 * t.rho;
    let a = if m <= l2_first {
        Allocation3 { mu0: 0.0, mu_p: m, mu: 0.0 }
    } else if m <= zeta {
        let rest = m - l2_first;
        let mu0 = rest.min(t.rho0);
        Allocation3 { mu0, mu_p: l2_first, mu: (rest - mu0).min(1.5 * t.rho) }
    } else if m <= chi {
        Allocation3 { mu0: t.rho0, mu_p: m - t.rho0 - 1.5 * t.rho, mu: 1.5 * t.rho }
    } else {
        Allocation3 { mu0: t.rho0, mu_p: 3.0 * t.rho_p, mu: (m - t.rho0 - 3.0 * t.rho_p).min(3.0 * t.rho) }
    };
    Ok(a)
}

/// Rate of a three-file allocation: (ρ0 − μ0) + R_L2(μ′) + R_L1(μ).
pub fn composed_rate_three_file(t: &GwTuple3Sym, a: &Allocation3) -> Result<f64> {
    let l2 = two_request_rate(t.rho_p)?;
    let l1 = single_request_three_file_rate(t.rho)?;
    Ok(t.rho0 - a.mu0 + l2.eval_clamped(a.mu_p) + l1.eval_clamped(a.mu))
}
