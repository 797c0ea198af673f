//! Closed-form achievable rate-memory curves.

use serde::{Deserialize, Serialize};

use crate::curve::RateCurve;
use crate::error::{check_nonneg, Error, Result};
use crate::gray_wyner::{
    pairwise_mixtures, select_operating_point_three_file, select_operating_point_two_file, three_file_family,
    two_file_family, GwTuple, GwTuple2, GwTuple3Sym,
};
use crate::source::{EntropyOracle, SourceModel};

/// Peak (worst-case demand) or average (uniform demand) rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Peak,
    Average,
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::Invalid(format!("K = {k}, need K >= 2")));
    }
    Ok(())
}

/// Private-sublibrary peak rate for two files of lengths ρ1, ρ2 and K receivers.
///
/// Corners: (0, s), (γ, s − 2γ), (s − 2γ, γ), (s, 0) with s = ρ1 + ρ2 and γ = min/K.
pub fn private_peak_rate_two_file(rho1: f64, rho2: f64, k: usize) -> Result<RateCurve> {
    check_nonneg("rho1", rho1)?;
    check_nonneg("rho2", rho2)?;
    check_k(k)?;
    let s = rho1 + rho2;
    let g = rho1.min(rho2) / k as f64;
    RateCurve::from_corners(vec![(0.0, s), (g, s - 2.0 * g), (s - 2.0 * g, g), (s, 0.0)])
}

/// Private-sublibrary average rate (Theorem 15 envelope).
pub fn private_avg_rate_two_file(rho1: f64, rho2: f64, k: usize) -> Result<RateCurve> {
    check_nonneg("rho1", rho1)?;
    check_nonneg("rho2", rho2)?;
    check_k(k)?;
    let s = rho1 + rho2;
    let g = rho1.min(rho2) / k as f64;
    let q = 0.5f64.powi(k as i32);
    let r0 = (1.0 - q) * s;
    RateCurve::from_corners(vec![
        (0.0, r0),
        (2.0 * g, r0 - (3.0 - 4.0 * q) * g),
        (s - 2.0 * g, g),
        (s, 0.0),
    ])
}

/// MR peak rate for two files (Theorem 4; exact for K = 2 by Corollary 1).
pub fn mr_peak_rate_two_file(t: &GwTuple2, k: usize) -> Result<RateCurve> {
    t.validate()?;
    check_k(k)?;
    let total = t.sum();
    let g = t.min_private() / k as f64;
    let lambda = total - 2.0 * g;
    RateCurve::from_corners(vec![(0.0, total), (g, total - 2.0 * g), (lambda, g), (total, 0.0)])
}

/// MR average rate for two files (Theorem 5; exact for K = 2 by Corollary 2).
pub fn mr_avg_rate_two_file(t: &GwTuple2, k: usize) -> Result<RateCurve> {
    t.validate()?;
    check_k(k)?;
    let s = t.private_sum();
    let g = t.min_private() / k as f64;
    let q = 0.5f64.powi(k as i32);
    let a0 = (1.0 - q) * s;
    let a2g = a0 - (3.0 - 4.0 * q) * g;
    RateCurve::from_corners(vec![
        (0.0, t.rho0 + a0),
        (2.0 * g, t.rho0 + a2g),
        (t.rho0 + 2.0 * g, a2g),
        (t.sum() - 2.0 * g, g),
        (t.sum(), 0.0),
    ])
}

/// MR curve for two files under either criterion.
pub fn mr_rate_two_file(t: &GwTuple2, k: usize, criterion: Criterion) -> Result<RateCurve> {
    match criterion {
        Criterion::Peak => mr_peak_rate_two_file(t, k),
        Criterion::Average => mr_avg_rate_two_file(t, k),
    }
}

/// Private-sublibrary curve under either criterion.
pub fn private_rate_two_file(rho1: f64, rho2: f64, k: usize, criterion: Criterion) -> Result<RateCurve> {
    match criterion {
        Criterion::Peak => private_peak_rate_two_file(rho1, rho2, k),
        Criterion::Average => private_avg_rate_two_file(rho1, rho2, k),
    }
}

/// Two-request network (three independent files of length ρ′, two receivers, two files each).
pub fn two_request_rate(rho_p: f64) -> Result<RateCurve> {
    check_nonneg("rhoP", rho_p)?;
    RateCurve::from_corners(vec![
        (0.0, 3.0 * rho_p),
        (0.5 * rho_p, 2.0 * rho_p),
        (rho_p, 1.5 * rho_p),
        (1.5 * rho_p, rho_p),
        (3.0 * rho_p, 0.0),
    ])
}

/// Three private files of length ρ, two receivers: 2ρ − μ, then ρ − μ/3.
pub fn single_request_three_file_rate(rho: f64) -> Result<RateCurve> {
    check_nonneg("rho", rho)?;
    RateCurve::from_corners(vec![(0.0, 2.0 * rho), (1.5 * rho, 0.5 * rho), (3.0 * rho, 0.0)])
}

/// Theorem 10: MR peak rate for three files and two receivers.
pub fn mr_peak_rate_three_file(t: &GwTuple3Sym) -> Result<RateCurve> {
    t.validate()?;
    let r0 = t.rho0 + 3.0 * t.rho_p + 2.0 * t.rho;
    let zeta = t.rho0 + 1.5 * (t.rho_p + t.rho);
    let chi = t.rho0 + 3.0 * t.rho_p + 1.5 * t.rho;
    RateCurve::from_corners(vec![
        (0.0, r0),
        (0.5 * t.rho_p, r0 - t.rho_p),
        (zeta, t.rho_p + 0.5 * t.rho),
        (chi, 0.5 * t.rho),
        (t.sum(), 0.0),
    ])
}

/// Correlation-unaware baseline: the private-sublibrary scheme applied to the raw files.
pub fn correlation_unaware_curve(model: &SourceModel, k: usize, criterion: Criterion) -> Result<RateCurve> {
    model.validate()?;
    match model.num_files() {
        2 => private_rate_two_file(model.entropy(0b01), model.entropy(0b10), k, criterion),
        _ => {
            if k != 2 || criterion != Criterion::Peak {
                return Err(Error::Unsupported("three-file baseline needs K = 2 and the peak criterion".into()));
            }
            let hx = model.entropy(0b001);
            single_request_three_file_rate(hx)
        }
    }
}

/// The GW-MR rate: pointwise infimum of the MR rate over candidate Gray-Wyner tuples.
///
/// Candidate 0 is always the analytically selected operating point.
#[derive(Debug, Clone)]
pub struct GwmrCurve {
    candidates: Vec<(GwTuple, RateCurve)>,
    max_m: f64,
    upper_bound: bool,
}

impl GwmrCurve {
    pub fn candidates(&self) -> &[(GwTuple, RateCurve)] {
        &self.candidates
    }

    pub fn selected(&self) -> (&GwTuple, &RateCurve) {
        (&self.candidates[0].0, &self.candidates[0].1)
    }

    /// Library entropy H(all files): the right end of the domain.
    pub fn max_m(&self) -> f64 {
        self.max_m
    }

    /// True when the underlying MR curves are upper bounds (K > 2).
    pub fn is_upper_bound(&self) -> bool {
        self.upper_bound
    }

    /// Best candidate at `m` as (index, rate). Ties go to the lowest index.
    pub fn argmin(&self, m: f64) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, (_, c)) in self.candidates.iter().enumerate() {
            let r = c.eval_clamped(m).max(0.0);
            if r < best.1 - 1e-15 {
                best = (i, r);
            }
        }
        best
    }

    pub fn eval(&self, m: f64) -> Result<f64> {
        if !(-1e-12..=self.max_m + 1e-12).contains(&m) {
            return Err(Error::OutOfRange { name: "M", value: m, range: "[0, H(library)]" });
        }
        Ok(self.argmin(m).1)
    }

    /// Memory sharing across candidate tuples: the lower convex envelope of all
    /// candidate corners, restricted to [0, H].
    pub fn envelope(&self) -> Result<RateCurve> {
        let mut pts: Vec<(f64, f64)> = self
            .candidates
            .iter()
            .flat_map(|(_, c)| c.points().iter().copied())
            .filter(|p| p.0 <= self.max_m + 1e-12)
            .collect();
        pts.push((self.max_m, 0.0));
        RateCurve::from_corners(pts)
    }
}

/// GW-MR curve for a supported model, K and criterion.
///
/// Two files: the selected point plus the family sweep. Three files (K = 2,
/// peak only): all pairwise mixtures of the family on a 1e-2 grid.
pub fn gwmr_curve(model: &SourceModel, k: usize, criterion: Criterion) -> Result<GwmrCurve> {
    check_k(k)?;
    model.validate()?;
    let max_m = model.entropy(model.all());
    let candidates = match model.num_files() {
        2 => {
            let _ = select_operating_point_two_file(model)?;
            two_file_family(model)?
                .into_iter()
                .map(|t| Ok((GwTuple::Two(t), mr_rate_two_file(&t, k, criterion)?)))
                .collect::<Result<Vec<_>>>()?
        }
        _ => {
            if k != 2 || criterion != Criterion::Peak {
                return Err(Error::Unsupported("three-file GW-MR needs K = 2 and the peak criterion".into()));
            }
            let selected = select_operating_point_three_file(model)?;
            std::iter::once(selected)
                .chain(pairwise_mixtures(&three_file_family(model)?, 100))
                .map(|t| Ok((GwTuple::Three(t), mr_peak_rate_three_file(&t)?)))
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(GwmrCurve { candidates, max_m, upper_bound: k > 2 })
}
