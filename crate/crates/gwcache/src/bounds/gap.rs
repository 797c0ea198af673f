//! Gap reports: achievable rate against a lower bound over an M grid.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::Exec;

/// Gaps at or below this are treated as zero (declared optimal).
pub const OPT_TOL: f64 = 1e-9;

const BISECT_STEPS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapRow {
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "R_ach")]
    pub r_ach: f64,
    #[serde(rename = "R_lb")]
    pub r_lb: f64,
    pub gap: f64,
    pub cap: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub rows: Vec<GapRow>,
    pub max_gap: f64,
    /// Memory value of the largest gap.
    pub argmax: f64,
    /// Maximal intervals where the gap is zero, endpoints refined by bisection.
    pub optimal_regions: Vec<(f64, f64)>,
    /// Memory values where the gap exceeds the cap or the bound exceeds the rate.
    pub violations: Vec<f64>,
}

impl GapReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// True when `m` lies in one of the optimal regions (with slack `tol`).
    pub fn is_optimal_at(&self, m: f64, tol: f64) -> bool {
        self.optimal_regions.iter().any(|&(a, b)| m >= a - tol && m <= b + tol)
    }
}

/// Builds a gap report with the default executor.
pub fn gap_report<A, L, C>(achievable: A, lower: L, cap: C, grid: &[f64]) -> Result<GapReport>
where
    A: Fn(f64) -> f64 + Sync + Send,
    L: Fn(f64) -> f64 + Sync + Send,
    C: Fn(f64) -> f64 + Sync + Send,
{
    gap_report_with(achievable, lower, cap, grid, Exec::default())
}

/// Evaluates `achievable − lower` on `grid` (strictly increasing) and checks it
/// against `cap` at every point.
///
/// A row fails when the gap exceeds the cap by more than [`OPT_TOL`] or when
/// the lower bound exceeds the achievable rate by more than that.
pub fn gap_report_with<A, L, C>(achievable: A, lower: L, cap: C, grid: &[f64], exec: Exec) -> Result<GapReport>
where
    A: Fn(f64) -> f64 + Sync + Send,
    L: Fn(f64) -> f64 + Sync + Send,
    C: Fn(f64) -> f64 + Sync + Send,
{
    if grid.is_empty() {
        return Err(Error::Invalid("empty memory grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|m| !m.is_finite()) {
        return Err(Error::Invalid("memory grid must be finite and strictly increasing".into()));
    }
    let rows: Vec<GapRow> = exec.map(grid, |&m| {
        let r_ach = achievable(m);
        let r_lb = lower(m);
        let gap = r_ach - r_lb;
        let c = cap(m);
        GapRow { m, r_ach, r_lb, gap, cap: c, pass: gap <= c + OPT_TOL && gap >= -OPT_TOL }
    });
    if rows.iter().any(|r| !r.r_ach.is_finite() || !r.r_lb.is_finite()) {
        return Err(Error::Invalid("rate or bound not finite on the grid (domain mismatch)".into()));
    }

    let (mut max_gap, mut argmax) = (f64::NEG_INFINITY, grid[0]);
    for r in &rows {
        if r.gap > max_gap {
            max_gap = r.gap;
            argmax = r.m;
        }
    }

    let is_opt = |m: f64| achievable(m) - lower(m) <= OPT_TOL;
    // moves from an optimal point `good` toward a non-optimal `bad`
    let refine = |mut good: f64, mut bad: f64| {
        for _ in 0..BISECT_STEPS {
            let mid = 0.5 * (good + bad);
            if is_opt(mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good
    };
    let mut optimal_regions = Vec::new();
    let mut i = 0;
    while i < rows.len() {
        if rows[i].gap > OPT_TOL {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < rows.len() && rows[i + 1].gap <= OPT_TOL {
            i += 1;
        }
        let lo = if start > 0 { refine(rows[start].m, rows[start - 1].m) } else { rows[start].m };
        let hi = if i + 1 < rows.len() { refine(rows[i].m, rows[i + 1].m) } else { rows[i].m };
        optimal_regions.push((lo, hi));
        i += 1;
    }

    let violations = rows.iter().filter(|r| !r.pass).map(|r| r.m).collect();
    Ok(GapReport { rows, max_gap, argmax, optimal_regions, violations })
}
