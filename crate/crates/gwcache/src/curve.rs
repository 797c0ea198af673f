//! Piecewise-linear, convex, nonincreasing rate-memory curves.

use serde::Serialize;

use crate::error::{Error, Result};

/// Slack used when validating slopes and domains.
pub const CURVE_TOL: f64 = 1e-9;

/// A rate-memory function given by its breakpoints `(M, R)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateCurve {
    points: Vec<(f64, f64)>,
}

impl RateCurve {
    /// Validates and wraps a breakpoint list.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidCurve("no breakpoints".into()));
        }
        for w in points.windows(2) {
            let ((m0, r0), (m1, r1)) = (w[0], w[1]);
            if !(m1 > m0) {
                return Err(Error::InvalidCurve(format!("M not strictly increasing at {m0} -> {m1}")));
            }
            if r1 > r0 + CURVE_TOL {
                return Err(Error::InvalidCurve(format!("R increases on [{m0}, {m1}]")));
            }
        }
        for w in points.windows(3) {
            let s0 = slope(w[0], w[1]);
            let s1 = slope(w[1], w[2]);
            if s1 < s0 - CURVE_TOL {
                return Err(Error::InvalidCurve(format!("not convex at M = {}", w[1].0)));
            }
        }
        Ok(Self { points })
    }

    /// Builds a curve from candidate corner points, taking their lower convex envelope.
    ///
    /// Unlike [`lower_convex_envelope`] this accepts repeated memory values
    /// (the lowest rate wins), which lets closed-form curves pass degenerate
    /// knees such as γ = 0 straight through.
    pub fn from_corners(mut points: Vec<(f64, f64)>) -> Result<Self> {
        points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        points.dedup_by(|b, a| (b.0 - a.0).abs() <= 1e-12);
        Self::new(hull(&points))
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn min_m(&self) -> f64 {
        self.points[0].0
    }

    pub fn max_m(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    /// Linear interpolation; errors outside the breakpoint range.
    pub fn eval(&self, m: f64) -> Result<f64> {
        if m < self.min_m() - 1e-12 || m > self.max_m() + 1e-12 || m.is_nan() {
            return Err(Error::OutOfRange {
                name: "M",
                value: m,
                range: "curve domain",
            });
        }
        Ok(self.interp(m))
    }

    /// Evaluation with the curve held flat outside its domain.
    pub fn eval_clamped(&self, m: f64) -> f64 {
        self.interp(m.clamp(self.min_m(), self.max_m()))
    }

    fn interp(&self, m: f64) -> f64 {
        let pts = &self.points;
        if pts.len() == 1 || m <= pts[0].0 {
            return pts[0].1;
        }
        let i = pts.partition_point(|p| p.0 < m);
        if i >= pts.len() {
            return pts[pts.len() - 1].1;
        }
        let (m0, r0) = pts[i - 1];
        let (m1, r1) = pts[i];
        r0 + (r1 - r0) * (m - m0) / (m1 - m0)
    }

    /// Slopes of consecutive segments.
    pub fn slopes(&self) -> Vec<f64> {
        self.points.windows(2).map(|w| slope(w[0], w[1])).collect()
    }

    /// Applies `(M, R) -> (M + dm, R + dr)` to every breakpoint.
    pub fn shifted(&self, dm: f64, dr: f64) -> Self {
        Self { points: self.points.iter().map(|&(m, r)| (m + dm, r + dr)).collect() }
    }
}

fn slope(a: (f64, f64), b: (f64, f64)) -> f64 {
    (b.1 - a.1) / (b.0 - a.0)
}

/// Lower hull of points sorted by M. Collinear middle points are dropped.
fn hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 1e-12 * (1.0 + (p.0 - a.0).abs()) {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    out
}

/// Lower convex envelope (memory sharing) of a set of achievable points.
///
/// Requires at least two points with distinct memory values. Points on the
/// hull keep their exact coordinates; points on a hull edge are dropped.
pub fn lower_convex_envelope(points: &[(f64, f64)]) -> Result<RateCurve> {
    if points.len() < 2 {
        return Err(Error::InvalidCurve(format!("need at least 2 points, got {}", points.len())));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidCurve("duplicate memory value".into()));
    }
    RateCurve::new(hull(&sorted))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_breakpoints() {
        assert!(RateCurve::new(vec![]).is_err());
        assert!(RateCurve::new(vec![(0.0, 1.0), (0.0, 0.5)]).is_err());
        assert!(RateCurve::new(vec![(0.0, 1.0), (1.0, 2.0)]).is_err());
        // concave kink
        assert!(RateCurve::new(vec![(0.0, 2.0), (1.0, 1.8), (2.0, 0.0)]).is_err());
    }

    #[test]
    fn corners_collapse_repeated_memories() {
        let c = RateCurve::from_corners(vec![(0.0, 2.0), (0.0, 1.5), (1.0, 0.5), (1.5, 0.0)]).unwrap();
        assert_eq!(c.points()[0], (0.0, 1.5));
        assert_eq!(c.eval_clamped(9.0), 0.0);
        assert!(c.eval(-0.1).is_err());
        assert_eq!(c.shifted(1.0, 0.5).points()[0], (1.0, 2.0));
    }
}
