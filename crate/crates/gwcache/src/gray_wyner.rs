//! Gray-Wyner rate tuples, the achievable families used for the paper's
//! sources, and the operating-point rules.

use serde::{Deserialize, Serialize};

use crate::error::{check_nonneg, check_range, Error, Result};
use crate::source::{binary_entropy, inv_binary_entropy, xlog2x, EntropyOracle, SourceModel};

const SUM_TOL: f64 = 1e-9;

/// Two-file Gray-Wyner rate point (ρ0, ρ1, ρ2) in bits per symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GwTuple2 {
    pub rho0: f64,
    pub rho1: f64,
    pub rho2: f64,
}

impl GwTuple2 {
    pub fn new(rho0: f64, rho1: f64, rho2: f64) -> Result<Self> {
        let t = Self { rho0, rho1, rho2 };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        check_nonneg("rho0", self.rho0)?;
        check_nonneg("rho1", self.rho1)?;
        check_nonneg("rho2", self.rho2)
    }

    pub fn sum(&self) -> f64 {
        self.rho0 + self.rho1 + self.rho2
    }

    pub fn private_sum(&self) -> f64 {
        self.rho1 + self.rho2
    }

    pub fn min_private(&self) -> f64 {
        self.rho1.min(self.rho2)
    }

    pub fn max_private(&self) -> f64 {
        self.rho1.max(self.rho2)
    }
}

/// Symmetric three-file tuple: ρ123 = `rho0`, ρ12 = ρ13 = ρ23 = `rho_p`, ρ1 = ρ2 = ρ3 = `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GwTuple3Sym {
    pub rho0: f64,
    #[serde(rename = "rhoP")]
    pub rho_p: f64,
    pub rho: f64,
}

impl GwTuple3Sym {
    pub fn new(rho0: f64, rho_p: f64, rho: f64) -> Result<Self> {
        let t = Self { rho0, rho_p, rho };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        check_nonneg("rho0", self.rho0)?;
        check_nonneg("rhoP", self.rho_p)?;
        check_nonneg("rho", self.rho)
    }

    pub fn sum(&self) -> f64 {
        self.rho0 + 3.0 * self.rho_p + 3.0 * self.rho
    }

    fn mix(&self, other: &Self, w: f64) -> Self {
        Self {
            rho0: w * self.rho0 + (1.0 - w) * other.rho0,
            rho_p: w * self.rho_p + (1.0 - w) * other.rho_p,
            rho: w * self.rho + (1.0 - w) * other.rho,
        }
    }
}

/// Either tuple shape, for APIs that accept both.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GwTuple {
    Two(GwTuple2),
    Three(GwTuple3Sym),
}

/// p1 = ½(1 − √(1 − 2p0)), the crossover of the symmetric Wyner channel at the sum-tight corner.
pub fn dsbs_p1(p0: f64) -> Result<f64> {
    check_range("p0", p0, 0.0, 0.5, "[0, 0.5]")?;
    Ok(0.5 * (1.0 - (1.0 - 2.0 * p0).max(0.0).sqrt()))
}

/// Minimal common rate ρ0 on the symmetric plane ρ1 = ρ2 = ρ of the DSBS Gray-Wyner region.
///
/// Below h(p1) the sum-rate face gives `1 + h(p0) − 2ρ`; above it the Wyner
/// channel curve f(ρ) applies.
pub fn dsbs_wyner_boundary(p0: f64, rho: f64) -> Result<f64> {
    check_range("p0", p0, 0.0, 0.5, "[0, 0.5]")?;
    check_range("rho", rho, 0.0, 1.0, "[0, 1]")?;
    let hp0 = binary_entropy(p0)?;
    let knee = binary_entropy(dsbs_p1(p0)?)?;
    if rho < knee {
        return Ok(1.0 + hp0 - 2.0 * rho);
    }
    let q = inv_binary_entropy(rho)?;
    let half = p0 / 2.0;
    let f = 1.0 + hp0 + p0 * if p0 > 0.0 { (p0 / 2.0).log2() } else { 0.0 }
        + xlog2x(q - half)
        + xlog2x(1.0 - q - half);
    Ok(f.max(0.0))
}

/// Grid step of the family sweeps used by the GW-MR infimum.
pub const FAMILY_SWEEP_STEP: f64 = 1e-2;

/// Human-readable name of the achievable family implemented for a model.
pub fn family_name(model: &SourceModel) -> &'static str {
    match model {
        SourceModel::Dsbs { .. } => "Wyner symmetric plane (rho1 = rho2, rho0 on the DSBS boundary)",
        SourceModel::Structured2 { .. } | SourceModel::Structured3 { .. } => "component decomposition",
        SourceModel::TripleBsc { .. } => "convex hull of the four 3-DMS points",
    }
}

/// Remark 3 rule: maximize min{ρ1, ρ2} subject to ρ0 + ρ1 + ρ2 = H(X1, X2).
pub fn select_operating_point_two_file(model: &SourceModel) -> Result<GwTuple2> {
    model.validate()?;
    match *model {
        SourceModel::Dsbs { p0 } => {
            let rho = binary_entropy(dsbs_p1(p0)?)?;
            let h = 1.0 + binary_entropy(p0)?;
            Ok(GwTuple2 { rho0: (h - 2.0 * rho).max(0.0), rho1: rho, rho2: rho })
        }
        SourceModel::Structured2 { l_v, l1, l2 } => Ok(GwTuple2 { rho0: l_v, rho1: l1, rho2: l2 }),
        _ => Err(Error::Unsupported(format!("two-file operating point for {model:?}"))),
    }
}

/// Candidate tuples of the implemented two-file family: the selected point
/// followed by a sweep of the family at [`FAMILY_SWEEP_STEP`].
pub fn two_file_family(model: &SourceModel) -> Result<Vec<GwTuple2>> {
    let selected = select_operating_point_two_file(model)?;
    let mut out = vec![selected];
    if let SourceModel::Dsbs { p0 } = *model {
        let n = (1.0 / FAMILY_SWEEP_STEP).round() as usize;
        for i in 0..=n {
            let rho = i as f64 / n as f64;
            let rho0 = dsbs_wyner_boundary(p0, rho)?;
            out.push(GwTuple2 { rho0, rho1: rho, rho2: rho });
        }
    }
    Ok(out)
}

/// M_K = (1/K) min{ρ1, ρ2} at the selected operating point.
pub fn mk_threshold(model: &SourceModel, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::Invalid(format!("K = {k}, need K >= 2")));
    }
    Ok(select_operating_point_two_file(model)?.min_private() / k as f64)
}

/// The four symmetric achievable points of the 3-DMS quoted in §IX.B.
pub fn three_dms_achievable_points(model: &SourceModel) -> Result<[GwTuple3Sym; 4]> {
    if !matches!(model, SourceModel::TripleBsc { .. }) {
        return Err(Error::Unsupported(format!("3-DMS points for {model:?}")));
    }
    model.validate()?;
    let h123 = model.entropy(0b111);
    let hx = model.entropy(0b001);
    let h2g1 = model.entropy(0b011) - hx;
    let h3g12 = h123 - model.entropy(0b011);
    Ok([
        GwTuple3Sym { rho0: h123, rho_p: 0.0, rho: 0.0 },
        GwTuple3Sym { rho0: 0.0, rho_p: 0.0, rho: hx },
        GwTuple3Sym { rho0: hx, rho_p: h2g1 / 3.0, rho: h3g12 / 3.0 },
        GwTuple3Sym { rho0: hx, rho_p: 0.0, rho: 2.0 * h2g1 / 3.0 },
    ])
}

/// Pairwise convex mixtures of `points` on a grid with `n` steps, vertices included.
pub fn pairwise_mixtures(points: &[GwTuple3Sym], n: usize) -> Vec<GwTuple3Sym> {
    let mut out = points.to_vec();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            for s in 1..n {
                out.push(points[i].mix(&points[j], s as f64 / n as f64));
            }
        }
    }
    out
}

/// Picks the sum-tight candidate with the largest ρ (Theorem 12's ρ̃).
///
/// Convex mixtures are explored on a 1e-3 grid between every pair of points.
pub fn select_from_candidates(points: &[GwTuple3Sym], h123: f64) -> Result<GwTuple3Sym> {
    pairwise_mixtures(points, 1000)
        .into_iter()
        .filter(|t| (t.sum() - h123).abs() <= SUM_TOL)
        .fold(None::<GwTuple3Sym>, |best, t| match best {
            Some(b) if b.rho >= t.rho => Some(b),
            _ => Some(t),
        })
        .ok_or(Error::NoSumTightCandidate(points.len()))
}

/// Candidate tuples of the implemented three-file family.
pub fn three_file_family(model: &SourceModel) -> Result<Vec<GwTuple3Sym>> {
    model.validate()?;
    match *model {
        SourceModel::TripleBsc { .. } => Ok(three_dms_achievable_points(model)?.to_vec()),
        SourceModel::Structured3 { l_v, l_u, l_x } => Ok(vec![GwTuple3Sym { rho0: l_v, rho_p: l_u, rho: l_x }]),
        _ => Err(Error::Unsupported(format!("three-file family for {model:?}"))),
    }
}

/// Theorem 12 operating point for a three-file model.
pub fn select_operating_point_three_file(model: &SourceModel) -> Result<GwTuple3Sym> {
    let points = three_file_family(model)?;
    select_from_candidates(&points, model.entropy(0b111))
}

/// Outcome of a cut-set membership check.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub ok: bool,
    pub violated: Vec<String>,
}

/// Checks the cut-set conditions a Gray-Wyner tuple must satisfy for `model`.
///
/// Two files: ρ0 + ρi ≥ H(Xi) and ρ0 + ρ1 + ρ2 ≥ H(X1, X2).
/// Three files (symmetric): the sum, pair and single cuts of Appendix N.
pub fn verify_membership(model: &SourceModel, tuple: &GwTuple) -> Result<Membership> {
    model.validate()?;
    let mut violated = Vec::new();
    let mut check = |name: String, lhs: f64, rhs: f64| {
        if lhs > rhs + SUM_TOL {
            violated.push(format!("{name}: {lhs:.6} > {rhs:.6}"));
        }
    };
    match (model.num_files(), tuple) {
        (2, GwTuple::Two(t)) => {
            t.validate()?;
            check("sum cut H(X1,X2) <= rho0+rho1+rho2".into(), model.entropy(0b11), t.sum());
            check("H(X1) <= rho0+rho1".into(), model.entropy(0b01), t.rho0 + t.rho1);
            check("H(X2) <= rho0+rho2".into(), model.entropy(0b10), t.rho0 + t.rho2);
        }
        (3, GwTuple::Three(t)) => {
            t.validate()?;
            check("sum cut H(X1,X2,X3) <= rho0+3rho'+3rho".into(), model.entropy(0b111), t.sum());
            for (i, j) in [(1, 2), (1, 3), (2, 3)] {
                let mask = (1 << (i - 1)) | (1 << (j - 1));
                check(
                    format!("pair cut H(X{i},X{j}) <= rho0+3rho'+2rho"),
                    model.entropy(mask),
                    t.rho0 + 3.0 * t.rho_p + 2.0 * t.rho,
                );
            }
            for i in 1..=3 {
                check(
                    format!("single cut H(X{i}) <= rho0+2rho'+rho"),
                    model.entropy(1 << (i - 1)),
                    t.rho0 + 2.0 * t.rho_p + t.rho,
                );
            }
        }
        _ => {
            return Err(Error::Invalid(format!(
                "tuple shape does not match a {}-file model",
                model.num_files()
            )))
        }
    }
    Ok(Membership { ok: violated.is_empty(), violated })
}

/// Knee locations compared in Lemma 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma3Points {
    pub eta: f64,
    pub zeta: f64,
    pub eta_rho: f64,
    pub zeta_rho: f64,
    pub chi_rho: f64,
}

impl Lemma3Points {
    /// η_ρ ≤ η ≤ min{ζ, ζ_ρ} ≤ max{ζ, ζ_ρ} ≤ χ_ρ, with slack `tol`.
    pub fn ordered(&self, tol: f64) -> bool {
        let lo = self.zeta.min(self.zeta_rho);
        let hi = self.zeta.max(self.zeta_rho);
        self.eta_rho <= self.eta + tol && self.eta <= lo + tol && hi <= self.chi_rho + tol
    }
}

pub fn lemma3_points(oracle: &dyn EntropyOracle, t: &GwTuple3Sym) -> Lemma3Points {
    let h123 = oracle.entropy(0b111);
    let max_pair = [0b011, 0b101, 0b110].iter().map(|&m| oracle.entropy(m)).fold(0.0, f64::max);
    let max_single = [0b001, 0b010, 0b100].iter().map(|&m| oracle.entropy(m)).fold(0.0, f64::max);
    Lemma3Points {
        eta: max_pair - 0.5 * h123 - 0.5 * max_single,
        zeta: 0.25 * h123 + 0.75 * max_single,
        eta_rho: 0.5 * t.rho_p,
        zeta_rho: t.rho0 + 1.5 * (t.rho_p + t.rho),
        chi_rho: t.rho0 + 3.0 * t.rho_p + 1.5 * t.rho,
    }
}
