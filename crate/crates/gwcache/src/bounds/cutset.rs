//! The general cut-set sum-rate rule (Theorem 13) and an exhaustive search
//! over consecutive-demand instances.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::Exec;
use crate::source::{EntropyOracle, EntropyTable};

/// One demand: for each receiver, the bitmask of files it requests.
///
/// Single-request networks use one bit per receiver; the two-request network
/// uses two.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Demand(pub Vec<u32>);

impl Demand {
    /// Single-request demand from 1-based file indices.
    pub fn files(files: &[usize]) -> Self {
        Demand(files.iter().map(|&f| 1 << (f - 1)).collect())
    }

    /// Multi-request demand from per-receiver lists of 1-based file indices.
    pub fn sets(sets: &[&[usize]]) -> Self {
        Demand(sets.iter().map(|s| s.iter().fold(0, |m, &f| m | 1 << (f - 1))).collect())
    }

    pub fn receivers(&self) -> usize {
        self.0.len()
    }

    /// Files requested by the receivers in `subset` (bit k-1 is receiver r_k).
    pub fn requested(&self, subset: u32) -> u32 {
        self.0
            .iter()
            .enumerate()
            .filter(|(k, _)| subset >> k & 1 == 1)
            .fold(0, |acc, (_, &f)| acc | f)
    }

    /// Number of distinct request sets.
    pub fn distinct(&self) -> usize {
        let mut v = self.0.clone();
        v.sort_unstable();
        v.dedup();
        v.len()
    }
}

fn fmt_files(mask: u32) -> String {
    (0..32)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| (b + 1).to_string())
        .collect::<Vec<_>>()
        .join("+")
}

fn fmt_receivers(mask: u32) -> String {
    let names: Vec<String> = (0..32).filter(|b| mask >> b & 1 == 1).map(|b| format!("r{}", b + 1)).collect();
    format!("{{{}}}", names.join(" "))
}

impl fmt::Display for Demand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|&m| fmt_files(m)).collect();
        write!(f, "({})", parts.join(" "))
    }
}

/// ν consecutive demands with one receiver subset each.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BoundInstance {
    pub demands: Vec<Demand>,
    /// Receiver subsets S_i as bitmasks.
    pub subsets: Vec<u32>,
}

impl BoundInstance {
    pub fn new(demands: Vec<Demand>, subsets: Vec<u32>) -> Self {
        Self { demands, subsets }
    }

    pub fn nu(&self) -> usize {
        self.demands.len()
    }

    /// Conditioning file set of step `i`: files requested under earlier demands
    /// j < i by receivers in S_i ∩ S_j.
    pub fn conditioning(&self, i: usize) -> u32 {
        (0..i).fold(0, |acc, j| acc | self.demands[j].requested(self.subsets[i] & self.subsets[j]))
    }

    /// True when every earlier subset that meets S_i lies inside it.
    ///
    /// The conditioning sets 𝔛 only collect files requested by the overlap
    /// S_i ∩ S_j, so when an earlier S_j sticks out of S_i the sum can count
    /// information twice. On independent files such instances exceed the
    /// achievable rate (e.g. ν = 3, d = (2 1)|(1 2)|(1 2), S = {r1 r2}|{r2}|{r1}
    /// gives 2/3 at N = K = 2, M = 1 where ½ is achievable), so the search
    /// skips them.
    pub fn is_admissible(&self) -> bool {
        (0..self.nu()).all(|i| {
            (0..i).all(|j| self.subsets[i] & self.subsets[j] == 0 || self.subsets[j] & !self.subsets[i] == 0)
        })
    }

    fn validate(&self, n_files: usize) -> Result<()> {
        if self.demands.is_empty() || self.demands.len() != self.subsets.len() {
            return Err(Error::Invalid(format!(
                "{} demands vs {} subsets",
                self.demands.len(),
                self.subsets.len()
            )));
        }
        let k = self.demands[0].receivers();
        let file_mask = (1u32 << n_files) - 1;
        for (d, &s) in self.demands.iter().zip(&self.subsets) {
            if d.receivers() != k {
                return Err(Error::Invalid("demands of different lengths".into()));
            }
            if d.0.iter().any(|&f| f == 0 || f & !file_mask != 0) {
                return Err(Error::Invalid(format!("demand {d} outside {n_files} files")));
            }
            if s == 0 || s >> k != 0 {
                return Err(Error::Invalid(format!("receiver subset {s:#b} for K = {k}")));
            }
        }
        Ok(())
    }

    /// Sum-rate bound as `constant − slope·M`.
    fn line(&self, o: &dyn EntropyOracle) -> (f64, u32) {
        let mut c = 0.0;
        let mut s_tilde = 0u32;
        let mut union_d = 0u32;
        for i in 0..self.nu() {
            let d_i = self.demands[i].requested(self.subsets[i]);
            let cond = self.conditioning(i);
            c += o.entropy(d_i | cond) - o.entropy(cond);
            s_tilde |= self.subsets[i];
            union_d |= d_i;
        }
        let union_tilde = self.demands.iter().fold(0, |acc, d| acc | d.requested(s_tilde));
        c += o.entropy(union_tilde) - o.entropy(union_d);
        (c, s_tilde.count_ones())
    }
}

impl fmt::Display for BoundInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: Vec<String> = self.demands.iter().map(|d| d.to_string()).collect();
        let s: Vec<String> = self.subsets.iter().map(|&m| fmt_receivers(m)).collect();
        write!(f, "nu={}; d={}; S={}", self.nu(), d.join("|"), s.join("|"))
    }
}

/// Theorem 13 right-hand side for instance `inst` at cache size `m`.
pub fn cutset_sum_rate_bound(oracle: &dyn EntropyOracle, inst: &BoundInstance, m: f64) -> Result<f64> {
    inst.validate(oracle.num_files())?;
    let (c, s) = inst.line(oracle);
    Ok(c - s as f64 * m)
}

/// Which demands the search ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DemandKind {
    /// Each receiver requests one file.
    SingleFile,
    /// Each receiver requests two of three files (the two-request network).
    TwoRequest,
}

/// Best normalized bound and the instance attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    /// max(0, best sum bound / ν).
    pub value: f64,
    /// Best sum bound / ν before flooring.
    pub raw: f64,
    pub witness: BoundInstance,
}

/// Precomputed instance lines for repeated searches over M.
pub struct CutsetSearch {
    options: Vec<(Demand, u32)>,
    nu_max: usize,
    lines: Vec<(f64, u32, u8)>,
}

fn worst_case_demands(n: usize, k: usize, kind: DemandKind) -> Vec<Demand> {
    let choices: Vec<u32> = match kind {
        DemandKind::SingleFile => (0..n).map(|f| 1 << f).collect(),
        DemandKind::TwoRequest => (0..1u32 << n).filter(|m| m.count_ones() == 2).collect(),
    };
    let target = choices.len().min(k);
    let mut out = Vec::new();
    let total = choices.len().pow(k as u32);
    for mut idx in 0..total {
        let mut v = Vec::with_capacity(k);
        for _ in 0..k {
            v.push(choices[idx % choices.len()]);
            idx /= choices.len();
        }
        v.reverse();
        let d = Demand(v);
        if d.distinct() == target {
            out.push(d);
        }
    }
    out
}

impl CutsetSearch {
    pub fn new(oracle: &dyn EntropyOracle, k: usize, nu_max: usize, kind: DemandKind) -> Result<Self> {
        Self::new_with(oracle, k, nu_max, kind, Exec::default())
    }

    pub fn new_with(oracle: &dyn EntropyOracle, k: usize, nu_max: usize, kind: DemandKind, exec: Exec) -> Result<Self> {
        let n = oracle.num_files();
        if nu_max == 0 || nu_max > 3 {
            return Err(Error::ScaleExceeded(format!("nu_max = {nu_max}, supported 1..=3")));
        }
        if !(2..=3).contains(&n) || !(2..=3).contains(&k) {
            return Err(Error::ScaleExceeded(format!("N = {n}, K = {k}; exhaustive search needs N, K in 2..=3")));
        }
        if kind == DemandKind::TwoRequest && n != 3 {
            return Err(Error::Invalid("two-request demands need three files".into()));
        }
        let table = EntropyTable::new(oracle);
        let demands = worst_case_demands(n, k, kind);
        let subsets: Vec<u32> = (1..1u32 << k).collect();
        let options: Vec<(Demand, u32)> = demands
            .iter()
            .flat_map(|d| subsets.iter().map(move |&s| (d.clone(), s)))
            .collect();
        let mut search = Self { options, nu_max, lines: Vec::new() };
        let total = search.len();
        search.lines = exec.map_range(total, |i| {
            let inst = search.instance(i);
            if !inst.is_admissible() {
                return (f64::NEG_INFINITY, 0, inst.nu() as u8);
            }
            let (c, s) = inst.line(&table);
            (c, s, inst.nu() as u8)
        });
        Ok(search)
    }

    /// Number of enumerated instances.
    pub fn len(&self) -> usize {
        let b = self.options.len();
        (1..=self.nu_max).map(|nu| b.pow(nu as u32)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Decodes an enumeration index into its instance.
    pub fn instance(&self, mut idx: usize) -> BoundInstance {
        let b = self.options.len();
        let mut nu = 1;
        while idx >= b.pow(nu as u32) {
            idx -= b.pow(nu as u32);
            nu += 1;
        }
        let mut demands = Vec::with_capacity(nu);
        let mut subsets = Vec::with_capacity(nu);
        for _ in 0..nu {
            let (d, s) = &self.options[idx % b];
            demands.push(d.clone());
            subsets.push(*s);
            idx /= b;
        }
        BoundInstance { demands, subsets }
    }

    /// Normalized bound of instance `idx` at `m`.
    pub fn value(&self, idx: usize, m: f64) -> f64 {
        let (c, s, nu) = self.lines[idx];
        (c - s as f64 * m) / nu as f64
    }

    pub fn best(&self, m: f64) -> SearchResult {
        self.best_with(m, Exec::default())
    }

    pub fn best_with(&self, m: f64, exec: Exec) -> SearchResult {
        let (idx, raw) = exec
            .argmax_range(self.lines.len(), |i| self.value(i, m))
            .expect("nonempty search space");
        SearchResult { value: raw.max(0.0), raw, witness: self.instance(idx) }
    }

    /// True when some enumerated instance equals `inst`.
    pub fn contains(&self, inst: &BoundInstance) -> bool {
        if inst.nu() > self.nu_max || !inst.is_admissible() {
            return false;
        }
        inst.demands
            .iter()
            .zip(&inst.subsets)
            .all(|(d, s)| self.options.iter().any(|(od, os)| od == d && os == s))
    }
}

/// Best normalized Theorem 13 bound over ν ≤ `nu_max` worst-case demand sequences.
pub fn search_best_peak_bound(
    oracle: &dyn EntropyOracle,
    k: usize,
    m: f64,
    nu_max: usize,
    kind: DemandKind,
) -> Result<SearchResult> {
    search_best_peak_bound_with(oracle, k, m, nu_max, kind, Exec::default())
}

pub fn search_best_peak_bound_with(
    oracle: &dyn EntropyOracle,
    k: usize,
    m: f64,
    nu_max: usize,
    kind: DemandKind,
    exec: Exec,
) -> Result<SearchResult> {
    Ok(CutsetSearch::new_with(oracle, k, nu_max, kind, exec)?.best_with(m, exec))
}

/// A labelled appendix construction and the closed-form piece it attains.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub label: &'static str,
    /// Index into the matching `*_pieces` array of the closed-form bound.
    pub piece: usize,
    pub instance: BoundInstance,
}

fn argmax_by<I: IntoIterator<Item = T>, T: Copy>(items: I, f: impl Fn(T) -> f64) -> T {
    let mut it = items.into_iter();
    let first = it.next().expect("nonempty");
    it.fold(first, |best, x| if f(x) > f(best) { x } else { best })
}

/// The appendix instances that attain each closed-form piece (Appendices G, J, M).
///
/// `kind` selects the network: two files (Theorems 2 and 7), three files
/// (Theorem 11) or the two-request network (Appendix M). File roles are chosen
/// to maximize the entropies appearing in the pieces.
pub fn appendix_witnesses(oracle: &dyn EntropyOracle, kind: DemandKind) -> Vec<Witness> {
    let n = oracle.num_files();
    let r1 = 0b01;
    let r2 = 0b10;
    let both = 0b11;
    match (kind, n) {
        (DemandKind::SingleFile, 2) => {
            // the larger single-file entropy sits with the receiver in S2 of case (iii)
            let (a, b) = if oracle.entropy(0b01) >= oracle.entropy(0b10) { (1, 2) } else { (2, 1) };
            vec![
                Witness {
                    label: "G case (i)",
                    piece: 0,
                    instance: BoundInstance::new(vec![Demand::files(&[1, 2])], vec![both]),
                },
                Witness {
                    label: "G case (iii)",
                    piece: 1,
                    instance: BoundInstance::new(vec![Demand::files(&[a, b]), Demand::files(&[b, a])], vec![r1, r2]),
                },
                Witness {
                    label: "G case (ii)",
                    piece: 2,
                    instance: BoundInstance::new(vec![Demand::files(&[1, 2]), Demand::files(&[2, 1])], vec![r1, r1]),
                },
            ]
        }
        (DemandKind::SingleFile, 3) => {
            let pairs = [(1, 2), (1, 3), (2, 3)];
            let (i, j) = argmax_by(pairs, |(i, j)| oracle.entropy((1 << (i - 1)) | (1 << (j - 1))));
            let top = argmax_by([1usize, 2, 3], |i| oracle.entropy(1 << (i - 1)));
            let others: Vec<usize> = (1..=3).filter(|&x| x != top).collect();
            let (oj, ok) = (others[0], others[1]);
            let kk = 6 - i - j;
            vec![
                Witness {
                    label: "J case (i)",
                    piece: 0,
                    instance: BoundInstance::new(vec![Demand::files(&[i, j])], vec![both]),
                },
                Witness {
                    label: "J case (ii)",
                    piece: 1,
                    instance: BoundInstance::new(vec![Demand::files(&[i, j]), Demand::files(&[j, i])], vec![r1, r1]),
                },
                Witness {
                    label: "J case (iii)",
                    piece: 2,
                    instance: BoundInstance::new(
                        vec![Demand::files(&[i, j]), Demand::files(&[j, kk]), Demand::files(&[kk, i])],
                        vec![r1, r1, r1],
                    ),
                },
                Witness {
                    label: "J case (iv)",
                    piece: 3,
                    instance: BoundInstance::new(
                        vec![Demand::files(&[top, oj]), Demand::files(&[ok, top])],
                        vec![r1, r2],
                    ),
                },
            ]
        }
        (DemandKind::TwoRequest, 3) => {
            let (a, b, c): (&[usize], &[usize], &[usize]) = (&[1, 2], &[1, 3], &[2, 3]);
            vec![
                Witness {
                    label: "M case (i)",
                    piece: 0,
                    instance: BoundInstance::new(vec![Demand::sets(&[a, b])], vec![both]),
                },
                Witness {
                    label: "M case (ii)",
                    piece: 1,
                    instance: BoundInstance::new(vec![Demand::sets(&[a, b]), Demand::sets(&[c, a])], vec![r1, r2]),
                },
                Witness {
                    label: "M case (iii)",
                    piece: 2,
                    instance: BoundInstance::new(vec![Demand::sets(&[a, b]), Demand::sets(&[b, a])], vec![r1, r1]),
                },
            ]
        }
        _ => Vec::new(),
    }
}

/// Theorem 7 average bound assembled from Theorem 13 sum-rate bounds with the
/// fixed Appendix G-II weights (cases iv, v, vi and Eq. lb-avg-star).
pub fn avg_lb_two_file_cutset(oracle: &dyn EntropyOracle, k: usize, m: f64) -> Result<f64> {
    if oracle.num_files() != 2 || k < 2 {
        return Err(Error::Unsupported("average cut-set assembly needs two files and K >= 2".into()));
    }
    let (r1, r2, both) = (0b01, 0b10, 0b11);
    let d1 = Demand::files(&[1, 2]);
    let d2 = Demand::files(&[2, 1]);
    let d3 = Demand::files(&[1, 1]);
    let d4 = Demand::files(&[2, 2]);
    let b = |ds: Vec<Demand>, ss: Vec<u32>| cutset_sum_rate_bound(oracle, &BoundInstance::new(ds, ss), m);

    // case (iv): {d1,d2} and {d3,d4}, both with S1 = S2 = {r1}
    let iv = (b(vec![d1.clone(), d2.clone()], vec![r1, r1])? + b(vec![d3.clone(), d4.clone()], vec![r1, r1])?) / 4.0;
    // case (v): case (iii) instance (larger single entropy last) plus the d3,d4 bound
    let v_first = b(vec![d1.clone(), d2.clone()], vec![r1, r2])?.max(b(vec![d1.clone(), d2.clone()], vec![r2, r1])?);
    let v = (v_first + b(vec![d3.clone(), d4.clone()], vec![r1, r1])?) / 4.0;
    // case (vi): {d1,d3} and {d2,d4} with S1 = {r1}, S2 = {r2}
    let vi = (b(vec![d1.clone(), d3.clone()], vec![r1, r2])? + b(vec![d2.clone(), d4.clone()], vec![r1, r2])?) / 4.0;
    // Eq. (lb avg star): same-file demands give H(Xi) − M, the other 2^K − 2 give H12 − 2M
    let q = 0.5f64.powi(k as i32);
    let same1 = b(vec![Demand::files(&[1])], vec![0b1])?;
    let same2 = b(vec![Demand::files(&[2])], vec![0b1])?;
    let mixed = b(vec![d1], vec![both])?;
    let star = q * (same1 + same2) + (1.0 - 2.0 * q) * mixed;
    Ok([iv, v, vi, star].into_iter().fold(0.0, f64::max))
}
