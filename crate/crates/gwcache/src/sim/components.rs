//! Placement and delivery building blocks, one per sublibrary scheme.
//!
//! A component owns some atoms, has already written its cache items into the
//! [`Builder`], and turns per-receiver requests (bitmasks over the component's
//! own files) into XOR combinations to transmit.

use std::fmt::Debug;

use crate::error::{Error, Result};

/// A contiguous bit range of one description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub label: String,
    pub desc: usize,
    pub start: usize,
    pub len: usize,
}

/// XOR of equal-length atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Combo {
    pub atoms: Vec<usize>,
}

/// A not-yet-atomized bit range with a display label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Seg {
    pub label: String,
    pub desc: usize,
    pub start: usize,
    pub len: usize,
}

impl Seg {
    pub fn whole(label: &str, desc: usize, len: usize) -> Self {
        Seg { label: label.to_string(), desc, start: 0, len }
    }

    fn sub(&self, suffix: &str, offset: usize, len: usize) -> Seg {
        Seg { label: format!("{}{}", self.label, suffix), desc: self.desc, start: self.start + offset, len }
    }

    /// Splits at `at` bits; the parts are labelled with the given suffixes.
    pub fn split_at(&self, at: usize, suffixes: (&str, &str)) -> (Seg, Seg) {
        (self.sub(suffixes.0, 0, at), self.sub(suffixes.1, at, self.len - at))
    }

    /// `n` equal packets labelled `^(1)..^(n)`.
    pub fn packets(&self, n: usize, f: u64) -> Result<Vec<Seg>> {
        if self.len % n != 0 {
            return Err(Error::Divisibility { f, what: format!("{} has {} bits, not divisible by {n}", self.label, self.len) });
        }
        let p = self.len / n;
        Ok((0..n).map(|i| self.sub(&format!("^({})", i + 1), i * p, p)).collect())
    }
}

/// Collects atoms and cache items while a scheme is assembled.
#[derive(Debug)]
pub(crate) struct Builder {
    pub f: u64,
    pub atoms: Vec<Atom>,
    pub caches: Vec<Vec<Combo>>,
}

impl Builder {
    pub fn new(f: u64, k: usize) -> Self {
        Self { f, atoms: Vec::new(), caches: vec![Vec::new(); k] }
    }

    pub fn receivers(&self) -> usize {
        self.caches.len()
    }

    /// Registers a segment as an atom; empty segments give `None`.
    pub fn atom(&mut self, s: &Seg) -> Option<usize> {
        if s.len == 0 {
            return None;
        }
        self.atoms.push(Atom { label: s.label.clone(), desc: s.desc, start: s.start, len: s.len });
        Some(self.atoms.len() - 1)
    }

    pub fn atoms_of(&mut self, segs: &[Seg]) -> Vec<Option<usize>> {
        segs.iter().map(|s| self.atom(s)).collect()
    }

    /// Caches the XOR of `atoms` at receiver `k` (skipped when all are empty).
    pub fn cache(&mut self, k: usize, atoms: &[Option<usize>]) {
        if let Some(c) = combo(atoms) {
            self.caches[k].push(c);
        }
    }

    pub fn cache_all(&mut self, atoms: &[Option<usize>]) {
        for k in 0..self.receivers() {
            self.cache(k, atoms);
        }
    }
}

/// XOR of the nonempty atoms, if any.
pub(crate) fn combo(atoms: &[Option<usize>]) -> Option<Combo> {
    let atoms: Vec<usize> = atoms.iter().flatten().copied().collect();
    (!atoms.is_empty()).then_some(Combo { atoms })
}

pub(crate) trait Component: Debug + Send + Sync {
    /// Transmissions for per-receiver request masks over this component's files.
    fn deliver(&self, req: &[u32]) -> Vec<Combo>;
}

fn requested_files(req: &[u32]) -> Vec<usize> {
    let all = req.iter().fold(0, |a, &r| a | r);
    (0..32).filter(|b| all >> b & 1 == 1).collect()
}

/// First receiver requesting each file (Yu's leaders), as a receiver mask.
fn leaders(req: &[u32]) -> u32 {
    let mut seen = 0u32;
    let mut out = 0u32;
    for (k, &r) in req.iter().enumerate() {
        if r & !seen != 0 {
            out |= 1 << k;
        }
        seen |= r;
    }
    out
}

fn file_of(r: u32) -> usize {
    r.trailing_zeros() as usize
}

/// No cache; every requested file is sent uncoded.
#[derive(Debug)]
pub(crate) struct Uncoded {
    pub files: Vec<Vec<Option<usize>>>,
}

impl Component for Uncoded {
    fn deliver(&self, req: &[u32]) -> Vec<Combo> {
        requested_files(req)
            .into_iter()
            .flat_map(|i| self.files[i].iter().filter_map(|a| combo(&[*a])))
            .collect()
    }
}

/// Everything is cached; nothing is sent.
#[derive(Debug)]
pub(crate) struct Cached;

impl Component for Cached {
    fn deliver(&self, _req: &[u32]) -> Vec<Combo> {
        Vec::new()
    }
}

/// Caches `segs` entirely at every receiver.
pub(crate) fn place_cached(b: &mut Builder, segs: &[Seg]) -> Box<dyn Component> {
    for a in b.atoms_of(segs) {
        b.cache_all(&[a]);
    }
    Box::new(Cached)
}

pub(crate) fn place_uncoded(b: &mut Builder, files: &[Vec<Seg>]) -> Box<dyn Component> {
    let files = files.iter().map(|segs| b.atoms_of(segs)).collect();
    Box::new(Uncoded { files })
}

/// LFU on a description every receiver needs: a common prefix is cached, the rest is sent.
pub(crate) fn place_lfu(b: &mut Builder, seg: &Seg, cached_bits: usize) -> Vec<Box<dyn Component>> {
    let (head, tail) = seg.split_at(cached_bits, ("[lfu]", ""));
    vec![place_cached(b, &[head]), place_uncoded(b, &[vec![tail]])]
}

/// Coded placement for two files at M = min/K (after Chen et al.).
///
/// The common length m = min{l1, l2} of each file is cut into 2K packets;
/// receiver k caches W1^(2k−1) ⊕ W2^(2k−1) and W1^(2k) ⊕ W2^(2k). The excess
/// of the longer file is never cached.
#[derive(Debug)]
pub(crate) struct Chen {
    k: usize,
    packets: [Vec<Option<usize>>; 2],
    leftover: [Option<usize>; 2],
}

pub(crate) fn place_chen(b: &mut Builder, files: [&Seg; 2]) -> Result<Box<dyn Component>> {
    let k = b.receivers();
    let m = files[0].len.min(files[1].len);
    let mut packets: [Vec<Option<usize>>; 2] = [Vec::new(), Vec::new()];
    let mut leftover = [None, None];
    for (i, s) in files.iter().enumerate() {
        let (head, tail) = s.split_at(m, ("", "[excess]"));
        packets[i] = b.atoms_of(&head.packets(2 * k, b.f)?);
        leftover[i] = b.atom(&tail);
    }
    for r in 0..k {
        for h in 0..2 {
            let p = 2 * r + h;
            b.cache(r, &[packets[0][p], packets[1][p]]);
        }
    }
    Ok(Box::new(Chen { k, packets, leftover }))
}

impl Component for Chen {
    fn deliver(&self, req: &[u32]) -> Vec<Combo> {
        let groups: [Vec<usize>; 2] =
            [0, 1].map(|i| (0..self.k).filter(|&r| req[r] >> i & 1 == 1).collect());
        let mut out = Vec::new();
        if groups[0].is_empty() || groups[1].is_empty() {
            // a single requested file goes out uncoded
            for i in requested_files(req) {
                out.extend(self.packets[i].iter().filter_map(|a| combo(&[*a])));
            }
        } else {
            for h in 0..2 {
                for (i, g) in groups.iter().enumerate() {
                    // the other file's packet unlocks each receiver's own cached XOR
                    out.extend(g.iter().filter_map(|&r| combo(&[self.packets[1 - i][2 * r + h]])));
                }
                for (i, g) in groups.iter().enumerate() {
                    for w in g.windows(2) {
                        out.extend(combo(&[self.packets[i][2 * w[0] + h], self.packets[i][2 * w[1] + h]]));
                    }
                }
            }
        }
        for i in requested_files(req) {
            out.extend(combo(&[self.leftover[i]]));
        }
        out
    }
}

/// Uncoded placement with leader-based XOR delivery (Yu et al.) for any number
/// of files and t ∈ 1..K.
///
/// The common length of the files is cut into C(K, t) packets indexed by
/// t-subsets of receivers; receiver k caches the packets whose index contains
/// k. Excess bits of longer files are either cached everywhere or sent
/// uncoded on request.
#[derive(Debug)]
pub(crate) struct Yu {
    t: u32,
    k: usize,
    /// Per file: (receiver subset mask, atom).
    packets: Vec<Vec<(u32, Option<usize>)>>,
    leftover: Vec<Option<usize>>,
}

pub(crate) fn place_yu(b: &mut Builder, files: &[&Seg], t: usize, cache_excess: bool) -> Result<Box<dyn Component>> {
    let k = b.receivers();
    let subsets: Vec<u32> = (0..1u32 << k).filter(|s| s.count_ones() as usize == t).collect();
    let m = files.iter().map(|s| s.len).min().unwrap_or(0);
    let mut packets = Vec::with_capacity(files.len());
    let mut leftover = Vec::with_capacity(files.len());
    for s in files {
        let (head, tail) = s.split_at(m, ("", "[excess]"));
        let atoms = b.atoms_of(&head.packets(subsets.len(), b.f)?);
        let ex = b.atom(&tail);
        if cache_excess {
            b.cache_all(&[ex]);
            leftover.push(None);
        } else {
            leftover.push(ex);
        }
        packets.push(subsets.iter().copied().zip(atoms).collect::<Vec<_>>());
    }
    for (r, cache) in (0..k).map(|r| (r, 1u32 << r)).collect::<Vec<_>>() {
        for file in &packets {
            for &(s, a) in file {
                if s & cache != 0 {
                    b.cache(r, &[a]);
                }
            }
        }
    }
    Ok(Box::new(Yu { t: t as u32, k, packets, leftover }))
}

impl Component for Yu {
    fn deliver(&self, req: &[u32]) -> Vec<Combo> {
        let lead = leaders(req);
        let mut out = Vec::new();
        for s in 0..1u32 << self.k {
            if s.count_ones() != self.t + 1 || s & lead == 0 {
                continue;
            }
            let atoms: Vec<Option<usize>> = (0..self.k)
                .filter(|&r| s >> r & 1 == 1 && req[r] != 0)
                .map(|r| {
                    let idx = s & !(1 << r);
                    let file = &self.packets[file_of(req[r])];
                    file.iter().find(|(m, _)| *m == idx).and_then(|(_, a)| *a)
                })
                .collect();
            out.extend(combo(&atoms));
        }
        for i in requested_files(req) {
            out.extend(combo(&[self.leftover[i]]));
        }
        out
    }
}

/// Two-request network anchors M ∈ {½ρ′, ρ′, 3/2·ρ′} on three equal-length
/// descriptions, each halved; receiver k works with packet k.
#[derive(Debug)]
pub(crate) struct TwoRequest {
    level: u8,
    halves: [[Option<usize>; 2]; 3],
}

/// `level` is 1, 2 or 3 for M = ½ρ′, ρ′, 3/2·ρ′.
pub(crate) fn place_two_request(b: &mut Builder, files: [&Seg; 3], level: u8) -> Result<Box<dyn Component>> {
    if b.receivers() != 2 {
        return Err(Error::Unsupported("the two-request scheme has two receivers".into()));
    }
    let mut halves = [[None; 2]; 3];
    for (i, s) in files.iter().enumerate() {
        let h = b.atoms_of(&s.packets(2, b.f)?);
        halves[i] = [h[0], h[1]];
    }
    for k in 0..2 {
        let [a, bb, c] = [halves[0][k], halves[1][k], halves[2][k]];
        match level {
            1 => b.cache(k, &[a, bb, c]),
            2 => {
                b.cache(k, &[a, bb]);
                b.cache(k, &[a, c]);
            }
            _ => {
                b.cache(k, &[a]);
                b.cache(k, &[bb]);
                b.cache(k, &[c]);
            }
        }
    }
    Ok(Box::new(TwoRequest { level, halves }))
}

impl Component for TwoRequest {
    fn deliver(&self, req: &[u32]) -> Vec<Combo> {
        let h = |i: u32, p: usize| self.halves[file_of(i)][p];
        let mut out = Vec::new();
        let mut push = |atoms: &[Option<usize>]| out.extend(combo(atoms));
        if req[0] == req[1] {
            let a = req[0] & req[0].wrapping_neg();
            let bb = req[0] & !a;
            for f in [a, bb].into_iter().filter(|&f| f != 0) {
                match self.level {
                    1 => {
                        push(&[h(f, 0)]);
                        push(&[h(f, 1)]);
                    }
                    2 if f == a => {
                        push(&[h(f, 0)]);
                        push(&[h(f, 1)]);
                    }
                    _ => push(&[h(f, 0), h(f, 1)]),
                }
            }
        } else {
            let c = req[0] & req[1];
            let x = req[0] & !c;
            let y = req[1] & !c;
            match self.level {
                1 => {
                    push(&[h(c, 0)]);
                    push(&[h(c, 1)]);
                    push(&[h(x, 1)]);
                    push(&[h(y, 0)]);
                }
                2 => {
                    push(&[h(c, 0)]);
                    push(&[h(c, 1)]);
                    push(&[h(x, 1), h(y, 0)]);
                }
                _ => {
                    push(&[h(c, 0), h(c, 1)]);
                    push(&[h(x, 1), h(y, 0)]);
                }
            }
        }
        out
    }
}
