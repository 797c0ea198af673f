//! Bit-exact placement, delivery and decoding on structured sources.
//!
//! A [`Scheme`] is assembled from sublibrary components. Each component cuts
//! descriptions into atoms, stores XORs of atoms in the caches and answers a
//! demand with XORs of atoms. Receivers decode by GF(2) elimination using
//! only their cache, the codeword and the public atom structure.

mod components;
pub mod decoder;
pub mod library;
mod measure;
mod schemes;

use std::fmt::Write as _;

use bitvec::prelude::*;

pub use components::{Atom, Combo};
pub use library::{gw_encode_structured, reassemble, to_bits, BitLibrary, Description};
pub use measure::{all_demands, measure_rate, Measurement};
pub use schemes::{required_block_length, three_file_scheme, two_file_scheme, two_request_scheme};

use crate::error::{Error, Result};
use components::Component;
use decoder::Equation;

/// One labelled piece of a cache or codeword: the XOR of `atoms`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub label: String,
    pub atoms: Vec<usize>,
    pub bits: BitVec,
}

/// What a receiver stores.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheContents {
    pub segments: Vec<Segment>,
}

impl CacheContents {
    pub fn len_bits(&self) -> usize {
        self.segments.iter().map(|s| s.bits.len()).sum()
    }
}

/// A multicast codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    pub segments: Vec<Segment>,
}

impl Codeword {
    pub fn len_bits(&self) -> usize {
        self.segments.iter().map(|s| s.bits.len()).sum()
    }

    /// `SEG <label> <len_bits>` per segment.
    pub fn trace(&self) -> String {
        let mut out = String::new();
        for s in &self.segments {
            writeln!(out, "SEG {} {}", s.label, s.bits.len()).expect("write to string");
        }
        out
    }
}

#[derive(Debug)]
struct Part {
    component: Box<dyn Component>,
    /// For each library file, the component files it maps to.
    req_map: Vec<u32>,
}

/// A fully specified placement and delivery scheme for one block length.
#[derive(Debug)]
pub struct Scheme {
    name: String,
    f: u64,
    memory: f64,
    lengths: Vec<usize>,
    desc_files: Vec<u32>,
    layout: Vec<Vec<usize>>,
    atoms: Vec<Atom>,
    caches: Vec<Vec<Combo>>,
    parts: Vec<Part>,
    requests_per_receiver: u32,
}

fn xor_payload(lib: &BitLibrary, atoms: &[Atom], c: &Combo) -> BitVec {
    let first = &atoms[c.atoms[0]];
    let mut out = bitvec![0; first.len];
    for &i in &c.atoms {
        let a = &atoms[i];
        *out.as_mut_bitslice() ^= &lib.descriptions[a.desc].bits[a.start..a.start + a.len];
    }
    out
}

impl Scheme {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn f(&self) -> u64 {
        self.f
    }

    /// Cache size per receiver in bits per symbol.
    pub fn memory(&self) -> f64 {
        self.memory
    }

    pub fn receivers(&self) -> usize {
        self.caches.len()
    }

    pub fn num_files(&self) -> usize {
        self.layout.len()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Largest allowed cache, ⌊M·F⌋ bits.
    pub fn budget_bits(&self) -> usize {
        (self.memory * self.f as f64 + 1e-6).floor() as usize
    }

    /// Cache sizes in bits, known before any realization is drawn.
    pub fn cache_bits(&self) -> Vec<usize> {
        self.caches
            .iter()
            .map(|c| c.iter().map(|x| self.atoms[x.atoms[0]].len).sum())
            .collect()
    }

    fn check_library(&self, lib: &BitLibrary) -> Result<()> {
        if lib.lengths() != self.lengths || lib.layout != self.layout || lib.f != self.f {
            return Err(Error::Invalid(format!("library does not match the {} scheme", self.name)));
        }
        Ok(())
    }

    fn check_demand(&self, demand: &[u32]) -> Result<()> {
        let all = (1u32 << self.num_files()) - 1;
        if demand.len() != self.receivers()
            || demand.iter().any(|&d| d & !all != 0 || d.count_ones() != self.requests_per_receiver)
        {
            return Err(Error::Invalid(format!(
                "demand {demand:?} for {} receivers requesting {} of {} files",
                self.receivers(),
                self.requests_per_receiver,
                self.num_files()
            )));
        }
        Ok(())
    }

    fn segment(&self, lib: &BitLibrary, c: &Combo) -> Segment {
        let label = c.atoms.iter().map(|&a| self.atoms[a].label.as_str()).collect::<Vec<_>>().join("+");
        Segment { label, atoms: c.atoms.clone(), bits: xor_payload(lib, &self.atoms, c) }
    }

    /// Cache contents of every receiver.
    pub fn place(&self, lib: &BitLibrary) -> Result<Vec<CacheContents>> {
        self.check_library(lib)?;
        Ok(self
            .caches
            .iter()
            .map(|items| CacheContents { segments: items.iter().map(|c| self.segment(lib, c)).collect() })
            .collect())
    }

    /// Transmission pattern for a demand, without payloads.
    pub fn delivery_plan(&self, demand: &[u32]) -> Result<Vec<Combo>> {
        self.check_demand(demand)?;
        let mut out = Vec::new();
        for p in &self.parts {
            let req: Vec<u32> = demand
                .iter()
                .map(|&d| (0..self.num_files()).filter(|i| d >> i & 1 == 1).fold(0, |a, i| a | p.req_map[i]))
                .collect();
            out.extend(p.component.deliver(&req));
        }
        Ok(out)
    }

    /// Codeword length in bits for a demand.
    pub fn delivery_bits(&self, demand: &[u32]) -> Result<usize> {
        Ok(self.delivery_plan(demand)?.iter().map(|c| self.atoms[c.atoms[0]].len).sum())
    }

    /// Multicast codeword for a demand (file bitmask per receiver).
    pub fn deliver(&self, lib: &BitLibrary, demand: &[u32]) -> Result<Codeword> {
        self.check_library(lib)?;
        let plan = self.delivery_plan(demand)?;
        Ok(Codeword { segments: plan.iter().map(|c| self.segment(lib, c)).collect() })
    }

    /// Reconstructs the files requested by `receiver` from its cache and the
    /// codeword. Returns (file index, bits) in increasing file order.
    pub fn decode(
        &self,
        receiver: usize,
        cache: &CacheContents,
        codeword: &Codeword,
        demand: &[u32],
    ) -> Result<Vec<(usize, BitVec)>> {
        self.check_demand(demand)?;
        let want_files = demand[receiver];
        let wanted_descs: Vec<usize> =
            (0..self.desc_files.len()).filter(|&d| self.desc_files[d] & want_files != 0).collect();
        let wanted: Vec<usize> =
            (0..self.atoms.len()).filter(|&a| wanted_descs.contains(&self.atoms[a].desc)).collect();
        let equations: Vec<Equation> = cache
            .segments
            .iter()
            .chain(&codeword.segments)
            .map(|s| Equation { atoms: s.atoms.clone(), value: s.bits.clone() })
            .collect();
        let values = decoder::solve(self.atoms.len(), &equations, &wanted).map_err(|a| Error::Unrecoverable {
            receiver: receiver + 1,
            packet: self.atoms[a].label.clone(),
        })?;
        let mut descs: Vec<BitVec> = self.lengths.iter().map(|&l| bitvec![0; l]).collect();
        for (&a, v) in wanted.iter().zip(values) {
            let at = &self.atoms[a];
            descs[at.desc][at.start..at.start + at.len].copy_from_bitslice(&v);
        }
        Ok((0..self.num_files())
            .filter(|i| want_files >> i & 1 == 1)
            .map(|i| (i, reassemble(self.layout[i].iter().map(|&d| descs[d].as_bitslice()))))
            .collect())
    }

    /// Places, delivers and decodes one demand, comparing every reconstruction
    /// with the library. Returns the codeword length in bits.
    pub fn run(&self, lib: &BitLibrary, demand: &[u32]) -> Result<usize> {
        let caches = self.place(lib)?;
        let budget = self.budget_bits();
        if let Some((k, c)) = caches.iter().enumerate().find(|(_, c)| c.len_bits() > budget) {
            return Err(Error::Invalid(format!("receiver {} caches {} bits > {budget}", k + 1, c.len_bits())));
        }
        let y = self.deliver(lib, demand)?;
        for (k, cache) in caches.iter().enumerate() {
            for (i, bits) in self.decode(k, cache, &y, demand)? {
                if bits != lib.file(i) {
                    return Err(Error::Invalid(format!("receiver {} reconstructed file {} incorrectly", k + 1, i + 1)));
                }
            }
        }
        Ok(y.len_bits())
    }
}
