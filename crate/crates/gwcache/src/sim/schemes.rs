//! Scheme assembly: cache allocation across sublibraries, memory sharing
//! between anchor placements, and the per-network description layouts.

use super::components::{
    place_cached, place_chen, place_lfu, place_two_request, place_uncoded, place_yu, Builder, Component, Seg,
};
use super::library::to_bits;
use super::{Part, Scheme};
use crate::allocation::{allocate_three_file, allocate_two_file};
use crate::error::{Error, Result};
use crate::gray_wyner::{GwTuple2, GwTuple3Sym};
use crate::rates::{private_rate_two_file, Criterion};

const ANCHOR_TOL: f64 = 1e-9;

/// Memory-sharing weights: `[(anchor index, fraction)]` with one or two entries.
fn sharing(anchors: &[f64], mu: f64) -> Result<Vec<(usize, f64)>> {
    if let Some(i) = anchors.iter().position(|&a| (a - mu).abs() <= ANCHOR_TOL) {
        return Ok(vec![(i, 1.0)]);
    }
    for i in 0..anchors.len().saturating_sub(1) {
        let (a, b) = (anchors[i], anchors[i + 1]);
        if a < mu && mu < b {
            let alpha = (b - mu) / (b - a);
            return Ok(vec![(i, alpha), (i + 1, 1.0 - alpha)]);
        }
    }
    Err(Error::OutOfRange { name: "M", value: mu, range: "sublibrary memory range" })
}

/// Splits every segment into the memory-sharing parts, checking integrality.
fn split_parts(segs: &[Seg], weights: &[(usize, f64)], f: u64) -> Result<Vec<Vec<Seg>>> {
    if weights.len() == 1 {
        return Ok(vec![segs.to_vec()]);
    }
    let alpha = weights[0].1;
    let mut first = Vec::with_capacity(segs.len());
    let mut second = Vec::with_capacity(segs.len());
    for s in segs {
        let v = alpha * s.len as f64;
        if (v - v.round()).abs() > 1e-6 {
            return Err(Error::Divisibility {
                f,
                what: format!("memory-sharing split {alpha:.6} of {} ({} bits) = {v}", s.label, s.len),
            });
        }
        let (a, b) = s.split_at(v.round() as usize, ("[a]", "[b]"));
        first.push(a);
        second.push(b);
    }
    Ok(vec![first, second])
}

#[derive(Debug, Clone, Copy)]
enum PrivateAnchor {
    Uncoded,
    Chen,
    YuOne,
    YuTop,
    Cached,
}

fn private_anchor(b: &mut Builder, kind: PrivateAnchor, segs: &[Seg]) -> Result<Box<dyn Component>> {
    let k = b.receivers();
    match kind {
        PrivateAnchor::Uncoded => Ok(place_uncoded(b, &segs.iter().map(|s| vec![s.clone()]).collect::<Vec<_>>())),
        PrivateAnchor::Chen => place_chen(b, [&segs[0], &segs[1]]),
        PrivateAnchor::YuOne => place_yu(b, &segs.iter().collect::<Vec<_>>(), 1, false),
        PrivateAnchor::YuTop => place_yu(b, &segs.iter().collect::<Vec<_>>(), k - 1, true),
        PrivateAnchor::Cached => Ok(place_cached(b, segs)),
    }
}

fn push_parts(parts: &mut Vec<Part>, comps: Vec<Box<dyn Component>>, req_map: &[u32]) {
    parts.extend(comps.into_iter().map(|component| Part { component, req_map: req_map.to_vec() }));
}

/// Two-file, K-receiver MR scheme on the component descriptions of `t`.
///
/// The common description is cached LFU-style; the private sublibrary
/// memory-shares between the anchors of the peak curve (uncoded, coded at
/// γ, Yu t = K−1 at s − 2γ, everything) or of the average curve (with Yu
/// t = 1 at 2γ in place of the coded point).
pub fn two_file_scheme(t: &GwTuple2, k: usize, m: f64, criterion: Criterion, f: u64) -> Result<Scheme> {
    let lens = [to_bits(t.rho0, f, "rho0")?, to_bits(t.rho1, f, "rho1")?, to_bits(t.rho2, f, "rho2")?];
    let private = private_rate_two_file(t.rho1, t.rho2, k, criterion)?;
    let alloc = allocate_two_file(m, t, &private)?;
    let mut b = Builder::new(f, k);
    let mut parts = Vec::new();

    let w12 = Seg::whole("W12", 0, lens[0]);
    let mu0 = to_bits(alloc.mu0, f, "LFU share mu0")?;
    let lfu = place_lfu(&mut b, &w12, mu0);
    push_parts(&mut parts, lfu, &[1, 1]);

    let s = t.private_sum();
    let g = t.min_private() / k as f64;
    let anchors = match criterion {
        Criterion::Peak => [
            (0.0, PrivateAnchor::Uncoded),
            (g, PrivateAnchor::Chen),
            (s - 2.0 * g, PrivateAnchor::YuTop),
            (s, PrivateAnchor::Cached),
        ],
        Criterion::Average => [
            (0.0, PrivateAnchor::Uncoded),
            (2.0 * g, PrivateAnchor::YuOne),
            (s - 2.0 * g, PrivateAnchor::YuTop),
            (s, PrivateAnchor::Cached),
        ],
    };
    let memories: Vec<f64> = anchors.iter().map(|a| a.0).collect();
    let weights = sharing(&memories, alloc.mu.clamp(0.0, s))?;
    let segs = [Seg::whole("W1", 1, lens[1]), Seg::whole("W2", 2, lens[2])];
    for (&(idx, _), part) in weights.iter().zip(split_parts(&segs, &weights, f)?) {
        let c = private_anchor(&mut b, anchors[idx].1, &part)?;
        push_parts(&mut parts, vec![c], &[0b01, 0b10]);
    }

    Ok(Scheme {
        name: format!("two-file K={k} {criterion:?}"),
        f,
        memory: m,
        lengths: lens.to_vec(),
        desc_files: vec![0b11, 0b01, 0b10],
        layout: vec![vec![1, 0], vec![2, 0]],
        atoms: b.atoms,
        caches: b.caches,
        parts,
        requests_per_receiver: 1,
    })
}

/// Two-request sublibrary at memory `mu` (bits/symbol) on three equal segments of rate `rho_p`.
fn two_request_parts(b: &mut Builder, segs: [Seg; 3], rho_p: f64, mu: f64) -> Result<Vec<Box<dyn Component>>> {
    let memories = [0.0, 0.5 * rho_p, rho_p, 1.5 * rho_p, 3.0 * rho_p];
    let weights = sharing(&memories, mu.clamp(0.0, 3.0 * rho_p))?;
    let mut out = Vec::new();
    for (&(idx, _), part) in weights.iter().zip(split_parts(&segs, &weights, b.f)?) {
        let c = match idx {
            0 => place_uncoded(b, &part.iter().map(|s| vec![s.clone()]).collect::<Vec<_>>()),
            4 => place_cached(b, &part),
            level => place_two_request(b, [&part[0], &part[1], &part[2]], level as u8)?,
        };
        out.push(c);
    }
    Ok(out)
}

/// The two-request network: three independent files of rate ρ′, two
/// receivers each requesting two files. Files are labelled W12, W13, W23.
pub fn two_request_scheme(rho_p: f64, m: f64, f: u64) -> Result<Scheme> {
    let l = to_bits(rho_p, f, "rhoP")?;
    let mut b = Builder::new(f, 2);
    let segs = [Seg::whole("W12", 0, l), Seg::whole("W13", 1, l), Seg::whole("W23", 2, l)];
    let comps = two_request_parts(&mut b, segs, rho_p, m)?;
    let mut parts = Vec::new();
    push_parts(&mut parts, comps, &[0b001, 0b010, 0b100]);
    Ok(Scheme {
        name: "two-request".into(),
        f,
        memory: m,
        lengths: vec![l; 3],
        desc_files: vec![0b001, 0b010, 0b100],
        layout: vec![vec![0], vec![1], vec![2]],
        atoms: b.atoms,
        caches: b.caches,
        parts,
        requests_per_receiver: 2,
    })
}

/// Three-file, two-receiver MR scheme: LFU on W123, the two-request scheme on
/// {W12, W13, W23} and Yu's scheme (t = 1) on the private descriptions.
pub fn three_file_scheme(t: &GwTuple3Sym, m: f64, f: u64) -> Result<Scheme> {
    let l0 = to_bits(t.rho0, f, "rho0")?;
    let lp = to_bits(t.rho_p, f, "rhoP")?;
    let l = to_bits(t.rho, f, "rho")?;
    let alloc = allocate_three_file(m, t)?;
    let mut b = Builder::new(f, 2);
    let mut parts = Vec::new();

    let mu0 = to_bits(alloc.mu0, f, "LFU share mu0")?;
    let lfu = place_lfu(&mut b, &Seg::whole("W123", 0, l0), mu0);
    push_parts(&mut parts, lfu, &[1, 1, 1]);

    let l2 = [Seg::whole("W12", 1, lp), Seg::whole("W13", 2, lp), Seg::whole("W23", 3, lp)];
    let comps = two_request_parts(&mut b, l2, t.rho_p, alloc.mu_p)?;
    // file 1 needs {W12, W13}, file 2 {W12, W23}, file 3 {W13, W23}
    push_parts(&mut parts, comps, &[0b011, 0b101, 0b110]);

    let l1 = [Seg::whole("W1", 4, l), Seg::whole("W2", 5, l), Seg::whole("W3", 6, l)];
    let memories = [0.0, 1.5 * t.rho, 3.0 * t.rho];
    let weights = sharing(&memories, alloc.mu.clamp(0.0, 3.0 * t.rho))?;
    for (&(idx, _), part) in weights.iter().zip(split_parts(&l1, &weights, f)?) {
        let c = match idx {
            0 => place_uncoded(&mut b, &part.iter().map(|s| vec![s.clone()]).collect::<Vec<_>>()),
            1 => place_yu(&mut b, &part.iter().collect::<Vec<_>>(), 1, false)?,
            _ => place_cached(&mut b, &part),
        };
        push_parts(&mut parts, vec![c], &[0b001, 0b010, 0b100]);
    }

    Ok(Scheme {
        name: "three-file".into(),
        f,
        memory: m,
        lengths: vec![l0, lp, lp, lp, l, l, l],
        desc_files: vec![0b111, 0b011, 0b101, 0b110, 0b001, 0b010, 0b100],
        layout: vec![vec![0, 2, 1, 4], vec![0, 1, 3, 5], vec![0, 2, 3, 6]],
        atoms: b.atoms,
        caches: b.caches,
        parts,
        requests_per_receiver: 1,
    })
}

/// Smallest F ≤ `max_f` for which `build` succeeds without a divisibility error.
pub fn required_block_length(max_f: u64, build: impl Fn(u64) -> Result<Scheme>) -> Result<u64> {
    for f in 1..=max_f {
        match build(f) {
            Ok(_) => return Ok(f),
            Err(Error::Divisibility { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Divisibility { f: max_f, what: "no block length up to the limit keeps every split integral".into() })
}
