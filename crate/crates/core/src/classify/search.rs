//! The extension search: candidate slices, seeds, and augmentation.
//!
//! One step extends the classified codes of length `n` to length `n + 1`.
//! For a base representative `B` (class `k`), phase one builds every seed
//! `e(B,1,0) ∪ e(C',2,0)` up to equivalence; phase two augments each seed to
//! the full codes `⋃_v e(C''_v,3,v)` and keeps the semi-canonical ones.
//! Coordinates in this module are 0-based; the textual registry format is
//! 1-based.

use super::{Registry, SliceCache};
use crate::codes::Code;
use crate::equiv::{canonicalize, front_transporter, iso_set_from, EquivMap};
use crate::{Error, Result};
use std::collections::{HashMap, HashSet};

/// A seed: the partial code fixing the slices with value 0 in the first two
/// coordinates, plus the bookkeeping used by the consistency check.
#[derive(Debug, Clone)]
pub struct Seed {
    /// Index of the base class the seed extends (0-based).
    pub k: usize,
    /// The union `e(base,1,0) ∪ e(C',2,0)`, one coordinate longer than base.
    pub code: Code,
    /// The second fixed slice `C'`, first coordinate normalized.
    pub c_prime: Code,
    /// Number of distinct normalized seeds equivalent to this one found
    /// during the search.
    pub copies: u64,
}

fn key_skipping(word: &[u8], q: u64, skip1: usize, skip2: usize) -> u64 {
    let mut key = 0u64;
    for (idx, &sym) in word.iter().enumerate() {
        if idx == skip1 || idx == skip2 {
            continue;
        }
        key = key * q + sym as u64;
    }
    key
}

/// Minimum distance of the union of the given codes is at least 3.  Words
/// shared between parts count once.  Works for partial codes.
pub(super) fn union_min_distance_3(parts: &[&Code]) -> bool {
    let n = parts[0].n();
    let q = parts[0].q() as u64;
    for c1 in 0..n {
        for c2 in c1 + 1..n {
            let mut seen: HashMap<u64, &[u8]> = HashMap::new();
            for part in parts {
                for w in part.words() {
                    match seen.entry(key_skipping(w, q, c1, c2)) {
                        std::collections::hash_map::Entry::Occupied(e) => {
                            if *e.get() != w {
                                return false;
                            }
                        }
                        std::collections::hash_map::Entry::Vacant(e) => {
                            e.insert(w);
                        }
                    }
                }
            }
        }
    }
    true
}

/// Every full code `C` of the base length with `s(C,1,0) = s(base_k, i, v)`
/// (as a literal word set), up to relabeling of the nonzero values in the
/// first coordinate, filtered so that `e(base_k,1,0) ∪ e(C,i+1,v)` keeps
/// minimum distance 3.  Only classes `l ≥ k` can occur; within each class
/// only automorphism orbit representatives of `(j,w)` pairs are expanded.
pub fn candidate_extensions(reg: &Registry, k: usize, i: usize, v: u8) -> Result<Vec<Code>> {
    let n = reg.max_length().ok_or_else(|| Error::BadArgument("empty registry".into()))?;
    let mut cache = SliceCache::new();
    candidates_inner(reg, n, k, i, v, &mut cache)
}

pub(super) fn candidates_inner(
    reg: &Registry,
    n: usize,
    k: usize,
    i: usize,
    v: u8,
    cache: &mut SliceCache,
) -> Result<Vec<Code>> {
    let q = reg.q();
    let entries = reg.classes(n).ok_or(Error::UnknownClass { n, q })?;
    if k >= entries.len() || i >= n || v as usize >= q {
        return Err(Error::BadArgument(format!(
            "no candidate query k={k} i={i} v={v} at length {n}"
        )));
    }
    let base = &entries[k];
    let target = base.code.shorten(i, v);
    let canon_t = canonicalize(&target);
    let left = base.code.extend(0, 0);
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut out = Vec::new();
    for l in k..entries.len() {
        let pairs = entries[l].pair_orbit_reps.clone();
        let code_l = entries[l].code.clone();
        for (j, w) in pairs {
            let matches = {
                let sc = cache.canon_slice(reg, n, l, j, w);
                sc.canon == canon_t.canon
            };
            if !matches {
                continue;
            }
            let h = front_transporter(n, q, j, w);
            let moved = h.apply(&code_l);
            debug_assert_eq!(moved.shorten(0, 0), code_l.shorten(j, w));
            let sc = cache.canon_slice(reg, n, l, j, w);
            for g in iso_set_from(sc, &canon_t) {
                let cand = g.lift(0).apply(&moved);
                debug_assert_eq!(cand.shorten(0, 0), target);
                if !seen.insert(cand.flat().to_vec()) {
                    continue;
                }
                let right = cand.extend(i + 1, v);
                if union_min_distance_3(&[&left, &right]) {
                    out.push(cand);
                }
            }
        }
    }
    Ok(out)
}

/// Relabels the first coordinate so the word with prefix `v 0 .. 0` ends in
/// `(v, w)`: afterwards `C` contains `v 0 .. 0 v w` for every `v`.
fn normalize_first_coordinate(c: &Code) -> Code {
    let n = c.n();
    let q = c.q();
    let mut sigma = vec![0u8; q];
    for w in c.words() {
        if w[1..n - 2].iter().all(|&x| x == 0) {
            sigma[w[0] as usize] = w[n - 2];
        }
    }
    debug_assert_eq!(sigma[0], 0);
    relabel_first(c, &sigma)
}

fn relabel_first(c: &Code, sigma: &[u8]) -> Code {
    let n = c.n();
    let q = c.q();
    let mut tables: Vec<Vec<u8>> = (0..n).map(|_| (0..q as u8).collect()).collect();
    tables[0] = sigma.to_vec();
    let map = EquivMap::new(n, q, (0..n).collect(), tables).expect("valid relabeling");
    map.apply(c)
}

fn union_code(a: &Code, b: &Code) -> Result<Code> {
    let mut words: HashSet<Vec<u8>> = HashSet::new();
    for w in a.words() {
        words.insert(w.to_vec());
    }
    for w in b.words() {
        words.insert(w.to_vec());
    }
    Code::from_words(a.q(), a.n(), words)
}

/// Phase one: all inequivalent seeds over base class `k`, with the number of
/// equivalent copies (`N(D)`) recorded on each representative.
pub fn phase1_seeds(reg: &Registry, k: usize) -> Result<Vec<Seed>> {
    let n = reg.max_length().ok_or_else(|| Error::BadArgument("empty registry".into()))?;
    let mut cache = SliceCache::new();
    phase1_inner(reg, n, k, &mut cache)
}

pub(super) fn phase1_inner(
    reg: &Registry,
    n: usize,
    k: usize,
    cache: &mut SliceCache,
) -> Result<Vec<Seed>> {
    let q = reg.q();
    let cands = candidates_inner(reg, n, k, 0, 0, cache)?;
    let entries = reg.classes(n).ok_or(Error::UnknownClass { n, q })?;
    let left = entries[k].code.extend(0, 0);
    let mut literal_seen: HashSet<Vec<u8>> = HashSet::new();
    let mut by_cert: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut out: Vec<Seed> = Vec::new();
    for cand in cands {
        let norm = normalize_first_coordinate(&cand);
        if !literal_seen.insert(norm.flat().to_vec()) {
            continue;
        }
        let ext = norm.extend(1, 0);
        let seed_code = union_code(&left, &ext)?;
        debug_assert!(union_min_distance_3(&[&seed_code]));
        let cert = canonicalize(&seed_code).canon.flat().to_vec();
        match by_cert.get(&cert) {
            Some(&idx) => out[idx].copies += 1,
            None => {
                by_cert.insert(cert, out.len());
                out.push(Seed { k, code: seed_code, c_prime: norm, copies: 1 });
            }
        }
    }
    Ok(out)
}

struct SlotCand {
    ext: Code,
    proj: Vec<HashSet<u64>>,
}

fn single_deletion_sets(c: &Code) -> Vec<HashSet<u64>> {
    let n = c.n();
    let q = c.q() as u64;
    (0..n)
        .map(|j| c.words().map(|w| key_skipping(w, q, j, j)).collect())
        .collect()
}

/// Projection sets of a slice grouped by its first coordinate, used to pin
/// the free relabeling against the seed slice.
fn grouped_projections(slice: &Code) -> HashMap<u8, Vec<u64>> {
    let q = slice.q() as u64;
    let mut groups: HashMap<u8, Vec<u64>> = HashMap::new();
    for w in slice.words() {
        groups.entry(w[0]).or_default().push(key_skipping(w, q, 0, 0));
    }
    for keys in groups.values_mut() {
        keys.sort_unstable();
    }
    groups
}

/// The constraint `s(C',2,v) = s(C'',2,0)` either fails or forces a unique
/// relabeling of the first coordinate of the candidate.
fn pin_against_seed_slice(cand: &Code, target: &Code) -> Option<Code> {
    let q = cand.q();
    let own = grouped_projections(&cand.shorten(1, 0));
    let mut lookup: HashMap<Vec<u64>, u8> = HashMap::new();
    for (u, keys) in grouped_projections(target) {
        lookup.insert(keys, u);
    }
    let mut sigma = vec![0u8; q];
    let mut used = vec![false; q];
    for u in 0..q as u8 {
        let keys = own.get(&u)?;
        let &tgt = lookup.get(keys)?;
        if used[tgt as usize] {
            return None;
        }
        used[tgt as usize] = true;
        sigma[u as usize] = tgt;
    }
    if sigma[0] != 0 {
        return None;
    }
    Some(relabel_first(cand, &sigma))
}

/// Phase two: every semi-canonical full code containing the seed.
pub fn phase2_augment(reg: &Registry, seed: &Seed) -> Result<Vec<Code>> {
    let n = seed.c_prime.n();
    let q = reg.q();
    let mut cache = SliceCache::new();
    let mut raw = Vec::with_capacity(q);
    for v in 0..q {
        raw.push(candidates_inner(reg, n, seed.k, 1, v as u8, &mut cache)?);
    }
    augment_inner(reg, seed, &raw)
}

pub(super) fn augment_inner(
    reg: &Registry,
    seed: &Seed,
    raw_slots: &[Vec<Code>],
) -> Result<Vec<Code>> {
    let q = reg.q();
    let mut slots: Vec<Vec<SlotCand>> = Vec::with_capacity(q);
    for (v, raw) in raw_slots.iter().enumerate() {
        let target = seed.c_prime.shorten(1, v as u8);
        let mut pinned_seen: HashSet<Vec<u8>> = HashSet::new();
        let mut list = Vec::new();
        for cand in raw {
            let pinned = match pin_against_seed_slice(cand, &target) {
                Some(p) => p,
                None => continue,
            };
            if !pinned_seen.insert(pinned.flat().to_vec()) {
                continue;
            }
            let ext = pinned.extend(2, v as u8);
            if !union_min_distance_3(&[&seed.code, &ext]) {
                continue;
            }
            let proj = single_deletion_sets(&pinned);
            list.push(SlotCand { ext, proj });
        }
        if list.is_empty() {
            return Ok(Vec::new());
        }
        slots.push(list);
    }

    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(q);
    assemble(reg, seed, &slots, &mut chosen, &mut out)?;
    Ok(out)
}

fn compatible(a: &SlotCand, b: &SlotCand) -> bool {
    a.proj.iter().zip(&b.proj).all(|(x, y)| x.is_disjoint(y))
}

fn assemble(
    reg: &Registry,
    seed: &Seed,
    slots: &[Vec<SlotCand>],
    chosen: &mut Vec<usize>,
    out: &mut Vec<Code>,
) -> Result<()> {
    let q = slots.len();
    if chosen.len() == q {
        let n = seed.c_prime.n();
        let mut words: Vec<Vec<u8>> = Vec::with_capacity(q * seed.c_prime.len());
        for (v, &idx) in chosen.iter().enumerate() {
            words.extend(slots[v][idx].ext.words().map(|w| w.to_vec()));
        }
        let full = Code::from_words(reg.q(), n + 1, words)?;
        debug_assert!(full.is_mds_d3()?);
        debug_assert!(seed.code.words().all(|w| full.contains(w)));
        if reg.is_semi_canonical(&full)? {
            out.push(full);
        }
        return Ok(());
    }
    let depth = chosen.len();
    for idx in 0..slots[depth].len() {
        if (0..depth).all(|d| compatible(&slots[d][chosen[d]], &slots[depth][idx])) {
            chosen.push(idx);
            assemble(reg, seed, slots, chosen, out)?;
            chosen.pop();
        }
    }
    Ok(())
}
