//! Exhaustive classification of full codes up to equivalence, one length at
//! a time.
//!
//! The registry holds, per length, the ordered class representatives
//! (each containing the all-zero word), their automorphism group orders, and
//! the class index of every full-size shortening.  A step extends the top
//! length by one via the seed/augment search and re-counts the results two
//! independent ways; the counts must match exactly.
//!
//! In-memory indices and coordinates are 0-based throughout; the directory
//! format and all printed reports use 1-based class indices and coordinates.

mod consistency;
mod search;

pub use consistency::ConsistencyRow;
pub use search::{candidate_extensions, phase1_seeds, phase2_augment, Seed};

use crate::codes::Code;
use crate::equiv::{canonicalize, point_orbits, CanonResult};
use crate::{Error, Result};
use consistency::{factorial, Frac};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

/// One classified equivalence class.
#[derive(Debug, Clone)]
pub struct ClassEntry {
    /// Semi-canonical representative containing the all-zero word.
    pub code: Code,
    /// Exact order of the automorphism group.
    pub aut_order: u128,
    /// `phi[i][v]`: class index (one length down) of the shortening at
    /// coordinate `i`, value `v`.  At the bottom length the table is all
    /// zeros, standing for the single class of one-word codes.
    pub phi: Vec<Vec<usize>>,
    cert: Vec<u8>,
    pair_orbit_reps: Vec<(usize, u8)>,
}

impl ClassEntry {
    fn build(code: Code, phi: Vec<Vec<usize>>) -> ClassEntry {
        let canon = canonicalize(&code);
        ClassEntry::from_canon(code, phi, &canon)
    }

    fn from_canon(code: Code, phi: Vec<Vec<usize>>, canon: &CanonResult) -> ClassEntry {
        let orbits = point_orbits(&canon.aut_gens, code.n(), code.q());
        let q = code.q();
        let pair_orbit_reps: Vec<(usize, u8)> = (0..code.n() * q)
            .filter(|&p| orbits[p] == p)
            .map(|p| (p / q, (p % q) as u8))
            .collect();
        debug_assert!(code.contains(&vec![0u8; code.n()]));
        ClassEntry {
            code,
            aut_order: canon.aut_order,
            phi,
            cert: canon.canon.flat().to_vec(),
            pair_orbit_reps,
        }
    }
}

struct Level {
    entries: Vec<ClassEntry>,
    by_cert: HashMap<Vec<u8>, usize>,
}

impl Level {
    fn new(entries: Vec<ClassEntry>) -> Level {
        let by_cert = entries
            .iter()
            .enumerate()
            .map(|(idx, e)| (e.cert.clone(), idx))
            .collect();
        Level { entries, by_cert }
    }
}

/// All classified lengths for one alphabet size.
pub struct Registry {
    q: usize,
    levels: BTreeMap<usize, Level>,
    consistency: BTreeMap<usize, Vec<ConsistencyRow>>,
}

/// Slice canonicalizations `(class, coordinate, value)` shared across one
/// extension step.
pub(crate) struct SliceCache {
    map: HashMap<(usize, usize, u8), CanonResult>,
}

impl SliceCache {
    pub(crate) fn new() -> SliceCache {
        SliceCache { map: HashMap::new() }
    }

    fn canon_slice(&mut self, reg: &Registry, n: usize, l: usize, j: usize, w: u8) -> &CanonResult {
        self.map.entry((l, j, w)).or_insert_with(|| {
            let code = &reg.classes(n).expect("level exists")[l].code;
            canonicalize(&code.shorten(j, w))
        })
    }
}

impl Registry {
    /// Starts a registry at length 3 with the single class of repetition
    /// words.
    pub fn bootstrap(q: usize) -> Result<Registry> {
        if !(2..=8).contains(&q) {
            return Err(Error::BadArgument(format!("classification supports 2 <= q <= 8, got {q}")));
        }
        let words: Vec<Vec<u8>> = (0..q as u8).map(|v| vec![v; 3]).collect();
        let code = Code::from_words(q, 3, words)?;
        debug_assert!(code.is_mds_d3()?);
        let entry = ClassEntry::build(code, vec![vec![0; q]; 3]);
        let mut levels = BTreeMap::new();
        levels.insert(3, Level::new(vec![entry]));
        Ok(Registry { q, levels, consistency: BTreeMap::new() })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Classified lengths, ascending.
    pub fn lengths(&self) -> Vec<usize> {
        self.levels.keys().copied().collect()
    }

    pub fn max_length(&self) -> Option<usize> {
        self.levels.keys().next_back().copied()
    }

    pub fn classes(&self, n: usize) -> Option<&[ClassEntry]> {
        self.levels.get(&n).map(|l| l.entries.as_slice())
    }

    /// Consistency rows recorded by the step that produced length `n`.
    pub fn consistency_rows(&self, n: usize) -> Option<&[ConsistencyRow]> {
        self.consistency.get(&n).map(|r| r.as_slice())
    }

    fn index_by_cert(&self, n: usize, cert: &[u8]) -> Option<usize> {
        self.levels.get(&n).and_then(|l| l.by_cert.get(cert)).copied()
    }

    /// Class index of `code` at its own length.
    pub fn phi(&self, code: &Code) -> Result<usize> {
        let n = code.n();
        if self.levels.get(&n).is_none() {
            return Err(Error::UnknownClass { n, q: self.q });
        }
        let cert = canonicalize(code).canon.flat().to_vec();
        self.index_by_cert(n, &cert).ok_or(Error::UnknownClass { n, q: self.q })
    }

    /// Class index of every shortening of a full code, one length down.
    pub fn shortening_classes(&self, code: &Code) -> Result<Vec<Vec<usize>>> {
        let m = code.n() - 1;
        let mut table = Vec::with_capacity(code.n());
        for i in 0..code.n() {
            let mut row = Vec::with_capacity(self.q);
            for v in 0..self.q as u8 {
                let s = code.shorten(i, v);
                let cert = canonicalize(&s).canon.flat().to_vec();
                let idx = self
                    .index_by_cert(m, &cert)
                    .ok_or(Error::UnknownClass { n: m, q: self.q })?;
                row.push(idx);
            }
            table.push(row);
        }
        Ok(table)
    }

    /// Checks the three defining properties: minimum distance 3, the
    /// `(1,0)`-shortening literally equals a registry representative of class
    /// `k`, and every full-size shortening has class index at least `k`.
    /// Works for partial codes; shortenings below full size are skipped.
    pub fn is_semi_canonical(&self, code: &Code) -> Result<bool> {
        let n = code.n();
        if n < 4 || code.q() != self.q {
            return Err(Error::BadArgument("semi-canonical check needs a longer code".into()));
        }
        let m = n - 1;
        let entries = match self.levels.get(&m) {
            Some(l) => &l.entries,
            None => return Err(Error::UnknownClass { n: m, q: self.q }),
        };
        let full = self.q.pow((m - 2) as u32);
        let s10 = code.shorten(0, 0);
        if s10.len() != full {
            return Ok(false);
        }
        let k = match entries.iter().position(|e| e.code == s10) {
            Some(k) => k,
            None => return Ok(false),
        };
        if !search::union_min_distance_3(&[code]) {
            return Ok(false);
        }
        for i in 0..n {
            for v in 0..self.q as u8 {
                if i == 0 && v == 0 {
                    continue;
                }
                let s = code.shorten(i, v);
                if s.len() != full {
                    continue;
                }
                let cert = canonicalize(&s).canon.flat().to_vec();
                let idx = self
                    .index_by_cert(m, &cert)
                    .ok_or(Error::UnknownClass { n: m, q: self.q })?;
                if idx < k {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Writes the registry as a directory: a top-level index, one code file
    /// per representative named by 1-based class index, a per-length
    /// manifest with `index aut_order` lines and `phi index i v class`
    /// triples, and the consistency report of each extension step.
    pub fn save_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut top = format!("q {}\n", self.q);
        let lengths: Vec<String> = self.levels.keys().map(|n| n.to_string()).collect();
        let _ = writeln!(top, "levels {}", lengths.join(" "));
        std::fs::write(dir.join("registry.txt"), top)?;
        for (&n, level) in &self.levels {
            let mut manifest = String::new();
            for (idx, e) in level.entries.iter().enumerate() {
                e.code.write_file(&dir.join(format!("rep_{}_{}.txt", n, idx + 1)))?;
                let _ = writeln!(manifest, "{} {}", idx + 1, e.aut_order);
            }
            for (idx, e) in level.entries.iter().enumerate() {
                for (i, row) in e.phi.iter().enumerate() {
                    for (v, &p) in row.iter().enumerate() {
                        let _ = writeln!(manifest, "phi {} {} {} {}", idx + 1, i + 1, v, p + 1);
                    }
                }
            }
            std::fs::write(dir.join(format!("manifest_{n}.txt")), manifest)?;
        }
        for (&n, rows) in &self.consistency {
            let mut text = String::new();
            for r in rows {
                let verdict = if r.ok() { "ok" } else { "FAIL" };
                let _ = writeln!(text, "{} {} {} {}", r.k + 1, r.n_first, r.n_second, verdict);
            }
            std::fs::write(dir.join(format!("consistency_{n}.txt")), text)?;
        }
        Ok(())
    }

    /// Reads a registry directory back, recomputing certificates and
    /// automorphism data and validating the stored group orders.
    pub fn load_dir(dir: &Path) -> Result<Registry> {
        let top = std::fs::read_to_string(dir.join("registry.txt"))?;
        let mut q = 0usize;
        let mut lengths: Vec<usize> = Vec::new();
        for (lineno, line) in top.lines().enumerate() {
            let mut it = line.split_whitespace();
            match it.next() {
                Some("q") => {
                    q = it
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or(Error::Parse { line: lineno + 1, msg: "bad q line".into() })?
                }
                Some("levels") => {
                    for t in it {
                        lengths.push(t.parse().map_err(|_| Error::Parse {
                            line: lineno + 1,
                            msg: "bad level".into(),
                        })?);
                    }
                }
                _ => {}
            }
        }
        if q == 0 {
            return Err(Error::Parse { line: 1, msg: "missing q".into() });
        }
        let mut levels = BTreeMap::new();
        for &n in &lengths {
            let manifest = std::fs::read_to_string(dir.join(format!("manifest_{n}.txt")))?;
            let mut orders: Vec<u128> = Vec::new();
            let mut phis: Vec<Vec<Vec<usize>>> = Vec::new();
            for (lineno, line) in manifest.lines().enumerate() {
                let toks: Vec<&str> = line.split_whitespace().collect();
                let bad = || Error::Parse { line: lineno + 1, msg: format!("bad manifest line in manifest_{n}.txt") };
                if toks.is_empty() {
                    continue;
                }
                if toks[0] == "phi" {
                    if toks.len() != 5 {
                        return Err(bad());
                    }
                    let idx: usize = toks[1].parse().map_err(|_| bad())?;
                    let i: usize = toks[2].parse().map_err(|_| bad())?;
                    let v: usize = toks[3].parse().map_err(|_| bad())?;
                    let p: usize = toks[4].parse().map_err(|_| bad())?;
                    if idx == 0 || idx > phis.len() || i == 0 || i > n || v >= q || p == 0 {
                        return Err(bad());
                    }
                    phis[idx - 1][i - 1][v] = p - 1;
                } else {
                    if toks.len() != 2 {
                        return Err(bad());
                    }
                    let idx: usize = toks[0].parse().map_err(|_| bad())?;
                    let order: u128 = toks[1].parse().map_err(|_| bad())?;
                    if idx != orders.len() + 1 {
                        return Err(bad());
                    }
                    orders.push(order);
                    phis.push(vec![vec![0; q]; n]);
                }
            }
            let mut entries = Vec::with_capacity(orders.len());
            for (idx, (order, phi)) in orders.into_iter().zip(phis).enumerate() {
                let code = Code::read_file(&dir.join(format!("rep_{}_{}.txt", n, idx + 1)))?;
                let entry = ClassEntry::build(code, phi);
                if entry.aut_order != order {
                    return Err(Error::Parse {
                        line: idx + 1,
                        msg: format!("stored group order {order} disagrees at length {n}"),
                    });
                }
                entries.push(entry);
            }
            levels.insert(n, Level::new(entries));
        }
        let mut consistency = BTreeMap::new();
        for &n in &lengths {
            let path = dir.join(format!("consistency_{n}.txt"));
            if !path.exists() {
                continue;
            }
            let text = std::fs::read_to_string(path)?;
            let mut rows = Vec::new();
            for (lineno, line) in text.lines().enumerate() {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.is_empty() {
                    continue;
                }
                let bad = || Error::Parse { line: lineno + 1, msg: format!("bad consistency line for length {n}") };
                if toks.len() != 4 {
                    return Err(bad());
                }
                let k: usize = toks[0].parse().map_err(|_| bad())?;
                let n_first: u128 = toks[1].parse().map_err(|_| bad())?;
                let n_second: u128 = toks[2].parse().map_err(|_| bad())?;
                let exact = toks[3] == "ok" || n_first != n_second;
                rows.push(ConsistencyRow { k: k - 1, n_first, n_second, exact });
            }
            consistency.insert(n, rows);
        }
        Ok(Registry { q, levels, consistency })
    }
}

/// Options for the end-to-end classification driver.
#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    pub q: usize,
    /// Stop after classifying this length; `None` runs until a length has no
    /// classes.
    pub to: Option<usize>,
    /// Rayon worker threads; 0 uses the global default.  The output is
    /// byte-identical regardless of the worker count.
    pub workers: usize,
    /// Permit the large alphabets 7 and 8.
    pub stretch: bool,
}

impl ClassifyOptions {
    pub fn new(q: usize) -> ClassifyOptions {
        ClassifyOptions { q, to: None, workers: 0, stretch: false }
    }
}

/// Outcome of one extension step.
#[derive(Debug, Clone)]
pub struct StepReport {
    /// The newly classified length.
    pub produced: usize,
    /// Number of equivalence classes at the new length.
    pub classes: usize,
    /// Seeds found, counted with multiplicity (before isomorph rejection).
    pub seeds_total: u64,
    /// Inequivalent seeds.
    pub seeds_inequivalent: usize,
    /// Full codes produced over all seeds (before isomorph rejection).
    pub codes_total: u64,
    pub consistency: Vec<ConsistencyRow>,
}

/// Extends the registry by one length and checks the double count.
pub fn classify_step(reg: &mut Registry) -> Result<StepReport> {
    let n = reg.max_length().ok_or_else(|| Error::BadArgument("empty registry".into()))?;
    let q = reg.q();
    let k_count = reg.classes(n).map(|e| e.len()).unwrap_or(0);
    let mut cache = SliceCache::new();

    struct Discovered {
        code: Code,
        cert: Vec<u8>,
        phi: Vec<Vec<usize>>,
        min_phi: usize,
        canon: CanonResult,
    }
    let mut discovered: Vec<Discovered> = Vec::new();
    let mut by_cert: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut rows: Vec<ConsistencyRow> = Vec::new();
    let mut seeds_total = 0u64;
    let mut seeds_inequivalent = 0usize;
    let mut codes_total = 0u64;

    for k in 0..k_count {
        let seeds = search::phase1_inner(reg, n, k, &mut cache)?;
        let mut raw_slots = Vec::with_capacity(q);
        for v in 0..q {
            raw_slots.push(search::candidates_inner(reg, n, k, 1, v as u8, &mut cache)?);
        }
        let produced: Vec<Result<Vec<Code>>> = seeds
            .par_iter()
            .map(|s| search::augment_inner(reg, s, &raw_slots))
            .collect();
        let mut nd_md_sum: u128 = 0;
        for (seed, res) in seeds.iter().zip(produced) {
            let fulls = res?;
            nd_md_sum += seed.copies as u128 * fulls.len() as u128;
            codes_total += fulls.len() as u64;
            seeds_total += seed.copies;
            for f in fulls {
                let canon = canonicalize(&f);
                let cert = canon.canon.flat().to_vec();
                if by_cert.contains_key(&cert) {
                    continue;
                }
                let phi = reg.shortening_classes(&f)?;
                let min_phi = phi.iter().flatten().copied().min().expect("nonempty table");
                debug_assert_eq!(min_phi, k);
                by_cert.insert(cert.clone(), discovered.len());
                discovered.push(Discovered { code: f, cert, phi, min_phi, canon });
            }
        }
        seeds_inequivalent += seeds.len();

        let base_aut = reg.classes(n).expect("level exists")[k].aut_order;
        let mut sum = Frac::zero();
        for cls in discovered.iter().filter(|c| c.min_phi == k) {
            let s = cls.phi.iter().flatten().filter(|&&p| p == k).count() as u128;
            sum = sum.add(Frac::ratio(s, cls.canon.aut_order));
        }
        let first = sum.scale(factorial(q - 1)).scale(base_aut).as_integer();
        let n_second = factorial(q - 1) * nd_md_sum;
        rows.push(match first {
            Some(n_first) => ConsistencyRow { k, n_first, n_second, exact: true },
            None => ConsistencyRow { k, n_first: 0, n_second, exact: false },
        });
    }

    discovered.sort_by(|a, b| a.cert.cmp(&b.cert));
    let entries: Vec<ClassEntry> = discovered
        .into_iter()
        .map(|d| ClassEntry::from_canon(d.code, d.phi, &d.canon))
        .collect();
    let classes = entries.len();
    reg.levels.insert(n + 1, Level::new(entries));
    reg.consistency.insert(n + 1, rows.clone());
    Ok(StepReport {
        produced: n + 1,
        classes,
        seeds_total,
        seeds_inequivalent,
        codes_total,
        consistency: rows,
    })
}

/// Classifies from scratch: bootstraps at length 3 and extends until the
/// target length, a length with no classes, or a failed consistency check.
pub fn classify(opts: &ClassifyOptions) -> Result<(Registry, Vec<StepReport>)> {
    if opts.q >= 7 && !opts.stretch {
        return Err(Error::BadArgument(format!(
            "q = {} requires the stretch option",
            opts.q
        )));
    }
    let mut reg = Registry::bootstrap(opts.q)?;
    let mut reports = Vec::new();
    let run = |reg: &mut Registry, reports: &mut Vec<StepReport>| -> Result<()> {
        loop {
            let n = reg.max_length().expect("bootstrapped");
            if let Some(t) = opts.to {
                if n >= t {
                    break;
                }
            }
            if reg.classes(n).map(|e| e.is_empty()).unwrap_or(true) {
                break;
            }
            let report = classify_step(reg)?;
            let failed = report.consistency.iter().any(|r| !r.ok());
            reports.push(report);
            if failed {
                break;
            }
        }
        Ok(())
    };
    if opts.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::BadArgument(e.to_string()))?;
        pool.install(|| run(&mut reg, &mut reports))?;
    } else {
        run(&mut reg, &mut reports)?;
    }
    Ok((reg, reports))
}
