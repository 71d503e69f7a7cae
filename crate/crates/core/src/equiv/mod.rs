//! Code equivalence: coordinate permutations combined with independent
//! symbol permutations per coordinate, their action on codes and on
//! (coordinate, value) pairs, lifting and restriction across extension and
//! shortening, canonical forms, and isomorphism enumeration.

mod canon;
mod graph;
mod stabchain;

pub use canon::{canonicalize, CanonResult};
pub use graph::{to_graph, ColoredGraph};
pub use stabchain::StabChain;

use crate::codes::Code;
use crate::{Error, Result};
use rand::Rng;
use std::fmt::Write as _;

/// An equivalence map g = (pi; sigma_1, ..., sigma_n): coordinate i of the
/// source is carried to coordinate pi(i) of the target, where the symbol
/// permutation sigma_{pi(i)} is applied. Coordinates are 0-based throughout
/// the API; the text format uses 1-based coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EquivMap {
    n: usize,
    q: usize,
    /// pi[i] = target coordinate receiving source coordinate i.
    pi: Vec<usize>,
    /// sigma[j] = symbol permutation applied at target coordinate j.
    sigma: Vec<Vec<u8>>,
}

impl EquivMap {
    pub fn new(n: usize, q: usize, pi: Vec<usize>, sigma: Vec<Vec<u8>>) -> Result<EquivMap> {
        if pi.len() != n || sigma.len() != n {
            return Err(Error::BadArgument("pi and sigma must have length n".into()));
        }
        let mut seen = vec![false; n];
        for &t in &pi {
            if t >= n || seen[t] {
                return Err(Error::BadArgument("pi is not a permutation".into()));
            }
            seen[t] = true;
        }
        for s in &sigma {
            if s.len() != q {
                return Err(Error::BadArgument("sigma entries must have length q".into()));
            }
            let mut seen = vec![false; q];
            for &v in s {
                if v as usize >= q || seen[v as usize] {
                    return Err(Error::BadArgument("sigma entry is not a permutation".into()));
                }
                seen[v as usize] = true;
            }
        }
        Ok(EquivMap { n, q, pi, sigma })
    }

    pub fn identity(n: usize, q: usize) -> EquivMap {
        EquivMap {
            n,
            q,
            pi: (0..n).collect(),
            sigma: vec![(0..q as u8).collect(); n],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.pi.iter().enumerate().all(|(i, &t)| i == t)
            && self.sigma.iter().all(|s| s.iter().enumerate().all(|(v, &w)| v == w as usize))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn pi(&self) -> &[usize] {
        &self.pi
    }

    pub fn sigma(&self, target: usize) -> &[u8] {
        &self.sigma[target]
    }

    /// Image of a single word.
    pub fn apply_word(&self, w: &[u8]) -> Vec<u8> {
        debug_assert_eq!(w.len(), self.n);
        let mut out = vec![0u8; self.n];
        for (i, &s) in w.iter().enumerate() {
            let t = self.pi[i];
            out[t] = self.sigma[t][s as usize];
        }
        out
    }

    /// Image of a code.
    pub fn apply(&self, code: &Code) -> Code {
        debug_assert_eq!(code.n(), self.n);
        let mut words: Vec<Vec<u8>> = code.words().map(|w| self.apply_word(w)).collect();
        words.sort_unstable();
        let mut flat = Vec::with_capacity(words.len() * self.n);
        for w in words {
            flat.extend(w);
        }
        Code::from_sorted_flat(code.q(), self.n, flat)
    }

    /// Action on a (coordinate, value) pair.
    pub fn act_pair(&self, i: usize, v: u8) -> (usize, u8) {
        let t = self.pi[i];
        (t, self.sigma[t][v as usize])
    }

    /// self after other: (self.compose(other))(c) = self(other(c)).
    pub fn compose(&self, other: &EquivMap) -> EquivMap {
        debug_assert_eq!((self.n, self.q), (other.n, other.q));
        let mut pi = vec![0usize; self.n];
        let mut sigma = vec![vec![0u8; self.q]; self.n];
        for i in 0..self.n {
            let mid = other.pi[i];
            let tgt = self.pi[mid];
            pi[i] = tgt;
            for v in 0..self.q {
                sigma[tgt][v] = self.sigma[tgt][other.sigma[mid][v] as usize];
            }
        }
        EquivMap { n: self.n, q: self.q, pi, sigma }
    }

    pub fn inverse(&self) -> EquivMap {
        let mut pi = vec![0usize; self.n];
        let mut sigma = vec![vec![0u8; self.q]; self.n];
        for i in 0..self.n {
            let t = self.pi[i];
            pi[t] = i;
            for v in 0..self.q {
                sigma[i][self.sigma[t][v] as usize] = v as u8;
            }
        }
        EquivMap { n: self.n, q: self.q, pi, sigma }
    }

    /// Lift across extension at position `i` (0-based): the unique map on
    /// n+1 coordinates fixing coordinate i with the identity symbol action
    /// such that lifting commutes with extension:
    /// `lift(g, i).apply(c.extend(i, v)) == g.apply(c).extend(i, v)`.
    pub fn lift(&self, i: usize) -> EquivMap {
        assert!(i <= self.n);
        let n1 = self.n + 1;
        let embed = |j: usize| if j < i { j } else { j + 1 };
        let mut pi = vec![0usize; n1];
        let mut sigma = vec![vec![0u8; self.q]; n1];
        pi[i] = i;
        sigma[i] = (0..self.q as u8).collect();
        for j in 0..self.n {
            let t = embed(self.pi[j]);
            pi[embed(j)] = t;
            sigma[t] = self.sigma[self.pi[j]].clone();
        }
        EquivMap { n: n1, q: self.q, pi, sigma }
    }

    /// Restrict across shortening at coordinate `i`: requires that the map
    /// fixes coordinate i with the identity symbol action, so that
    /// `restrict(g, i).apply(c.shorten(i, v)) == g.apply(c).shorten(i, v)`.
    pub fn restrict(&self, i: usize) -> Result<EquivMap> {
        if self.pi[i] != i {
            return Err(Error::BadArgument(format!(
                "cannot restrict: coordinate {i} is not fixed"
            )));
        }
        if self.sigma[i].iter().enumerate().any(|(v, &w)| v != w as usize) {
            return Err(Error::BadArgument(format!(
                "cannot restrict: symbol action at coordinate {i} is not the identity"
            )));
        }
        let n1 = self.n - 1;
        let unembed = |j: usize| if j < i { j } else { j - 1 };
        let mut pi = vec![0usize; n1];
        let mut sigma = vec![vec![0u8; self.q]; n1];
        for j in 0..self.n {
            if j == i {
                continue;
            }
            let t = self.pi[j];
            pi[unembed(j)] = unembed(t);
            sigma[unembed(t)] = self.sigma[t].clone();
        }
        Ok(EquivMap { n: n1, q: self.q, pi, sigma })
    }

    /// Total number of points (coordinate, value); the permutation domain.
    pub fn n_points(&self) -> usize {
        self.n * self.q
    }

    /// Action on the flattened point i*q + v.
    #[inline]
    pub fn act_point(&self, p: usize) -> usize {
        let (i, v) = (p / self.q, (p % self.q) as u8);
        let (j, w) = self.act_pair(i, v);
        j * self.q + w as usize
    }

    /// The point permutation as a lookup table.
    pub fn point_table(&self) -> Vec<u16> {
        (0..self.n_points()).map(|p| self.act_point(p) as u16).collect()
    }

    /// Uniformly random equivalence map.
    pub fn random<R: Rng>(n: usize, q: usize, rng: &mut R) -> EquivMap {
        use rand::seq::SliceRandom;
        let mut pi: Vec<usize> = (0..n).collect();
        pi.shuffle(rng);
        let mut sigma = Vec::with_capacity(n);
        for _ in 0..n {
            let mut s: Vec<u8> = (0..q as u8).collect();
            s.shuffle(rng);
            sigma.push(s);
        }
        EquivMap { n, q, pi, sigma }
    }

    /// Text format: header `n q`, a line with the 1-based images of pi,
    /// then n lines with the images of 0..q-1 under sigma_1, ..., sigma_n.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.q);
        let pi_line: Vec<String> = self.pi.iter().map(|&t| (t + 1).to_string()).collect();
        let _ = writeln!(s, "{}", pi_line.join(" "));
        for j in 0..self.n {
            let line: Vec<String> = self.sigma[j].iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<EquivMap> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) =
            lines.next().ok_or_else(|| Error::Parse { line: 1, msg: "empty file".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse { line: 1, msg: "header must be `n q`".into() });
        }
        let n: usize =
            fields[0].parse().map_err(|_| Error::Parse { line: 1, msg: "bad n".into() })?;
        let q: usize =
            fields[1].parse().map_err(|_| Error::Parse { line: 1, msg: "bad q".into() })?;
        let (lno, pi_line) =
            lines.next().ok_or_else(|| Error::Parse { line: 2, msg: "missing pi".into() })?;
        let mut pi = Vec::with_capacity(n);
        for tok in pi_line.split_whitespace() {
            let v: usize = tok.parse().map_err(|_| Error::Parse {
                line: lno + 1,
                msg: format!("bad pi entry `{tok}`"),
            })?;
            if v == 0 {
                return Err(Error::Parse { line: lno + 1, msg: "pi entries are 1-based".into() });
            }
            pi.push(v - 1);
        }
        let mut sigma = Vec::with_capacity(n);
        for _ in 0..n {
            let (lno, line) = lines
                .next()
                .ok_or_else(|| Error::Parse { line: 0, msg: "missing sigma line".into() })?;
            let mut s = Vec::with_capacity(q);
            for tok in line.split_whitespace() {
                let v: u8 = tok.parse().map_err(|_| Error::Parse {
                    line: lno + 1,
                    msg: format!("bad sigma entry `{tok}`"),
                })?;
                s.push(v);
            }
            sigma.push(s);
        }
        EquivMap::new(n, q, pi, sigma)
    }
}

/// The transporter carrying the pair (i, v) to (0, 0): the cyclic coordinate
/// shift moving coordinate i to the front, followed by the swap of values
/// v and 0 at the new first coordinate.
pub fn front_transporter(n: usize, q: usize, i: usize, v: u8) -> EquivMap {
    assert!(i < n && (v as usize) < q);
    let mut pi: Vec<usize> = (0..n).collect();
    for (j, t) in pi.iter_mut().enumerate().take(i + 1) {
        *t = (j + 1) % (i + 1);
    }
    let mut sigma = vec![(0..q as u8).collect::<Vec<u8>>(); n];
    sigma[0].swap(0, v as usize);
    EquivMap { n, q, pi, sigma }
}

/// Decide equivalence; on success returns a map carrying `b` to `a`.
pub fn are_equivalent(a: &Code, b: &Code) -> Option<EquivMap> {
    if a.q() != b.q() || a.n() != b.n() || a.len() != b.len() {
        return None;
    }
    let ca = canonicalize(a);
    let cb = canonicalize(b);
    if ca.canon != cb.canon {
        return None;
    }
    Some(ca.transporter.inverse().compose(&cb.transporter))
}

/// Lazily enumerate every map carrying `a` to `b` (the coset Aut(b) g0),
/// without repetition; empty when the codes are not equivalent.
pub fn iso_set(a: &Code, b: &Code) -> IsoIter {
    if a.q() != b.q() || a.n() != b.n() || a.len() != b.len() {
        return IsoIter { inner: None };
    }
    let ca = canonicalize(a);
    let cb = canonicalize(b);
    iso_set_from(&ca, &cb)
}

/// As [`iso_set`], reusing already-computed canonicalizations.
pub fn iso_set_from(ca: &CanonResult, cb: &CanonResult) -> IsoIter {
    if ca.canon != cb.canon {
        return IsoIter { inner: None };
    }
    let g0 = cb.transporter.inverse().compose(&ca.transporter);
    let chain = StabChain::from_generators(
        &cb.aut_gens,
        cb.transporter.n(),
        cb.transporter.q(),
    );
    IsoIter { inner: Some((chain.into_elements(), g0)) }
}

pub struct IsoIter {
    inner: Option<(stabchain::ElementIter, EquivMap)>,
}

impl Iterator for IsoIter {
    type Item = EquivMap;

    fn next(&mut self) -> Option<EquivMap> {
        let (elems, g0) = self.inner.as_mut()?;
        elems.next().map(|a| a.compose(g0))
    }
}

/// Orbit representative (smallest point) for every point of 0..n*q under
/// the group generated by `gens`.
pub fn point_orbits(gens: &[EquivMap], n: usize, q: usize) -> Vec<usize> {
    let total = n * q;
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for g in gens {
        for p in 0..total {
            let (a, b) = (find(&mut parent, p), find(&mut parent, g.act_point(p)));
            if a != b {
                let (lo, hi) = (a.min(b), a.max(b));
                parent[hi] = lo;
            }
        }
    }
    (0..total).map(|p| find(&mut parent, p)).collect()
}

/// Generators of the full group of equivalence maps on n coordinates:
/// adjacent coordinate transpositions plus, per coordinate, a transposition
/// and a full cycle of the symbols.
pub fn full_group_generators(n: usize, q: usize) -> Vec<EquivMap> {
    let mut gens = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let mut pi: Vec<usize> = (0..n).collect();
        pi.swap(i, i + 1);
        gens.push(EquivMap::new(n, q, pi, vec![(0..q as u8).collect(); n]).unwrap());
    }
    for i in 0..n {
        if q >= 2 {
            let mut sigma = vec![(0..q as u8).collect::<Vec<u8>>(); n];
            sigma[i].swap(0, 1);
            gens.push(EquivMap::new(n, q, (0..n).collect(), sigma).unwrap());
            let mut sigma = vec![(0..q as u8).collect::<Vec<u8>>(); n];
            sigma[i] = (0..q as u8).map(|v| ((v as usize + 1) % q) as u8).collect();
            gens.push(EquivMap::new(n, q, (0..n).collect(), sigma).unwrap());
        }
    }
    gens
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn compose_and_inverse_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let g = EquivMap::random(4, 3, &mut rng);
            let h = EquivMap::random(4, 3, &mut rng);
            let w: Vec<u8> = (0..4).map(|_| rng.gen_range(0..3u8)).collect();
            assert_eq!(g.compose(&h).apply_word(&w), g.apply_word(&h.apply_word(&w)));
            assert!(g.compose(&g.inverse()).is_identity());
            assert!(g.inverse().compose(&g).is_identity());
        }
    }

    #[test]
    fn front_transporter_examples() {
        // carries (1, 0) to (0, 0): plain adjacent swap of the coordinates
        let h = front_transporter(3, 4, 1, 0);
        assert_eq!(h.apply_word(&[1, 2, 3]), vec![2, 1, 3]);
        // carries (1, 3) to (0, 0): swap values 3 and 0 at the new front
        let h = front_transporter(3, 4, 1, 3);
        assert_eq!(h.apply_word(&[1, 2, 3]), vec![2, 1, 3]);
        assert_eq!(h.apply_word(&[1, 3, 2]), vec![0, 1, 2]);
        assert_eq!(h.act_pair(1, 3), (0, 0));
        for i in 0..5 {
            for v in 0..4u8 {
                assert_eq!(front_transporter(5, 4, i, v).act_pair(i, v), (0, 0));
            }
        }
    }

    #[test]
    fn lift_commutes_with_extension() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let code = crate::linear::kernel_code(
            &crate::gf::Field::new(3).unwrap(),
            &crate::linear::mds_parity_check(&crate::gf::Field::new(3).unwrap(), 4).unwrap(),
        )
        .unwrap();
        for _ in 0..25 {
            let g = EquivMap::random(4, 3, &mut rng);
            for i in 0..=4 {
                for v in 0..3u8 {
                    let lhs = g.lift(i).apply(&code.extend(i, v));
                    let rhs = g.apply(&code).extend(i, v);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn restrict_commutes_with_shortening() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = crate::gf::Field::new(3).unwrap();
        let code =
            crate::linear::kernel_code(&f, &crate::linear::mds_parity_check(&f, 4).unwrap())
                .unwrap();
        for _ in 0..25 {
            // build a map fixing coordinate 2 with identity symbol action
            let small = EquivMap::random(3, 3, &mut rng);
            let g = small.lift(2);
            assert_eq!(g.restrict(2).unwrap(), small);
            for v in 0..3u8 {
                let lhs = g.restrict(2).unwrap().apply(&code.shorten(2, v));
                let rhs = g.apply(&code).shorten(2, v);
                assert_eq!(lhs, rhs);
            }
            // restriction precondition violations are errors
            let mut pi: Vec<usize> = vec![1, 0, 2, 3];
            let bad = EquivMap::new(4, 3, pi.clone(), vec![(0..3).collect(); 4]).unwrap();
            assert!(bad.restrict(0).is_err());
            pi = (0..4).collect();
            let mut sigma = vec![(0..3).collect::<Vec<u8>>(); 4];
            sigma[0] = vec![1, 0, 2];
            let bad = EquivMap::new(4, 3, pi, sigma).unwrap();
            assert!(bad.restrict(0).is_err());
        }
    }

    #[test]
    fn act_pair_matches_slice_transport() {
        // g maps the slice at (i, v) to the slice at g(i, v)
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let f = crate::gf::Field::new(3).unwrap();
        let code =
            crate::linear::kernel_code(&f, &crate::linear::mds_parity_check(&f, 4).unwrap())
                .unwrap();
        for _ in 0..30 {
            let g = EquivMap::random(4, 3, &mut rng);
            let image = g.apply(&code);
            for i in 0..4 {
                for v in 0..3u8 {
                    let (j, w) = g.act_pair(i, v);
                    assert_eq!(code.shorten(i, v).len(), image.shorten(j, w).len());
                }
            }
        }
    }

    #[test]
    fn text_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let g = EquivMap::random(5, 4, &mut rng);
            let t = g.to_text();
            assert_eq!(EquivMap::from_text(&t).unwrap(), g);
        }
        assert!(EquivMap::from_text("2 2\n0 1\n0 1\n0 1\n").is_err()); // 0-based pi rejected
    }
}
