//! Unrestricted block codes over a q-letter alphabet: storage, shortening and
//! extension, distance computations, MDS and perfection checks, bounds, and
//! the text file format.

use crate::bitset::BitSet;
use crate::{Error, Result};
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

/// A codeword is a sequence of symbols in 0..q.
pub type Word = Vec<u8>;

/// A code: a set of distinct words of fixed length n over 0..q.
///
/// Words are stored flat (stride n) in lexicographic order, so equality of
/// two codes with matching parameters is equality of the word buffers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Code {
    q: usize,
    n: usize,
    words: Vec<u8>,
}

impl Hash for Code {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.q.hash(state);
        self.n.hash(state);
        self.words.hash(state);
    }
}

impl Code {
    /// Build a code from words, sorting and checking symbols and duplicates.
    pub fn from_words<I, W>(q: usize, n: usize, words: I) -> Result<Code>
    where
        I: IntoIterator<Item = W>,
        W: AsRef<[u8]>,
    {
        let mut buf: Vec<&[u8]> = Vec::new();
        let owned: Vec<W> = words.into_iter().collect();
        for w in &owned {
            let w = w.as_ref();
            if w.len() != n {
                return Err(Error::BadArgument(format!(
                    "word length {} does not match n={n}",
                    w.len()
                )));
            }
            if w.iter().any(|&s| s as usize >= q) {
                return Err(Error::BadArgument(format!("symbol out of range for q={q}")));
            }
            buf.push(w);
        }
        buf.sort_unstable();
        for pair in buf.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::BadArgument("duplicate codeword".into()));
            }
        }
        let mut flat = Vec::with_capacity(buf.len() * n);
        for w in buf {
            flat.extend_from_slice(w);
        }
        Ok(Code { q, n, words: flat })
    }

    /// Build from an already sorted, validated flat buffer.
    pub(crate) fn from_sorted_flat(q: usize, n: usize, words: Vec<u8>) -> Code {
        debug_assert!(n > 0 && words.len() % n == 0);
        Code { q, n, words }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of codewords.
    pub fn len(&self) -> usize {
        if self.n == 0 {
            0
        } else {
            self.words.len() / self.n
        }
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Iterate codewords in lexicographic order.
    pub fn words(&self) -> impl Iterator<Item = &[u8]> {
        self.words.chunks_exact(self.n)
    }

    pub fn word(&self, idx: usize) -> &[u8] {
        &self.words[idx * self.n..(idx + 1) * self.n]
    }

    /// Flat sorted word buffer; the canonical byte representation.
    pub fn flat(&self) -> &[u8] {
        &self.words
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        debug_assert_eq!(w.len(), self.n);
        self.binary_search(w).is_ok()
    }

    fn binary_search(&self, w: &[u8]) -> std::result::Result<usize, usize> {
        let m = self.len();
        let (mut lo, mut hi) = (0usize, m);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.word(mid).cmp(w) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Ok(mid),
            }
        }
        Err(lo)
    }

    /// Keep the words with value `v` at coordinate `i` and delete that
    /// coordinate. Coordinates are 0-based. The result may be empty.
    pub fn shorten(&self, i: usize, v: u8) -> Code {
        assert!(i < self.n, "coordinate out of range");
        let mut out: Vec<Word> = Vec::new();
        for w in self.words() {
            if w[i] == v {
                let mut s = Vec::with_capacity(self.n - 1);
                s.extend_from_slice(&w[..i]);
                s.extend_from_slice(&w[i + 1..]);
                out.push(s);
            }
        }
        out.sort_unstable();
        let mut flat = Vec::with_capacity(out.len() * (self.n - 1));
        for w in out {
            flat.extend(w);
        }
        Code::from_sorted_flat(self.q, self.n - 1, flat)
    }

    /// Insert the fixed value `v` at coordinate position `i` (0-based) in
    /// every word, producing a length n+1 code.
    pub fn extend(&self, i: usize, v: u8) -> Code {
        assert!(i <= self.n, "insert position out of range");
        assert!((v as usize) < self.q, "symbol out of range");
        let m = self.len();
        let mut flat = Vec::with_capacity(m * (self.n + 1));
        for w in self.words() {
            flat.extend_from_slice(&w[..i]);
            flat.push(v);
            flat.extend_from_slice(&w[i..]);
        }
        // inserting a constant preserves lexicographic order
        Code::from_sorted_flat(self.q, self.n + 1, flat)
    }

    /// Hamming distance between two equal-length words.
    pub fn hamming(a: &[u8], b: &[u8]) -> usize {
        a.iter().zip(b).filter(|(x, y)| x != y).count()
    }

    /// Minimum distance; requires at least two codewords.
    pub fn min_distance(&self) -> Result<usize> {
        let m = self.len();
        if m < 2 {
            return Err(Error::BadArgument(
                "minimum distance needs at least two codewords".into(),
            ));
        }
        let mut best = self.n;
        for a in 0..m {
            for b in a + 1..m {
                let d = Self::hamming(self.word(a), self.word(b));
                if d < best {
                    best = d;
                    if best == 1 {
                        return Ok(1);
                    }
                }
            }
        }
        Ok(best)
    }

    fn pow(q: usize, e: usize) -> usize {
        q.pow(e as u32)
    }

    /// Is this an (n, q^(n-2), 3) MDS code? Checks the size and, for every
    /// coordinate pair, injectivity of the projection that deletes the pair.
    /// A size mismatch is an error: the code is not an MDS candidate.
    pub fn is_mds_d3(&self) -> Result<bool> {
        if self.n < 3 {
            return Err(Error::BadArgument("MDS d=3 check needs n >= 3".into()));
        }
        let expect = Self::pow(self.q, self.n - 2);
        if self.len() != expect {
            return Err(Error::BadArgument(format!(
                "expected q^(n-2) = {expect} codewords, found {}",
                self.len()
            )));
        }
        let q = self.q;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let mut seen = BitSet::new(expect);
                for w in self.words() {
                    let mut idx = 0usize;
                    for (c, &s) in w.iter().enumerate() {
                        if c != i && c != j {
                            idx = idx * q + s as usize;
                        }
                    }
                    if seen.test_and_set(idx) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Is this a perfect one-error-correcting code? Verified by marking the
    /// radius-1 balls in a q^n-bit occupancy array and checking disjointness;
    /// at exactly the sphere-packing size, disjoint balls also cover.
    ///
    /// Errors when 1 + n(q-1) does not divide q^n (no perfect parameters).
    pub fn is_perfect_d3(&self) -> Result<bool> {
        let q = self.q;
        let n = self.n;
        let ball = 1 + n * (q - 1);
        let space = Self::pow(q, n);
        if space % ball != 0 {
            return Err(Error::BadArgument(format!(
                "1 + n(q-1) = {ball} does not divide q^n = {space}"
            )));
        }
        if self.len() != space / ball {
            return Ok(false);
        }
        let mut powers = vec![1usize; n];
        for i in 1..n {
            powers[i] = powers[i - 1] * q;
        }
        let mut occupied = BitSet::new(space);
        for w in self.words() {
            let mut base = 0usize;
            for (i, &s) in w.iter().enumerate() {
                base += s as usize * powers[i];
            }
            if occupied.test_and_set(base) {
                return Ok(false);
            }
            for (i, &s) in w.iter().enumerate() {
                for v in 0..q as u8 {
                    if v != s {
                        let idx = base + (v as usize) * powers[i] - (s as usize) * powers[i];
                        if occupied.test_and_set(idx) {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// Serialize in the text format: header `q n M`, then M sorted lines of
    /// n space-separated symbols.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {}", self.q, self.n, self.len());
        for w in self.words() {
            let mut first = true;
            for &sym in w {
                if !first {
                    s.push(' ');
                }
                let _ = write!(s, "{sym}");
                first = false;
            }
            s.push('\n');
        }
        s
    }

    /// Parse the text format produced by [`Code::to_text`].
    pub fn from_text(text: &str) -> Result<Code> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, msg: "empty file".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse { line: 1, msg: "header must be `q n M`".into() });
        }
        let parse = |s: &str, line: usize| -> Result<usize> {
            s.parse().map_err(|_| Error::Parse { line, msg: format!("bad integer `{s}`") })
        };
        let q = parse(fields[0], 1)?;
        let n = parse(fields[1], 1)?;
        let m = parse(fields[2], 1)?;
        if !(2..=9).contains(&q) || n == 0 {
            return Err(Error::Parse { line: 1, msg: format!("bad parameters q={q} n={n}") });
        }
        let mut words: Vec<Word> = Vec::with_capacity(m);
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut w = Vec::with_capacity(n);
            for tok in line.split_whitespace() {
                let v = parse(tok, idx + 1)?;
                if v >= q {
                    return Err(Error::Parse {
                        line: idx + 1,
                        msg: format!("symbol {v} out of range for q={q}"),
                    });
                }
                w.push(v as u8);
            }
            if w.len() != n {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected {n} symbols, found {}", w.len()),
                });
            }
            words.push(w);
        }
        if words.len() != m {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header says M={m}, found {} words", words.len()),
            });
        }
        Code::from_words(q, n, words)
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_file(path: &std::path::Path) -> Result<Code> {
        let text = std::fs::read_to_string(path)?;
        Code::from_text(&text)
    }
}

/// Singleton bound q^(n-d+1) on the size of a length-n distance-d code.
pub fn singleton_bound(n: usize, d: usize, q: usize) -> Result<u128> {
    if d == 0 || d > n || q < 2 {
        return Err(Error::BadArgument(format!("bad parameters n={n} d={d} q={q}")));
    }
    Ok((q as u128).pow((n - d + 1) as u32))
}

/// Sphere-packing (Hamming) bound: floor of q^n over the radius-t ball size,
/// t = floor((d-1)/2).
pub fn hamming_bound(n: usize, d: usize, q: usize) -> Result<u128> {
    if d == 0 || d > n || q < 2 {
        return Err(Error::BadArgument(format!("bad parameters n={n} d={d} q={q}")));
    }
    let t = (d - 1) / 2;
    let mut ball: u128 = 0;
    let mut binom: u128 = 1;
    for i in 0..=t {
        if i > 0 {
            binom = binom * (n - i + 1) as u128 / i as u128;
        }
        ball += binom * (q as u128 - 1).pow(i as u32);
    }
    Ok((q as u128).pow(n as u32) / ball)
}

/// The (4, 9, 3) ternary code cut out by [[0,1,1,1],[1,0,1,2]]; shared by
/// tests across modules.
#[cfg(test)]
pub(crate) fn ternary_mds_words() -> Vec<Word> {
    let mut words = Vec::new();
    for x3 in 0u8..3 {
        for x4 in 0u8..3 {
            let x2 = (6 - x3 - x4) % 3; // -x3 - x4
            let x1 = (6 + 2 * 3 - x3 + x4) % 3; // -x3 + x4
            words.push(vec![x1, x2, x3, x4]);
        }
    }
    words
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary_repetition() -> Code {
        Code::from_words(2, 3, [[0, 0, 0], [1, 1, 1]]).unwrap()
    }

    #[test]
    fn shorten_repetition() {
        let c = binary_repetition();
        let s = c.shorten(1, 1);
        assert_eq!(s.len(), 1);
        assert_eq!(s.word(0), &[1, 1]);
        assert!(c.shorten(0, 1).contains(&[1, 1]));
        // empty result is legal
        let d = Code::from_words(3, 3, [[0, 0, 0], [1, 1, 1]]).unwrap();
        assert_eq!(d.shorten(0, 2).len(), 0);
    }

    #[test]
    fn extend_then_shorten_roundtrip() {
        let c = binary_repetition();
        for i in 0..=3 {
            let e = c.extend(i, 1);
            assert_eq!(e.n(), 4);
            assert_eq!(e.shorten(i, 1), c);
            assert_eq!(e.shorten(i, 0).len(), 0);
        }
    }

    #[test]
    fn min_distance_and_errors() {
        let c = binary_repetition();
        assert_eq!(c.min_distance().unwrap(), 3);
        let single = Code::from_words(2, 3, [[0, 0, 0]]).unwrap();
        assert!(single.min_distance().is_err());
    }

    #[test]
    fn perfection_of_binary_repetition() {
        assert!(binary_repetition().is_perfect_d3().unwrap());
        // deleting the complement word breaks perfection via the size check
        let half = Code::from_words(2, 3, [[0, 0, 0]]).unwrap();
        assert!(!half.is_perfect_d3().unwrap());
        // q=3 n=3: 1 + 3*2 = 7 does not divide 27
        let c3 = Code::from_words(3, 3, [[0, 0, 0]]).unwrap();
        assert!(c3.is_perfect_d3().is_err());
    }

    #[test]
    fn bounds_pinned_values() {
        assert_eq!(singleton_bound(6, 3, 5).unwrap(), 625);
        assert_eq!(hamming_bound(9, 3, 8).unwrap(), 2097152); // 8^9 / 64 = 8^7
        assert_eq!(hamming_bound(3, 3, 2).unwrap(), 2);
        assert_eq!(hamming_bound(7, 3, 6).unwrap(), 7776); // 6^7 / 36 = 6^5
        assert!(singleton_bound(3, 4, 5).is_err());
    }

    #[test]
    fn mds_check_on_ternary_square_code() {
        // kernel of [[0,1,1,1],[1,0,1,2]] over GF(3)
        let words = ternary_mds_words();
        let c = Code::from_words(3, 4, words).unwrap();
        assert_eq!(c.len(), 9);
        assert!(c.is_mds_d3().unwrap());
        assert_eq!(c.min_distance().unwrap(), 3);
        // wrong size is an error, not `false`
        let small = Code::from_words(3, 4, [[0u8, 0, 0, 0]]).unwrap();
        assert!(small.is_mds_d3().is_err());
    }

    #[test]
    fn text_roundtrip_is_bit_exact() {
        let c = Code::from_words(3, 4, ternary_mds_words()).unwrap();
        let text = c.to_text();
        let c2 = Code::from_text(&text).unwrap();
        assert_eq!(c, c2);
        assert_eq!(c2.to_text(), text);
        assert!(text.starts_with("3 4 9\n"));
    }

    #[test]
    fn text_rejects_malformed_input() {
        assert!(Code::from_text("").is_err());
        assert!(Code::from_text("3 4\n").is_err());
        assert!(Code::from_text("3 2 1\n0 3\n").is_err());
        assert!(Code::from_text("3 2 2\n0 0\n").is_err());
        assert!(Code::from_text("3 2 1\n0 0\n0 0\n").is_err());
    }
}
