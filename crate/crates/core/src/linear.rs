//! Linear codes over GF(q): matrices, the two-row parity-check normal form
//! for MDS codes with d = 3, kernel enumeration, and the subspace test.

use crate::codes::Code;
use crate::gf::Field;
use crate::{Error, Result};
use std::fmt::Write as _;

/// A dense matrix over GF(q), row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<u8>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(Error::BadArgument(format!(
                "matrix data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Text format: header `rows cols`, then one line per row.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.rows, self.cols);
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Matrix> {
        let mut lines = text.lines().enumerate();
        let (_, header) =
            lines.next().ok_or_else(|| Error::Parse { line: 1, msg: "empty file".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse { line: 1, msg: "header must be `rows cols`".into() });
        }
        let rows: usize = fields[0]
            .parse()
            .map_err(|_| Error::Parse { line: 1, msg: "bad row count".into() })?;
        let cols: usize = fields[1]
            .parse()
            .map_err(|_| Error::Parse { line: 1, msg: "bad column count".into() })?;
        let mut data = Vec::with_capacity(rows * cols);
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            for tok in line.split_whitespace() {
                let v: u8 = tok.parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("bad entry `{tok}`"),
                })?;
                data.push(v);
            }
        }
        Matrix::new(rows, cols, data)
    }
}

/// The parity-check normal form of a linear (n, q^(n-2), 3) MDS code:
/// rows (0, 1, 1, ..., 1) and (1, 0, a_3, ..., a_n) with the a-values
/// 1, g, g^2, ..., g^(n-3) for the field's fixed primitive element g.
/// Requires 3 <= n <= q + 1; the column count is maximal at n = q + 1.
pub fn mds_parity_check(field: &Field, n: usize) -> Result<Matrix> {
    let q = field.order();
    if n < 3 || n > q + 1 {
        return Err(Error::BadArgument(format!(
            "parity-check normal form needs 3 <= n <= q+1, got n={n} q={q}"
        )));
    }
    let mut data = vec![0u8; 2 * n];
    data[1..n].fill(1);
    data[n] = 1;
    data[n + 1] = 0;
    for j in 2..n {
        data[n + j] = field.primitive_pow(j - 2);
    }
    Matrix::new(2, n, data)
}

/// Row-reduce `mat` over the field, returning the rank and the reduced
/// row-echelon basis rows.
fn row_reduce(field: &Field, mat: &Matrix) -> (usize, Vec<Vec<u8>>) {
    let mut rows: Vec<Vec<u8>> = (0..mat.rows).map(|r| mat.row(r).to_vec()).collect();
    let n = mat.cols;
    let mut rank = 0usize;
    for col in 0..n {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = field.inv(rows[rank][col]).expect("pivot nonzero");
        for x in rows[rank].iter_mut() {
            *x = field.mul(*x, inv);
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let factor = rows[r][col];
                for c in 0..n {
                    let sub = field.mul(factor, rows[rank][c]);
                    rows[r][c] = field.sub(rows[r][c], sub);
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    (rank, rows)
}

/// Enumerate the kernel {x : Hx^T = 0} of a parity-check matrix as a code.
pub fn kernel_code(field: &Field, h: &Matrix) -> Result<Code> {
    let q = field.order();
    let n = h.cols;
    if n == 0 {
        return Err(Error::BadArgument("kernel of a zero-column matrix".into()));
    }
    let (rank, reduced) = row_reduce(field, h);
    // identify pivot columns
    let mut pivots = Vec::with_capacity(rank);
    let mut col = 0usize;
    for row in &reduced {
        while col < n && row[col] == 0 {
            col += 1;
        }
        pivots.push(col);
        col += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let k = free.len();
    // nullspace basis: one vector per free column
    let mut basis: Vec<Vec<u8>> = Vec::with_capacity(k);
    for &fc in &free {
        let mut v = vec![0u8; n];
        v[fc] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = field.neg(reduced[r][fc]);
        }
        basis.push(v);
    }
    // enumerate all q^k combinations with an odometer of incremental adds
    let total = q.checked_pow(k as u32).ok_or_else(|| {
        Error::BadArgument(format!("kernel too large: q^{k} overflows"))
    })?;
    let mut words = Vec::with_capacity(total * n);
    let mut current = vec![0u8; n];
    let mut odo = vec![0u8; k];
    loop {
        words.extend_from_slice(&current);
        let mut j = 0;
        loop {
            if j == k {
                let mut flat_words: Vec<&[u8]> = words.chunks_exact(n).collect();
                flat_words.sort_unstable();
                let mut flat = Vec::with_capacity(words.len());
                for w in flat_words {
                    flat.extend_from_slice(w);
                }
                return Ok(Code::from_sorted_flat(q, n, flat));
            }
            odo[j] += 1;
            for (c, x) in current.iter_mut().enumerate() {
                *x = field.add(*x, basis[j][c]);
            }
            if (odo[j] as usize) < q {
                break;
            }
            odo[j] = 0;
            j += 1;
        }
    }
}

/// The q-ary Hamming code of length q + 1 realized as the kernel of the
/// maximal parity-check normal form; a perfect (q+1, q^(q-1), 3) code.
pub fn hamming_code(field: &Field) -> Result<Code> {
    kernel_code(field, &mds_parity_check(field, field.order() + 1)?)
}

/// Is the word set a linear subspace of GF(q)^n? Checks membership of zero,
/// that |C| is a power of q with exponent equal to the rank of the word
/// matrix, which for a subset of its own span is equivalent to closure.
pub fn is_subspace(field: &Field, code: &Code) -> bool {
    let q = field.order();
    debug_assert_eq!(q, code.q());
    let n = code.n();
    if !code.contains(&vec![0u8; n]) {
        return false;
    }
    // |C| must be q^k
    let mut m = code.len();
    let mut k = 0usize;
    while m > 1 {
        if m % q != 0 {
            return false;
        }
        m /= q;
        k += 1;
    }
    // greedy row-reduced basis from the words; rank > k means not closed
    let mut basis: Vec<Vec<u8>> = Vec::new(); // rows with leading 1, echelon
    let mut lead: Vec<usize> = Vec::new();
    for w in code.words() {
        let mut v = w.to_vec();
        for (b, &lc) in basis.iter().zip(&lead) {
            if v[lc] != 0 {
                let factor = v[lc];
                for c in 0..n {
                    v[c] = field.sub(v[c], field.mul(factor, b[c]));
                }
            }
        }
        if let Some(lc) = v.iter().position(|&x| x != 0) {
            let inv = field.inv(v[lc]).expect("nonzero");
            for x in v.iter_mut() {
                *x = field.mul(*x, inv);
            }
            basis.push(v);
            lead.push(lc);
            if basis.len() > k {
                return false;
            }
        }
    }
    basis.len() == k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_check_shapes_and_values() {
        let f5 = Field::new(5).unwrap();
        let h = mds_parity_check(&f5, 6).unwrap();
        assert_eq!(h.row(0), &[0, 1, 1, 1, 1, 1]);
        assert_eq!(h.row(1), &[1, 0, 1, 2, 4, 3]); // primitive element 2
        assert!(mds_parity_check(&f5, 7).is_err());
        assert!(mds_parity_check(&f5, 2).is_err());

        let f3 = Field::new(3).unwrap();
        let h3 = mds_parity_check(&f3, 4).unwrap();
        assert_eq!(h3.row(0), &[0, 1, 1, 1]);
        assert_eq!(h3.row(1), &[1, 0, 1, 2]);
    }

    #[test]
    fn kernel_of_ternary_check_is_the_nine_word_code() {
        let f3 = Field::new(3).unwrap();
        let c = kernel_code(&f3, &mds_parity_check(&f3, 4).unwrap()).unwrap();
        assert_eq!(c.len(), 9);
        assert!(c.is_mds_d3().unwrap());
        assert_eq!(c.min_distance().unwrap(), 3);
        assert!(is_subspace(&f3, &c));
        // spot membership: x3=1,x4=0 => x2=-1=2, x1=-1=2
        assert!(c.contains(&[2, 2, 1, 0]));
    }

    #[test]
    fn kernel_edge_cases() {
        let f2 = Field::new(2).unwrap();
        // zero 1x3 matrix: kernel is the whole space
        let z = Matrix::new(1, 3, vec![0, 0, 0]).unwrap();
        assert_eq!(kernel_code(&f2, &z).unwrap().len(), 8);
        // identity 2x2: kernel is the zero word only
        let id = Matrix::new(2, 2, vec![1, 0, 0, 1]).unwrap();
        let k = kernel_code(&f2, &id).unwrap();
        assert_eq!(k.len(), 1);
        assert!(k.contains(&[0, 0]));
    }

    #[test]
    fn hamming_codes_are_perfect_and_mds() {
        for q in [2usize, 3, 4, 5] {
            let f = Field::new(q).unwrap();
            let c = hamming_code(&f).unwrap();
            assert_eq!(c.n(), q + 1);
            assert_eq!(c.len(), q.pow((q - 1) as u32));
            assert!(c.is_perfect_d3().unwrap(), "q={q}");
            assert!(c.is_mds_d3().unwrap(), "q={q}");
            assert!(is_subspace(&f, &c));
        }
    }

    #[test]
    fn subspace_rejections() {
        let f2 = Field::new(2).unwrap();
        // missing zero word
        let c = Code::from_words(2, 3, [[1, 1, 1], [1, 0, 0]]).unwrap();
        assert!(!is_subspace(&f2, &c));
        // contains zero, wrong closure
        let c2 = Code::from_words(2, 3, [[0, 0, 0], [1, 1, 0], [0, 1, 1], [1, 1, 1]]).unwrap();
        assert!(!is_subspace(&f2, &c2));
        // genuine subspace
        let c3 = Code::from_words(2, 3, [[0, 0, 0], [1, 1, 0], [0, 1, 1], [1, 0, 1]]).unwrap();
        assert!(is_subspace(&f2, &c3));
    }

    #[test]
    fn matrix_text_roundtrip() {
        let f5 = Field::new(5).unwrap();
        let h = mds_parity_check(&f5, 5).unwrap();
        let t = h.to_text();
        assert_eq!(Matrix::from_text(&t).unwrap(), h);
        assert!(Matrix::from_text("2 3\n1 2\n").is_err());
    }
}
