//! Latin hypercubes and their linearity structure.
//!
//! A `k`-dimensional Latin hypercube of order `q` is a function
//! `f : [q]^k -> [q]` that is bijective in each argument when the others are
//! fixed.  A full `(n, q^{n-2}, 3)` code is the same thing as an ordered pair
//! of such hypercubes of dimension `n - 2` that are orthogonal (the graph
//! code of the pair has minimum distance 3).
//!
//! The linearity tests decide whether one hypercube, or a tuple sharing the
//! same argument vector, can be written in terms of the field addition after
//! relabeling every axis independently.

use crate::codes::Code;
use crate::gf::Field;
use crate::{Error, Result};
use std::fmt::Write as _;

/// A Latin hypercube of order `q` and dimension `k`, stored as a flat table
/// with the first argument varying slowest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypercube {
    q: usize,
    k: usize,
    data: Vec<u8>,
}

impl Hypercube {
    /// Builds a hypercube from a flat value table of length `q^k`.
    pub fn new(q: usize, k: usize, data: Vec<u8>) -> Result<Hypercube> {
        if q < 2 || q > 255 || k == 0 {
            return Err(Error::BadArgument(format!("bad hypercube shape q={q} k={k}")));
        }
        let size = q.checked_pow(k as u32).ok_or_else(|| {
            Error::BadArgument(format!("hypercube q={q} k={k} too large"))
        })?;
        if data.len() != size {
            return Err(Error::BadArgument(format!(
                "hypercube table has {} entries, expected {size}",
                data.len()
            )));
        }
        if data.iter().any(|&x| x as usize >= q) {
            return Err(Error::BadArgument("hypercube entry out of range".into()));
        }
        let h = Hypercube { q, k, data };
        if !h.is_latin() {
            return Err(Error::BadArgument("table is not Latin".into()));
        }
        Ok(h)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    fn index(&self, x: &[u8]) -> usize {
        debug_assert_eq!(x.len(), self.k);
        let mut idx = 0usize;
        for &c in x {
            idx = idx * self.q + c as usize;
        }
        idx
    }

    /// Value at the argument vector `x` (length `k`).
    pub fn at(&self, x: &[u8]) -> u8 {
        self.data[self.index(x)]
    }

    /// True when every axis-parallel line is a permutation of the symbols.
    pub fn is_latin(&self) -> bool {
        let q = self.q;
        let mut stride = 1usize;
        for _axis in (0..self.k).rev() {
            let block = stride * q;
            for start in 0..self.data.len() {
                if start % block >= stride {
                    continue;
                }
                let mut seen = 0u64;
                for s in 0..q {
                    seen |= 1 << self.data[start + s * stride];
                }
                if seen.count_ones() as usize != q {
                    return false;
                }
                if seen != (1u64 << q) - 1 {
                    return false;
                }
            }
            stride = block;
        }
        true
    }

    /// Serializes as a `q k` header followed by the table, `q` symbols per
    /// line with the last argument varying fastest.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.q, self.k);
        for row in self.data.chunks(self.q) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Hypercube> {
        let mut tokens = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            for tok in line.split_whitespace() {
                let v: usize = tok.parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    msg: format!("bad token {tok:?}"),
                })?;
                tokens.push(v);
            }
        }
        if tokens.len() < 2 {
            return Err(Error::Parse { line: 1, msg: "missing header".into() });
        }
        let q = tokens[0];
        let k = tokens[1];
        let data: Vec<u8> = tokens[2..].iter().map(|&v| v as u8).collect();
        if tokens[2..].iter().any(|&v| v > 255) {
            return Err(Error::Parse { line: 1, msg: "symbol out of range".into() });
        }
        Hypercube::new(q, k, data)
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_file(path: &std::path::Path) -> Result<Hypercube> {
        let text = std::fs::read_to_string(path)?;
        Hypercube::from_text(&text)
    }
}

fn each_input(q: usize, k: usize, mut f: impl FnMut(&[u8])) {
    let mut x = vec![0u8; k];
    loop {
        f(&x);
        let mut pos = k;
        while pos > 0 {
            pos -= 1;
            if (x[pos] as usize) + 1 < q {
                x[pos] += 1;
                for c in x.iter_mut().skip(pos + 1) {
                    *c = 0;
                }
                break;
            }
            if pos == 0 {
                return;
            }
        }
    }
}

/// Graph code of a single hypercube: words `(x, f(x))` of length `k + 1`.
pub fn code_from_hypercube(h: &Hypercube) -> Code {
    let mut words = Vec::with_capacity(h.data.len());
    each_input(h.q, h.k, |x| {
        let mut w = x.to_vec();
        w.push(h.at(x));
        words.push(w);
    });
    Code::from_words(h.q, h.k + 1, words).expect("graph code is well formed")
}

/// Reads a hypercube back from the graph code of a single hypercube.
pub fn hypercube_from_code(code: &Code) -> Result<Hypercube> {
    let k = code.n() - 1;
    let q = code.q();
    let size = q.checked_pow(k as u32).ok_or_else(|| {
        Error::BadArgument("code too large for a hypercube".into())
    })?;
    if code.len() != size {
        return Err(Error::BadArgument(format!(
            "code has {} words, expected {size}",
            code.len()
        )));
    }
    let mut data = vec![0u8; size];
    let mut seen = vec![false; size];
    for w in code.words() {
        let mut idx = 0usize;
        for &c in &w[..k] {
            idx = idx * q + c as usize;
        }
        if seen[idx] {
            return Err(Error::BadArgument("repeated argument prefix".into()));
        }
        seen[idx] = true;
        data[idx] = w[k];
    }
    Hypercube::new(q, k, data)
}

/// Splits a full `(n, q^{n-2}, 3)` code into its pair of hypercubes of
/// dimension `n - 2`.
pub fn pair_from_code(code: &Code) -> Result<(Hypercube, Hypercube)> {
    let n = code.n();
    if n < 3 {
        return Err(Error::BadArgument("need length at least 3".into()));
    }
    let k = n - 2;
    let q = code.q();
    let size = q.pow(k as u32);
    if code.len() != size {
        return Err(Error::BadArgument(format!(
            "code has {} words, expected {size}",
            code.len()
        )));
    }
    let mut d1 = vec![0u8; size];
    let mut d2 = vec![0u8; size];
    let mut seen = vec![false; size];
    for w in code.words() {
        let mut idx = 0usize;
        for &c in &w[..k] {
            idx = idx * q + c as usize;
        }
        if seen[idx] {
            return Err(Error::BadArgument("repeated argument prefix".into()));
        }
        seen[idx] = true;
        d1[idx] = w[k];
        d2[idx] = w[k + 1];
    }
    Ok((Hypercube::new(q, k, d1)?, Hypercube::new(q, k, d2)?))
}

/// Graph code of an ordered pair: words `(x, f(x), g(x))`.
pub fn code_from_pair(f: &Hypercube, g: &Hypercube) -> Result<Code> {
    if f.q != g.q || f.k != g.k {
        return Err(Error::BadArgument("pair shapes differ".into()));
    }
    let mut words = Vec::with_capacity(f.data.len());
    each_input(f.q, f.k, |x| {
        let mut w = x.to_vec();
        w.push(f.at(x));
        w.push(g.at(x));
        words.push(w);
    });
    Code::from_words(f.q, f.k + 2, words)
}

/// Two hypercubes are orthogonal when their pair code has minimum distance 3.
pub fn are_orthogonal(f: &Hypercube, g: &Hypercube) -> Result<bool> {
    let code = code_from_pair(f, g)?;
    code.is_mds_d3()
}

/// Witness that a hypercube is linear: bijections `alphas[0..=k]` with
/// `alphas[0](f(x)) = alphas[1](x_1) + ... + alphas[k](x_k)`.
#[derive(Debug, Clone)]
pub struct LinearityWitness {
    pub alphas: Vec<Vec<u8>>,
}

impl LinearityWitness {
    pub fn verify(&self, field: &Field, h: &Hypercube) -> bool {
        if self.alphas.len() != h.k + 1 {
            return false;
        }
        if self.alphas.iter().any(|a| !is_permutation(h.q, a)) {
            return false;
        }
        let mut ok = true;
        each_input(h.q, h.k, |x| {
            if !ok {
                return;
            }
            let mut sum = 0u8;
            for (j, &c) in x.iter().enumerate() {
                sum = field.add(sum, self.alphas[j + 1][c as usize]);
            }
            if self.alphas[0][h.at(x) as usize] != sum {
                ok = false;
            }
        });
        ok
    }
}

fn is_permutation(q: usize, table: &[u8]) -> bool {
    if table.len() != q {
        return false;
    }
    let mut seen = vec![false; q];
    for &v in table {
        if v as usize >= q || seen[v as usize] {
            return false;
        }
        seen[v as usize] = true;
    }
    true
}

/// Composition table of the principal loop isotope of the binary slice
/// `L(x, y) = f(x, y, 0, .., 0)`, with identity `L(0, 0)`.
fn slice_loop(h: &Hypercube) -> Vec<Vec<u8>> {
    let q = h.q;
    let mut ell = vec![vec![0u8; q]; q];
    let mut x = vec![0u8; h.k];
    for a in 0..q {
        for b in 0..q {
            x[0] = a as u8;
            x[1] = b as u8;
            ell[a][b] = h.at(&x);
        }
    }
    // r(x) = L(x, 0), c(y) = L(0, y); the isotope is L(r^-1 x, c^-1 y).
    let mut r_inv = vec![0u8; q];
    let mut c_inv = vec![0u8; q];
    for t in 0..q {
        r_inv[ell[t][0] as usize] = t as u8;
        c_inv[ell[0][t] as usize] = t as u8;
    }
    let mut op = vec![vec![0u8; q]; q];
    for a in 0..q {
        for b in 0..q {
            op[a][b] = ell[r_inv[a] as usize][c_inv[b] as usize];
        }
    }
    op
}

/// Checks that `op` is an elementary abelian group of the field's
/// characteristic and returns an isomorphism `lambda` onto the field's
/// additive group (`lambda(a op b) = lambda(a) + lambda(b)`).
fn loop_to_additive(field: &Field, op: &[Vec<u8>]) -> Option<Vec<u8>> {
    let q = field.order();
    let e = op[0][0];
    // The isotope construction already gives L(0,0) as two-sided identity.
    for a in 0..q {
        for b in 0..q {
            if op[a][b] != op[b][a] {
                return None;
            }
            for c in 0..q {
                if op[op[a][b] as usize][c] != op[a][op[b][c] as usize] {
                    return None;
                }
            }
        }
    }
    let p = field.characteristic();
    for a in 0..q {
        let mut acc = e;
        for _ in 0..p {
            acc = op[acc as usize][a];
        }
        if acc != e {
            return None;
        }
    }
    // Build the isomorphism from the field side by picking independent
    // generators; mu maps field elements onto loop elements.
    let mut mu = vec![None::<u8>; q];
    mu[0] = Some(e);
    let mut basis: Vec<u8> = Vec::new();
    let mut span: Vec<u8> = vec![0];
    for g in 0..q as u8 {
        if span.len() == q {
            break;
        }
        if mu[..].iter().flatten().any(|&x| x == g) {
            continue;
        }
        // g is not yet hit; use it as the image of the next basis vector.
        let unit = unit_vector(field, basis.len());
        basis.push(g);
        let mut new_span = Vec::new();
        for &s in &span {
            let mut img = mu[s as usize].expect("span is mapped");
            let mut fe = s;
            for _ in 1..=p - 1 {
                img = op[img as usize][g as usize];
                fe = field.add(fe, unit);
                if mu[fe as usize].is_some() {
                    return None;
                }
                mu[fe as usize] = Some(img);
                new_span.push(fe);
            }
        }
        span.extend(new_span);
    }
    if span.len() != q {
        return None;
    }
    let mut lambda = vec![0u8; q];
    for fe in 0..q {
        let img = mu[fe].expect("mu is total");
        lambda[img as usize] = fe as u8;
    }
    Some(lambda)
}

fn unit_vector(field: &Field, i: usize) -> u8 {
    // Standard basis of the additive group: powers of the characteristic.
    let p = field.characteristic() as u8;
    let mut v = 1u8;
    for _ in 0..i {
        v = v.checked_mul(p).expect("basis element fits");
    }
    v
}

/// Decides linearity of a single hypercube over the field of matching order.
///
/// Returns a witness with `alphas[0](f(x)) = sum_j alphas[j](x_j)` when the
/// hypercube is linear, `None` otherwise.
pub fn is_linear_hypercube(field: &Field, h: &Hypercube) -> Result<Option<LinearityWitness>> {
    if field.order() != h.q {
        return Err(Error::BadArgument("field order does not match hypercube".into()));
    }
    let q = h.q;
    if h.k == 1 {
        // A unary hypercube is a permutation and is always linear.
        let alpha0: Vec<u8> = (0..q as u8).collect();
        let alpha1: Vec<u8> = h.data.clone();
        return Ok(Some(LinearityWitness { alphas: vec![alpha0, alpha1] }));
    }
    let op = slice_loop(h);
    let lambda = match loop_to_additive(field, &op) {
        Some(l) => l,
        None => return Ok(None),
    };
    // alpha0 := lambda composed with the inverses used by the isotope is not
    // needed explicitly: lambda(L(x,y)) = lambda(r(x)) + lambda(c(y)) already
    // splits, so lambda itself linearizes the slice.  Probe each axis.
    let alpha0 = lambda;
    let f0 = {
        let x = vec![0u8; h.k];
        alpha0[h.at(&x) as usize]
    };
    let mut alphas = vec![alpha0.clone()];
    for j in 0..h.k {
        let mut x = vec![0u8; h.k];
        let mut table = vec![0u8; q];
        for u in 0..q {
            x[j] = u as u8;
            let val = alpha0[h.at(&x) as usize];
            table[u] = if j == 0 { val } else { field.sub(val, f0) };
        }
        if !is_permutation(q, &table) {
            return Ok(None);
        }
        alphas.push(table);
    }
    let witness = LinearityWitness { alphas };
    if witness.verify(field, h) {
        Ok(Some(witness))
    } else {
        Ok(None)
    }
}

/// Witness that a tuple `f_1, .., f_m` over shared arguments is linear:
/// `betas[i](f_i(x)) = sum_j coeffs[i][j] * alphas[j](x_j)` with
/// `coeffs[0][j] = 1`.
#[derive(Debug, Clone)]
pub struct TupleWitness {
    pub betas: Vec<Vec<u8>>,
    pub alphas: Vec<Vec<u8>>,
    pub coeffs: Vec<Vec<u8>>,
}

impl TupleWitness {
    pub fn verify(&self, field: &Field, cubes: &[Hypercube]) -> bool {
        if cubes.is_empty() || self.betas.len() != cubes.len() {
            return false;
        }
        let k = cubes[0].k;
        if self.alphas.len() != k || self.coeffs.len() != cubes.len() {
            return false;
        }
        if self.coeffs[0].iter().any(|&a| a != 1) {
            return false;
        }
        if self.coeffs.iter().flatten().any(|&a| a == 0) {
            return false;
        }
        for (i, h) in cubes.iter().enumerate() {
            if !is_permutation(h.q, &self.betas[i]) {
                return false;
            }
            let mut ok = true;
            each_input(h.q, k, |x| {
                if !ok {
                    return;
                }
                let mut sum = 0u8;
                for (j, &c) in x.iter().enumerate() {
                    sum = field.add(sum, field.mul(self.coeffs[i][j], self.alphas[j][c as usize]));
                }
                if self.betas[i][h.at(x) as usize] != sum {
                    ok = false;
                }
            });
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Tries to express cube `i` in the frame of fixed axis tables, allowing an
/// overall scalar.  Returns `(beta, coeffs)` on success.
fn solve_cube_in_frame(
    field: &Field,
    h: &Hypercube,
    alphas: &[Vec<u8>],
) -> Option<(Vec<u8>, Vec<u8>)> {
    let q = field.order();
    let k = h.k;
    let mut alpha_inv0 = vec![0u8; q];
    for u in 0..q {
        alpha_inv0[alphas[0][u] as usize] = u as u8;
    }
    'outer: for a1 in 1..q as u8 {
        // Values f(u, 0, .., 0) parameterized by z = a1 * alphas[0](u) give
        // beta^{-1} up to an unknown additive shift.
        let mut bt = vec![0u8; q]; // bt(z) = beta^{-1}(z + shift)
        let mut x = vec![0u8; k];
        for u in 0..q {
            let z = field.mul(a1, alphas[0][u]);
            x[0] = u as u8;
            bt[z as usize] = h.at(&x);
        }
        let mut bt_inv = vec![0u8; q];
        for z in 0..q {
            bt_inv[bt[z] as usize] = z as u8;
        }
        let f_origin = h.at(&vec![0u8; k]);
        let base = bt_inv[f_origin as usize];
        let mut coeffs = vec![0u8; k];
        coeffs[0] = a1;
        for j in 1..k {
            let mut xx = vec![0u8; k];
            // Pick a probe point where the axis table moves.
            let mut found = 0u8;
            for u in 1..q as u8 {
                let da = field.sub(alphas[j][u as usize], alphas[j][0]);
                if da == 0 {
                    continue;
                }
                xx[j] = u;
                let dv = field.sub(bt_inv[h.at(&xx) as usize], base);
                found = field.div(dv, da).ok()?;
                break;
            }
            if found == 0 {
                continue 'outer;
            }
            coeffs[j] = found;
        }
        // Pin the shift: beta(f(0)) must equal sum_j coeffs[j]*alphas[j](0).
        let mut rhs0 = 0u8;
        for j in 0..k {
            rhs0 = field.add(rhs0, field.mul(coeffs[j], alphas[j][0]));
        }
        let shift = field.sub(rhs0, base);
        let mut beta = vec![0u8; q];
        for w in 0..q {
            beta[w] = field.add(bt_inv[w], shift);
        }
        // Full verification with early exit.
        let mut ok = true;
        each_input(q, k, |xv| {
            if !ok {
                return;
            }
            let mut sum = 0u8;
            for (j, &c) in xv.iter().enumerate() {
                sum = field.add(sum, field.mul(coeffs[j], alphas[j][c as usize]));
            }
            if beta[h.at(xv) as usize] != sum {
                ok = false;
            }
        });
        if ok {
            return Some((beta, coeffs));
        }
    }
    None
}

/// Decides joint linearity of a tuple of hypercubes over shared arguments.
///
/// All valid axis relabelings for the first cube differ by an automorphism of
/// the additive group, so the search fixes one witness for the first cube and
/// sweeps that automorphism group; for prime fields the sweep collapses to
/// the scalar already absorbed in the per-cube coefficients.
pub fn is_linear_tuple(field: &Field, cubes: &[Hypercube]) -> Result<Option<TupleWitness>> {
    if cubes.is_empty() {
        return Err(Error::BadArgument("empty tuple".into()));
    }
    let q = field.order();
    let k = cubes[0].k;
    for h in cubes {
        if h.q != q || h.k != k {
            return Err(Error::BadArgument("tuple shapes differ".into()));
        }
    }
    let first = match is_linear_hypercube(field, &cubes[0])? {
        Some(w) => w,
        None => return Ok(None),
    };
    let beta1 = first.alphas[0].clone();
    let axis: Vec<Vec<u8>> = first.alphas[1..].to_vec();
    let autos = if field.order() == field.characteristic() {
        vec![(0..q as u8).collect::<Vec<u8>>()]
    } else {
        field.additive_automorphisms()
    };
    for a in &autos {
        let framed_axis: Vec<Vec<u8>> = axis
            .iter()
            .map(|t| t.iter().map(|&v| a[v as usize]).collect())
            .collect();
        let framed_beta1: Vec<u8> = beta1.iter().map(|&v| a[v as usize]).collect();
        let mut betas = vec![framed_beta1];
        let mut coeffs = vec![vec![1u8; k]];
        let mut ok = true;
        for h in &cubes[1..] {
            match solve_cube_in_frame(field, h, &framed_axis) {
                Some((b, c)) => {
                    betas.push(b);
                    coeffs.push(c);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let witness = TupleWitness { betas, alphas: framed_axis, coeffs };
            debug_assert!(witness.verify(field, cubes));
            return Ok(Some(witness));
        }
    }
    Ok(None)
}

/// Ternary table `R(u, v, w) = a0^{-1}(a0(u) - a0(v) + a0(w))` built from a
/// linearity witness of a hypercube.
#[derive(Debug, Clone)]
pub struct RectTable {
    q: usize,
    data: Vec<u8>,
}

impl RectTable {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn at(&self, u: u8, v: u8, w: u8) -> u8 {
        self.data[(u as usize * self.q + v as usize) * self.q + w as usize]
    }
}

/// Builds the rectangle table of a linear hypercube.
pub fn rect_table(field: &Field, h: &Hypercube) -> Result<RectTable> {
    let witness = is_linear_hypercube(field, h)?
        .ok_or_else(|| Error::BadArgument("hypercube is not linear".into()))?;
    let q = h.q;
    let a0 = &witness.alphas[0];
    let mut a0_inv = vec![0u8; q];
    for u in 0..q {
        a0_inv[a0[u] as usize] = u as u8;
    }
    let mut data = vec![0u8; q * q * q];
    for u in 0..q as u8 {
        for v in 0..q as u8 {
            for w in 0..q as u8 {
                let z = field.add(field.sub(a0[u as usize], a0[v as usize]), a0[w as usize]);
                data[(u as usize * q + v as usize) * q + w as usize] = a0_inv[z as usize];
            }
        }
    }
    Ok(RectTable { q, data })
}

/// Rebuilds a linear hypercube from its values on the axes (inputs with at
/// most one nonzero coordinate) using the rectangle identity
/// `f(x) = R(f(b), f(c), f(d))` where `b`, `c`, `d` zero out the first one or
/// two nonzero coordinates of `x`.
pub fn reconstruct_from_rect(rect: &RectTable, h: &Hypercube) -> Result<Hypercube> {
    let q = h.q;
    if rect.q != q {
        return Err(Error::BadArgument("rectangle table order differs".into()));
    }
    let size = h.data.len();
    let mut data = vec![0u8; size];
    let mut x = vec![0u8; h.k];
    for idx in 0..size {
        let mut rem = idx;
        for j in (0..h.k).rev() {
            x[j] = (rem % q) as u8;
            rem /= q;
        }
        let nonzero: Vec<usize> = (0..h.k).filter(|&j| x[j] != 0).collect();
        if nonzero.len() <= 1 {
            data[idx] = h.data[idx];
            continue;
        }
        let (i, j) = (nonzero[0], nonzero[1]);
        let stride_i = q.pow((h.k - 1 - i) as u32);
        let stride_j = q.pow((h.k - 1 - j) as u32);
        let b = idx - x[i] as usize * stride_i;
        let c = b - x[j] as usize * stride_j;
        let d = idx - x[j] as usize * stride_j;
        // b, c, d have fewer nonzero coordinates and are already filled.
        data[idx] = rect.at(data[b], data[c], data[d]);
    }
    Hypercube::new(q, h.k, data).map_err(|_| Error::BadArgument("reconstruction is not Latin".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::ternary_mds_words;
    use crate::gf::Field;
    use crate::linear::{hamming_code, kernel_code, mds_parity_check};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn addition_cube(field: &Field, k: usize) -> Hypercube {
        let q = field.order();
        let mut data = Vec::with_capacity(q.pow(k as u32));
        each_input(q, k, |x| {
            let mut s = 0u8;
            for &c in x {
                s = field.add(s, c);
            }
            data.push(s);
        });
        Hypercube::new(q, k, data).unwrap()
    }

    fn permutations(q: usize) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let mut cur: Vec<u8> = (0..q as u8).collect();
        fn rec(cur: &mut Vec<u8>, at: usize, out: &mut Vec<Vec<u8>>) {
            if at == cur.len() {
                out.push(cur.clone());
                return;
            }
            for i in at..cur.len() {
                cur.swap(at, i);
                rec(cur, at + 1, out);
                cur.swap(at, i);
            }
        }
        rec(&mut cur, 0, &mut out);
        out
    }

    /// Exhaustive oracle: tries every assignment of permutations.
    fn brute_linear(field: &Field, h: &Hypercube) -> bool {
        let q = h.q;
        let perms = permutations(q);
        let k = h.k;
        let mut choice = vec![0usize; k + 1];
        loop {
            let alphas: Vec<Vec<u8>> = choice.iter().map(|&c| perms[c].clone()).collect();
            let w = LinearityWitness { alphas };
            if w.verify(field, h) {
                return true;
            }
            let mut pos = k + 1;
            let mut done = true;
            while pos > 0 {
                pos -= 1;
                if choice[pos] + 1 < perms.len() {
                    choice[pos] += 1;
                    for c in choice.iter_mut().skip(pos + 1) {
                        *c = 0;
                    }
                    done = false;
                    break;
                }
            }
            if done {
                return false;
            }
        }
    }

    fn random_latin_square(q: usize, rng: &mut ChaCha8Rng) -> Hypercube {
        // Random isotope of the cyclic group table.
        let mut rows: Vec<u8> = (0..q as u8).collect();
        let mut cols: Vec<u8> = (0..q as u8).collect();
        let mut syms: Vec<u8> = (0..q as u8).collect();
        rows.shuffle(rng);
        cols.shuffle(rng);
        syms.shuffle(rng);
        let mut data = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                let v = (rows[a] as usize + cols[b] as usize) % q;
                data[a * q + b] = syms[v];
            }
        }
        Hypercube::new(q, 2, data).unwrap()
    }

    #[test]
    fn latin_check_works() {
        let f4 = Field::new(4).unwrap();
        let h = addition_cube(&f4, 2);
        assert!(h.is_latin());
        let mut bad = h.data.clone();
        bad[0] = 1;
        assert!(Hypercube::new(4, 2, bad).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let f5 = Field::new(5).unwrap();
        let h = addition_cube(&f5, 3);
        let t = h.to_text();
        let back = Hypercube::from_text(&t).unwrap();
        assert_eq!(h, back);
        assert!(t.starts_with("5 3\n"));
    }

    #[test]
    fn code_pair_roundtrip() {
        let code = Code::from_words(3, 4, ternary_mds_words()).unwrap();
        let (f, g) = pair_from_code(&code).unwrap();
        assert!(f.is_latin() && g.is_latin());
        assert!(are_orthogonal(&f, &g).unwrap());
        let back = code_from_pair(&f, &g).unwrap();
        assert_eq!(code, back);
        assert!(!are_orthogonal(&f, &f).unwrap());
    }

    #[test]
    fn single_cube_roundtrip() {
        let f4 = Field::new(4).unwrap();
        let h = addition_cube(&f4, 2);
        let code = code_from_hypercube(&h);
        assert_eq!(code.len(), 16);
        let back = hypercube_from_code(&code).unwrap();
        assert_eq!(h, back);
    }

    #[test]
    fn addition_cubes_are_linear() {
        for q in [2usize, 3, 4, 5, 7, 8, 9] {
            let field = Field::new(q).unwrap();
            for k in 2..=3 {
                let h = addition_cube(&field, k);
                let w = is_linear_hypercube(&field, &h).unwrap();
                assert!(w.is_some(), "q={q} k={k}");
                assert!(w.unwrap().verify(&field, &h));
            }
        }
    }

    #[test]
    fn intercalate_swap_is_not_linear() {
        let f4 = Field::new(4).unwrap();
        let h = addition_cube(&f4, 2);
        let mut data = h.data.clone();
        // Swap the intercalate on rows {0,1} and columns {0,1}.
        let (a, b) = (data[0], data[1]);
        data[0] = b;
        data[1] = a;
        let (c, d) = (data[4], data[5]);
        data[4] = d;
        data[5] = c;
        let swapped = Hypercube::new(4, 2, data).unwrap();
        assert!(is_linear_hypercube(&f4, &swapped).unwrap().is_none());
        assert!(!brute_linear(&f4, &swapped));
    }

    #[test]
    fn matches_brute_oracle_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for q in [2usize, 3, 4] {
            let field = Field::new(q).unwrap();
            for trial in 0..6 {
                let h = random_latin_square(q, &mut rng);
                let fast = is_linear_hypercube(&field, &h).unwrap().is_some();
                let brute = brute_linear(&field, &h);
                assert_eq!(fast, brute, "q={q} trial={trial}");
            }
        }
    }

    #[test]
    fn matches_brute_oracle_dim3() {
        let f3 = Field::new(3).unwrap();
        let h = addition_cube(&f3, 3);
        assert!(brute_linear(&f3, &h));
        assert!(is_linear_hypercube(&f3, &h).unwrap().is_some());
        // Relabel each axis with a permutation; the result stays linear and
        // both deciders must agree.
        let mut data = vec![0u8; 27];
        let relabel = [2u8, 0, 1];
        for a in 0..3usize {
            for b in 0..3usize {
                for c in 0..3usize {
                    let v = (relabel[a] as usize + b + relabel[c] as usize) % 3;
                    data[9 * a + 3 * b + c] = v as u8;
                }
            }
        }
        let g = Hypercube::new(3, 3, data).unwrap();
        assert!(brute_linear(&f3, &g));
        assert!(is_linear_hypercube(&f3, &g).unwrap().is_some());
    }

    #[test]
    fn hamming_pair_is_linear_tuple() {
        let f4 = Field::new(4).unwrap();
        let code = hamming_code(&f4).unwrap();
        let (a, b) = pair_from_code(&code).unwrap();
        let w = is_linear_tuple(&f4, &[a.clone(), b.clone()]).unwrap();
        assert!(w.is_some());
        assert!(w.unwrap().verify(&f4, &[a, b]));
    }

    #[test]
    fn ternary_mds_pair_is_linear_tuple() {
        let f3 = Field::new(3).unwrap();
        let code = Code::from_words(3, 4, ternary_mds_words()).unwrap();
        let (a, b) = pair_from_code(&code).unwrap();
        let w = is_linear_tuple(&f3, &[a, b]).unwrap();
        assert!(w.is_some());
    }

    #[test]
    fn q5_length6_pair_is_linear_tuple() {
        let f5 = Field::new(5).unwrap();
        let pc = mds_parity_check(&f5, 6).unwrap();
        let code = kernel_code(&f5, &pc).unwrap();
        let (a, b) = pair_from_code(&code).unwrap();
        let w = is_linear_tuple(&f5, &[a.clone(), b.clone()]).unwrap();
        assert!(w.is_some());
        assert!(w.unwrap().verify(&f5, &[a, b]));
    }

    #[test]
    fn frobenius_pair_is_not_linear_tuple() {
        // x + y and x^2 + y are each linear on their own, but not jointly:
        // squaring is additive yet not a scalar multiplication on GF(4).
        let f4 = Field::new(4).unwrap();
        let plain = addition_cube(&f4, 2);
        let mut data = Vec::new();
        for a in 0..4u8 {
            for b in 0..4u8 {
                data.push(f4.add(f4.mul(a, a), b));
            }
        }
        let frob = Hypercube::new(4, 2, data).unwrap();
        assert!(is_linear_hypercube(&f4, &frob).unwrap().is_some());
        let w = is_linear_tuple(&f4, &[plain.clone(), frob.clone()]).unwrap();
        assert!(w.is_none());
        // In the other order the same conclusion holds.
        assert!(is_linear_tuple(&f4, &[frob, plain]).unwrap().is_none());
    }

    #[test]
    fn scaled_pair_is_linear_tuple() {
        let f4 = Field::new(4).unwrap();
        let plain = addition_cube(&f4, 2);
        let mut data = Vec::new();
        for a in 0..4u8 {
            for b in 0..4u8 {
                data.push(f4.add(f4.mul(2, a), b));
            }
        }
        let scaled = Hypercube::new(4, 2, data).unwrap();
        let w = is_linear_tuple(&f4, &[plain, scaled]).unwrap();
        let w = w.expect("scalar multiples stay jointly linear");
        assert_eq!(w.coeffs[0], vec![1, 1]);
    }

    #[test]
    fn rect_table_fixes_degenerate_rectangles() {
        let f7 = Field::new(7).unwrap();
        let h = addition_cube(&f7, 2);
        let r = rect_table(&f7, &h).unwrap();
        for v in 0..7u8 {
            for w in 0..7u8 {
                assert_eq!(r.at(v, v, w), w);
                assert_eq!(r.at(w, v, v), w);
            }
        }
    }

    #[test]
    fn rect_reconstruction_roundtrip() {
        for (q, k) in [(4usize, 3usize), (5, 3), (7, 4)] {
            let field = Field::new(q).unwrap();
            let h = addition_cube(&field, k);
            let r = rect_table(&field, &h).unwrap();
            let back = reconstruct_from_rect(&r, &h).unwrap();
            assert_eq!(h, back);
        }
    }

    #[test]
    fn rect_reconstruction_respects_witness_relabeling() {
        // A relabeled linear cube reconstructs from its own table too.
        let f5 = Field::new(5).unwrap();
        let mut data = Vec::new();
        for a in 0..5u8 {
            for b in 0..5u8 {
                data.push(f5.add(f5.mul(2, a), f5.mul(3, b)));
            }
        }
        let h = Hypercube::new(5, 2, data).unwrap();
        let r = rect_table(&f5, &h).unwrap();
        let back = reconstruct_from_rect(&r, &h).unwrap();
        assert_eq!(h, back);
    }

    #[test]
    fn nonlinear_reconstruction_is_detected() {
        // Feed a nonlinear square the rectangle table of the linear one; the
        // reconstruction differs from the input.
        let f4 = Field::new(4).unwrap();
        let lin = addition_cube(&f4, 2);
        let r = rect_table(&f4, &lin).unwrap();
        let mut data = lin.data.clone();
        let (a, b) = (data[5], data[6]);
        data[5] = b;
        data[6] = a;
        let (c, d) = (data[9], data[10]);
        data[9] = d;
        data[10] = c;
        if let Ok(tweaked) = Hypercube::new(4, 2, data) {
            match reconstruct_from_rect(&r, &tweaked) {
                Ok(back) => assert_ne!(back, tweaked),
                Err(_) => {}
            }
        }
    }
}
