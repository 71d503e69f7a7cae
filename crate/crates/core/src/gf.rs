//! Finite field arithmetic for the alphabet sizes the pipeline supports.
//!
//! Fields are precomputed operation tables. Prime orders use integers mod p.
//! Prime-power orders use a fixed irreducible polynomial and a fixed integer
//! encoding of polynomial coefficients:
//!
//! * GF(4) = GF(2)[t]/(t^2 + t + 1), element a1*t + a0 encoded as 2*a1 + a0.
//! * GF(8) = GF(2)[t]/(t^3 + t^2 + 1), element a2*t^2 + a1*t + a0 encoded as
//!   4*a2 + 2*a1 + a0.
//! * GF(9) = GF(3)[t]/(t^2 + 1), element a1*t + a0 encoded as 3*a1 + a0.
//!
//! The distinguished primitive element is the smallest generator of the
//! multiplicative group under this integer encoding.

use crate::{Error, Result};

/// Operation tables for one finite field GF(q), q in {2,3,4,5,7,8,9}.
#[derive(Debug, Clone)]
pub struct Field {
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    primitive: u8,
}

const SUPPORTED: [usize; 7] = [2, 3, 4, 5, 7, 8, 9];

/// Polynomial modulus coefficient vector (low degree first, monic implied)
/// for the non-prime orders, over the prime subfield.
fn modulus(q: usize) -> (usize, &'static [u8]) {
    match q {
        4 => (2, &[1, 1]),    // t^2 + t + 1
        8 => (2, &[1, 0, 1]), // t^3 + t^2 + 1
        9 => (3, &[1, 0]),    // t^2 + 1
        _ => unreachable!(),
    }
}

fn digits(x: usize, p: usize, m: usize) -> Vec<u8> {
    let mut d = vec![0u8; m];
    let mut x = x;
    for e in d.iter_mut() {
        *e = (x % p) as u8;
        x /= p;
    }
    d
}

fn undigits(d: &[u8], p: usize) -> usize {
    d.iter().rev().fold(0usize, |acc, &c| acc * p + c as usize)
}

/// Multiply two coefficient vectors mod the field polynomial.
fn poly_mul(a: &[u8], b: &[u8], p: usize, modpoly: &[u8]) -> Vec<u8> {
    let m = a.len();
    let mut prod = vec![0usize; 2 * m - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] += ai as usize * bj as usize;
        }
    }
    // reduce: t^m = -modpoly (coefficients of lower degrees)
    for d in (m..prod.len()).rev() {
        let c = prod[d] % p;
        prod[d] = 0;
        if c == 0 {
            continue;
        }
        for (low, &mc) in modpoly.iter().enumerate() {
            // t^d = t^(d-m) * t^m = t^(d-m) * (-modpoly)
            prod[d - m + low] += c * ((p - mc as usize % p) % p);
        }
    }
    prod.truncate(m);
    prod.iter().map(|&c| (c % p) as u8).collect()
}

impl Field {
    /// Build the operation tables for GF(q).
    pub fn new(q: usize) -> Result<Field> {
        if !SUPPORTED.contains(&q) {
            return Err(Error::UnsupportedOrder(q as u32));
        }
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        if q == 2 || q == 3 || q == 5 || q == 7 {
            for a in 0..q {
                for b in 0..q {
                    add[a * q + b] = ((a + b) % q) as u8;
                    mul[a * q + b] = ((a * b) % q) as u8;
                }
            }
        } else {
            let (p, mp) = modulus(q);
            let m = mp.len();
            for a in 0..q {
                let da = digits(a, p, m);
                for b in 0..q {
                    let db = digits(b, p, m);
                    let s: Vec<u8> = da
                        .iter()
                        .zip(&db)
                        .map(|(&x, &y)| ((x as usize + y as usize) % p) as u8)
                        .collect();
                    add[a * q + b] = undigits(&s, p) as u8;
                    mul[a * q + b] = undigits(&poly_mul(&da, &db, p, mp), p) as u8;
                }
            }
        }
        let mut neg = vec![0u8; q];
        for a in 0..q {
            for b in 0..q {
                if add[a * q + b] == 0 {
                    neg[a] = b as u8;
                }
            }
        }
        let mut inv = vec![0u8; q];
        for a in 1..q {
            for b in 1..q {
                if mul[a * q + b] == 1 {
                    inv[a] = b as u8;
                }
            }
        }
        let mut primitive = 0u8;
        'outer: for g in 2..q.max(2) {
            let mut x = 1usize;
            for step in 1..q {
                x = mul[x * q + g] as usize;
                if x == 1 {
                    if step == q - 1 {
                        primitive = g as u8;
                        break 'outer;
                    }
                    continue 'outer;
                }
            }
        }
        if q == 2 {
            primitive = 1;
        }
        Ok(Field { q, add, mul, neg, inv, primitive })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    /// Characteristic p of the field.
    pub fn characteristic(&self) -> usize {
        match self.q {
            4 | 8 => 2,
            9 => 3,
            q => q,
        }
    }

    /// Smallest multiplicative generator under the integer encoding.
    pub fn primitive(&self) -> u8 {
        self.primitive
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    /// Multiplicative inverse; division by zero is an error.
    pub fn inv(&self, a: u8) -> Result<u8> {
        if a == 0 {
            return Err(Error::DivisionByZero(self.q as u32));
        }
        Ok(self.inv[a as usize])
    }

    pub fn div(&self, a: u8, b: u8) -> Result<u8> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// g^e for the fixed primitive element g.
    pub fn primitive_pow(&self, e: usize) -> u8 {
        let mut x = 1u8;
        for _ in 0..e {
            x = self.mul(x, self.primitive);
        }
        x
    }

    /// Dot product of two symbol slices.
    pub fn dot(&self, a: &[u8], b: &[u8]) -> u8 {
        a.iter()
            .zip(b)
            .fold(0u8, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }

    /// All invertible additive maps GF(q) -> GF(q) (automorphisms of the
    /// additive group), each as a lookup table. For prime q these are the
    /// q - 1 scalar multiplications.
    pub fn additive_automorphisms(&self) -> Vec<Vec<u8>> {
        let q = self.q;
        let p = self.characteristic();
        let m = if q == p { 1 } else { if q == 9 { 2 } else { q.trailing_zeros() as usize } };
        // basis images: choose images for basis elements p^0, p^1, ... p^(m-1)
        // (the encoding makes {1, p, p^2, ...} an additive basis), keep maps
        // that are bijective.
        let mut basis = Vec::with_capacity(m);
        for i in 0..m {
            basis.push(p.pow(i as u32) as u8);
        }
        let mut out = Vec::new();
        let mut images = vec![0u8; m];
        self.enumerate_additive(&basis, &mut images, 0, &mut out);
        out
    }

    fn enumerate_additive(&self, basis: &[u8], images: &mut [u8], i: usize, out: &mut Vec<Vec<u8>>) {
        let q = self.q;
        if i == basis.len() {
            let mut table = vec![0u8; q];
            for x in 0..q as u8 {
                let d = digits(x as usize, self.characteristic(), basis.len());
                let mut y = 0u8;
                for (j, &c) in d.iter().enumerate() {
                    let mut term = 0u8;
                    for _ in 0..c {
                        term = self.add(term, images[j]);
                    }
                    y = self.add(y, term);
                }
                table[x as usize] = y;
            }
            let mut seen = vec![false; q];
            if table.iter().all(|&y| {
                let fresh = !seen[y as usize];
                seen[y as usize] = true;
                fresh
            }) {
                out.push(table);
            }
            return;
        }
        for v in 1..q as u8 {
            images[i] = v;
            self.enumerate_additive(basis, images, i + 1, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields() -> Vec<Field> {
        SUPPORTED.iter().map(|&q| Field::new(q).unwrap()).collect()
    }

    #[test]
    fn rejects_unsupported_orders() {
        for q in [0, 1, 6, 10, 16] {
            assert!(Field::new(q).is_err(), "q={q} should be rejected");
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in fields() {
            let q = f.order() as u8;
            for a in 0..q {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.mul(a, 0), 0);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.sub(f.add(a, b), b), a);
                    for c in 0..q {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(
                            f.mul(a, f.add(b, c)),
                            f.add(f.mul(a, b), f.mul(a, c)),
                            "distributivity fails q={q} a={a} b={b} c={c}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn inv_of_zero_is_error() {
        for f in fields() {
            assert!(f.inv(0).is_err());
        }
    }

    /// Oracle: multiply coefficient polynomials mod the documented modulus by
    /// hand-rolled schoolbook arithmetic and compare against the tables.
    #[test]
    fn prime_power_tables_match_polynomial_oracle() {
        for q in [4usize, 8, 9] {
            let f = Field::new(q).unwrap();
            let (p, mp) = modulus(q);
            let m = mp.len();
            for a in 0..q {
                for b in 0..q {
                    let da = digits(a, p, m);
                    let db = digits(b, p, m);
                    // schoolbook product then long division by t^m + modpoly
                    let mut prod = vec![0isize; 2 * m - 1];
                    for i in 0..m {
                        for j in 0..m {
                            prod[i + j] += da[i] as isize * db[j] as isize;
                        }
                    }
                    for d in (m..prod.len()).rev() {
                        let c = prod[d].rem_euclid(p as isize);
                        prod[d] = 0;
                        for (low, &mc) in mp.iter().enumerate() {
                            prod[d - m + low] -= c * mc as isize;
                        }
                    }
                    let red: Vec<u8> =
                        prod[..m].iter().map(|&c| c.rem_euclid(p as isize) as u8).collect();
                    assert_eq!(
                        f.mul(a as u8, b as u8) as usize,
                        undigits(&red, p),
                        "q={q} a={a} b={b}"
                    );
                    let sum: Vec<u8> = da
                        .iter()
                        .zip(&db)
                        .map(|(&x, &y)| (x + y) % p as u8)
                        .collect();
                    assert_eq!(f.add(a as u8, b as u8) as usize, undigits(&sum, p));
                }
            }
        }
    }

    #[test]
    fn gf8_pinned_values() {
        let f = Field::new(8).unwrap();
        assert_eq!(f.mul(2, 2), 4); // t * t = t^2
        assert_eq!(f.mul(2, 4), 5); // t * t^2 = t^3 = t^2 + 1
        assert_eq!(f.mul(3, 3), 5); // (t+1)^2 = t^2 + 1
        assert_eq!(f.add(5, 3), 6); // xor in characteristic 2
        assert_eq!(f.add(3, 3), 0);
    }

    #[test]
    fn prime_field_pinned_values() {
        let f5 = Field::new(5).unwrap();
        assert_eq!(f5.add(3, 4), 2);
        assert_eq!(f5.mul(3, 4), 2);
        assert_eq!(f5.inv(3).unwrap(), 2);
    }

    #[test]
    fn primitive_elements() {
        let expect = [(2usize, 1u8), (3, 2), (4, 2), (5, 2), (7, 3), (8, 2), (9, 4)];
        for (q, g) in expect {
            let f = Field::new(q).unwrap();
            assert_eq!(f.primitive(), g, "primitive element of GF({q})");
            // really a generator
            let mut seen = std::collections::HashSet::new();
            let mut x = 1u8;
            for _ in 0..q - 1 {
                x = f.mul(x, f.primitive());
                seen.insert(x);
            }
            assert_eq!(seen.len(), q - 1);
        }
    }

    #[test]
    fn additive_automorphism_counts() {
        // |GL(m, p)| for the vector-space structure of each field
        let expect = [(2usize, 1usize), (3, 2), (5, 4), (7, 6), (4, 6), (8, 168), (9, 48)];
        for (q, count) in expect {
            let f = Field::new(q).unwrap();
            let autos = f.additive_automorphisms();
            assert_eq!(autos.len(), count, "GF({q})");
            for t in &autos {
                assert_eq!(t[0], 0);
                for a in 0..q as u8 {
                    for b in 0..q as u8 {
                        assert_eq!(t[f.add(a, b) as usize], f.add(t[a as usize], t[b as usize]));
                    }
                }
            }
        }
    }
}
