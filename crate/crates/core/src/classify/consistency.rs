//! Double-counting check run after every extension step.
//!
//! For each base class index `k` the number of full codes of the new length
//! whose `(1,0)`-shortening equals the base representative is counted two
//! independent ways: from the automorphism and shortening statistics of the
//! classified results, and from the seed bookkeeping of the search itself.
//! The two counts must agree exactly.

/// One row of the per-step report: both counts for a base class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyRow {
    /// Base class index (0-based) at the previous length.
    pub k: usize,
    /// Count from class statistics: `(q-1)! |Aut(base)| sum S/|Aut(C)|`.
    pub n_first: u128,
    /// Count from search bookkeeping: `(q-1)! sum N(D) M(D)`.
    pub n_second: u128,
    /// False when the first count failed to reduce to an integer.
    pub exact: bool,
}

impl ConsistencyRow {
    pub fn ok(&self) -> bool {
        self.exact && self.n_first == self.n_second
    }
}

pub(super) fn factorial(m: usize) -> u128 {
    (1..=m as u128).product()
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact nonnegative rational used to accumulate `S / |Aut|` terms.
#[derive(Debug, Clone, Copy)]
pub(super) struct Frac {
    num: u128,
    den: u128,
}

impl Frac {
    pub(super) fn zero() -> Frac {
        Frac { num: 0, den: 1 }
    }

    pub(super) fn ratio(num: u128, den: u128) -> Frac {
        assert!(den != 0);
        let g = gcd(num, den);
        Frac { num: num / g, den: den / g }
    }

    pub(super) fn add(self, other: Frac) -> Frac {
        let g = gcd(self.den, other.den);
        let den = self.den / g * other.den;
        let num = self.num * (other.den / g) + other.num * (self.den / g);
        Frac::ratio(num, den)
    }

    pub(super) fn scale(self, by: u128) -> Frac {
        Frac::ratio(self.num * by, self.den)
    }

    pub(super) fn as_integer(self) -> Option<u128> {
        if self.num % self.den == 0 {
            Some(self.num / self.den)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_arithmetic() {
        let a = Frac::ratio(12, 432);
        let b = Frac::ratio(6, 36);
        let s = a.add(b).scale(72);
        assert_eq!(s.as_integer(), Some(14));
        assert_eq!(Frac::ratio(5, 3).as_integer(), None);
        assert_eq!(Frac::zero().add(Frac::ratio(7, 1)).as_integer(), Some(7));
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), 1);
        assert_eq!(factorial(5), 120);
        assert_eq!(factorial(7), 5040);
    }
}
