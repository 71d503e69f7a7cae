//! Fixed-size bitset used as an occupancy array over large index universes.

pub struct BitSet {
    blocks: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> BitSet {
        BitSet { blocks: vec![0u64; (len + 63) / 64] }
    }

    /// Set bit `i`, returning whether it was already set.
    #[inline]
    pub fn test_and_set(&mut self, i: usize) -> bool {
        let (b, m) = (i / 64, 1u64 << (i % 64));
        let was = self.blocks[b] & m != 0;
        self.blocks[b] |= m;
        was
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.blocks[i / 64] & (1u64 << (i % 64)) != 0
    }
}
