/// Fixed-capacity bit set over small indices, usable as a hash key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct JobSet {
    words: Vec<u64>,
}

impl JobSet {
    pub fn with_capacity(bits: usize) -> Self {
        JobSet { words: vec![0; bits.div_ceil(64).max(1)] }
    }

    pub fn from_indices(bits: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::with_capacity(bits);
        for i in idx {
            s.insert(i);
        }
        s
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (i % 64)) != 0
    }
}
