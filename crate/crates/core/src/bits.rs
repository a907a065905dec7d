//! Compact fixed-width bitsets used for K-types and type-index sets.

/// A bitset over `0..len` backed by 64-bit words. Ordering and hashing are
/// word-lexicographic, which gives a stable canonical order for types.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn new(len: usize) -> Bits {
        Bits { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty_set(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        if value {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// Extends the width, new positions cleared.
    pub fn resized(&self, len: usize) -> Bits {
        assert!(len >= self.len);
        let mut out = Bits::new(len);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        out
    }

    pub fn and(&self, other: &Bits) -> Bits {
        debug_assert_eq!(self.len, other.len);
        Bits {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    /// Is the three-way intersection nonempty?
    pub fn intersects_all(&self, b: &Bits, c: &Bits) -> bool {
        debug_assert!(self.len == b.len && b.len == c.len);
        self.words
            .iter()
            .zip(&b.words)
            .zip(&c.words)
            .any(|((x, y), z)| x & y & z != 0)
    }
}
