//! Fixed-width bit-packed integer arrays.

/// An array of `len` unsigned integers, each stored in exactly `width` bits.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct PackedArray {
    words: Vec<u64>,
    width: u8,
    len: usize,
}

impl std::fmt::Debug for PackedArray {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

/// Bits needed to represent every value in `0..=max`.
pub fn bits_for(max: u64) -> u8 {
    (64 - max.leading_zeros()) as u8
}

impl PackedArray {
    pub fn new(width: u8) -> Self {
        assert!(width <= 64, "width {width} exceeds 64 bits");
        PackedArray {
            words: Vec::new(),
            width,
            len: 0,
        }
    }

    pub fn with_capacity(width: u8, len: usize) -> Self {
        let mut a = Self::new(width);
        a.words.reserve((len * width as usize).div_ceil(64));
        a
    }

    pub fn from_values(width: u8, values: &[u64]) -> Self {
        let mut a = Self::with_capacity(width, values.len());
        for &v in values {
            a.push(v);
        }
        a
    }

    /// Rebuilds an array from its raw words, as written by [`PackedArray::words`].
    pub fn from_raw(width: u8, len: usize, mut words: Vec<u64>) -> Self {
        assert!(width <= 64);
        words.resize((len * width as usize).div_ceil(64), 0);
        PackedArray { words, width, len }
    }

    #[inline]
    pub fn width(&self) -> u8 {
        self.width
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    fn mask(&self) -> u64 {
        if self.width == 64 {
            u64::MAX
        } else {
            (1u64 << self.width) - 1
        }
    }

    pub fn push(&mut self, value: u64) {
        let w = self.width as usize;
        assert!(
            value <= self.mask(),
            "value {value} does not fit in {w} bits"
        );
        let bit = self.len * w;
        let end_words = (bit + w).div_ceil(64);
        if self.words.len() < end_words {
            self.words.resize(end_words, 0);
        }
        self.len += 1;
        if w == 0 {
            return;
        }
        let (word, off) = (bit / 64, bit % 64);
        self.words[word] |= value << off;
        if off + w > 64 {
            self.words[word + 1] |= value >> (64 - off);
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        let w = self.width as usize;
        if w == 0 {
            return 0;
        }
        let bit = i * w;
        let (word, off) = (bit / 64, bit % 64);
        let mut v = self.words[word] >> off;
        if off + w > 64 {
            v |= self.words[word + 1] << (64 - off);
        }
        v & self.mask()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn size_in_bits(&self) -> usize {
        self.len * self.width as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn widths() {
        assert_eq!(bits_for(0), 0);
        assert_eq!(bits_for(1), 1);
        assert_eq!(bits_for(2), 2);
        assert_eq!(bits_for(255), 8);
        assert_eq!(bits_for(256), 9);
    }

    #[test]
    fn zero_width_stores_zeros() {
        let a = PackedArray::from_values(0, &[0, 0, 0]);
        assert_eq!(a.len(), 3);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 0, 0]);
        assert!(a.words().is_empty());
    }

    #[test]
    #[should_panic]
    fn overflow_rejected() {
        PackedArray::new(3).push(8);
    }

    proptest! {
        #[test]
        fn round_trip(width in 0u8..=64, raw in proptest::collection::vec(any::<u64>(), 0..200)) {
            let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
            let values: Vec<u64> = raw.iter().map(|v| v & mask).collect();
            let a = PackedArray::from_values(width, &values);
            prop_assert_eq!(a.iter().collect::<Vec<_>>(), values.clone());
            let b = PackedArray::from_raw(width, a.len(), a.words().to_vec());
            prop_assert_eq!(a, b);
        }
    }
}
