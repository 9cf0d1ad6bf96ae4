/// Fixed-length bit vector with cyclic rotation, the storage behind
/// [`ResidueSet`](super::ResidueSet).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct BitMask {
    words: Vec<u64>,
    len: usize,
}

const W: usize = 64;

impl BitMask {
    pub fn zeros(len: usize) -> Self {
        BitMask {
            words: vec![0; len.div_ceil(W)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut m = BitMask {
            words: vec![u64::MAX; len.div_ceil(W)],
            len,
        };
        m.trim();
        m
    }

    fn trim(&mut self) {
        let rem = self.len % W;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / W] >> (i % W) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / W] |= 1 << (i % W);
    }

    /// Sets bits `lo..hi`.
    pub fn set_range(&mut self, lo: usize, hi: usize) {
        debug_assert!(lo <= hi && hi <= self.len);
        if lo >= hi {
            return;
        }
        let (first, last) = (lo / W, (hi - 1) / W);
        let head = u64::MAX << (lo % W);
        let tail = u64::MAX >> (W - 1 - (hi - 1) % W);
        if first == last {
            self.words[first] |= head & tail;
            return;
        }
        self.words[first] |= head;
        for w in &mut self.words[first + 1..last] {
            *w = u64::MAX;
        }
        self.words[last] |= tail;
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_full(&self) -> bool {
        self.count_ones() == self.len
    }

    pub fn or_assign(&mut self, other: &BitMask) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn and(&self, other: &BitMask) -> BitMask {
        debug_assert_eq!(self.len, other.len);
        BitMask {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
            len: self.len,
        }
    }

    pub fn not(&self) -> BitMask {
        let mut m = BitMask {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        m.trim();
        m
    }

    /// Bit `i` moves to `i + k`; bits pushed past the end are lost.
    fn shl(&self, k: usize) -> BitMask {
        let mut out = BitMask::zeros(self.len);
        if k >= self.len {
            return out;
        }
        let (ws, bs) = (k / W, k % W);
        let n = self.words.len();
        for j in ws..n {
            let mut w = self.words[j - ws] << bs;
            if bs != 0 && j > ws {
                w |= self.words[j - ws - 1] >> (W - bs);
            }
            out.words[j] = w;
        }
        out.trim();
        out
    }

    /// Bit `i` moves to `i - k`; bits pushed below zero are lost.
    fn shr(&self, k: usize) -> BitMask {
        let mut out = BitMask::zeros(self.len);
        if k >= self.len {
            return out;
        }
        let (ws, bs) = (k / W, k % W);
        let n = self.words.len();
        for j in 0..n - ws {
            let mut w = self.words[j + ws] >> bs;
            if bs != 0 && j + ws + 1 < n {
                w |= self.words[j + ws + 1] << (W - bs);
            }
            out.words[j] = w;
        }
        out
    }

    /// Cyclic rotation: bit `i` moves to `(i + k) mod len`.
    pub fn rotate(&self, k: usize) -> BitMask {
        let k = k % self.len;
        if k == 0 {
            return self.clone();
        }
        let mut out = self.shl(k);
        out.or_assign(&self.shr(self.len - k));
        out
    }

    /// Union of the rotations by `0..width`, built by doubling.
    pub fn dilate(&self, width: usize) -> BitMask {
        if width >= self.len {
            return if self.count_ones() == 0 {
                self.clone()
            } else {
                BitMask::ones(self.len)
            };
        }
        let mut out = BitMask::zeros(self.len);
        let mut block = self.clone();
        let mut block_width = 1usize;
        let mut offset = 0usize;
        let mut rest = width;
        while rest > 0 {
            if rest & 1 == 1 {
                out.or_assign(&block.rotate(offset));
                offset += block_width;
            }
            rest >>= 1;
            if rest > 0 {
                let shifted = block.rotate(block_width);
                block.or_assign(&shifted);
                block_width *= 2;
            }
        }
        out
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(j, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let t = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(j * W + t)
                }
            })
        })
    }

    /// Maximal runs of consecutive set bits as `(start, length)`, in linear
    /// (not cyclic) order.
    pub fn runs(&self) -> Vec<(usize, usize)> {
        let mut runs: Vec<(usize, usize)> = Vec::new();
        let mut open: Option<usize> = None;
        for (j, &w) in self.words.iter().enumerate() {
            let base = j * W;
            // whole-word fast paths
            if w == 0 {
                if let Some(start) = open.take() {
                    runs.push((start, base - start));
                }
                continue;
            }
            if w == u64::MAX {
                open.get_or_insert(base);
                continue;
            }
            let mut bit = 0;
            while bit < W {
                let rest = w >> bit;
                if open.is_some() {
                    let ones = rest.trailing_ones() as usize;
                    bit += ones;
                    if bit < W {
                        let start = open.take().expect("open run");
                        runs.push((start, base + bit - start));
                    }
                } else {
                    if rest == 0 {
                        break;
                    }
                    bit += rest.trailing_zeros() as usize;
                    open = Some(base + bit);
                }
            }
        }
        if let Some(start) = open {
            runs.push((start, self.len - start));
        }
        runs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from(len: usize, bits: &[usize]) -> BitMask {
        let mut m = BitMask::zeros(len);
        for &b in bits {
            m.set(b);
        }
        m
    }

    #[test]
    fn rotation_matches_naive() {
        for len in [1, 5, 63, 64, 65, 130, 200] {
            let bits: Vec<usize> = (0..len).filter(|i| i % 3 == 0 || i % 7 == 1).collect();
            let m = from(len, &bits);
            for k in [0, 1, 2, 31, 63, 64, 65, 127, len.saturating_sub(1), len] {
                let r = m.rotate(k);
                let want: Vec<usize> = {
                    let mut v: Vec<usize> = bits.iter().map(|b| (b + k) % len).collect();
                    v.sort();
                    v
                };
                assert_eq!(r.iter_ones().collect::<Vec<_>>(), want, "len {len} k {k}");
            }
        }
    }

    #[test]
    fn dilate_matches_naive() {
        let len = 97;
        let m = from(len, &[0, 10, 50]);
        for width in [1, 2, 3, 5, 8, 13, 40, 96, 97, 200] {
            let mut want = BitMask::zeros(len);
            for s in 0..width.min(len) {
                want.or_assign(&m.rotate(s));
            }
            assert_eq!(m.dilate(width), want, "width {width}");
        }
    }

    #[test]
    fn runs_match_naive() {
        for len in [1, 63, 64, 65, 130, 300] {
            for pattern in 0..6usize {
                let bits: Vec<usize> = (0..len)
                    .filter(|i| match pattern {
                        0 => true,
                        1 => i % 2 == 0,
                        2 => (i / 64) % 2 == 0,
                        3 => i % 70 < 65,
                        4 => *i >= len / 2,
                        _ => i % 5 != 0 && i % 7 != 0,
                    })
                    .collect();
                let m = from(len, &bits);
                let mut naive: Vec<(usize, usize)> = Vec::new();
                for &i in &bits {
                    match naive.last_mut() {
                        Some((s, l)) if *s + *l == i => *l += 1,
                        _ => naive.push((i, 1)),
                    }
                }
                assert_eq!(m.runs(), naive, "len {len} pattern {pattern}");
            }
        }
    }

    #[test]
    fn set_range_matches_naive() {
        for len in [1, 64, 65, 200] {
            for lo in [0, 1, 63, 64, 65, 130] {
                for hi in [lo, lo + 1, lo + 63, lo + 64, lo + 70, len] {
                    if lo > hi || hi > len {
                        continue;
                    }
                    let mut m = BitMask::zeros(len);
                    m.set_range(lo, hi);
                    assert_eq!(
                        m,
                        from(len, &(lo..hi).collect::<Vec<_>>()),
                        "{len} {lo} {hi}"
                    );
                }
            }
        }
    }

    #[test]
    fn runs_and_complement() {
        let m = from(10, &[0, 1, 2, 5, 7, 8]);
        assert_eq!(m.runs(), vec![(0, 3), (5, 1), (7, 2)]);
        assert_eq!(m.not().iter_ones().collect::<Vec<_>>(), vec![3, 4, 6, 9]);
        assert!(BitMask::ones(70).is_full());
        assert_eq!(BitMask::ones(70).count_ones(), 70);
    }
}
