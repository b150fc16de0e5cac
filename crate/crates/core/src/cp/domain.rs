use alloc::vec;
use alloc::vec::Vec;

/// Finite set of integers stored as a bitset anchored at `offset`.
///
/// Values can only be removed; the representable window is fixed at
/// construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Domain {
    offset: i64,
    words: Vec<u64>,
    len: u32,
}

impl Domain {
    /// Inclusive range `lo..=hi`. Empty when `lo > hi`.
    pub fn range(lo: i64, hi: i64) -> Self {
        if lo > hi {
            return Domain { offset: lo, words: Vec::new(), len: 0 };
        }
        let span = (hi - lo + 1) as usize;
        let mut words = vec![u64::MAX; span.div_ceil(64)];
        let tail = span % 64;
        if tail != 0 {
            *words.last_mut().unwrap() = (1u64 << tail) - 1;
        }
        Domain { offset: lo, words, len: span as u32 }
    }

    pub fn singleton(value: i64) -> Self {
        Self::range(value, value)
    }

    /// Domain holding exactly `values`; duplicates are ignored.
    pub fn from_values(values: &[i64]) -> Self {
        let (Some(&lo), Some(&hi)) = (values.iter().min(), values.iter().max()) else {
            return Domain { offset: 0, words: Vec::new(), len: 0 };
        };
        let mut d = Self::range(lo, hi);
        d.words.iter_mut().for_each(|w| *w = 0);
        d.len = 0;
        for &v in values {
            let (w, b) = d.slot(v).unwrap();
            if d.words[w] & (1 << b) == 0 {
                d.words[w] |= 1 << b;
                d.len += 1;
            }
        }
        d
    }

    fn slot(&self, value: i64) -> Option<(usize, u32)> {
        if value < self.offset {
            return None;
        }
        let idx = (value - self.offset) as u64;
        let w = (idx / 64) as usize;
        (w < self.words.len()).then_some((w, (idx % 64) as u32))
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_fixed(&self) -> bool {
        self.len == 1
    }

    /// The single value of a fixed domain.
    pub fn value(&self) -> Option<i64> {
        if self.is_fixed() {
            self.min()
        } else {
            None
        }
    }

    pub fn contains(&self, value: i64) -> bool {
        self.slot(value)
            .is_some_and(|(w, b)| self.words[w] & (1 << b) != 0)
    }

    pub fn min(&self) -> Option<i64> {
        self.words.iter().enumerate().find(|(_, w)| **w != 0).map(|(i, w)| {
            self.offset + (i as i64) * 64 + i64::from(w.trailing_zeros())
        })
    }

    pub fn max(&self) -> Option<i64> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| self.offset + (i as i64) * 64 + 63 - i64::from(w.leading_zeros()))
    }

    /// Removes `value`; returns whether the domain changed.
    pub fn remove(&mut self, value: i64) -> bool {
        match self.slot(value) {
            Some((w, b)) if self.words[w] & (1 << b) != 0 => {
                self.words[w] &= !(1 << b);
                self.len -= 1;
                true
            }
            _ => false,
        }
    }

    /// Reduces the domain to `{value}` (or to nothing if absent).
    pub fn assign(&mut self, value: i64) -> bool {
        let present = self.contains(value);
        if present && self.len == 1 {
            return false;
        }
        let before = self.len;
        self.words.iter_mut().for_each(|w| *w = 0);
        self.len = 0;
        if present {
            let (w, b) = self.slot(value).unwrap();
            self.words[w] = 1 << b;
            self.len = 1;
        }
        before != self.len
    }

    /// Removes every value below `bound`.
    pub fn remove_below(&mut self, bound: i64) -> bool {
        if bound <= self.offset {
            return false;
        }
        let cut = (i128::from(bound) - i128::from(self.offset)).min(self.words.len() as i128 * 64) as u64;
        let full = ((cut / 64) as usize).min(self.words.len());
        let mut removed = 0;
        for w in &mut self.words[..full] {
            removed += w.count_ones();
            *w = 0;
        }
        if full < self.words.len() {
            let mask = (1u64 << (cut % 64)) - 1;
            removed += (self.words[full] & mask).count_ones();
            self.words[full] &= !mask;
        }
        self.len -= removed;
        removed > 0
    }

    /// Removes every value above `bound`.
    pub fn remove_above(&mut self, bound: i64) -> bool {
        if bound < self.offset {
            let changed = self.len > 0;
            self.words.iter_mut().for_each(|w| *w = 0);
            self.len = 0;
            return changed;
        }
        let keep = (i128::from(bound) - i128::from(self.offset) + 1).min(self.words.len() as i128 * 64) as u64;
        let first = ((keep / 64) as usize).min(self.words.len());
        let mut removed = 0;
        if first < self.words.len() {
            let mask = (1u64 << (keep % 64)) - 1;
            removed += (self.words[first] & !mask).count_ones();
            self.words[first] &= mask;
            for w in &mut self.words[first + 1..] {
                removed += w.count_ones();
                *w = 0;
            }
        }
        self.len -= removed;
        removed > 0
    }

    /// Values in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        let offset = self.offset;
        self.words.iter().enumerate().flat_map(move |(i, &word)| {
            let mut w = word;
            core::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some(offset + (i as i64) * 64 + i64::from(b))
            })
        })
    }

    pub fn is_subset_of(&self, other: &Domain) -> bool {
        self.iter().all(|v| other.contains(v))
    }
}
