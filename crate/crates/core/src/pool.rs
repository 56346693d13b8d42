//! Pools: subsets of the item universe stored as fixed-width bit vectors.
//!
//! Items are 1-based. Bit `j` (word `j / 64`, bit `j % 64`) stores item `j + 1`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pool {
    width: usize,
    words: Vec<u64>,
}

fn word_count(width: usize) -> usize {
    width.div_ceil(64)
}

impl Pool {
    pub fn empty(width: usize) -> Self {
        Self {
            width,
            words: vec![0; word_count(width)],
        }
    }

    pub fn full(width: usize) -> Self {
        let mut pool = Self::empty(width);
        for i in 0..width {
            pool.set_bit(i);
        }
        pool
    }

    /// Builds a pool from 1-based item indices.
    pub fn from_items<I: IntoIterator<Item = usize>>(width: usize, items: I) -> Result<Self> {
        let mut pool = Self::empty(width);
        for item in items {
            pool.insert(item)?;
        }
        Ok(pool)
    }

    /// Builds a pool from 0-based bit positions; panics when out of range.
    pub fn from_bits(width: usize, bits: &[usize]) -> Self {
        let mut pool = Self::empty(width);
        for &b in bits {
            assert!(b < width, "bit {b} outside width {width}");
            pool.set_bit(b);
        }
        pool
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn insert(&mut self, item: usize) -> Result<()> {
        if item == 0 || item > self.width {
            return Err(Error::InvalidParameter(format!(
                "item {item} outside 1..={}",
                self.width
            )));
        }
        self.set_bit(item - 1);
        Ok(())
    }

    pub(crate) fn set_bit(&mut self, bit: usize) {
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    pub fn bit(&self, bit: usize) -> bool {
        bit < self.width && self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn contains(&self, item: usize) -> bool {
        item >= 1 && self.bit(item - 1)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Member items, 1-based and ascending.
    pub fn items(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + b + 1)
            })
        })
    }

    pub fn intersects(&self, other: &Pool) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &Pool) -> bool {
        self.width == other.width
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Pool) -> bool {
        !self.intersects(other)
    }

    /// Lowercase hex of the mask read as a little-endian number, left-padded
    /// to `ceil(width / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.width.div_ceil(4);
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let bit = d * 4;
            let mut nibble = 0u32;
            for k in 0..4 {
                if self.bit(bit + k) {
                    nibble |= 1 << k;
                }
            }
            out.push(char::from_digit(nibble, 16).unwrap());
        }
        out
    }

    pub fn from_hex(width: usize, hex: &str) -> Result<Self> {
        let hex = hex.trim();
        if hex.len() != width.div_ceil(4) {
            return Err(Error::InvalidParameter(format!(
                "row has {} hex digits, expected {}",
                hex.len(),
                width.div_ceil(4)
            )));
        }
        let mut pool = Self::empty(width);
        for (pos, ch) in hex.chars().rev().enumerate() {
            let nibble = ch
                .to_digit(16)
                .filter(|_| !ch.is_ascii_uppercase())
                .ok_or_else(|| Error::InvalidParameter(format!("bad hex digit {ch:?}")))?;
            for k in 0..4 {
                if nibble >> k & 1 == 1 {
                    let bit = pos * 4 + k;
                    if bit >= width {
                        return Err(Error::InvalidParameter(format!(
                            "bit {bit} set beyond width {width}"
                        )));
                    }
                    pool.set_bit(bit);
                }
            }
        }
        Ok(pool)
    }
}

impl fmt::Debug for Pool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pool[{}]", self.width)?;
        f.debug_set().entries(self.items()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_is_one_based() {
        let p = Pool::from_items(70, [1, 64, 65, 70]).unwrap();
        assert!(p.contains(1) && p.contains(64) && p.contains(65) && p.contains(70));
        assert!(!p.contains(2) && !p.contains(0) && !p.contains(71));
        assert_eq!(p.items().collect::<Vec<_>>(), vec![1, 64, 65, 70]);
        assert_eq!(p.len(), 4);
        assert!(Pool::from_items(4, [5]).is_err());
        assert!(Pool::from_items(4, [0]).is_err());
    }

    #[test]
    fn hex_layout() {
        // items 1 and 6 of 10 → bits 0 and 5 → 0x021
        let p = Pool::from_items(10, [1, 6]).unwrap();
        assert_eq!(p.to_hex(), "021");
        assert_eq!(Pool::from_hex(10, "021").unwrap(), p);
        assert!(Pool::from_hex(10, "21").is_err());
        assert!(Pool::from_hex(10, "800").is_err());
        assert!(Pool::from_hex(10, "0A1").is_err());
        assert_eq!(Pool::full(5).to_hex(), "1f");
    }

    #[test]
    fn set_relations() {
        let a = Pool::from_items(8, [1, 2]).unwrap();
        let b = Pool::from_items(8, [1, 2, 3]).unwrap();
        let c = Pool::from_items(8, [4]).unwrap();
        assert!(a.is_subset(&b) && !b.is_subset(&a));
        assert!(a.intersects(&b) && a.is_disjoint(&c));
    }
}
