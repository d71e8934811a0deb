use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest rank representable by the bitmask encoding of [`BladeIndex`].
pub const MAX_RANK: usize = 32;

/// A basis blade `e_{i1} e_{i2} ... e_{ik}` with `i1 < i2 < ... < ik`.
///
/// Stored as a bitmask (bit `i - 1` set for generator `e_i`), so the index
/// list is always distinct and sorted; the empty mask is the scalar blade.
/// Blades order by grade first, then lexicographically by index list.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BladeIndex(u32);

impl BladeIndex {
    pub const SCALAR: BladeIndex = BladeIndex(0);

    /// Blade from a strictly increasing list of 1-based generator indices.
    pub fn new(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        let mut last = 0usize;
        for (pos, &i) in indices.iter().enumerate() {
            if i == 0 || i > MAX_RANK {
                return Err(Error::IndexOutOfRange { index: i, rank: MAX_RANK });
            }
            if pos > 0 && i <= last {
                return Err(Error::Parse {
                    position: pos,
                    message: format!("blade indices must be strictly increasing, got {indices:?}"),
                });
            }
            last = i;
            mask |= 1 << (i - 1);
        }
        Ok(BladeIndex(mask))
    }

    /// The generator `e_i` (1-based).
    pub fn generator(i: usize) -> Result<Self> {
        Self::new(&[i])
    }

    pub fn from_mask(mask: u32) -> Self {
        BladeIndex(mask)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_scalar(self) -> bool {
        self.0 == 0
    }

    /// Largest generator index in the blade (0 for the scalar blade).
    pub fn max_index(self) -> usize {
        (u32::BITS - self.0.leading_zeros()) as usize
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..u32::BITS as usize).filter(move |b| mask & (1 << b) != 0).map(|b| b + 1)
    }

    pub fn disjoint(self, other: BladeIndex) -> bool {
        self.0 & other.0 == 0
    }

    /// Product of two basis blades under `e_i^2 = -1`: the resulting blade and
    /// the sign `±1`.
    ///
    /// The sign counts the transpositions needed to sort the concatenated
    /// index list, then contributes one factor of `-1` per repeated generator.
    pub fn product(self, other: BladeIndex) -> (BladeIndex, i8) {
        let mut swaps = 0u32;
        let mut a = self.0 >> 1;
        while a != 0 {
            swaps += (a & other.0).count_ones();
            a >>= 1;
        }
        swaps += (self.0 & other.0).count_ones();
        let sign = if swaps.is_multiple_of(2) { 1 } else { -1 };
        (BladeIndex(self.0 ^ other.0), sign)
    }
}

impl Ord for BladeIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.grade()
            .cmp(&other.grade())
            .then_with(|| self.indices().cmp(other.indices()))
    }
}

impl PartialOrd for BladeIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BladeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_scalar() {
            return f.write_str("1");
        }
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for BladeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in self.indices() {
            write!(f, "e{i}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(ix: &[usize]) -> BladeIndex {
        BladeIndex::new(ix).unwrap()
    }

    #[test]
    fn generator_relations() {
        let (e12, s) = b(&[1]).product(b(&[2]));
        assert_eq!((e12, s), (b(&[1, 2]), 1));
        assert_eq!(b(&[2]).product(b(&[1])), (b(&[1, 2]), -1));
        assert_eq!(b(&[3]).product(b(&[3])), (BladeIndex::SCALAR, -1));
        // (e1e2)^2 = -1
        assert_eq!(b(&[1, 2]).product(b(&[1, 2])), (BladeIndex::SCALAR, -1));
        // e1e2 e1e3 = e2e3
        assert_eq!(b(&[1, 2]).product(b(&[1, 3])), (b(&[2, 3]), 1));
        // (e1e2e3e4)^2 = +1
        assert_eq!(b(&[1, 2, 3, 4]).product(b(&[1, 2, 3, 4])), (BladeIndex::SCALAR, 1));
    }

    #[test]
    fn ordering_is_grade_then_lexicographic() {
        let mut v = vec![b(&[2, 3]), b(&[1]), BladeIndex::SCALAR, b(&[1, 3]), b(&[1, 2, 3]), b(&[3])];
        v.sort();
        assert_eq!(v, vec![BladeIndex::SCALAR, b(&[1]), b(&[3]), b(&[1, 3]), b(&[2, 3]), b(&[1, 2, 3])]);
    }

    #[test]
    fn rejects_unsorted_or_zero() {
        assert!(BladeIndex::new(&[2, 1]).is_err());
        assert!(BladeIndex::new(&[1, 1]).is_err());
        assert!(BladeIndex::new(&[0]).is_err());
        assert_eq!(b(&[1, 4, 10]).to_string(), "e1e4e10");
        assert_eq!(b(&[1, 4, 10]).max_index(), 10);
    }
}
