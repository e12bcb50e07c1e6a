//! Small sets of states, stored as `u64` bitmasks.
//!
//! States are indexed `0..n` internally; all human-facing formatting is
//! 1-based. The bitmask doubles as a total order on sets of equal size,
//! which fixes witness identity wherever "first set found" matters.

use std::fmt;

/// Largest supported dimension (one bit per state).
pub const MAX_NODES: usize = 64;

/// A subset of `{0, .., n-1}` packed into a `u64`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NodeSet(u64);

impl NodeSet {
    /// The empty set.
    pub const fn empty() -> Self {
        NodeSet(0)
    }

    /// The full set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_NODES, "at most {MAX_NODES} states supported");
        if n == MAX_NODES {
            NodeSet(u64::MAX)
        } else {
            NodeSet((1u64 << n) - 1)
        }
    }

    /// The singleton `{i}`.
    pub fn singleton(i: usize) -> Self {
        assert!(i < MAX_NODES);
        NodeSet(1u64 << i)
    }

    /// Builds a set directly from a bitmask.
    pub const fn from_bits(bits: u64) -> Self {
        NodeSet(bits)
    }

    /// The raw bitmask.
    pub const fn bits(self) -> u64 {
        self.0
    }

    pub const fn contains(self, i: usize) -> bool {
        i < MAX_NODES && self.0 & (1u64 << i) != 0
    }

    #[must_use]
    pub fn insert(self, i: usize) -> Self {
        assert!(i < MAX_NODES);
        NodeSet(self.0 | (1u64 << i))
    }

    #[must_use]
    pub fn remove(self, i: usize) -> Self {
        assert!(i < MAX_NODES);
        NodeSet(self.0 & !(1u64 << i))
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[must_use]
    pub const fn union(self, other: Self) -> Self {
        NodeSet(self.0 | other.0)
    }

    #[must_use]
    pub const fn intersection(self, other: Self) -> Self {
        NodeSet(self.0 & other.0)
    }

    /// Elements of `self` not in `other`.
    #[must_use]
    pub const fn difference(self, other: Self) -> Self {
        NodeSet(self.0 & !other.0)
    }

    /// Complement within `{0, .., n-1}`.
    #[must_use]
    pub fn complement(self, n: usize) -> Self {
        NodeSet(!self.0 & Self::full(n).0)
    }

    pub const fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Iterates elements in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// Smallest element, if any.
    pub fn min_element(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    /// Elements as 1-based indices, ascending. This is the exchange format
    /// for reports and JSON.
    pub fn one_based(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = NodeSet::empty();
        for i in iter {
            s = s.insert(i);
        }
        s
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All nonempty subsets of `{0, .., n-1}`, ordered by cardinality and then
/// by ascending bitmask. The bitmask order within a cardinality class is the
/// repo convention wherever a first witness is reported.
pub fn nonempty_subsets(n: usize) -> impl Iterator<Item = NodeSet> {
    assert!(n <= MAX_NODES);
    let full: u128 = if n == 128 { unreachable!() } else { (1u128 << n) - 1 };
    let mut size = 0usize;
    let mut current: u128 = 0;
    std::iter::from_fn(move || {
        loop {
            if current == 0 || current > full {
                // advance to the next cardinality class
                if size >= n {
                    return None;
                }
                size += 1;
                current = (1u128 << size) - 1;
                return Some(NodeSet(current as u64));
            }
            // Gosper's hack: next mask with the same popcount.
            let c = current;
            let u = c & c.wrapping_neg();
            let v = c + u;
            current = v | (((v ^ c) >> 2) / u);
            if current <= full {
                return Some(NodeSet(current as u64));
            }
            // fell off the end of this class; loop to bump the size
            current = 0;
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_set_algebra() {
        let s: NodeSet = [0, 2].into_iter().collect();
        assert!(s.contains(0) && !s.contains(1) && s.contains(2));
        assert_eq!(s.len(), 2);
        assert_eq!(s.complement(3), NodeSet::singleton(1));
        assert_eq!(s.union(NodeSet::singleton(1)), NodeSet::full(3));
        assert_eq!(s.intersection(NodeSet::singleton(2)), NodeSet::singleton(2));
        assert_eq!(s.difference(NodeSet::singleton(2)), NodeSet::singleton(0));
        assert!(NodeSet::singleton(2).is_subset(s));
        assert!(!s.is_subset(NodeSet::singleton(2)));
        assert_eq!(s.to_string(), "{1,3}");
        assert_eq!(s.one_based(), vec![1, 3]);
        assert_eq!(s.min_element(), Some(0));
        assert_eq!(NodeSet::empty().min_element(), None);
    }

    #[test]
    fn full_set_at_the_word_boundary() {
        assert_eq!(NodeSet::full(64).bits(), u64::MAX);
        assert_eq!(NodeSet::full(64).len(), 64);
        assert_eq!(NodeSet::singleton(63).complement(64).len(), 63);
    }

    #[test]
    fn subset_enumeration_order_n3() {
        let got: Vec<u64> = nonempty_subsets(3).map(NodeSet::bits).collect();
        // size 1: {1},{2},{3}; size 2: {1,2},{1,3},{2,3}; size 3: {1,2,3}
        assert_eq!(got, vec![0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111]);
    }

    #[test]
    fn subset_enumeration_counts_and_order() {
        for n in 1..=10 {
            let all: Vec<NodeSet> = nonempty_subsets(n).collect();
            assert_eq!(all.len(), (1usize << n) - 1);
            // strictly increasing in (popcount, bitmask)
            for w in all.windows(2) {
                let (a, b) = (w[0], w[1]);
                assert!(
                    (a.len(), a.bits()) < (b.len(), b.bits()),
                    "order violated at {a:?} -> {b:?}"
                );
            }
            // every subset is within range
            for s in &all {
                assert!(s.is_subset(NodeSet::full(n)));
                assert!(!s.is_empty());
            }
        }
    }

    #[test]
    fn subset_enumeration_handles_wide_sets() {
        // n = 64 would be 2^64 - 1 sets; just check the stream starts correctly.
        let first: Vec<u64> = nonempty_subsets(64).take(65).map(NodeSet::bits).collect();
        for (i, bits) in first.iter().take(64).enumerate() {
            assert_eq!(*bits, 1u64 << i);
        }
        assert_eq!(first[64], 0b11); // first two-element set
    }
}
