//! Exhaustive, duplicate-free enumeration of all strictly r-furcating
//! unlabeled topologies with a given number of leaves.
//!
//! Shapes are generated recursively over non-decreasing multisets of root
//! subtree sizes, with non-decreasing subtree choices within equal sizes, so
//! every canonical shape is produced exactly once. Lists are memoized per
//! leaf count and returned sorted by canonical serialization, so enumeration
//! order is deterministic.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::shape::TreeShape;

fn validate(r: u32, n: u64) -> Result<()> {
    if r < 2 {
        return Err(Error::InvalidArity(r));
    }
    if n < 1 {
        return Err(Error::NTooSmall { n, min: 1 });
    }
    if n % (r as u64 - 1) != 1 % (r as u64 - 1) {
        return Err(Error::InvalidLeafCount { n, modulus: r - 1 });
    }
    Ok(())
}

/// Non-decreasing r-tuples of valid subtree sizes summing to n, in
/// lexicographic order. Each size is congruent to 1 modulo r-1.
pub fn size_multisets(r: u32, n: u64) -> Result<Vec<Vec<u64>>> {
    validate(r, n)?;
    let step = r as u64 - 1;
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(r as usize);
    fn rec(
        slots: u64,
        min: u64,
        remaining: u64,
        step: u64,
        current: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
    ) {
        if slots == 1 {
            if remaining >= min {
                current.push(remaining);
                out.push(current.clone());
                current.pop();
            }
            return;
        }
        let mut size = min;
        while size * slots <= remaining {
            current.push(size);
            rec(slots - 1, size, remaining - size, step, current, out);
            current.pop();
            size += step;
        }
    }
    if n > 1 {
        rec(r as u64, 1, n, step, &mut current, &mut out);
    }
    Ok(out)
}

/// Memoizing enumerator for a fixed arity.
pub struct ShapeEnumerator {
    r: u32,
    memo: HashMap<u64, Arc<Vec<TreeShape>>>,
}

impl ShapeEnumerator {
    pub fn new(r: u32) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidArity(r));
        }
        Ok(ShapeEnumerator {
            r,
            memo: HashMap::new(),
        })
    }

    pub fn arity(&self) -> u32 {
        self.r
    }

    /// All canonical shapes with n leaves, sorted by serialization text.
    pub fn shapes(&mut self, n: u64) -> Result<Arc<Vec<TreeShape>>> {
        validate(self.r, n)?;
        if let Some(list) = self.memo.get(&n) {
            return Ok(Arc::clone(list));
        }
        let list = if n == 1 {
            vec![TreeShape::leaf(self.r)?]
        } else {
            let mut acc = Vec::new();
            for sizes in size_multisets(self.r, n)? {
                let sublists = sizes
                    .iter()
                    .map(|&s| self.shapes(s))
                    .collect::<Result<Vec<_>>>()?;
                let mut children: Vec<TreeShape> = Vec::with_capacity(sizes.len());
                combine(&sizes, &sublists, &mut children, &mut acc)?;
            }
            acc.sort_unstable();
            debug_assert!(
                acc.windows(2).all(|w| w[0] < w[1]),
                "duplicate shapes generated"
            );
            acc
        };
        let list = Arc::new(list);
        self.memo.insert(n, Arc::clone(&list));
        Ok(list)
    }

    /// Contiguous chunks of the canonical list; concatenating the chunks in
    /// order reproduces `shapes(n)` exactly. Used to fan work out to
    /// independent workers while keeping merged output deterministic.
    pub fn partitioned(&mut self, n: u64, parts: usize) -> Result<Vec<Vec<TreeShape>>> {
        let all = self.shapes(n)?;
        let parts = parts.max(1);
        let chunk = all.len().div_ceil(parts).max(1);
        Ok(all.chunks(chunk).map(|c| c.to_vec()).collect())
    }
}

/// Chooses one shape per slot, non-decreasing within runs of equal size, and
/// composes each completed selection.
fn combine(
    sizes: &[u64],
    sublists: &[Arc<Vec<TreeShape>>],
    children: &mut Vec<TreeShape>,
    acc: &mut Vec<TreeShape>,
) -> Result<()> {
    fn rec(
        slot: usize,
        min_index: usize,
        sizes: &[u64],
        sublists: &[Arc<Vec<TreeShape>>],
        children: &mut Vec<TreeShape>,
        acc: &mut Vec<TreeShape>,
    ) -> Result<()> {
        if slot == sizes.len() {
            acc.push(TreeShape::compose(children)?);
            return Ok(());
        }
        let same_size_as_previous = slot > 0 && sizes[slot] == sizes[slot - 1];
        let start = if same_size_as_previous { min_index } else { 0 };
        for idx in start..sublists[slot].len() {
            children.push(sublists[slot][idx].clone());
            rec(slot + 1, idx, sizes, sublists, children, acc)?;
            children.pop();
        }
        Ok(())
    }
    rec(0, 0, sizes, sublists, children, acc)
}

/// Convenience wrapper over [`ShapeEnumerator`].
pub fn enumerate_shapes(r: u32, n: u64) -> Result<Vec<TreeShape>> {
    let mut e = ShapeEnumerator::new(r)?;
    Ok(e.shapes(n)?.as_ref().clone())
}

/// Number of shapes with n leaves, computed by the multiset-composition
/// recurrence without constructing any shape. Serves as an independent
/// cross-check of the enumerator.
pub fn count_shapes(r: u32, n: u64) -> Result<BigUint> {
    struct Counter {
        r: u32,
        memo: HashMap<u64, BigUint>,
    }
    impl Counter {
        fn count(&mut self, n: u64) -> Result<BigUint> {
            if n == 1 {
                return Ok(BigUint::from(1u32));
            }
            if let Some(c) = self.memo.get(&n) {
                return Ok(c.clone());
            }
            let mut total = BigUint::ZERO;
            for sizes in size_multisets(self.r, n)? {
                let mut product = BigUint::from(1u32);
                let mut i = 0;
                while i < sizes.len() {
                    let mut j = i;
                    while j < sizes.len() && sizes[j] == sizes[i] {
                        j += 1;
                    }
                    let base = self.count(sizes[i])?;
                    product *= multichoose(&base, (j - i) as u64);
                    i = j;
                }
                total += product;
            }
            self.memo.insert(n, total.clone());
            Ok(total)
        }
    }
    validate(r, n)?;
    Counter {
        r,
        memo: HashMap::new(),
    }
    .count(n)
}

/// Multisets of size k drawn from a set of `options` elements:
/// C(options + k - 1, k), computed by exact stepwise division.
fn multichoose(options: &BigUint, k: u64) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= options + BigUint::from(i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven_leaf_trifurcating() {
        let shapes = enumerate_shapes(3, 7).unwrap();
        let texts: Vec<String> = shapes.iter().map(|t| t.to_text()).collect();
        assert_eq!(texts, vec!["(*,(*,*,*),(*,*,*));", "(*,*,(*,*,(*,*,*)));"]);
    }

    #[test]
    fn base_and_small_cases() {
        assert_eq!(enumerate_shapes(2, 1).unwrap().len(), 1);
        assert_eq!(enumerate_shapes(2, 6).unwrap().len(), 6);
        assert_eq!(count_shapes(3, 9).unwrap(), BigUint::from(4u32));
        assert_eq!(count_shapes(2, 4).unwrap(), BigUint::from(2u32));
        assert_eq!(count_shapes(2, 2).unwrap(), BigUint::from(1u32));
    }

    #[test]
    fn invalid_leaf_counts_rejected() {
        assert!(matches!(
            enumerate_shapes(3, 4),
            Err(Error::InvalidLeafCount { .. })
        ));
        assert!(matches!(
            count_shapes(3, 8),
            Err(Error::InvalidLeafCount { .. })
        ));
        assert!(matches!(
            enumerate_shapes(1, 5),
            Err(Error::InvalidArity(1))
        ));
    }

    #[test]
    fn count_matches_enumeration() {
        for r in [2u32, 3, 4] {
            let step = (r - 1) as u64;
            let mut n = 1u64;
            while n <= 1 + 8 * step {
                let listed = enumerate_shapes(r, n).unwrap().len();
                assert_eq!(count_shapes(r, n).unwrap(), BigUint::from(listed));
                n += step;
            }
        }
    }

    #[test]
    fn enumeration_is_sorted_and_duplicate_free() {
        let shapes = enumerate_shapes(2, 10).unwrap();
        for w in shapes.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn closure_under_subtrees() {
        let mut e = ShapeEnumerator::new(3).unwrap();
        let shapes = e.shapes(11).unwrap();
        for t in shapes.iter() {
            for child in t.children() {
                let sublist = e.shapes(child.leaf_count()).unwrap();
                assert!(sublist.binary_search(&child).is_ok());
            }
        }
    }

    #[test]
    fn partitions_cover_exactly() {
        let mut e = ShapeEnumerator::new(2).unwrap();
        let all = e.shapes(9).unwrap();
        let parts = e.partitioned(9, 4).unwrap();
        let glued: Vec<TreeShape> = parts.into_iter().flatten().collect();
        assert_eq!(glued, **all);
    }

    #[test]
    fn size_multiset_examples() {
        assert_eq!(
            size_multisets(3, 7).unwrap(),
            vec![vec![1, 1, 5], vec![1, 3, 3]]
        );
        assert_eq!(
            size_multisets(3, 9).unwrap(),
            vec![vec![1, 1, 7], vec![1, 3, 5], vec![3, 3, 3]]
        );
        assert_eq!(size_multisets(2, 2).unwrap(), vec![vec![1, 1]]);
    }
}
