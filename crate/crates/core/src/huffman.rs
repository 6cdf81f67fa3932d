//! The r-merge operator on non-decreasing integer sequences, normal-sequence
//! classification, and the r-ary Huffman construction.
//!
//! One Huffman step deletes the r smallest pending weights and inserts their
//! sum; [`huffman_tree`] resolves ties by a fixed deterministic policy, while
//! [`huffman_all_shapes`] explores every arbitrary tie choice and returns the
//! set of reachable shapes.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::shape::TreeShape;

/// Hard cap on memoized states explored by [`huffman_all_shapes`].
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// A non-decreasing sequence of positive integer weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector(Vec<u64>);

impl WeightVector {
    /// Sorts the input; rejects empty vectors and zero weights.
    pub fn new(mut weights: Vec<u64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyWeights);
        }
        if weights.contains(&0) {
            return Err(Error::NonPositiveWeight);
        }
        weights.sort_unstable();
        Ok(WeightVector(weights))
    }

    /// The uniform all-ones vector of length n.
    pub fn uniform(n: usize) -> Result<Self> {
        WeightVector::new(vec![1; n])
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Internal-node weights of a tree in non-decreasing order; equivalently the
/// sums created by the merge steps that build it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightSeq(Vec<u64>);

impl WeightSeq {
    pub fn values(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for WeightSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

impl From<Vec<u64>> for WeightSeq {
    fn from(mut v: Vec<u64>) -> Self {
        v.sort_unstable();
        WeightSeq(v)
    }
}

/// Outcome of the normal-sequence test: every element lies in
/// [r^k, r^(k+1)] and at most one element is not a power of r.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalityReport {
    pub is_normal: bool,
    /// The witness exponent k. When all elements equal a single power r^j the
    /// interval is ambiguous and k = j is reported.
    pub exponent: Option<u32>,
    /// Position of the unique non-power element, when one exists.
    pub non_power_index: Option<usize>,
}

/// Deletes the first r elements and inserts their sum, keeping the sequence
/// non-decreasing. Element sums are preserved and the length shrinks by r-1.
pub fn r_merge(sigma: &WeightVector, r: u32) -> Result<WeightVector> {
    if r < 2 {
        return Err(Error::InvalidArity(r));
    }
    let r = r as usize;
    if sigma.len() < r {
        return Err(Error::SequenceTooShort {
            len: sigma.len(),
            r: r as u32,
        });
    }
    let mut sum: u64 = 0;
    for &w in &sigma.0[..r] {
        sum = sum.checked_add(w).ok_or(Error::WeightOverflow)?;
    }
    let rest = &sigma.0[r..];
    let at = rest.partition_point(|&w| w <= sum);
    let mut out = Vec::with_capacity(rest.len() + 1);
    out.extend_from_slice(&rest[..at]);
    out.push(sum);
    out.extend_from_slice(&rest[at..]);
    Ok(WeightVector(out))
}

/// Classifies a sequence against the normality definition for the given r.
pub fn is_normal(sigma: &WeightVector, r: u32) -> NormalityReport {
    let not_normal = NormalityReport {
        is_normal: false,
        exponent: None,
        non_power_index: None,
    };
    if r < 2 {
        return not_normal;
    }
    let rb = r as u64;
    let first = sigma.0[0];
    // Largest k with r^k <= first; the only viable witness, except that an
    // all-equal power sequence also fits the interval below it.
    let mut k = 0u32;
    let mut low: u64 = 1;
    while let Some(next) = low.checked_mul(rb) {
        if next <= first {
            low = next;
            k += 1;
        } else {
            break;
        }
    }
    let Some(high) = low.checked_mul(rb) else {
        return not_normal;
    };
    let mut non_power_index = None;
    for (i, &w) in sigma.0.iter().enumerate() {
        if w < low || w > high {
            return not_normal;
        }
        if !crate::shape::is_power_of(w, rb) {
            if non_power_index.is_some() {
                return not_normal;
            }
            non_power_index = Some(i);
        }
    }
    NormalityReport {
        is_normal: true,
        exponent: Some(k),
        non_power_index,
    }
}

/// The weight sequence produced by iterating the merge operator down to a
/// single element: one created sum per step, in non-decreasing order.
pub fn merge_weight_sequence(weights: &WeightVector, r: u32) -> Result<WeightSeq> {
    validate_huffman_input(weights, r)?;
    let mut sigma = weights.clone();
    let mut created = Vec::new();
    while sigma.len() > 1 {
        let merged = r_merge(&sigma, r)?;
        let mut sum: u64 = 0;
        for &w in &sigma.0[..r as usize] {
            sum += w;
        }
        created.push(sum);
        sigma = merged;
    }
    Ok(WeightSeq::from(created))
}

fn validate_huffman_input(weights: &WeightVector, r: u32) -> Result<()> {
    if r < 2 {
        return Err(Error::InvalidArity(r));
    }
    let modulus = r as u64 - 1;
    if weights.len() as u64 % modulus != 1 % modulus {
        return Err(Error::InvalidLeafCount {
            n: weights.len() as u64,
            modulus: r - 1,
        });
    }
    Ok(())
}

/// A Huffman run: the resulting shape and the sequence of created weights.
#[derive(Debug, Clone)]
pub struct HuffmanTree {
    pub shape: TreeShape,
    pub weight_sequence: WeightSeq,
}

/// Builds the H-tree under the fixed deterministic tie policy: among
/// minimal-weight candidates, always merge the r first nodes ordered by
/// (weight, creation index), leaves first in input order.
pub fn huffman_tree(weights: &WeightVector, r: u32) -> Result<HuffmanTree> {
    validate_huffman_input(weights, r)?;
    let uniform = weights.0.iter().all(|&w| w == weights.0[0]);
    let mut shapes: Vec<TreeShape> = Vec::with_capacity(2 * weights.len());
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::with_capacity(weights.len());
    for (i, &w) in weights.0.iter().enumerate() {
        shapes.push(TreeShape::leaf(r)?);
        heap.push(Reverse((w, i)));
    }
    let mut created: Vec<u64> = Vec::new();
    while heap.len() > 1 {
        let mut sum: u64 = 0;
        let mut children = Vec::with_capacity(r as usize);
        for _ in 0..r {
            let Reverse((w, id)) = heap.pop().expect("length invariant");
            sum = sum.checked_add(w).ok_or(Error::WeightOverflow)?;
            children.push(shapes[id].clone());
        }
        let id = shapes.len();
        shapes.push(TreeShape::compose(&children)?);
        created.push(sum);
        heap.push(Reverse((sum, id)));
    }
    if uniform {
        // With uniform weights merge sums are created in non-decreasing order.
        assert!(created.windows(2).all(|w| w[0] <= w[1]));
    }
    let Reverse((_, root)) = heap.pop().expect("one node remains");
    Ok(HuffmanTree {
        shape: shapes[root].clone(),
        weight_sequence: WeightSeq::from(created),
    })
}

/// Every shape reachable by some resolution of the minimal-weight ties, found
/// by exploring choices over (weight, shape) equivalence classes with
/// memoization. Errors out once `cap` distinct states have been expanded.
pub fn huffman_all_shapes_with_cap(
    weights: &WeightVector,
    r: u32,
    cap: usize,
) -> Result<BTreeSet<TreeShape>> {
    validate_huffman_input(weights, r)?;
    let leaf = TreeShape::leaf(r)?;
    let state: Vec<(u64, TreeShape)> = weights.0.iter().map(|&w| (w, leaf.clone())).collect();
    let mut search = TieSearch {
        r: r as usize,
        cap,
        explored: 0,
        memo: HashMap::new(),
    };
    search.explore(state)
}

/// [`huffman_all_shapes_with_cap`] with the default state cap.
pub fn huffman_all_shapes(weights: &WeightVector, r: u32) -> Result<BTreeSet<TreeShape>> {
    huffman_all_shapes_with_cap(weights, r, DEFAULT_STATE_CAP)
}

type TieState = Vec<(u64, TreeShape)>;

struct TieSearch {
    r: usize,
    cap: usize,
    explored: usize,
    memo: HashMap<TieState, BTreeSet<TreeShape>>,
}

impl TieSearch {
    fn explore(&mut self, state: TieState) -> Result<BTreeSet<TreeShape>> {
        if state.len() == 1 {
            return Ok(BTreeSet::from([state[0].1.clone()]));
        }
        if let Some(found) = self.memo.get(&state) {
            return Ok(found.clone());
        }
        self.explored += 1;
        if self.explored > self.cap {
            return Err(Error::StateCapExceeded { cap: self.cap });
        }
        // Every node with weight below the r-th weight is in each minimal
        // set; the only freedom is which nodes of the boundary weight join.
        let boundary = state[self.r - 1].0;
        let forced: Vec<&(u64, TreeShape)> = state[..self.r]
            .iter()
            .take_while(|(w, _)| *w < boundary)
            .collect();
        let need = self.r - forced.len();
        let lo = state.partition_point(|(w, _)| *w < boundary);
        let hi = state.partition_point(|(w, _)| *w <= boundary);
        // Group boundary-weight nodes by shape; nodes of equal weight and
        // equal shape are interchangeable.
        let mut groups: Vec<(TreeShape, usize)> = Vec::new();
        for (_, shape) in &state[lo..hi] {
            match groups.last_mut() {
                Some((s, count)) if s == shape => *count += 1,
                _ => groups.push((shape.clone(), 1)),
            }
        }
        let merged_weight: u64 = state[..self.r].iter().map(|(w, _)| *w).sum();
        let forced_shapes: Vec<TreeShape> = forced.iter().map(|(_, s)| s.clone()).collect();

        let mut result = BTreeSet::new();
        let mut picks = vec![0usize; groups.len()];
        self.choose(
            0,
            need,
            &groups,
            &mut picks,
            &state,
            lo,
            merged_weight,
            &forced_shapes,
            &mut result,
        )?;
        self.memo.insert(state, result.clone());
        Ok(result)
    }

    #[allow(clippy::too_many_arguments)]
    fn choose(
        &mut self,
        group: usize,
        need: usize,
        groups: &[(TreeShape, usize)],
        picks: &mut Vec<usize>,
        state: &TieState,
        lo: usize,
        merged_weight: u64,
        forced_shapes: &[TreeShape],
        result: &mut BTreeSet<TreeShape>,
    ) -> Result<()> {
        if group == groups.len() {
            if need != 0 {
                return Ok(());
            }
            let mut children = forced_shapes.to_vec();
            for (g, &take) in picks.iter().enumerate() {
                for _ in 0..take {
                    children.push(groups[g].0.clone());
                }
            }
            let merged = TreeShape::compose(&children)?;
            // Remaining nodes: skip the forced prefix, drop `picks` copies
            // from each boundary group, keep the tail.
            let mut next: TieState = Vec::with_capacity(state.len() - self.r + 1);
            let mut cursor = lo;
            for (g, &take) in picks.iter().enumerate() {
                let avail = groups[g].1;
                for _ in 0..(avail - take) {
                    next.push(state[cursor].clone());
                }
                cursor += avail;
            }
            next.extend_from_slice(&state[cursor..]);
            let at = next.partition_point(|(w, s)| (*w, s) <= (merged_weight, &merged));
            next.insert(at, (merged_weight, merged));
            let sub = self.explore(next)?;
            result.extend(sub);
            return Ok(());
        }
        let remaining_avail: usize = groups[group + 1..].iter().map(|(_, c)| *c).sum();
        let min_take = need.saturating_sub(remaining_avail);
        let max_take = need.min(groups[group].1);
        for take in min_take..=max_take {
            picks[group] = take;
            self.choose(
                group + 1,
                need - take,
                groups,
                picks,
                state,
                lo,
                merged_weight,
                forced_shapes,
                result,
            )?;
        }
        picks[group] = 0;
        Ok(())
    }
}

/// Sorted m(v) multiset of a shape under uniform unit leaf weights.
pub fn weight_sequence(tree: &TreeShape) -> WeightSeq {
    WeightSeq(tree.node_stats().m_values)
}
