//! Arbitrary-precision counting of labeled histories.
//!
//! A labeled history assigns the internal nodes distinct times 1..w that
//! strictly increase from descendants to ancestors; N(T) counts them by two
//! independent routes (a subtree recursion with multinomials and a closed
//! form over descendant-leaf counts). Tie-permitting histories allow
//! ancestrally unrelated nodes to share a time: E(T, z) counts strict
//! order-preserving surjections of the internal nodes onto a z-chain, via
//! inclusion-exclusion over a per-subtree chain-map table.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::shape::{ShapeNode, TreeShape};

/// Arbitrary-precision nonnegative count.
pub type BigCount = BigUint;

static FACTORIALS: OnceLock<Mutex<Vec<BigUint>>> = OnceLock::new();

/// k!, via a cache extended on demand.
pub(crate) fn factorial(k: u64) -> BigUint {
    let cache = FACTORIALS.get_or_init(|| Mutex::new(vec![BigUint::from(1u32)]));
    let mut cache = cache.lock().expect("factorial cache poisoned");
    while (cache.len() as u64) <= k {
        let next = cache.last().expect("non-empty") * BigUint::from(cache.len() as u64);
        cache.push(next);
    }
    cache[k as usize].clone()
}

/// Exact binomial coefficient.
pub(crate) fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let num = factorial(n);
    let den = factorial(k) * factorial(n - k);
    let (q, rem) = div_rem(&num, &den);
    debug_assert!(rem.is_zero());
    q
}

fn div_rem(a: &BigUint, b: &BigUint) -> (BigUint, BigUint) {
    (a / b, a % b)
}

/// N(T) by the subtree recursion: a multinomial over the internal-node
/// counts of the root subtrees times the subtree counts, memoized on
/// canonical subtree identity.
pub fn count_histories_recursive(tree: &TreeShape) -> BigCount {
    fn rec(node: &ShapeNode, r: u64, memo: &mut HashMap<String, BigUint>) -> BigUint {
        if node.is_leaf() {
            return BigUint::from(1u32);
        }
        if let Some(found) = memo.get(&node.text) {
            return found.clone();
        }
        let w = (node.leaves - 1) / (r - 1);
        let mut value = factorial(w - 1);
        for child in &node.children {
            let wc = (child.leaves - 1) / (r - 1);
            let (q, rem) = div_rem(&value, &factorial(wc));
            assert!(rem.is_zero(), "multinomial division must be exact");
            value = q * rec(child, r, memo);
        }
        memo.insert(node.text.clone(), value.clone());
        value
    }
    let mut memo = HashMap::new();
    rec(tree.root_node(), tree.arity() as u64, &mut memo)
}

/// N(T) by the closed form: w! divided by the product over internal nodes v
/// of (m(v) - 1) / (r - 1). The division is exact for every valid shape.
pub fn count_histories_closed(tree: &TreeShape) -> BigCount {
    let r = tree.arity() as u64;
    let numerator = factorial(tree.internal_count());
    let mut denominator = BigUint::from(1u32);
    for m in tree.node_stats().m_values {
        denominator *= BigUint::from((m - 1) / (r - 1));
    }
    let (q, rem) = div_rem(&numerator, &denominator);
    assert!(rem.is_zero(), "closed-form division must be exact");
    q
}

/// Reusable tie-permitting counter.
///
/// For each internal node v it tabulates A_v(t), the number of strict
/// order-preserving maps of the subtree's internal nodes into a t-chain,
/// using A_v(t) = sum over i in 1..=t of the product of A_c(i-1) over
/// internal children c. Tables are memoized per canonical subtree and
/// extended on demand, so bulk counting over many shapes shares work.
pub struct TieCounter {
    tables: HashMap<String, Vec<BigUint>>,
}

impl Default for TieCounter {
    fn default() -> Self {
        Self::new()
    }
}

impl TieCounter {
    pub fn new() -> Self {
        TieCounter {
            tables: HashMap::new(),
        }
    }

    fn ensure(&mut self, node: &ShapeNode, upto: usize) {
        if node.is_leaf() {
            return;
        }
        if let Some(table) = self.tables.get(&node.text)
            && table.len() > upto
        {
            return;
        }
        for child in &node.children {
            self.ensure(child, upto.saturating_sub(1));
        }
        let mut table = self
            .tables
            .remove(&node.text)
            .unwrap_or_else(|| vec![BigUint::ZERO]);
        for t in table.len()..=upto {
            let mut product = BigUint::from(1u32);
            for child in &node.children {
                if child.is_leaf() {
                    continue;
                }
                let child_table = &self.tables[&child.text];
                product *= &child_table[t - 1];
                if product.is_zero() {
                    break;
                }
            }
            let prev = table[t - 1].clone();
            table.push(prev + product);
        }
        self.tables.insert(node.text.clone(), table);
    }

    /// A(T, t) for t = 0..=upto.
    fn chain_table(&mut self, tree: &TreeShape, upto: usize) -> Vec<BigUint> {
        if tree.is_leaf() {
            return vec![BigUint::from(1u32); upto + 1];
        }
        self.ensure(tree.root_node(), upto);
        self.tables[&tree.root_node().text][..=upto].to_vec()
    }

    /// E(T, z): tie-permitting labeled histories with exactly z events.
    pub fn count(&mut self, tree: &TreeShape, events: u64) -> BigCount {
        let w = tree.internal_count();
        if tree.is_leaf() {
            return if events == 0 {
                BigUint::from(1u32)
            } else {
                BigUint::ZERO
            };
        }
        let stats = tree.node_stats();
        if events < stats.height || events > w {
            return BigUint::ZERO;
        }
        let z = events as usize;
        let table = self.chain_table(tree, z);
        surjective_count(&table, z)
    }

    /// E(T, z) for every z from 0 to w, as a vector indexed by z.
    pub fn profile(&mut self, tree: &TreeShape) -> Vec<BigCount> {
        if tree.is_leaf() {
            return vec![BigUint::from(1u32)];
        }
        let w = tree.internal_count() as usize;
        let table = self.chain_table(tree, w);
        (0..=w).map(|z| surjective_count(&table[..=z], z)).collect()
    }

    /// Total tie-permitting labeled histories across all event counts.
    pub fn total(&mut self, tree: &TreeShape) -> BigCount {
        self.profile(tree).into_iter().sum()
    }
}

/// Surjections onto a z-chain from the into-chain table by inclusion-exclusion.
fn surjective_count(table: &[BigUint], z: usize) -> BigUint {
    let mut positive = BigUint::ZERO;
    let mut negative = BigUint::ZERO;
    for (j, a) in table.iter().enumerate().take(z + 1) {
        if a.is_zero() {
            continue;
        }
        let term = binomial(z as u64, j as u64) * a;
        if (z - j).is_multiple_of(2) {
            positive += term;
        } else {
            negative += term;
        }
    }
    debug_assert!(positive >= negative, "surjection count must be nonnegative");
    positive - negative
}

/// E(T, z) with a fresh table cache.
pub fn count_tie_permitting(tree: &TreeShape, events: u64) -> BigCount {
    TieCounter::new().count(tree, events)
}

/// Sum of E(T, z) over all event counts z.
pub fn total_tie_permitting(tree: &TreeShape) -> BigCount {
    TieCounter::new().total(tree)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn factorials_and_binomials() {
        assert_eq!(factorial(0), big(1));
        assert_eq!(factorial(5), big(120));
        assert_eq!(factorial(12), big(479_001_600));
        assert_eq!(binomial(9, 3), big(84));
        assert_eq!(binomial(4, 9), big(0));
    }

    #[test]
    fn bifurcating_four_leaf_counts() {
        let caterpillar = TreeShape::parse("(*,(*,(*,*)));", 2).unwrap();
        assert_eq!(count_histories_recursive(&caterpillar), big(1));
        assert_eq!(count_histories_closed(&caterpillar), big(1));

        let balanced = TreeShape::parse("((*,*),(*,*));", 2).unwrap();
        assert_eq!(count_histories_recursive(&balanced), big(2));
        assert_eq!(count_histories_closed(&balanced), big(2));
    }

    #[test]
    fn trifurcating_counts() {
        let sym9 = TreeShape::parse("((*,*,*),(*,*,*),(*,*,*));", 3).unwrap();
        assert_eq!(count_histories_recursive(&sym9), big(6));
        assert_eq!(count_histories_closed(&sym9), big(6));

        let seven_max = TreeShape::parse("(*,(*,*,*),(*,*,*));", 3).unwrap();
        assert_eq!(count_histories_closed(&seven_max), big(2));

        let seven_chain = TreeShape::parse("(*,*,(*,*,(*,*,*)));", 3).unwrap();
        assert_eq!(count_histories_closed(&seven_chain), big(1));
    }

    #[test]
    fn leaf_counts_one() {
        let leaf = TreeShape::leaf(4).unwrap();
        assert_eq!(count_histories_recursive(&leaf), big(1));
        assert_eq!(count_histories_closed(&leaf), big(1));
        assert_eq!(count_tie_permitting(&leaf, 0), big(1));
        assert_eq!(count_tie_permitting(&leaf, 1), big(0));
        assert_eq!(total_tie_permitting(&leaf), big(1));
    }

    #[test]
    fn tie_counts_symmetric_nine() {
        let sym9 = TreeShape::parse("((*,*,*),(*,*,*),(*,*,*));", 3).unwrap();
        assert_eq!(count_tie_permitting(&sym9, 1), big(0));
        assert_eq!(count_tie_permitting(&sym9, 2), big(1));
        assert_eq!(count_tie_permitting(&sym9, 3), big(6));
        assert_eq!(count_tie_permitting(&sym9, 4), big(6));
        assert_eq!(count_tie_permitting(&sym9, 5), big(0));
        assert_eq!(total_tie_permitting(&sym9), big(13));
    }

    #[test]
    fn tie_count_equals_plain_count_at_full_depth() {
        for (text, r) in [
            ("((*,*),(*,*));", 2u32),
            ("(*,(*,(*,*)));", 2),
            ("(*,(*,*,*),(*,*,*));", 3),
            ("((*,*,*),(*,*,*),(*,*,*));", 3),
        ] {
            let t = TreeShape::parse(text, r).unwrap();
            assert_eq!(
                count_tie_permitting(&t, t.internal_count()),
                count_histories_closed(&t)
            );
        }
    }

    #[test]
    fn broomstick_total_is_one() {
        let broom = TreeShape::parse("(*,*,*,*);", 4).unwrap();
        assert_eq!(total_tie_permitting(&broom), big(1));
        assert_eq!(count_tie_permitting(&broom, 1), big(1));
    }

    #[test]
    fn profile_matches_pointwise_counts() {
        let t = TreeShape::parse("(*,(*,*,*),(*,*,(*,*,*)));", 3).unwrap();
        let mut counter = TieCounter::new();
        let profile = counter.profile(&t);
        assert_eq!(profile.len() as u64, t.internal_count() + 1);
        for (z, expected) in profile.iter().enumerate() {
            assert_eq!(count_tie_permitting(&t, z as u64), *expected);
        }
    }
}
