//! Naive reference counters used to validate the formula-based routes.
//!
//! These enumerate assignments directly from the ancestor relation and share
//! no code with the closed forms, the recursion, or the chain-table counter.
//! They are exponential and intended for small trees only.

use num_bigint::BigUint;

use crate::shape::{RawTree, TreeShape};

/// N(T) by counting bijections of the internal nodes onto 1..=w that
/// strictly increase from descendants to ancestors: nodes are placed in
/// increasing time order, a node becoming placeable once all its internal
/// children are placed.
pub fn labeled_histories(tree: &TreeShape) -> BigUint {
    let parents = tree.internal_parents();
    let w = parents.len();
    assert!(
        w <= 20,
        "brute-force bijection enumeration is for small trees"
    );
    if w == 0 {
        return BigUint::from(1u32);
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); w];
    for (i, p) in parents.iter().enumerate() {
        if let Some(p) = *p {
            children[p].push(i);
        }
    }
    fn rec(placed: u64, children: &[Vec<usize>]) -> u64 {
        let w = children.len();
        if placed.count_ones() as usize == w {
            return 1;
        }
        let mut total = 0;
        for v in 0..w {
            if placed & (1 << v) != 0 {
                continue;
            }
            if children[v].iter().all(|&c| placed & (1 << c) != 0) {
                total += rec(placed | (1 << v), children);
            }
        }
        total
    }
    BigUint::from(rec(0, &children))
}

/// E(T, z) by enumerating all maps of the internal nodes into 1..=z in
/// preorder (so each node sees its parent's value), keeping the strictly
/// smaller-than-parent ones, and checking surjectivity at the end.
pub fn tie_histories(tree: &TreeShape, events: u64) -> BigUint {
    let parents = tree.internal_parents();
    let w = parents.len();
    assert!(
        w <= 12,
        "brute-force surjection enumeration is for small trees"
    );
    if w == 0 {
        return BigUint::from(u64::from(events == 0));
    }
    if events == 0 || events > w as u64 {
        return BigUint::ZERO;
    }
    let z = events as usize;
    let mut assigned = vec![0usize; w];
    fn rec(v: usize, z: usize, parents: &[Option<usize>], assigned: &mut Vec<usize>) -> u64 {
        if v == parents.len() {
            let mut used = vec![false; z + 1];
            for &a in assigned.iter() {
                used[a] = true;
            }
            return u64::from(used[1..].iter().all(|&u| u));
        }
        let upper = match parents[v] {
            Some(p) => assigned[p] - 1,
            None => z,
        };
        let mut total = 0;
        for value in 1..=upper {
            assigned[v] = value;
            total += rec(v + 1, z, parents, assigned);
        }
        total
    }
    BigUint::from(rec(0, z, &parents, &mut assigned))
}

/// Structural isomorphism on raw trees by recursive multiset matching,
/// independent of canonical ordering.
pub fn isomorphic(a: &RawTree, b: &RawTree) -> bool {
    match (a, b) {
        (RawTree::Leaf, RawTree::Leaf) => true,
        (RawTree::Internal(xs), RawTree::Internal(ys)) => {
            if xs.len() != ys.len() {
                return false;
            }
            let mut unmatched: Vec<&RawTree> = ys.iter().collect();
            for x in xs {
                match unmatched.iter().position(|y| isomorphic(x, y)) {
                    Some(at) => {
                        unmatched.swap_remove(at);
                    }
                    None => return false,
                }
            }
            true
        }
        _ => false,
    }
}
