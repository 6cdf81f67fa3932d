//! Cross-validation of the counting formulas against independent routes:
//! a classic shape-count recurrence, direct bijection/surjection
//! enumeration, and published reference values.

use num_bigint::BigUint;

use maxtree_core::bruteforce;
use maxtree_core::enumerate::{ShapeEnumerator, count_shapes, enumerate_shapes};
use maxtree_core::histories::{
    TieCounter, count_histories_closed, count_histories_recursive, count_tie_permitting,
    total_tie_permitting,
};
use maxtree_core::huffman::{WeightVector, huffman_tree, weight_sequence};
use maxtree_core::majorization::{LogSumCheck, log_objective, log_sum_check};
use maxtree_core::maxprob::{hammersley_split, maxprob_shape};

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

/// Unordered binary trees by leaf count, via the classic convolution
/// recurrence: a(n) = sum over i < n/2 of a(i) a(n-i), plus the
/// a(n/2)(a(n/2)+1)/2 term for even n. Independent of the enumerator.
fn unordered_binary_tree_counts(max_n: usize) -> Vec<u64> {
    let mut a = vec![0u64; max_n + 1];
    a[1] = 1;
    for n in 2..=max_n {
        let mut total = 0;
        for i in 1..n.div_ceil(2) {
            total += a[i] * a[n - i];
        }
        if n % 2 == 0 {
            let half = a[n / 2];
            total += half * (half + 1) / 2;
        }
        a[n] = total;
    }
    a
}

#[test]
fn bifurcating_shape_counts_match_convolution_recurrence() {
    let expected = unordered_binary_tree_counts(16);
    assert_eq!(expected[6], 6);
    assert_eq!(expected[16], 10905);
    for n in 1..=16u64 {
        assert_eq!(count_shapes(2, n).unwrap(), big(expected[n as usize]));
        assert_eq!(
            enumerate_shapes(2, n).unwrap().len() as u64,
            expected[n as usize]
        );
    }
}

#[test]
fn history_formulas_agree_with_bijection_enumeration() {
    // Every shape with at most 7 internal nodes on the small grids.
    for (r, n_max) in [(2u32, 8u64), (3, 15), (4, 19)] {
        let mut enumerator = ShapeEnumerator::new(r).unwrap();
        let step = (r - 1) as u64;
        let mut n = 1;
        while n <= n_max {
            for shape in enumerator.shapes(n).unwrap().iter() {
                let closed = count_histories_closed(shape);
                assert_eq!(count_histories_recursive(shape), closed, "{shape}");
                assert_eq!(bruteforce::labeled_histories(shape), closed, "{shape}");
                assert!(closed >= big(1));
            }
            n += step;
        }
    }
}

#[test]
fn tie_formula_agrees_with_surjection_enumeration() {
    for (r, n_max) in [(2u32, 7u64), (3, 13), (4, 16)] {
        let mut enumerator = ShapeEnumerator::new(r).unwrap();
        let step = (r - 1) as u64;
        let mut n = 1;
        while n <= n_max {
            for shape in enumerator.shapes(n).unwrap().iter() {
                let w = shape.internal_count();
                let height = shape.node_stats().height;
                for z in 0..=w + 1 {
                    let direct = bruteforce::tie_histories(shape, z);
                    let formula = count_tie_permitting(shape, z);
                    assert_eq!(direct, formula, "{shape} z={z}");
                    if z < height || z > w {
                        assert_eq!(formula, BigUint::ZERO);
                    }
                }
                assert_eq!(
                    count_tie_permitting(shape, w),
                    count_histories_closed(shape)
                );
                assert!(count_tie_permitting(shape, height) >= big(1));
            }
            n += step;
        }
    }
}

#[test]
fn published_column_for_twenty_three_leaves() {
    // E(U*_23, z) for z = 3..=11; the z = 11 value is also N(U*_23).
    let construction = maxprob_shape(23, 3).unwrap();
    assert_eq!(construction.root_child_sizes(), vec![5, 9, 9]);
    let mut counter = TieCounter::new();
    let profile = counter.profile(&construction);
    let expected: [(usize, u64); 9] = [
        (3, 1),
        (4, 240),
        (5, 6810),
        (6, 63540),
        (7, 271170),
        (8, 604800),
        (9, 730800),
        (10, 453600),
        (11, 113400),
    ];
    for (z, value) in expected {
        assert_eq!(profile[z], big(value), "z={z}");
    }
    assert_eq!(profile[1], BigUint::ZERO);
    assert_eq!(profile[2], BigUint::ZERO);
    assert_eq!(count_histories_closed(&construction), big(113400));
    assert_eq!(total_tie_permitting(&construction), big(2244361));
}

#[test]
fn published_cells_for_twenty_nine_leaves() {
    let construction = maxprob_shape(29, 3).unwrap();
    assert_eq!(construction.root_child_sizes(), vec![9, 9, 11]);
    let mut counter = TieCounter::new();
    let profile = counter.profile(&construction);
    assert_eq!(profile[3], BigUint::ZERO);
    assert_eq!(profile[4], big(324));
    assert_eq!(profile[5], big(38880));
    assert_eq!(profile[14], big(38918880));
    assert_eq!(count_histories_closed(&construction), big(38918880));
}

#[test]
fn objective_minimizers_are_history_maximizers() {
    for (r, n) in [(2u32, 12u64), (3, 13), (4, 13)] {
        let shapes = enumerate_shapes(r, n).unwrap();
        let max_n = shapes.iter().map(count_histories_closed).max().unwrap();
        let min_p = shapes
            .iter()
            .map(|s| log_objective(s).product)
            .min()
            .unwrap();
        let argmax: Vec<String> = shapes
            .iter()
            .filter(|s| count_histories_closed(s) == max_n)
            .map(|s| s.to_text())
            .collect();
        let argmin: Vec<String> = shapes
            .iter()
            .filter(|s| log_objective(s).product == min_p)
            .map(|s| s.to_text())
            .collect();
        assert_eq!(argmax, argmin, "r={r} n={n}");
    }
}

#[test]
fn weight_sequences_satisfy_the_log_sum_comparison() {
    // Against the construction's sequence, every other shape is strictly
    // below, so the exact product comparison must hold.
    let target = weight_sequence(&maxprob_shape(13, 3).unwrap());
    for shape in enumerate_shapes(3, 13).unwrap() {
        let omega = weight_sequence(&shape);
        let outcome = log_sum_check(omega.values(), target.values()).unwrap();
        if omega == target {
            assert_eq!(outcome, LogSumCheck::Vacuous);
        } else {
            assert_eq!(outcome, LogSumCheck::Holds, "{shape}");
        }
    }
}

#[test]
fn construction_equals_huffman_equals_argmax() {
    for (r, n) in [(2u32, 11u64), (2, 16), (3, 13), (3, 19), (4, 16)] {
        let built = maxprob_shape(n, r).unwrap();
        let huffman = huffman_tree(&WeightVector::uniform(n as usize).unwrap(), r)
            .unwrap()
            .shape;
        assert_eq!(built, huffman);
        let best = enumerate_shapes(r, n)
            .unwrap()
            .into_iter()
            .max_by_key(count_histories_closed)
            .unwrap();
        assert_eq!(built, best);
    }
}

#[test]
fn construction_weight_sequence_matches_uniform_huffman_run() {
    // Two routes to the same sequence: sorted m(v) of the built shape, and
    // the created sums recorded by the uniform-weight construction.
    for (r, n) in [(3u32, 23u64), (2, 14), (4, 22)] {
        let by_shape = weight_sequence(&maxprob_shape(n, r).unwrap());
        let by_run = huffman_tree(&WeightVector::uniform(n as usize).unwrap(), r)
            .unwrap()
            .weight_sequence;
        assert_eq!(by_shape, by_run, "r={r} n={n}");
    }
}

#[test]
fn uniform_runs_only_build_powers_from_equal_powers() {
    // Along every uniform-weight merge orbit, a created sum equal to
    // r^(k+1) must come from r copies of r^k.
    fn is_power(mut v: u64, r: u64) -> bool {
        while v > 1 {
            if !v.is_multiple_of(r) {
                return false;
            }
            v /= r;
        }
        v == 1
    }
    for r in [2u32, 3, 4, 5] {
        let step = (r - 1) as u64;
        let mut n = 1 + step;
        while n <= 1 + 40 * step {
            let mut sigma = WeightVector::uniform(n as usize).unwrap();
            while sigma.len() > 1 {
                let head: Vec<u64> = sigma.values()[..r as usize].to_vec();
                let sum: u64 = head.iter().sum();
                if is_power(sum, r as u64) {
                    for &w in &head {
                        assert_eq!(w * r as u64, sum, "r={r} n={n} head={head:?}");
                    }
                }
                sigma = maxtree_core::huffman::r_merge(&sigma, r).unwrap();
            }
            n += step;
        }
    }
}

#[test]
fn bifurcating_eight_leaf_conjecture_against_brute_force() {
    use maxtree_core::maxprob::{TableOptions, conjecture_check};
    let report = conjecture_check(2, 8, &TableOptions::default()).unwrap();
    assert!(report.passed());
    let column = &report.column;
    assert!(column.construction.is_fully_symmetric());
    // Independent per-z maxima by direct surjection enumeration.
    let shapes = enumerate_shapes(2, 8).unwrap();
    for z in 1..=7u64 {
        let direct_max = shapes
            .iter()
            .map(|s| bruteforce::tie_histories(s, z))
            .max()
            .unwrap();
        assert_eq!(column.cell_max[(z - 1) as usize], direct_max, "z={z}");
    }
}

#[test]
fn hammersley_splits_for_all_fourteen_sizes() {
    let expected = [
        (3u64, (1u64, 2u64)),
        (4, (2, 2)),
        (5, (2, 3)),
        (6, (2, 4)),
        (7, (4, 3)),
        (8, (4, 4)),
        (9, (4, 5)),
        (10, (4, 6)),
        (11, (4, 7)),
        (12, (4, 8)),
        (13, (8, 5)),
        (14, (8, 6)),
        (15, (8, 7)),
        (16, (8, 8)),
    ];
    for (n, split) in expected {
        assert_eq!(hammersley_split(n).unwrap(), split);
        let mut sizes = maxprob_shape(n, 2).unwrap().root_child_sizes();
        sizes.sort_unstable();
        let mut want = vec![split.0, split.1];
        want.sort_unstable();
        assert_eq!(sizes, want, "n={n}");
    }
}
