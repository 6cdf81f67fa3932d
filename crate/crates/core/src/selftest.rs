//! Desk-scale acceptance checks, runnable as a library so both the CLI
//! `selftest` subcommand and the integration suite share one implementation.
//!
//! Each criterion returns a [`CriterionOutcome`] with a pass flag and
//! human-readable detail lines; nothing panics on mismatch.

use num_bigint::BigUint;

use crate::bruteforce;
use crate::enumerate::ShapeEnumerator;
use crate::error::Result;
use crate::histories::{TieCounter, count_histories_closed, count_histories_recursive};
use crate::huffman::{
    WeightVector, huffman_all_shapes, huffman_tree, is_normal, r_merge, weight_sequence,
};
use crate::majorization::{log_objective, weakly_supermajorizes};
use crate::maxprob::{
    TableOptions, conjecture_check, decompose, hammersley_split, max_tie_table, maxprob_shape,
    nonunique_family, verify_maxprob,
};
use crate::shape::is_power_of;

/// Result of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
}

impl CriterionOutcome {
    fn new(id: u8, name: &'static str) -> Self {
        CriterionOutcome {
            id,
            name,
            passed: true,
            details: Vec::new(),
        }
    }

    fn fail(&mut self, detail: String) {
        self.passed = false;
        self.details.push(detail);
    }

    fn note(&mut self, detail: String) {
        self.details.push(detail);
    }

    pub fn summary_line(&self) -> String {
        format!(
            "criterion {} ({}): {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

/// Reference values for the published trifurcating event table, odd n up to
/// 29: nonzero (z, value) cells per column plus the total row.
struct ReferenceColumn {
    n: u64,
    cells: &'static [(u64, u64)],
    total: u64,
}

const REFERENCE_TABLE: &[ReferenceColumn] = &[
    ReferenceColumn {
        n: 3,
        cells: &[(1, 1)],
        total: 1,
    },
    ReferenceColumn {
        n: 5,
        cells: &[(1, 1)],
        total: 1,
    },
    ReferenceColumn {
        n: 7,
        cells: &[(1, 1), (2, 1), (3, 2)],
        total: 4,
    },
    ReferenceColumn {
        n: 9,
        cells: &[(1, 1), (2, 6), (3, 6), (4, 6)],
        total: 19,
    },
    ReferenceColumn {
        n: 11,
        cells: &[(3, 4), (4, 15), (5, 12)],
        total: 31,
    },
    ReferenceColumn {
        n: 13,
        cells: &[(3, 4), (4, 33), (5, 68), (6, 40)],
        total: 145,
    },
    ReferenceColumn {
        n: 15,
        cells: &[(3, 4), (4, 69), (5, 276), (6, 390), (7, 180)],
        total: 919,
    },
    ReferenceColumn {
        n: 17,
        cells: &[(3, 2), (4, 75), (5, 552), (6, 1470), (7, 1620), (8, 630)],
        total: 4349,
    },
    ReferenceColumn {
        n: 19,
        cells: &[
            (3, 2),
            (4, 129),
            (5, 1488),
            (6, 6250),
            (7, 11820),
            (8, 10290),
            (9, 3360),
        ],
        total: 37029,
    },
    ReferenceColumn {
        n: 21,
        cells: &[
            (3, 2),
            (4, 237),
            (5, 4224),
            (6, 26490),
            (7, 76680),
            (8, 112140),
            (9, 80640),
            (10, 22680),
        ],
        total: 356733,
    },
    ReferenceColumn {
        n: 23,
        cells: &[
            (3, 1),
            (4, 240),
            (5, 6810),
            (6, 63540),
            (7, 271170),
            (8, 604800),
            (9, 730800),
            (10, 453600),
            (11, 113400),
        ],
        total: 1738361,
    },
    ReferenceColumn {
        n: 25,
        cells: &[
            (3, 1),
            (4, 402),
            (5, 16530),
            (6, 213320),
            (7, 1248450),
            (8, 3886260),
            (9, 6879600),
            (10, 6955200),
            (11, 3742200),
            (12, 831600),
        ],
        total: 17617292,
    },
    ReferenceColumn {
        n: 27,
        cells: &[
            (3, 1),
            (4, 726),
            (5, 43746),
            (6, 774000),
            (7, 6075900),
            (8, 25424280),
            (9, 61923960),
            (10, 90720000),
            (11, 78813000),
            (12, 37422000),
            (13, 7484400),
        ],
        total: 210188713,
    },
    ReferenceColumn {
        n: 29,
        cells: &[
            (4, 324),
            (5, 38880),
            (6, 1072360),
            (7, 12061785),
            (8, 70014882),
            (9, 235479636),
            (10, 485318736),
            (11, 622588680),
            (12, 485155440),
            (13, 210311640),
            (14, 38918880),
        ],
        total: 1545806523,
    },
];

/// The fourteen published bifurcating root splits for n = 3..=16.
const HAMMERSLEY_SPLITS: &[(u64, u64, u64)] = &[
    (3, 1, 2),
    (4, 2, 2),
    (5, 2, 3),
    (6, 2, 4),
    (7, 4, 3),
    (8, 4, 4),
    (9, 4, 5),
    (10, 4, 6),
    (11, 4, 7),
    (12, 4, 8),
    (13, 8, 5),
    (14, 8, 6),
    (15, 8, 7),
    (16, 8, 8),
];

/// Exhaustive-verification grid per arity: (r, n_max) pairs for the full
/// suite; the quick suite trims the largest sizes.
fn verification_grid(quick: bool) -> Vec<(u32, u64)> {
    if quick {
        vec![(2, 12), (3, 17), (4, 13)]
    } else {
        vec![(2, 16), (3, 25), (4, 22)]
    }
}

/// Criterion 1: the generated trifurcating event table against the stored
/// reference values, cell for cell including the total row.
pub fn criterion_1_table(quick: bool) -> Result<CriterionOutcome> {
    let mut out = CriterionOutcome::new(1, "event-table reproduction, r=3");
    let n_max = if quick { 21 } else { 29 };
    let table = max_tie_table(3, n_max)?;
    let mut cells_checked = 0u64;
    let mut cells_matched = 0u64;
    for reference in REFERENCE_TABLE.iter().filter(|c| c.n <= n_max) {
        let column = table
            .columns
            .iter()
            .find(|c| c.n == reference.n)
            .expect("column present for every reference n");
        for z in 1..=table.z_max {
            let computed = if z <= column.w {
                column.cell_max[(z - 1) as usize].clone()
            } else {
                BigUint::ZERO
            };
            let expected = reference
                .cells
                .iter()
                .find(|(rz, _)| *rz == z)
                .map(|(_, v)| BigUint::from(*v))
                .unwrap_or_else(|| BigUint::ZERO);
            cells_checked += 1;
            if computed == expected {
                cells_matched += 1;
            } else {
                out.fail(format!(
                    "cell n={} z={}: computed {} != reference {}",
                    reference.n, z, computed, expected
                ));
            }
        }
        cells_checked += 1;
        if column.total_max == BigUint::from(reference.total) {
            cells_matched += 1;
        } else {
            out.fail(format!(
                "total n={}: computed {} != reference {}",
                reference.n, column.total_max, reference.total
            ));
        }
        if !column.construction_attains_all_cells {
            out.fail(format!(
                "n={}: construction does not attain every cell max",
                reference.n
            ));
        }
        if !(column.total_is_construction && column.total_unique) {
            out.fail(format!(
                "n={}: construction is not the unique total maximizer",
                reference.n
            ));
        }
    }
    out.note(format!(
        "{cells_matched}/{cells_checked} table entries match the reference"
    ));
    Ok(out)
}

/// Criterion 2: brute-force argmax of N over every enumerated shape is a
/// singleton equal to both the construction and the uniform Huffman shape.
pub fn criterion_2_argmax(quick: bool) -> Result<CriterionOutcome> {
    let mut out = CriterionOutcome::new(2, "exhaustive argmax verification");
    let mut cases = 0;
    for (r, n_max) in verification_grid(quick) {
        let step = (r - 1) as u64;
        let mut n = 1 + step; // smallest non-trivial size is n = r
        while n <= n_max {
            let report = verify_maxprob(r, n)?;
            cases += 1;
            if !(report.argmax_unique && report.matches_construction && report.matches_huffman) {
                out.fail(format!(
                    "r={r} n={n}: unique={} construction={} huffman={}",
                    report.argmax_unique, report.matches_construction, report.matches_huffman
                ));
            }
            n += step;
        }
    }
    out.note(format!("{cases} (r, n) cases verified"));
    Ok(out)
}

/// Criterion 3: the fourteen bifurcating root splits.
pub fn criterion_3_hammersley() -> Result<CriterionOutcome> {
    let mut out = CriterionOutcome::new(3, "bifurcating root splits, n=3..16");
    for &(n, t, rest) in HAMMERSLEY_SPLITS {
        let split = hammersley_split(n)?;
        if split != (t, rest) {
            out.fail(format!(
                "hammersley_split({n}) = {split:?}, expected ({t}, {rest})"
            ));
        }
        let shape = maxprob_shape(n, 2)?;
        let mut sizes = shape.root_child_sizes();
        sizes.sort_unstable();
        let mut expected = vec![t, rest];
        expected.sort_unstable();
        if sizes != expected {
            out.fail(format!(
                "maxprob_shape({n}, 2) splits as {sizes:?}, expected {expected:?}"
            ));
        }
    }
    Ok(out)
}

/// Criterion 4: the two worked construction figures plus the two-maximizer
/// cell at (n, z) = (23, 3).
pub fn criterion_4_figures() -> Result<CriterionOutcome> {
    let mut out = CriterionOutcome::new(4, "figure reproductions");
    let bif = huffman_tree(&WeightVector::new(vec![5, 6, 7, 8])?, 2)?;
    if bif.weight_sequence.values() != [11, 15, 26] {
        out.fail(format!(
            "weights (5,6,7,8): weight sequence {}",
            bif.weight_sequence
        ));
    }
    let tri_weights = WeightVector::new(vec![1, 1, 1, 1, 1, 3, 4])?;
    let tri = huffman_tree(&tri_weights, 3)?;
    if tri.weight_sequence.values() != [3, 5, 12] {
        out.fail(format!(
            "weights (1,1,1,1,1,3,4): weight sequence {}",
            tri.weight_sequence
        ));
    }
    let all = huffman_all_shapes(&tri_weights, 3)?;
    if all.len() != 2 {
        out.fail(format!(
            "weights (1,1,1,1,1,3,4): {} tie shapes, expected 2",
            all.len()
        ));
    }

    let report = conjecture_check(3, 23, &TableOptions::default())?;
    let cell = &report.column.cell_argmax[2]; // z = 3
    let count = report.column.cell_argmax_count[2];
    if count != 2 {
        out.fail(format!("(n, z) = (23, 3): {count} maximizers, expected 2"));
    }
    if report.column.cell_max[2] != BigUint::from(1u32) {
        out.fail(format!(
            "(n, z) = (23, 3): max {}, expected 1",
            report.column.cell_max[2]
        ));
    }
    let pair = nonunique_family(3, 3)?;
    let mut expected = vec![pair.first.clone(), pair.second.clone()];
    expected.sort_unstable();
    if *cell != expected {
        out.fail("(n, z) = (23, 3): maximizer set differs from the constructed pair".to_string());
    }
    if !(pair.first_count == BigUint::from(1u32) && pair.second_count == BigUint::from(1u32)) {
        out.fail(format!(
            "constructed pair counts ({}, {}), expected (1, 1)",
            pair.first_count, pair.second_count
        ));
    }
    Ok(out)
}

/// Criterion 5: formula cross-oracles. Closed form vs recursion everywhere;
/// both vs direct bijection enumeration for w <= 7; E vs direct surjection
/// enumeration for w <= 6; E(T, w) = N(T) universally.
pub fn criterion_5_oracles(quick: bool) -> Result<CriterionOutcome> {
    let mut out = CriterionOutcome::new(5, "formula cross-oracles");
    let mut closed_vs_recursive = 0u64;
    let mut bijection_checks = 0u64;
    let mut surjection_checks = 0u64;
    for (r, n_max) in verification_grid(quick) {
        let mut enumerator = ShapeEnumerator::new(r)?;
        let step = (r - 1) as u64;
        let mut n = 1;
        while n <= n_max {
            let shapes = enumerator.shapes(n)?;
            let mut counter = TieCounter::new();
            for shape in shapes.iter() {
                let closed = count_histories_closed(shape);
                if count_histories_recursive(shape) != closed {
                    out.fail(format!("recursion != closed form for {shape}"));
                }
                closed_vs_recursive += 1;
                let w = shape.internal_count();
                if w <= 7 {
                    bijection_checks += 1;
                    if bruteforce::labeled_histories(shape) != closed {
                        out.fail(format!("bijection oracle != closed form for {shape}"));
                    }
                }
                let profile = counter.profile(shape);
                if profile[w as usize] != closed {
                    out.fail(format!("E(T, w) != N(T) for {shape}"));
                }
                if w <= 6 {
                    for z in 0..=w + 1 {
                        surjection_checks += 1;
                        let direct = bruteforce::tie_histories(shape, z);
                        let formula = if z <= w {
                            profile[z as usize].clone()
                        } else {
                            BigUint::ZERO
                        };
                        if direct != formula {
                            out.fail(format!("surjection oracle != E(T, {z}) for {shape}"));
                        }
                    }
                }
            }
            n += step;
        }
    }
    out.note(format!(
        "{closed_vs_recursive} closed/recursive agreements, {bijection_checks} bijection checks, {surjection_checks} surjection checks"
    ));
    Ok(out)
}

/// Criterion 6: normal-sequence properties along uniform merge orbits and
/// uniqueness of the uniform-weight H-tree.
pub fn criterion_6_normality(quick: bool) -> Result<CriterionOutcome> {
    let mut out = CriterionOutcome::new(6, "merge-operator and normality properties");
    let n_cap = if quick { 60 } else { 200 };
    for r in [2u32, 3, 4, 5] {
        let step = (r - 1) as u64;
        let mut n = 1 + step;
        while n <= n_cap {
            let mut sigma = WeightVector::uniform(n as usize)?;
            loop {
                let report = is_normal(&sigma, r);
                if !report.is_normal {
                    out.fail(format!(
                        "r={r} n={n}: sequence {:?} not normal",
                        sigma.values()
                    ));
                    break;
                }
                if sigma.len() >= r as usize {
                    let first = sigma.values()[0];
                    let r_th = sigma.values()[r as usize - 1];
                    let powers = sigma.values()[..r as usize]
                        .iter()
                        .filter(|&&w| is_power_of(w, r as u64))
                        .count();
                    if powers < r as usize - 1 {
                        out.fail(format!("r={r} n={n}: fewer than r-1 leading powers"));
                    }
                    if first * (r as u64) < r_th {
                        out.fail(format!("r={r} n={n}: head ratio below 1/r"));
                    }
                } else {
                    break;
                }
                let merged = r_merge(&sigma, r)?;
                let sum_before: u64 = sigma.values().iter().sum();
                let sum_after: u64 = merged.values().iter().sum();
                if sum_after != sum_before || merged.len() != sigma.len() - (r as usize - 1) {
                    out.fail(format!("r={r} n={n}: merge changed sum or wrong length"));
                }
                sigma = merged;
            }
            n += step;
        }
    }
    // Uniform-weight tie exploration collapses to a single shape.
    for r in [2u32, 3, 4] {
        let step = (r - 1) as u64;
        let n_cap = if quick { 25 } else { 40 };
        let mut n = 1 + step;
        while n <= n_cap {
            let weights = WeightVector::uniform(n as usize)?;
            let all = huffman_all_shapes(&weights, r)?;
            if all.len() != 1 {
                out.fail(format!(
                    "r={r} n={n}: {} distinct uniform H-tree shapes",
                    all.len()
                ));
            }
            if all.first() != Some(&huffman_tree(&weights, r)?.shape) {
                out.fail(format!(
                    "r={r} n={n}: tie exploration disagrees with deterministic run"
                ));
            }
            n += step;
        }
    }
    // Power-of-r leaf counts give fully symmetric shapes.
    for (r, max_exp) in [(2u32, 5u32), (3, 3), (4, 2), (5, 3)] {
        for k in 1..=max_exp {
            let n = (r as u64).pow(k);
            if n > n_cap {
                continue;
            }
            let tree = huffman_tree(&WeightVector::uniform(n as usize)?, r)?.shape;
            if !tree.is_fully_symmetric() {
                out.fail(format!("uniform n={n} r={r} is not fully symmetric"));
            }
        }
    }
    Ok(out)
}

/// Criterion 7: weight-sequence supermajorization certificate and the
/// product-objective equivalence over the full verification grid.
pub fn criterion_7_majorization(quick: bool) -> Result<CriterionOutcome> {
    let mut out = CriterionOutcome::new(7, "majorization certificate and objective equivalence");
    for (r, n_max) in verification_grid(quick) {
        let mut enumerator = ShapeEnumerator::new(r)?;
        let step = (r - 1) as u64;
        let mut n = 1 + step;
        while n <= n_max {
            let target = weight_sequence(&maxprob_shape(n, r)?);
            let shapes = enumerator.shapes(n)?;
            let mut best_n: Option<(BigUint, Vec<String>)> = None;
            let mut best_p: Option<(BigUint, Vec<String>)> = None;
            for shape in shapes.iter() {
                let omega = weight_sequence(shape);
                if !weakly_supermajorizes(target.values(), omega.values())? {
                    out.fail(format!("r={r} n={n}: {shape} not below the construction"));
                }
                update_best(&mut best_n, count_histories_closed(shape), shape, |a, b| {
                    a > b
                });
                update_best(&mut best_p, log_objective(shape).product, shape, |a, b| {
                    a < b
                });
            }
            let (_, argmax) = best_n.expect("non-empty enumeration");
            let (_, argmin) = best_p.expect("non-empty enumeration");
            if argmax != argmin {
                out.fail(format!("r={r} n={n}: argmax N differs from argmin product"));
            }
            n += step;
        }
    }
    Ok(out)
}

fn update_best(
    best: &mut Option<(BigUint, Vec<String>)>,
    value: BigUint,
    shape: &crate::shape::TreeShape,
    better: impl Fn(&BigUint, &BigUint) -> bool,
) {
    match best {
        Some((current, set)) => {
            if better(&value, current) {
                *current = value;
                set.clear();
                set.push(shape.to_text());
            } else if value == *current {
                set.push(shape.to_text());
            }
        }
        None => *best = Some((value, vec![shape.to_text()])),
    }
}

/// Criterion 8: decomposition uniqueness against exhaustive search over
/// (p, s, b), including the ceiling-vs-floor case at (r, n) = (3, 23).
pub fn criterion_8_decomposition(quick: bool) -> Result<CriterionOutcome> {
    let mut out = CriterionOutcome::new(8, "decomposition identity and uniqueness");
    let n_cap: u64 = if quick { 1_000 } else { 10_000 };
    let mut cases = 0u64;
    for r in 2u32..=8 {
        let rb = r as u64;
        let step = rb - 1;
        let mut n = rb;
        while n <= n_cap {
            let d = decompose(n, r)?;
            let sizes = d.subtree_sizes();
            if sizes.iter().sum::<u64>() != n {
                out.fail(format!("r={r} n={n}: subtree sizes do not sum to n"));
            }
            if d.remainder % step != 0 {
                out.fail(format!("r={r} n={n}: remainder not a multiple of r-1"));
            }
            let mut solutions = Vec::new();
            let mut power: u64 = 1; // r^(p-1) for p starting at 1
            for p in 1u32..=41 {
                let low = power;
                let Some(high) = low.checked_mul(rb) else {
                    break;
                };
                let gap = high - low;
                for s in 1..=rb {
                    let base = s * low + (rb - s) * high;
                    if base <= n && n - base < gap {
                        solutions.push((p, s as u32, n - base));
                    }
                }
                if low > n {
                    break;
                }
                power = high;
            }
            if solutions.len() != 1 {
                out.fail(format!(
                    "r={r} n={n}: {} decompositions found",
                    solutions.len()
                ));
            } else if solutions[0] != (d.exponent, d.small_count, d.remainder) {
                out.fail(format!(
                    "r={r} n={n}: search found {:?}, decompose returned {:?}",
                    solutions[0],
                    (d.exponent, d.small_count, d.remainder)
                ));
            }
            cases += 1;
            n += step;
        }
    }
    let d = decompose(23, 3)?;
    if (d.exponent, d.small_count, d.remainder) != (2, 1, 2) {
        out.fail(format!(
            "(r, n) = (3, 23): expected (2, 1, 2), got {:?}",
            (d.exponent, d.small_count, d.remainder)
        ));
    }
    out.note(format!("{cases} decompositions cross-checked"));
    Ok(out)
}

/// Runs all eight criteria. `quick` trims the sweeps for a fast smoke run.
pub fn run_all(quick: bool) -> Result<Vec<CriterionOutcome>> {
    Ok(vec![
        criterion_1_table(quick)?,
        criterion_2_argmax(quick)?,
        criterion_3_hammersley()?,
        criterion_4_figures()?,
        criterion_5_oracles(quick)?,
        criterion_6_normality(quick)?,
        criterion_7_majorization(quick)?,
        criterion_8_decomposition(quick)?,
    ])
}
