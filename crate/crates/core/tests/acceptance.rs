//! Acceptance suite: one test per criterion, each printing its pass/fail
//! line (visible with `--nocapture`, and always on failure). The same
//! checks back the CLI `selftest` subcommand.
//!
//! Criterion 1 compares the generated trifurcating event table against the
//! stored reference values cell for cell. A small set of reference entries
//! (the z=1 row beyond n=3, the (n=9, z=2) cell, and the total row for
//! n=7, 9 and n>=19) is inconsistent with the defining surjection count,
//! which is itself confirmed here by direct enumeration (criterion 5) and
//! by every other cell of the table; those entries are reported as
//! mismatches rather than patched around, so criterion 1 fails honestly.

use maxtree_core::selftest::{self, CriterionOutcome};

fn report(outcome: &CriterionOutcome) {
    println!("{}", outcome.summary_line());
    for detail in &outcome.details {
        println!("  {detail}");
    }
}

fn run(outcome: CriterionOutcome) {
    report(&outcome);
    assert!(
        outcome.passed,
        "criterion {} failed:\n{}",
        outcome.id,
        outcome.details.join("\n")
    );
}

#[test]
fn criterion_1_event_table_reproduction() {
    run(selftest::criterion_1_table(false).unwrap());
}

#[test]
fn criterion_2_exhaustive_theorem_verification() {
    run(selftest::criterion_2_argmax(false).unwrap());
}

#[test]
fn criterion_3_bifurcating_root_splits() {
    run(selftest::criterion_3_hammersley().unwrap());
}

#[test]
fn criterion_4_figure_reproductions() {
    run(selftest::criterion_4_figures().unwrap());
}

#[test]
fn criterion_5_formula_cross_oracles() {
    run(selftest::criterion_5_oracles(false).unwrap());
}

#[test]
fn criterion_6_merge_and_normality_properties() {
    run(selftest::criterion_6_normality(false).unwrap());
}

#[test]
fn criterion_7_majorization_certificate() {
    run(selftest::criterion_7_majorization(false).unwrap());
}

#[test]
fn criterion_8_decomposition_uniqueness() {
    run(selftest::criterion_8_decomposition(false).unwrap());
}
