//! Majorization predicates and the exact product objective.
//!
//! All comparisons run on integer vectors with exact arithmetic; the float
//! logarithm is advisory output only.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::shape::TreeShape;

/// Tests x majorized by y (x < y in the majorization order): with both
/// vectors sorted non-increasingly, every prefix sum of x is at most the
/// corresponding prefix sum of y, and the totals are equal.
pub fn majorizes(y: &[u64], x: &[u64]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(y.len(), x.len()));
    }
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_unstable_by(|a, b| b.cmp(a));
    ys.sort_unstable_by(|a, b| b.cmp(a));
    let mut px: u128 = 0;
    let mut py: u128 = 0;
    for i in 0..xs.len() {
        px += xs[i] as u128;
        py += ys[i] as u128;
        if i + 1 < xs.len() && px > py {
            return Ok(false);
        }
    }
    Ok(px == py)
}

/// Tests x weakly supermajorized by y: with both vectors sorted
/// non-decreasingly, every prefix sum of y is at most the corresponding
/// prefix sum of x.
pub fn weakly_supermajorizes(y: &[u64], x: &[u64]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(y.len(), x.len()));
    }
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_unstable();
    ys.sort_unstable();
    let mut px: u128 = 0;
    let mut py: u128 = 0;
    for i in 0..xs.len() {
        px += xs[i] as u128;
        py += ys[i] as u128;
        if py > px {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The minimization objective attached to a shape: the exact product of
/// (m(v) - 1) over internal nodes, plus its natural log as advisory output.
/// Orderings between shapes must use the exact product.
#[derive(Debug, Clone)]
pub struct LogObjective {
    pub product: BigUint,
    pub log_value: f64,
}

impl PartialEq for LogObjective {
    fn eq(&self, other: &Self) -> bool {
        self.product == other.product
    }
}

impl Eq for LogObjective {}

impl PartialOrd for LogObjective {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogObjective {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.product.cmp(&other.product)
    }
}

/// Product of (m(v) - 1) over internal nodes; 1 for the single leaf.
pub fn log_objective(tree: &TreeShape) -> LogObjective {
    let mut product = BigUint::from(1u32);
    let mut log_value = 0.0f64;
    for m in tree.node_stats().m_values {
        product *= BigUint::from(m - 1);
        log_value += ((m - 1) as f64).ln();
    }
    LogObjective { product, log_value }
}

/// Outcome of the log-sum comparison helper.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogSumCheck {
    /// x weakly supermajorized by y, x not a permutation of y, and the
    /// product of y is strictly below the product of x.
    Holds,
    /// The precondition held but the product inequality failed.
    Fails,
    /// Precondition not met (x not below y, or x is a permutation of y).
    Vacuous,
}

/// Checks that x weakly supermajorized by y (x not a permutation of y)
/// forces sum(log y) < sum(log x), evaluated exactly as a product
/// comparison on integers.
pub fn log_sum_check(x: &[u64], y: &[u64]) -> Result<LogSumCheck> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.iter().chain(y.iter()).any(|&v| v == 0) {
        return Err(Error::NonPositiveEntry);
    }
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_unstable();
    ys.sort_unstable();
    if xs == ys || !weakly_supermajorizes(y, x)? {
        return Ok(LogSumCheck::Vacuous);
    }
    let product = |v: &[u64]| -> BigUint {
        let mut acc = BigUint::from(1u32);
        for &e in v {
            acc *= BigUint::from(e);
        }
        acc
    };
    if product(&ys) < product(&xs) {
        Ok(LogSumCheck::Holds)
    } else {
        Ok(LogSumCheck::Fails)
    }
}
