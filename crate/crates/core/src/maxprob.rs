//! Closed-form construction of the maximally probable shape, exhaustive
//! verification against enumeration, event-table generation, and the
//! non-uniqueness family for tie-permitting maxima.
//!
//! Verification and table generation are expressed as chunk computations
//! over slices of the canonical shape list plus a deterministic merge, so a
//! caller may fan chunks out to worker threads; serial and parallel runs
//! produce identical results.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::enumerate::{ShapeEnumerator, count_shapes};
use crate::error::{Error, Result};
use crate::histories::{BigCount, TieCounter, count_histories_closed, count_histories_recursive};
use crate::huffman::{WeightSeq, WeightVector, huffman_tree, weight_sequence};
use crate::majorization::{log_objective, weakly_supermajorizes};
use crate::shape::TreeShape;

/// Default bound on how many shapes an exhaustive run may enumerate.
pub const DEFAULT_SHAPE_CAP: u64 = 2_000_000;

/// Every 100th shape is re-counted through the subtree recursion during
/// verification, as a deterministic 1% cross-check of the closed form.
const SPOT_CHECK_STRIDE: usize = 100;

fn validate_leaf_count(n: u64, r: u32) -> Result<()> {
    if r < 2 {
        return Err(Error::InvalidArity(r));
    }
    if n < 1 {
        return Err(Error::NTooSmall { n, min: 1 });
    }
    let modulus = r as u64 - 1;
    if n % modulus != 1 % modulus {
        return Err(Error::InvalidLeafCount { n, modulus: r - 1 });
    }
    Ok(())
}

/// The unique triple (p, s, b) with n = s r^(p-1) + (r-s) r^p + b,
/// 1 <= s <= r and 0 <= b < r^p - r^(p-1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decomposition {
    pub n: u64,
    pub r: u32,
    /// p = floor(log_r n).
    pub exponent: u32,
    /// s: how many root subtrees stay at scale r^(p-1) (one of them enlarged
    /// by the remainder); the other r - s are full r^p blocks.
    pub small_count: u32,
    /// b: leaves added to one r^(p-1) subtree.
    pub remainder: u64,
}

impl Decomposition {
    /// Root subtree sizes of the construction: s - 1 copies of r^(p-1), one
    /// r^(p-1) + b, and r - s copies of r^p.
    pub fn subtree_sizes(&self) -> Vec<u64> {
        let low = pow_u64(self.r as u64, self.exponent - 1);
        let high = low * self.r as u64;
        let mut sizes = Vec::with_capacity(self.r as usize);
        for _ in 1..self.small_count {
            sizes.push(low);
        }
        sizes.push(low + self.remainder);
        for _ in self.small_count..self.r {
            sizes.push(high);
        }
        sizes
    }
}

fn pow_u64(base: u64, exp: u32) -> u64 {
    base.checked_pow(exp).expect("power within u64 range")
}

/// Computes the unique decomposition for n >= r. The small-subtree count is
/// the ceiling of (r^(p+1) - n) / (r^p - r^(p-1)); the floor lands outside
/// [1, r] whenever the division is inexact in the wrong direction.
pub fn decompose(n: u64, r: u32) -> Result<Decomposition> {
    validate_leaf_count(n, r)?;
    if n < r as u64 {
        return Err(Error::NTooSmall { n, min: r as u64 });
    }
    let rb = r as u128;
    let nb = n as u128;
    let mut p = 0u32;
    let mut power: u128 = 1;
    while power * rb <= nb {
        power *= rb;
        p += 1;
    }
    debug_assert!(p >= 1);
    let low = power / rb; // r^(p-1)
    let gap = power - low; // r^p - r^(p-1)
    let deficit = power * rb - nb; // r^(p+1) - n, strictly positive
    let s = deficit.div_ceil(gap);
    let b = nb - (s * low + (rb - s) * power);
    assert!((1..=rb).contains(&s), "small-subtree count out of range");
    assert!(b < gap, "remainder out of range");
    assert_eq!(s * low + (rb - s) * power + b, nb, "decomposition identity");
    Ok(Decomposition {
        n,
        r,
        exponent: p,
        small_count: s as u32,
        remainder: b as u64,
    })
}

/// The maximally probable shape on n leaves, built recursively from the
/// decomposition. Equals the uniform-weight Huffman shape.
pub fn maxprob_shape(n: u64, r: u32) -> Result<TreeShape> {
    use std::collections::HashMap;
    validate_leaf_count(n, r)?;
    fn rec(n: u64, r: u32, memo: &mut HashMap<u64, TreeShape>) -> Result<TreeShape> {
        if n == 1 {
            return TreeShape::leaf(r);
        }
        if let Some(found) = memo.get(&n) {
            return Ok(found.clone());
        }
        let sizes = decompose(n, r)?.subtree_sizes();
        let children = sizes
            .into_iter()
            .map(|size| rec(size, r, memo))
            .collect::<Result<Vec<_>>>()?;
        let shape = TreeShape::compose(&children)?;
        memo.insert(n, shape.clone());
        Ok(shape)
    }
    rec(n, r, &mut HashMap::new())
}

/// Root split (t, n - t) of the maximally probable bifurcating shape, with
/// t the largest power of two whose triple stays below n.
pub fn hammersley_split(n: u64) -> Result<(u64, u64)> {
    if n < 3 {
        return Err(Error::NTooSmall { n, min: 3 });
    }
    let mut t: u64 = 1;
    while 3 * t < n {
        t *= 2;
    }
    Ok((t, n - t))
}

/// Precomputed inputs shared by every verification chunk.
#[derive(Debug, Clone)]
pub struct VerifyContext {
    pub r: u32,
    pub n: u64,
    pub construction: TreeShape,
    pub construction_seq: WeightSeq,
    pub huffman_shape: TreeShape,
}

pub fn verify_context(r: u32, n: u64) -> Result<VerifyContext> {
    let construction = maxprob_shape(n, r)?;
    let construction_seq = weight_sequence(&construction);
    let huffman_shape = huffman_tree(&WeightVector::uniform(n as usize)?, r)?.shape;
    Ok(VerifyContext {
        r,
        n,
        construction,
        construction_seq,
        huffman_shape,
    })
}

/// Extremes and flags accumulated over one slice of the shape list.
#[derive(Debug, Clone)]
pub struct VerifyPartial {
    pub shapes_seen: u64,
    pub max_histories: BigCount,
    pub argmax: Vec<TreeShape>,
    pub min_product: Option<BigUint>,
    pub argmin: Vec<TreeShape>,
    pub supermajorization_holds: bool,
    pub spot_checks: u64,
    pub spot_checks_passed: bool,
}

impl VerifyPartial {
    fn empty() -> Self {
        VerifyPartial {
            shapes_seen: 0,
            max_histories: BigUint::ZERO,
            argmax: Vec::new(),
            min_product: None,
            argmin: Vec::new(),
            supermajorization_holds: true,
            spot_checks: 0,
            spot_checks_passed: true,
        }
    }
}

/// Scans one contiguous slice of the canonical shape list. `offset` is the
/// slice's start index in the full list, used to keep the spot-check stride
/// independent of how the list was chunked.
pub fn verify_chunk(ctx: &VerifyContext, shapes: &[TreeShape], offset: usize) -> VerifyPartial {
    let mut acc = VerifyPartial::empty();
    for (i, shape) in shapes.iter().enumerate() {
        acc.shapes_seen += 1;
        let histories = count_histories_closed(shape);
        if histories > acc.max_histories {
            acc.max_histories = histories.clone();
            acc.argmax = vec![shape.clone()];
        } else if histories == acc.max_histories {
            acc.argmax.push(shape.clone());
        }
        let product = log_objective(shape).product;
        match &acc.min_product {
            Some(min) if product > *min => {}
            Some(min) if product == *min => acc.argmin.push(shape.clone()),
            _ => {
                acc.min_product = Some(product);
                acc.argmin = vec![shape.clone()];
            }
        }
        let omega = weight_sequence(shape);
        let holds = weakly_supermajorizes(ctx.construction_seq.values(), omega.values())
            .expect("equal lengths for equal n");
        acc.supermajorization_holds &= holds;
        if (offset + i).is_multiple_of(SPOT_CHECK_STRIDE) {
            acc.spot_checks += 1;
            acc.spot_checks_passed &= count_histories_recursive(shape) == histories;
        }
    }
    acc
}

/// Order-insensitive combination of two chunk results; argmax/argmin sets
/// are kept sorted in canonical order.
pub fn verify_merge(a: VerifyPartial, b: VerifyPartial) -> VerifyPartial {
    let (max_histories, argmax) = merge_extreme(
        a.max_histories,
        a.argmax,
        b.max_histories,
        b.argmax,
        |x, y| x > y,
    );
    let (min_product, argmin) = match (a.min_product, b.min_product) {
        (Some(pa), Some(pb)) => {
            let (m, set) = merge_extreme(pa, a.argmin, pb, b.argmin, |x, y| x < y);
            (Some(m), set)
        }
        (Some(pa), None) => (Some(pa), a.argmin),
        (None, Some(pb)) => (Some(pb), b.argmin),
        (None, None) => (None, Vec::new()),
    };
    VerifyPartial {
        shapes_seen: a.shapes_seen + b.shapes_seen,
        max_histories,
        argmax,
        min_product,
        argmin,
        supermajorization_holds: a.supermajorization_holds && b.supermajorization_holds,
        spot_checks: a.spot_checks + b.spot_checks,
        spot_checks_passed: a.spot_checks_passed && b.spot_checks_passed,
    }
}

fn merge_extreme<V: Ord>(
    va: V,
    sa: Vec<TreeShape>,
    vb: V,
    sb: Vec<TreeShape>,
    better: impl Fn(&V, &V) -> bool,
) -> (V, Vec<TreeShape>) {
    if better(&va, &vb) {
        (va, sa)
    } else if better(&vb, &va) {
        (vb, sb)
    } else {
        let mut set = sa;
        set.extend(sb);
        set.sort_unstable();
        set.dedup();
        (va, set)
    }
}

/// Result of exhaustively checking one (r, n).
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub r: u32,
    pub n: u64,
    pub shape_count: u64,
    pub max_histories: BigCount,
    pub argmax: Vec<TreeShape>,
    pub argmax_unique: bool,
    pub matches_construction: bool,
    pub matches_huffman: bool,
    pub min_product: BigUint,
    pub argmin: Vec<TreeShape>,
    pub objective_agreement: bool,
    pub supermajorization_holds: bool,
    pub spot_checks: u64,
    pub spot_checks_passed: bool,
    pub construction: TreeShape,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.argmax_unique
            && self.matches_construction
            && self.matches_huffman
            && self.objective_agreement
            && self.supermajorization_holds
            && self.spot_checks_passed
    }
}

pub fn verify_finish(ctx: &VerifyContext, partial: VerifyPartial) -> VerifyReport {
    let mut argmax = partial.argmax;
    argmax.sort_unstable();
    argmax.dedup();
    let mut argmin = partial.argmin;
    argmin.sort_unstable();
    argmin.dedup();
    let argmax_unique = argmax.len() == 1;
    let matches_construction = argmax == [ctx.construction.clone()];
    let matches_huffman = argmax == [ctx.huffman_shape.clone()];
    let objective_agreement = argmax == argmin;
    VerifyReport {
        r: ctx.r,
        n: ctx.n,
        shape_count: partial.shapes_seen,
        max_histories: partial.max_histories,
        argmax,
        argmax_unique,
        matches_construction,
        matches_huffman,
        min_product: partial.min_product.unwrap_or_else(|| BigUint::from(1u32)),
        argmin,
        objective_agreement,
        supermajorization_holds: partial.supermajorization_holds,
        spot_checks: partial.spot_checks,
        spot_checks_passed: partial.spot_checks_passed,
        construction: ctx.construction.clone(),
    }
}

/// Serial exhaustive verification of the maximally probable construction.
pub fn verify_maxprob(r: u32, n: u64) -> Result<VerifyReport> {
    verify_maxprob_capped(r, n, DEFAULT_SHAPE_CAP)
}

pub fn verify_maxprob_capped(r: u32, n: u64, shape_cap: u64) -> Result<VerifyReport> {
    guard_shape_count(r, n, shape_cap)?;
    let ctx = verify_context(r, n)?;
    let mut enumerator = ShapeEnumerator::new(r)?;
    let shapes = enumerator.shapes(n)?;
    let partial = verify_chunk(&ctx, &shapes, 0);
    Ok(verify_finish(&ctx, partial))
}

pub fn guard_shape_count(r: u32, n: u64, cap: u64) -> Result<()> {
    let count = count_shapes(r, n)?;
    if count > BigUint::from(cap) {
        let approx = u64::try_from(&count).unwrap_or(u64::MAX);
        return Err(Error::ShapeCapExceeded { count: approx, cap });
    }
    Ok(())
}

/// Options for event-table generation.
#[derive(Debug, Clone)]
pub struct TableOptions {
    /// Maximizing shapes retained per cell; counts are always exact.
    pub maximizer_cap: usize,
    pub shape_cap: u64,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions {
            maximizer_cap: 16,
            shape_cap: DEFAULT_SHAPE_CAP,
        }
    }
}

/// Fixed inputs for one table column.
#[derive(Debug, Clone, Copy)]
pub struct ColumnContext {
    pub r: u32,
    pub n: u64,
    /// Number of internal nodes, the largest possible event count.
    pub w: u64,
    pub maximizer_cap: usize,
}

impl ColumnContext {
    pub fn new(r: u32, n: u64, maximizer_cap: usize) -> Result<Self> {
        validate_leaf_count(n, r)?;
        Ok(ColumnContext {
            r,
            n,
            w: (n - 1) / (r as u64 - 1),
            maximizer_cap,
        })
    }
}

/// Per-z and total maxima over one slice of the shape list.
#[derive(Debug, Clone)]
pub struct ColumnPartial {
    /// Index z - 1, for z in 1..=w.
    pub cell_max: Vec<BigCount>,
    pub cell_argmax: Vec<Vec<TreeShape>>,
    pub cell_argmax_count: Vec<u64>,
    pub total_max: BigCount,
    pub total_argmax: Vec<TreeShape>,
    pub total_argmax_count: u64,
}

impl ColumnPartial {
    fn empty(w: usize) -> Self {
        ColumnPartial {
            cell_max: vec![BigUint::ZERO; w],
            cell_argmax: vec![Vec::new(); w],
            cell_argmax_count: vec![0; w],
            total_max: BigUint::ZERO,
            total_argmax: Vec::new(),
            total_argmax_count: 0,
        }
    }
}

pub fn column_chunk(ctx: &ColumnContext, shapes: &[TreeShape]) -> ColumnPartial {
    let w = ctx.w as usize;
    let mut acc = ColumnPartial::empty(w);
    let mut counter = TieCounter::new();
    for shape in shapes {
        let profile = counter.profile(shape);
        let mut total = BigUint::ZERO;
        for (z, value) in profile.iter().enumerate().skip(1).take(w) {
            total += value;
            update_cell(
                &mut acc.cell_max[z - 1],
                &mut acc.cell_argmax[z - 1],
                &mut acc.cell_argmax_count[z - 1],
                value,
                shape,
                ctx.maximizer_cap,
            );
        }
        update_cell(
            &mut acc.total_max,
            &mut acc.total_argmax,
            &mut acc.total_argmax_count,
            &total,
            shape,
            ctx.maximizer_cap,
        );
    }
    acc
}

fn update_cell(
    max: &mut BigCount,
    argmax: &mut Vec<TreeShape>,
    count: &mut u64,
    value: &BigCount,
    shape: &TreeShape,
    cap: usize,
) {
    if value.is_zero() {
        return;
    }
    if *value > *max {
        *max = value.clone();
        argmax.clear();
        argmax.push(shape.clone());
        *count = 1;
    } else if *value == *max {
        *count += 1;
        if argmax.len() < cap {
            argmax.push(shape.clone());
        }
    }
}

pub fn column_merge(ctx: &ColumnContext, a: ColumnPartial, mut b: ColumnPartial) -> ColumnPartial {
    let mut out = a;
    for z in 0..ctx.w as usize {
        merge_cell(
            &mut out.cell_max[z],
            &mut out.cell_argmax[z],
            &mut out.cell_argmax_count[z],
            std::mem::take(&mut b.cell_max[z]),
            std::mem::take(&mut b.cell_argmax[z]),
            b.cell_argmax_count[z],
            ctx.maximizer_cap,
        );
    }
    merge_cell(
        &mut out.total_max,
        &mut out.total_argmax,
        &mut out.total_argmax_count,
        b.total_max,
        b.total_argmax,
        b.total_argmax_count,
        ctx.maximizer_cap,
    );
    out
}

fn merge_cell(
    max: &mut BigCount,
    argmax: &mut Vec<TreeShape>,
    count: &mut u64,
    other_max: BigCount,
    other_argmax: Vec<TreeShape>,
    other_count: u64,
    cap: usize,
) {
    if other_max > *max {
        *max = other_max;
        *argmax = other_argmax;
        *count = other_count;
    } else if other_max == *max && !other_max.is_zero() {
        *count += other_count;
        // Keep the canonically smallest `cap` maximizers of the union, so
        // the retained set does not depend on how the work was chunked.
        argmax.extend(other_argmax);
        argmax.sort_unstable();
        argmax.dedup();
        argmax.truncate(cap);
    }
}

/// One finished column: per-z maxima with maximizer sets, the total-row
/// maximum, and how the construction relates to both.
#[derive(Debug, Clone)]
pub struct TableColumn {
    pub n: u64,
    pub w: u64,
    pub cell_max: Vec<BigCount>,
    pub cell_argmax: Vec<Vec<TreeShape>>,
    pub cell_argmax_count: Vec<u64>,
    pub total_max: BigCount,
    pub total_argmax: Vec<TreeShape>,
    pub total_argmax_count: u64,
    pub construction: TreeShape,
    /// E(construction, z) for z = 0..=w.
    pub construction_profile: Vec<BigCount>,
    pub construction_attains_all_cells: bool,
    pub total_is_construction: bool,
    pub total_unique: bool,
}

pub fn column_finish(ctx: &ColumnContext, partial: ColumnPartial) -> Result<TableColumn> {
    let construction = maxprob_shape(ctx.n, ctx.r)?;
    let construction_profile = TieCounter::new().profile(&construction);
    let attains = (1..=ctx.w as usize).all(|z| construction_profile[z] == partial.cell_max[z - 1]);
    let construction_total: BigCount = construction_profile[1..].iter().sum();
    Ok(TableColumn {
        n: ctx.n,
        w: ctx.w,
        cell_max: partial.cell_max,
        cell_argmax: partial.cell_argmax,
        cell_argmax_count: partial.cell_argmax_count,
        total_is_construction: construction_total == partial.total_max,
        total_unique: partial.total_argmax_count == 1,
        total_max: partial.total_max,
        total_argmax: partial.total_argmax,
        total_argmax_count: partial.total_argmax_count,
        construction,
        construction_profile,
        construction_attains_all_cells: attains,
    })
}

/// Serial computation of one column.
pub fn table_column(
    enumerator: &mut ShapeEnumerator,
    n: u64,
    options: &TableOptions,
) -> Result<TableColumn> {
    let r = enumerator.arity();
    guard_shape_count(r, n, options.shape_cap)?;
    let ctx = ColumnContext::new(r, n, options.maximizer_cap)?;
    let shapes = enumerator.shapes(n)?;
    let partial = column_chunk(&ctx, &shapes);
    column_finish(&ctx, partial)
}

/// The matrix of maximal tie-permitting counts over all shapes, for each
/// n in {r, r + (r-1), ..., n_max} and each event count z.
#[derive(Debug, Clone)]
pub struct EventTable {
    pub r: u32,
    pub n_max: u64,
    /// Number of z rows: (n_max - 1) / (r - 1).
    pub z_max: u64,
    pub columns: Vec<TableColumn>,
}

impl EventTable {
    /// CSV with header `z,n=3,n=5,...`, one row per z in ascending order,
    /// and a final `total` row. Cells are plain decimal integers.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push('z');
        for col in &self.columns {
            out.push_str(&format!(",n={}", col.n));
        }
        out.push('\n');
        for z in 1..=self.z_max {
            out.push_str(&z.to_string());
            for col in &self.columns {
                out.push(',');
                if z <= col.w {
                    out.push_str(&col.cell_max[(z - 1) as usize].to_string());
                } else {
                    out.push('0');
                }
            }
            out.push('\n');
        }
        out.push_str("total");
        for col in &self.columns {
            out.push(',');
            out.push_str(&col.total_max.to_string());
        }
        out.push('\n');
        out
    }
}

pub fn max_tie_table(r: u32, n_max: u64) -> Result<EventTable> {
    max_tie_table_with(r, n_max, &TableOptions::default())
}

pub fn max_tie_table_with(r: u32, n_max: u64, options: &TableOptions) -> Result<EventTable> {
    validate_leaf_count(n_max, r)?;
    if n_max < r as u64 {
        return Err(Error::NTooSmall {
            n: n_max,
            min: r as u64,
        });
    }
    let mut enumerator = ShapeEnumerator::new(r)?;
    let mut columns = Vec::new();
    let step = r as u64 - 1;
    let mut n = r as u64;
    while n <= n_max {
        columns.push(table_column(&mut enumerator, n, options)?);
        n += step;
    }
    Ok(EventTable {
        r,
        n_max,
        z_max: (n_max - 1) / step,
        columns,
    })
}

/// Conjecture check for one (r, n): the construction should be the unique
/// total maximizer and should attain every per-z cell maximum.
#[derive(Debug, Clone)]
pub struct ConjectureReport {
    pub r: u32,
    pub column: TableColumn,
}

impl ConjectureReport {
    /// Unique argmax of the total tie-permitting count is the construction.
    pub fn part_one(&self) -> bool {
        self.column.total_is_construction && self.column.total_unique
    }

    /// The construction attains the per-z maximum at every z.
    pub fn part_two(&self) -> bool {
        self.column.construction_attains_all_cells
    }

    pub fn passed(&self) -> bool {
        self.part_one() && self.part_two()
    }
}

pub fn conjecture_check(r: u32, n: u64, options: &TableOptions) -> Result<ConjectureReport> {
    let mut enumerator = ShapeEnumerator::new(r)?;
    guard_shape_count(r, n, options.shape_cap)?;
    let column = table_column(&mut enumerator, n, options)?;
    Ok(ConjectureReport { r, column })
}

/// Two distinct shapes sharing the tie-permitting count at the family's
/// (n, z); built entirely from maximally probable subtrees.
#[derive(Debug, Clone)]
pub struct NonUniquePair {
    pub n: u64,
    pub events: u64,
    pub first: TreeShape,
    pub second: TreeShape,
    pub first_count: BigCount,
    pub second_count: BigCount,
}

impl NonUniquePair {
    pub fn distinct(&self) -> bool {
        self.first != self.second
    }

    pub fn counts_equal(&self) -> bool {
        self.first_count == self.second_count
    }
}

/// Builds the two-member family at n = (r-1) r^(k-1) + r^(k-2) + (r-1) with
/// z = k events: the first tree keeps r-1 full r^(k-1) blocks, the second
/// trades one block down to r^(k-1) - (r-1) while enlarging the small
/// subtree to r^(k-2) + 2(r-1).
pub fn nonunique_family(r: u32, k: u32) -> Result<NonUniquePair> {
    if r < 3 {
        return Err(Error::InvalidParameter(format!(
            "r must be at least 3, got {r}"
        )));
    }
    if k < 3 {
        return Err(Error::InvalidParameter(format!(
            "k must be at least 3, got {k}"
        )));
    }
    let rb = r as u64;
    let big_block = pow_u64(rb, k - 1);
    let small_block = pow_u64(rb, k - 2);
    let n = (rb - 1) * big_block + small_block + (rb - 1);

    let mut first_sizes = vec![big_block; (r - 1) as usize];
    first_sizes.push(small_block + (rb - 1));
    let mut second_sizes = vec![big_block; (r - 2) as usize];
    second_sizes.push(big_block - (rb - 1));
    second_sizes.push(small_block + 2 * (rb - 1));

    let build = |sizes: &[u64]| -> Result<TreeShape> {
        let children = sizes
            .iter()
            .map(|&size| maxprob_shape(size, r))
            .collect::<Result<Vec<_>>>()?;
        TreeShape::compose(&children)
    };
    let first = build(&first_sizes)?;
    let second = build(&second_sizes)?;
    debug_assert_eq!(first.leaf_count(), n);
    debug_assert_eq!(second.leaf_count(), n);

    let mut counter = TieCounter::new();
    let first_count = counter.count(&first, k as u64);
    let second_count = counter.count(&second, k as u64);
    Ok(NonUniquePair {
        n,
        events: k as u64,
        first,
        second,
        first_count,
        second_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposition_examples() {
        let d = decompose(5, 2).unwrap();
        assert_eq!((d.exponent, d.small_count, d.remainder), (2, 2, 1));
        assert_eq!(d.subtree_sizes(), vec![2, 3]);

        let d = decompose(9, 3).unwrap();
        assert_eq!((d.exponent, d.small_count, d.remainder), (2, 3, 0));
        assert_eq!(d.subtree_sizes(), vec![3, 3, 3]);

        // The case where the floor form of the quotient would give s = 0.
        let d = decompose(23, 3).unwrap();
        assert_eq!((d.exponent, d.small_count, d.remainder), (2, 1, 2));
        assert_eq!(d.subtree_sizes(), vec![5, 9, 9]);
    }

    #[test]
    fn decomposition_rejects_bad_input() {
        assert!(matches!(decompose(1, 3), Err(Error::NTooSmall { .. })));
        assert!(matches!(
            decompose(8, 3),
            Err(Error::InvalidLeafCount { .. })
        ));
    }

    #[test]
    fn construction_examples() {
        let t = maxprob_shape(7, 3).unwrap();
        assert_eq!(t.to_text(), "(*,(*,*,*),(*,*,*));");

        let t = maxprob_shape(16, 2).unwrap();
        assert_eq!(t.root_child_sizes(), vec![8, 8]);

        let t = maxprob_shape(3, 3).unwrap();
        assert_eq!(t.to_text(), "(*,*,*);");

        let t = maxprob_shape(1, 5).unwrap();
        assert!(t.is_leaf());
    }

    #[test]
    fn construction_matches_huffman_small_grid() {
        for r in [2u32, 3, 4] {
            let step = (r - 1) as u64;
            let mut n = 1;
            while n <= 1 + 10 * step {
                let built = maxprob_shape(n, r).unwrap();
                let huff = huffman_tree(&WeightVector::uniform(n as usize).unwrap(), r).unwrap();
                assert_eq!(built, huff.shape, "r={r} n={n}");
                n += step;
            }
        }
    }

    #[test]
    fn hammersley_examples() {
        assert_eq!(hammersley_split(3).unwrap(), (1, 2));
        assert_eq!(hammersley_split(7).unwrap(), (4, 3));
        assert_eq!(hammersley_split(13).unwrap(), (8, 5));
        assert!(hammersley_split(2).is_err());
    }

    #[test]
    fn verify_small_cases() {
        let report = verify_maxprob(2, 6).unwrap();
        assert!(report.passed());
        assert_eq!(report.shape_count, 6);
        let mut split = report.argmax[0].root_child_sizes();
        split.sort_unstable();
        assert_eq!(split, vec![2, 4]);

        let report = verify_maxprob(3, 7).unwrap();
        assert!(report.passed());
        assert_eq!(report.max_histories, BigUint::from(2u32));

        let report = verify_maxprob(3, 9).unwrap();
        assert!(report.passed());
        assert_eq!(report.max_histories, BigUint::from(6u32));
        assert!(report.argmax[0].is_fully_symmetric());
    }

    #[test]
    fn verify_chunking_is_equivalent() {
        let ctx = verify_context(2, 10).unwrap();
        let mut e = ShapeEnumerator::new(2).unwrap();
        let shapes = e.shapes(10).unwrap();
        let serial = verify_chunk(&ctx, &shapes, 0);
        let split = 4.min(shapes.len());
        let parallelish = verify_merge(
            verify_chunk(&ctx, &shapes[..split], 0),
            verify_chunk(&ctx, &shapes[split..], split),
        );
        let a = verify_finish(&ctx, serial);
        let b = verify_finish(&ctx, parallelish);
        assert_eq!(a.argmax, b.argmax);
        assert_eq!(a.max_histories, b.max_histories);
        assert_eq!(a.argmin, b.argmin);
        assert_eq!(a.passed(), b.passed());
    }

    #[test]
    fn shape_cap_guard() {
        assert!(matches!(
            verify_maxprob_capped(2, 16, 10),
            Err(Error::ShapeCapExceeded { cap: 10, .. })
        ));
    }

    #[test]
    fn small_table_columns() {
        let table = max_tie_table(3, 9).unwrap();
        assert_eq!(table.columns.len(), 4);
        let n9 = &table.columns[3];
        assert_eq!(n9.n, 9);
        let cells: Vec<u64> = n9
            .cell_max
            .iter()
            .map(|c| u64::try_from(c).unwrap())
            .collect();
        assert_eq!(cells, vec![0, 1, 6, 6]);
        assert_eq!(n9.total_max, BigUint::from(13u32));
        assert!(n9.construction_attains_all_cells);
        assert!(n9.total_is_construction);
        assert!(n9.total_unique);
    }

    #[test]
    fn csv_output_for_small_table() {
        let table = max_tie_table(3, 9).unwrap();
        let expected = "\
z,n=3,n=5,n=7,n=9
1,1,0,0,0
2,0,1,1,1
3,0,0,2,6
4,0,0,0,6
total,1,1,3,13
";
        assert_eq!(table.to_csv(), expected);
    }

    #[test]
    fn zero_cells_match_height_bounds() {
        let table = max_tie_table(3, 13).unwrap();
        for col in &table.columns {
            // Cells are zero exactly below ceil(log_r n), the minimal height.
            let ceil_log = {
                let mut k = 0u64;
                let mut power = 1u64;
                while power < col.n {
                    power *= 3;
                    k += 1;
                }
                k
            };
            for z in 1..=col.w {
                let zero = col.cell_max[(z - 1) as usize].is_zero();
                assert_eq!(zero, z < ceil_log, "n={} z={}", col.n, z);
            }
        }
    }

    #[test]
    fn column_maximizer_retention_ignores_chunking() {
        // (n, z) = (23, 3) has two maximizers; with a cap of one, every
        // chunking must retain the canonically first and the exact count.
        let ctx = ColumnContext::new(3, 23, 1).unwrap();
        let mut e = ShapeEnumerator::new(3).unwrap();
        let shapes = e.shapes(23).unwrap();
        let whole = column_chunk(&ctx, &shapes);
        for split in [1, shapes.len() / 3, shapes.len() / 2, shapes.len() - 1] {
            let merged = column_merge(
                &ctx,
                column_chunk(&ctx, &shapes[..split]),
                column_chunk(&ctx, &shapes[split..]),
            );
            assert_eq!(merged.cell_argmax_count[2], 2);
            assert_eq!(merged.cell_argmax[2], whole.cell_argmax[2]);
            assert_eq!(merged.cell_argmax[2].len(), 1);
            assert_eq!(merged.cell_max, whole.cell_max);
            assert_eq!(merged.total_max, whole.total_max);
            assert_eq!(merged.total_argmax, whole.total_argmax);
        }
    }

    #[test]
    fn nonunique_family_base_case() {
        let pair = nonunique_family(3, 3).unwrap();
        assert_eq!(pair.n, 23);
        assert_eq!(pair.events, 3);
        assert!(pair.distinct());
        assert_eq!(pair.first_count, BigUint::from(1u32));
        assert_eq!(pair.second_count, BigUint::from(1u32));
        assert_eq!(pair.first, maxprob_shape(23, 3).unwrap());

        let pair = nonunique_family(4, 3).unwrap();
        assert_eq!(pair.n, 55);
        assert!(pair.distinct());
        assert_eq!(pair.first_count, BigUint::from(1u32));
        assert_eq!(pair.second_count, BigUint::from(1u32));
    }

    #[test]
    fn nonunique_family_larger_k_counts_match() {
        // At k = 4 the small subtree contains broomsticks off the long
        // paths, each free to take either of two events, so both trees
        // count 4 rather than 1; the pair still ties.
        let pair = nonunique_family(3, 4).unwrap();
        assert_eq!(pair.n, 65);
        assert!(pair.distinct());
        assert!(pair.counts_equal());
        assert_eq!(pair.first_count, BigUint::from(4u32));
    }

    #[test]
    fn nonunique_family_rejects_small_parameters() {
        assert!(nonunique_family(2, 3).is_err());
        assert!(nonunique_family(3, 2).is_err());
    }

    #[test]
    fn conjecture_small_case() {
        let report = conjecture_check(3, 9, &TableOptions::default()).unwrap();
        assert!(report.passed());
    }
}
