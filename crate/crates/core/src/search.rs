//! Bounded search for the elements with a given number of partitions, the
//! `D(m)` scans built on it, the optimal thresholds `E_n`, `F_n`, and the
//! explicit witnesses for four, six and nine partitions.

use crate::contfrac::FieldContext;
use crate::error::{Error, Result};
use crate::oracle::enumerate_partitions;
use crate::partition::{p_rational, PartitionGrid};
use crate::quadfield::{is_squarefree, Congruence, FieldId, QElement};
use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// An element in the `(1, ω)` basis with its surd rendering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementDoc {
    #[serde(with = "crate::bigjson::int")]
    pub a: BigInt,
    #[serde(with = "crate::bigjson::int")]
    pub b: BigInt,
    pub text: String,
}

impl ElementDoc {
    pub fn new(e: &QElement, field: &FieldId) -> Self {
        ElementDoc {
            a: e.a.clone(),
            b: e.b.clone(),
            text: field.render(e),
        }
    }

    pub fn element(&self) -> QElement {
        QElement::new(self.a.clone(), self.b.clone())
    }
}

/// Counts `p_K((⌈yξ⌉ + k) + yω)` for one `y` and `k = 0..=k_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceRow {
    pub y: u64,
    #[serde(with = "crate::bigjson::uint_vec")]
    pub counts: Vec<BigUint>,
}

/// Representatives with exactly `m` partitions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepRow {
    pub m: u64,
    pub elements: Vec<ElementDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub d: u64,
    pub m_max: u64,
    pub k_max: u64,
    pub y_max: u64,
    pub eps_plus: ElementDoc,
    #[serde(with = "crate::bigjson::int")]
    pub floor_ratio: BigInt,
    pub slice: Vec<SliceRow>,
    /// One row for every `m = 1..=m_max`, elements in lexicographic order.
    pub representatives: Vec<RepRow>,
}

/// Smallest `n ≥ 1` with `p_K(n) ≥ m`.
pub fn find_kmax(grid: &mut PartitionGrid, m: u64) -> Result<u64> {
    let target = BigUint::from(m);
    let mut n = 1;
    while grid.count_ky(n, 0)? < target {
        n += 1;
    }
    Ok(n)
}

/// Smallest `y ≥ ⌊ε₊/(ξ + ω)⌋` with `p_K(⌈yξ⌉ + yω) ≥ m`.
pub fn find_ymax(grid: &mut PartitionGrid, m: u64) -> Result<u64> {
    let target = BigUint::from(m);
    let mut y = grid
        .ctx()
        .floor_ratio_eps()
        .to_u64()
        .ok_or_else(|| Error::Unsupported("unit too large for a search".into()))?;
    while grid.count_ky(0, y)? < target {
        y += 1;
    }
    Ok(y)
}

/// Runs the search on an existing grid, extending it as needed.
pub fn search_with_grid(grid: &mut PartitionGrid, m_max: u64) -> Result<SearchReport> {
    if m_max == 0 {
        return Err(Error::Unsupported("m must be at least 1".into()));
    }
    let k_max = find_kmax(grid, m_max)?;
    let y_max = find_ymax(grid, m_max)?;
    let field = *grid.field();
    let mut slice = Vec::new();
    let mut found: Vec<Vec<QElement>> = vec![Vec::new(); m_max as usize];
    for y in 0..=y_max {
        let mut counts = Vec::new();
        for k in 0..=k_max {
            let c = grid.count_ky(k, y)?;
            let alpha = field.ky_element(&BigInt::from(k), &BigInt::from(y));
            if let Some(m) = c.to_u64().filter(|&m| m <= m_max) {
                if grid.ctx().in_fundamental_domain(&alpha) {
                    found[(m - 1) as usize].push(alpha);
                }
            }
            counts.push(c);
        }
        slice.push(SliceRow { y, counts });
    }
    let representatives = found
        .into_iter()
        .enumerate()
        .map(|(i, mut els)| {
            els.sort();
            RepRow {
                m: i as u64 + 1,
                elements: els.iter().map(|e| ElementDoc::new(e, &field)).collect(),
            }
        })
        .collect();
    let ctx = grid.ctx();
    Ok(SearchReport {
        d: field.d(),
        m_max,
        k_max,
        y_max,
        eps_plus: ElementDoc::new(&ctx.eps_plus, &field),
        floor_ratio: ctx.floor_ratio_eps(),
        slice,
        representatives,
    })
}

pub fn search_m(field: FieldId, m_max: u64) -> Result<SearchReport> {
    let mut grid = PartitionGrid::new(FieldContext::build(field)?);
    search_with_grid(&mut grid, m_max)
}

impl SearchReport {
    pub fn field(&self) -> Result<FieldId> {
        FieldId::new(self.d as i64)
    }

    /// Representatives with exactly `m` partitions.
    pub fn reps(&self, m: u64) -> Vec<QElement> {
        self.representatives
            .iter()
            .find(|r| r.m == m)
            .map(|r| r.elements.iter().map(ElementDoc::element).collect())
            .unwrap_or_default()
    }

    /// All slice cells as `(k, y, α, count)`, skipping `α = 0`.
    fn cells(&self, field: &FieldId) -> Vec<(u64, u64, QElement, &BigUint)> {
        let mut out = Vec::new();
        for row in &self.slice {
            for (k, c) in row.counts.iter().enumerate() {
                if row.y == 0 && k == 0 {
                    continue;
                }
                let alpha = field.ky_element(&BigInt::from(k), &BigInt::from(row.y));
                out.push((k as u64, row.y, alpha, c));
            }
        }
        out
    }

    /// Checks the bounds and order relations that justify the search window.
    pub fn check_invariants(&self, ctx: &FieldContext) -> Result<()> {
        let field = &ctx.field;
        let fail = |what: String| Err(Error::AssertionFailure(what));
        if self.slice[self.y_max as usize].counts[0] < BigUint::from(self.m_max) {
            return fail(format!(
                "corner count below {} for D = {}",
                self.m_max, self.d
            ));
        }
        if BigInt::from(self.y_max) < ctx.floor_ratio_eps() {
            return fail(format!("y_max below the unit ratio for D = {}", self.d));
        }
        // y(ξ + ω) < (k + 1)ε₊ - k for every representative
        for row in &self.representatives {
            for doc in &row.elements {
                let alpha = doc.element();
                let (k, y) = field.ky_coords(&alpha);
                let bound = field.scale(&ctx.eps_plus, &(&k + 1)) - QElement::new(k, 0.into());
                let gap = bound - field.scale(&field.xi_plus_omega(), &y);
                if field.sign_of(&gap) != Ordering::Greater {
                    return fail(format!("representative {} violates the y bound", doc.text));
                }
            }
        }
        let cells = self.cells(field);
        for (k1, y1, a1, c1) in &cells {
            for (k2, y2, a2, c2) in &cells {
                let prec = field.succ_gt(a2, a1);
                if y1 <= y2 && k1 < k2 && !prec {
                    return fail(format!(
                        "({k1},{y1}) not below ({k2},{y2}) for D = {}",
                        self.d
                    ));
                }
                if (prec || a1 == a2) && k1 > k2 {
                    return fail(format!(
                        "({k1},{y1}) ⪯ ({k2},{y2}) but k decreases for D = {}",
                        self.d
                    ));
                }
                if prec && c1 >= c2 {
                    return fail(format!(
                        "counts not increasing from ({k1},{y1}) to ({k2},{y2})"
                    ));
                }
            }
        }
        let ones = self.reps(1);
        if ones != ctx.indecomposable_reps() {
            return fail(format!("indecomposables mismatch for D = {}", self.d));
        }
        if self.m_max >= 2 && self.reps(2).is_empty() {
            return fail(format!("no element with two partitions for D = {}", self.d));
        }
        Ok(())
    }
}

/// `(E_n, F_n) = (⌊n/2⌋², (n-1)² or n²)`.
pub fn en_fn_bounds(n: u64) -> (u64, u64) {
    let e = (n / 2) * (n / 2);
    let f = if n.is_multiple_of(2) {
        (n - 1) * (n - 1)
    } else {
        n * n
    };
    (e, f)
}

/// The bound `E_n` or `F_n` that applies to the congruence class of `D`.
pub fn class_bound(field: &FieldId, n: u64) -> u64 {
    let (e, f) = en_fn_bounds(n);
    match field.class() {
        Congruence::TwoThree => e,
        Congruence::One => f,
    }
}

/// `n` with `p(n) = m` for the values of `m` whose `D(m)` is decided by a
/// finite scan.
pub fn complete_n(m: u64) -> Option<u64> {
    match m {
        1 => Some(1),
        2 => Some(2),
        3 => Some(3),
        5 => Some(4),
        7 => Some(5),
        11 => Some(6),
        _ => None,
    }
}

/// Squarefree `D` in `2..=d_max`.
pub fn squarefree_up_to(d_max: u64) -> Vec<u64> {
    (2..=d_max).filter(|&d| is_squarefree(d)).collect()
}

fn par_map<T: Send>(ds: &[u64], f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    #[cfg(feature = "parallel")]
    {
        ds.par_iter().map(|&d| f(d)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        ds.iter().map(|&d| f(d)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DmEntry {
    pub d: u64,
    /// `false` when `D` lies above the threshold and `p_K(n) = m` was checked directly.
    pub searched: bool,
    pub member: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DmScan {
    pub m: u64,
    /// Whether the result is the full set `D(m)` rather than a scan window.
    pub exhaustive: bool,
    pub entries: Vec<DmEntry>,
    pub members: Vec<u64>,
}

/// Decides `D ∈ D(m)` for every `D` in `ds`.
pub fn dm_scan(m: u64, ds: &[u64]) -> Result<DmScan> {
    if m == 0 {
        return Err(Error::Unsupported("m must be at least 1".into()));
    }
    let n = complete_n(m);
    let entries = par_map(ds, |d| {
        let field = FieldId::new(d as i64)?;
        if let Some(n) = n {
            if d > class_bound(&field, n) {
                let grid = PartitionGrid::build(FieldContext::build(field)?, n)?;
                let pk = grid.count(&QElement::from_i64(n as i64, 0))?;
                if pk != BigUint::from(m) {
                    return Err(Error::AssertionFailure(format!(
                        "p_K({n}) = {pk} instead of {m} for D = {d}"
                    )));
                }
                return Ok(DmEntry {
                    d,
                    searched: false,
                    member: false,
                });
            }
        }
        let report = search_m(field, m)?;
        Ok(DmEntry {
            d,
            searched: true,
            member: report.reps(m).is_empty(),
        })
    })?;
    let exhaustive = n.is_some_and(|n| {
        let (e, f) = en_fn_bounds(n);
        squarefree_up_to(e.max(f)).into_iter().all(|d| {
            let field = FieldId::new(d as i64).expect("squarefree");
            d > class_bound(&field, n) || ds.contains(&d)
        })
    });
    let members = entries.iter().filter(|e| e.member).map(|e| e.d).collect();
    Ok(DmScan {
        m,
        exhaustive,
        entries,
        members,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub d: u64,
    pub bound: u64,
    #[serde(with = "crate::bigjson::uint")]
    pub p_k: BigUint,
    #[serde(with = "crate::bigjson::uint")]
    pub p: BigUint,
}

/// Two totally positive non-rational elements summing to `n`, available
/// whenever `D` is at or below the class bound.
pub fn extra_partition(field: &FieldId, n: u64) -> (QElement, QElement) {
    let k = (n / 2) as i64;
    match (field.class(), n % 2) {
        (Congruence::TwoThree, 0) => (QElement::from_i64(k, 1), QElement::from_i64(k, -1)),
        (Congruence::TwoThree, _) => (QElement::from_i64(k + 1, 1), QElement::from_i64(k, -1)),
        (Congruence::One, 0) => (QElement::from_i64(k, 1), QElement::from_i64(k, -1)),
        (Congruence::One, _) => (QElement::from_i64(k, 1), QElement::from_i64(k + 1, -1)),
    }
}

/// Checks that `p_K(n) = p(n)` exactly when `D` exceeds the class bound.
pub fn verify_thresholds(n: u64, ds: &[u64]) -> Result<Vec<ThresholdRow>> {
    let p = p_rational(n);
    par_map(ds, |d| {
        let field = FieldId::new(d as i64)?;
        let bound = class_bound(&field, n);
        let grid = PartitionGrid::build(FieldContext::build(field)?, n)?;
        let p_k = grid.count(&QElement::from_i64(n as i64, 0))?;
        let ok = if d > bound {
            p_k == p
        } else {
            let (a, b) = extra_partition(&field, n);
            let sum_ok = &a + &b == QElement::from_i64(n as i64, 0);
            p_k > p && sum_ok && field.is_totally_positive(&a) && field.is_totally_positive(&b)
        };
        if !ok {
            return Err(Error::AssertionFailure(format!(
                "threshold fails at n = {n}, D = {d}: p_K = {p_k}, p = {p}, bound = {bound}"
            )));
        }
        Ok(ThresholdRow {
            d,
            bound,
            p_k,
            p: p.clone(),
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub d: u64,
    pub alpha: ElementDoc,
    #[serde(with = "crate::bigjson::uint")]
    pub count: BigUint,
    pub expected: u64,
    /// For the six/nine construction: whether `⌈ξ⌉ - ξ > 1/2`.
    pub above_half: Option<bool>,
}

fn witness(
    field: FieldId,
    alpha: QElement,
    expected: u64,
    above_half: Option<bool>,
) -> Result<Witness> {
    let x = alpha
        .a
        .to_u64()
        .ok_or_else(|| Error::OutsideGrid(field.render(&alpha)))?;
    let grid = PartitionGrid::build(FieldContext::build(field)?, x)?;
    let count = grid.count(&alpha)?;
    let w = Witness {
        d: field.d(),
        alpha: ElementDoc::new(&alpha, &field),
        count,
        expected,
        above_half,
    };
    if w.count != BigUint::from(expected) {
        return Err(Error::AssertionFailure(format!(
            "p_K({}) = {} but {expected} expected for D = {}",
            w.alpha.text,
            w.count,
            field.d()
        )));
    }
    Ok(w)
}

/// `α = (⌈ξ⌉ + 2) + ω` has four partitions.
pub fn witness_m4(field: FieldId) -> Result<Witness> {
    let alpha = QElement::new(field.ceil_xi() + 2, 1.into());
    witness(field, alpha, 4, None)
}

/// Exact test of `⌈ξ⌉ - ξ > 1/2`, i.e. `2⌈ξ⌉ - 1 > 2ξ`.
pub fn above_half(field: &FieldId) -> bool {
    let two_xi = match field.class() {
        Congruence::TwoThree => QElement::from_i64(0, 2),
        Congruence::One => QElement::from_i64(-2, 2),
    };
    let lhs = QElement::new(field.ceil_xi() * 2 - 1, 0.into());
    field.sign_of(&(lhs - two_xi)) == Ordering::Greater
}

/// `α = (⌈2ξ⌉ + 2) + 2ω` has six partitions when `⌈ξ⌉ - ξ > 1/2` and nine
/// otherwise. `D = 5` is excluded; see [`witness_m6_d5`].
pub fn witness_m6(field: FieldId) -> Result<Witness> {
    if field.d() == 5 {
        return Err(Error::Unsupported(
            "D = 5 is excluded from the six/nine construction (it gives 10)".into(),
        ));
    }
    let branch = above_half(&field);
    let alpha = QElement::new(field.ceil_xi_mult(&BigInt::from(2)) + 2, 2.into());
    witness(field, alpha, if branch { 6 } else { 9 }, Some(branch))
}

/// The same construction for `D = 5`, where it gives ten partitions.
pub fn witness_m6_d5() -> Result<Witness> {
    let field = FieldId::new(5)?;
    let alpha = QElement::new(field.ceil_xi_mult(&BigInt::from(2)) + 2, 2.into());
    witness(field, alpha, 10, Some(above_half(&field)))
}

/// All partitions of `16 + 4√14`.
pub fn d14_example() -> Result<(FieldId, QElement, Vec<Vec<QElement>>)> {
    let field = FieldId::new(14)?;
    let alpha = QElement::from_i64(16, 4);
    let parts = enumerate_partitions(&alpha, &field)?;
    Ok((field, alpha, parts))
}
