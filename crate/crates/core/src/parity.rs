//! Parity experiments built on the cumulative count
//! `P_K(n) = Σ_{Tr α = 2n} p_K(α)`.
//!
//! For `D ≡ 2, 3 (mod 4)` every trace is even and `P_K` follows the prefab
//! recurrence driven by `a_n = #{α ≻ 0 : Tr α = 2n}`. For `D ≡ 1 (mod 4)`
//! odd traces occur, so the recurrence is run over all traces `t` and
//! `P_K(n)` is read off at `t = 2n`. No parity claim is made in that class.

use crate::error::{Error, Result};
use crate::partition::{DivisorCache, PartitionGrid};
use crate::quadfield::{Congruence, FieldId, QElement};
use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Number of totally positive elements of trace `t`, by closed form.
pub fn count_with_trace(field: &FieldId, t: u64) -> u64 {
    if t == 0 {
        return 0;
    }
    let d = field.d();
    match field.class() {
        // α = t/2 + b√D with |b|√D < t/2
        Congruence::TwoThree => {
            if t % 2 == 1 {
                return 0;
            }
            let half = (t / 2) as u128;
            let r = ((half * half) / d as u128).sqrt() as u64;
            2 * r + 1
        }
        // α = (t + b√D)/2 with b ≡ t (mod 2) and |b|√D < t
        Congruence::One => {
            let r = ((t as u128 * t as u128) / d as u128).sqrt() as u64;
            if t.is_multiple_of(2) {
                2 * (r / 2) + 1
            } else {
                2 * r.div_ceil(2)
            }
        }
    }
}

/// Same count by scanning the integral basis with exact sign tests.
pub fn count_with_trace_enumerated(field: &FieldId, t: u64) -> u64 {
    let t = t as i64;
    let mut n = 0;
    for b in -2 * t..=2 * t {
        let twice_a = match field.class() {
            Congruence::TwoThree => t,
            Congruence::One => t - b,
        };
        if twice_a % 2 != 0 {
            continue;
        }
        if field.is_totally_positive(&QElement::from_i64(twice_a / 2, b)) {
            n += 1;
        }
    }
    n
}

/// `a_n = #{α ≻ 0 : Tr α = 2n}`.
pub fn count_trace(field: &FieldId, n: u64) -> u64 {
    count_with_trace(field, 2 * n)
}

/// Cumulative counts and their parities for `n = 0..=n_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityProfile {
    pub d: u64,
    pub n_max: u64,
    /// `a_1, …, a_N`.
    pub a: Vec<u64>,
    /// `P_K(0), …, P_K(N)`.
    #[serde(with = "crate::bigjson::uint_vec")]
    pub cumulative: Vec<BigUint>,
    pub parity_bits: Vec<u8>,
    /// `p_K(n) mod 2` for `n = 0..` as far as a grid was attached.
    pub p_diag: Vec<u8>,
}

/// Runs `t·Q(t) = Σ_k (Σ_{d|k} d·c_d)·Q(t - k)` for `t ≤ len`, where
/// `c_d` is the number of primes of order `d`.
fn prefab_counts(orders: &[u64], len: u64) -> Result<Vec<BigUint>> {
    let weight: Vec<BigUint> = (0..=len)
        .map(|k| {
            if k == 0 {
                return BigUint::zero();
            }
            DivisorCache::divisors(k)
                .into_iter()
                .map(|d| BigUint::from(d) * orders[d as usize])
                .sum()
        })
        .collect();
    let mut q = vec![BigUint::one()];
    for t in 1..=len {
        let mut s = BigUint::zero();
        for k in 1..=t {
            s += &weight[k as usize] * &q[(t - k) as usize];
        }
        let (quot, rem) = s.div_rem(&BigUint::from(t));
        if !rem.is_zero() {
            return Err(Error::DivisibilityViolation {
                x: t as i64,
                y: 0,
                detail: format!("prefab recurrence remainder {rem}"),
            });
        }
        q.push(quot);
    }
    Ok(q)
}

/// `P_K(0..=n_max)` from the prefab recurrence.
pub fn cumulative_p(field: &FieldId, n_max: u64) -> Result<ParityProfile> {
    let a: Vec<u64> = (1..=n_max).map(|n| count_trace(field, n)).collect();
    let cumulative = match field.class() {
        Congruence::TwoThree => {
            let mut orders = vec![0];
            orders.extend_from_slice(&a);
            prefab_counts(&orders, n_max)?
        }
        Congruence::One => {
            let orders: Vec<u64> = (0..=2 * n_max)
                .map(|t| count_with_trace(field, t))
                .collect();
            prefab_counts(&orders, 2 * n_max)?
                .into_iter()
                .step_by(2)
                .collect()
        }
    };
    let parity_bits = cumulative.iter().map(|p| u8::from(p.is_odd())).collect();
    Ok(ParityProfile {
        d: field.d(),
        n_max,
        a,
        cumulative,
        parity_bits,
        p_diag: Vec::new(),
    })
}

/// `P_K(n)` summed directly over the grid cells of trace `2n`.
pub fn direct_cumulative(grid: &PartitionGrid, n: u64) -> Result<BigUint> {
    if n == 0 {
        return Ok(BigUint::one());
    }
    let field = grid.field();
    let need = match field.class() {
        Congruence::TwoThree => n,
        Congruence::One => 2 * n,
    };
    if grid.max_x() < need {
        return Err(Error::OutsideGrid(format!(
            "trace {} needs x ≤ {need}",
            2 * n
        )));
    }
    let mut total = BigUint::zero();
    for (x, y, c) in grid.cells() {
        let tr = field.trace(&QElement::from_i64(x, y));
        if tr == BigInt::from(2 * n) {
            total += c;
        }
    }
    Ok(total)
}

/// Outcome of comparing `P_K(n)` and `p_K(n)` modulo 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityReport {
    pub d: u64,
    pub n_checked: u64,
    /// `p_K(n) mod 2` for `n = 1..=n_checked`.
    pub bits: Vec<u8>,
    pub odd: usize,
    pub even: usize,
}

impl ParityProfile {
    /// Fills `p_diag` from a grid.
    pub fn attach_grid(&mut self, grid: &PartitionGrid) {
        let top = self.n_max.min(grid.max_x());
        self.p_diag = (0..=top)
            .map(|n| u8::from(grid.get(n as i64, 0).is_some_and(|p| p.is_odd())))
            .collect();
    }
}

/// Checks `P_K(n) ≡ p_K(n) (mod 2)` for `n ≤ min(N, grid bound)`.
pub fn parity_check(profile: &mut ParityProfile, grid: &PartitionGrid) -> Result<ParityReport> {
    if grid.field().d() != profile.d {
        return Err(Error::Invariant(
            "grid and profile use different fields".into(),
        ));
    }
    profile.attach_grid(grid);
    let bad: Vec<usize> = profile
        .p_diag
        .iter()
        .zip(&profile.parity_bits)
        .enumerate()
        .filter(|(_, (p, q))| p != q)
        .map(|(n, _)| n)
        .collect();
    if !bad.is_empty() {
        return Err(Error::AssertionFailure(format!(
            "P_K(n) and p_K(n) differ mod 2 at n = {bad:?} (D = {})",
            profile.d
        )));
    }
    let bits: Vec<u8> = profile.p_diag.iter().skip(1).copied().collect();
    let odd = bits.iter().filter(|&&b| b == 1).count();
    Ok(ParityReport {
        d: profile.d,
        n_checked: bits.len() as u64,
        even: bits.len() - odd,
        odd,
        bits,
    })
}

/// `S(n) = {m² ≤ n} ∪ {2m² ≤ n}`: the `k ≤ n` with `σ(k)` odd.
pub fn odd_sigma_set(n: u64) -> BTreeSet<u64> {
    let mut s = BTreeSet::new();
    let mut m = 1u64;
    while m * m <= n {
        s.insert(m * m);
        if 2 * m * m <= n {
            s.insert(2 * m * m);
        }
        m += 1;
    }
    s
}
