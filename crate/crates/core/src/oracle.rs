//! Brute-force partition enumeration, independent of the recurrence.
//!
//! Parts are emitted in non-increasing lexicographic order, which makes every
//! multiset appear exactly once.

use crate::error::{Error, Result};
use crate::partition::enumerate_interval;
use crate::quadfield::{FieldId, QElement};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

struct Walker<'a> {
    field: &'a FieldId,
    budget: u64,
    nodes: u64,
}

impl Walker<'_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        Ok(())
    }

    /// Parts `≤_LEX cap` that fit in `rest`, largest first.
    fn candidates(&self, rest: &QElement, cap: Option<&QElement>) -> Result<Vec<QElement>> {
        let mut parts = enumerate_interval(rest, self.field)?;
        if let Some(cap) = cap {
            parts.retain(|p| p <= cap);
        }
        parts.reverse();
        Ok(parts)
    }

    fn collect(
        &mut self,
        rest: &QElement,
        cap: Option<&QElement>,
        prefix: &mut Vec<QElement>,
        out: &mut Vec<Vec<QElement>>,
    ) -> Result<()> {
        self.tick()?;
        if rest.is_zero() {
            out.push(prefix.clone());
            return Ok(());
        }
        for part in self.candidates(rest, cap)? {
            let next = rest - &part;
            prefix.push(part);
            let part_ref = prefix.last().cloned();
            self.collect(&next, part_ref.as_ref(), prefix, out)?;
            prefix.pop();
        }
        Ok(())
    }

    fn count(&mut self, rest: &QElement, cap: Option<&QElement>) -> Result<u64> {
        self.tick()?;
        if rest.is_zero() {
            return Ok(1);
        }
        let mut total = 0;
        for part in self.candidates(rest, cap)? {
            total += self.count(&(rest - &part), Some(&part))?;
        }
        Ok(total)
    }
}

/// All partitions of `α`, each as a non-increasing (lexicographic) list of parts.
pub fn enumerate_partitions(alpha: &QElement, field: &FieldId) -> Result<Vec<Vec<QElement>>> {
    enumerate_partitions_with_budget(alpha, field, DEFAULT_NODE_BUDGET)
}

pub fn enumerate_partitions_with_budget(
    alpha: &QElement,
    field: &FieldId,
    budget: u64,
) -> Result<Vec<Vec<QElement>>> {
    if !field.is_totally_positive(alpha) {
        return Err(Error::NotTotallyPositive(field.render(alpha)));
    }
    let mut w = Walker {
        field,
        budget,
        nodes: 0,
    };
    let mut out = Vec::new();
    w.collect(alpha, None, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// Number of partitions of `α` without materializing them.
pub fn count_partitions(alpha: &QElement, field: &FieldId) -> Result<u64> {
    count_partitions_with_budget(alpha, field, DEFAULT_NODE_BUDGET)
}

pub fn count_partitions_with_budget(alpha: &QElement, field: &FieldId, budget: u64) -> Result<u64> {
    if !field.is_totally_positive(alpha) {
        return Err(Error::NotTotallyPositive(field.render(alpha)));
    }
    let mut w = Walker {
        field,
        budget,
        nodes: 0,
    };
    w.count(alpha, None)
}

/// Renders a partition as `part + part + …`.
pub fn render_partition(parts: &[QElement], field: &FieldId) -> String {
    parts
        .iter()
        .map(|p| {
            let s = field.render(p);
            if parts.len() > 1 && s.contains(['+', '-']) && !s.starts_with('(') {
                format!("({s})")
            } else {
                s
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn el(a: i64, b: i64) -> QElement {
        QElement::from_i64(a, b)
    }

    #[test]
    fn four_in_q_sqrt3() {
        let k = FieldId::new(3).unwrap();
        let parts = enumerate_partitions(&el(4, 0), &k).unwrap();
        assert_eq!(parts.len(), 6);
        assert!(parts.contains(&vec![el(2, 1), el(2, -1)]));
        assert_eq!(count_partitions(&el(4, 0), &k).unwrap(), 6);
    }

    #[test]
    fn trivial_and_small() {
        let k = FieldId::new(7).unwrap();
        assert_eq!(
            enumerate_partitions(&el(1, 0), &k).unwrap(),
            vec![vec![el(1, 0)]]
        );
        for d in [2, 3, 5, 6, 7, 13, 17, 21] {
            let k = FieldId::new(d).unwrap();
            assert_eq!(count_partitions(&el(2, 0), &k).unwrap(), 2);
        }
        let k2 = FieldId::new(2).unwrap();
        assert_eq!(count_partitions(&el(5, 2), &k2).unwrap(), 6);
        let k11 = FieldId::new(11).unwrap();
        // (⌈√11⌉ + 2) + √11
        assert_eq!(count_partitions(&el(6, 1), &k11).unwrap(), 4);
    }

    #[test]
    fn parts_are_valid_and_distinct() {
        let k = FieldId::new(2).unwrap();
        let alpha = el(7, 3);
        let parts = enumerate_partitions(&alpha, &k).unwrap();
        let set: BTreeSet<_> = parts.iter().cloned().collect();
        assert_eq!(set.len(), parts.len());
        for p in &parts {
            let sum = p.iter().fold(QElement::zero(), |acc, e| &acc + e);
            assert_eq!(sum, alpha);
            assert!(p.iter().all(|e| k.is_totally_positive(e)));
            assert!(p.windows(2).all(|w| w[0] >= w[1]));
        }
        assert_eq!(parts.len(), 13);
    }

    #[test]
    fn budget_is_enforced() {
        let k = FieldId::new(2).unwrap();
        assert_eq!(
            count_partitions_with_budget(&el(10, 0), &k, 50),
            Err(Error::BudgetExceeded(50))
        );
        assert!(count_partitions(&el(1, 1), &k).is_err());
    }

    #[test]
    fn rendering() {
        let k = FieldId::new(3).unwrap();
        assert_eq!(
            render_partition(&[el(2, 1), el(2, -1)], &k),
            "(2+√3) + (2-√3)"
        );
        assert_eq!(render_partition(&[el(1, 0)], &k), "1");
    }
}
