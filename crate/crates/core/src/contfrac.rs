//! Continued fraction of `σ = ω + ⌊ξ⌋`, its convergents, the indecomposable
//! elements and the fundamental units.

use crate::error::{Error, Result};
use crate::quadfield::{floor_surd, Congruence, FieldId, QElement};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::cmp::Ordering;

/// Everything derived from `D` that the rest of the engine needs.
#[derive(Clone, Debug)]
pub struct FieldContext {
    pub field: FieldId,
    pub floor_xi: BigInt,
    /// Partial quotients `u_0, …, u_{s-1}` of the purely periodic expansion.
    pub period: Vec<BigInt>,
    /// `(p_i, q_i)` for `i = -1, 0, …, 2s` (index 0 of the vector is `i = -1`).
    pub convergents: Vec<(BigInt, BigInt)>,
    /// `α_i = p_i + q_i ξ` in the integral basis, same indexing as `convergents`.
    pub alphas: Vec<QElement>,
    /// Indecomposables `α_{i,r}` for one period of `ε₊`, sorted lexicographically.
    pub indecomposables: Vec<QElement>,
    pub eps: QElement,
    pub eps_plus: QElement,
    pub discriminant: u64,
}

/// State `(P + √D)/Q` of the expansion.
fn initial_state(field: &FieldId, floor_xi: &BigInt) -> (BigInt, BigInt) {
    match field.class() {
        Congruence::TwoThree => (floor_xi.clone(), BigInt::one()),
        Congruence::One => (floor_xi * 2 + 1, BigInt::from(2)),
    }
}

/// Purely periodic partial quotients of `σ`.
pub fn expand_sigma(field: &FieldId) -> Result<Vec<BigInt>> {
    let d = BigInt::from(field.d());
    let root = d.sqrt();
    let start = initial_state(field, &field.floor_xi());
    let (mut p, mut q) = start.clone();
    let mut period = Vec::new();
    loop {
        let a = (&p + &root).div_floor(&q);
        period.push(a.clone());
        let next_p = &a * &q - &p;
        let rem = &d - &next_p * &next_p;
        if !rem.is_multiple_of(&q) {
            return Err(Error::ContinuedFraction {
                d: field.d(),
                q: q.to_string(),
                rem: rem.to_string(),
            });
        }
        q = rem / &q;
        p = next_p;
        if (p.clone(), q.clone()) == start {
            return Ok(period);
        }
    }
}

impl FieldContext {
    pub fn build(field: FieldId) -> Result<Self> {
        let floor_xi = field.floor_xi();
        let period = expand_sigma(&field)?;
        let s = period.len();
        let u = |i: usize| &period[i % s];

        // convergents for i = -1..=2s+1 (one extra so α_{i+1} exists for i = 2s)
        let mut convergents = Vec::with_capacity(2 * s + 3);
        convergents.push((BigInt::one(), BigInt::zero()));
        convergents.push(((&period[0] + 1) / 2, BigInt::one()));
        for i in 1..=2 * s + 1 {
            let (p1, q1) = &convergents[i];
            let (p0, q0) = &convergents[i - 1];
            let next = (u(i) * p1 + p0, u(i) * q1 + q0);
            convergents.push(next);
        }
        let alphas: Vec<QElement> = convergents
            .iter()
            .map(|(p, q)| field.from_xi_form(p.clone(), q.clone()))
            .collect();
        let alpha = |i: i64| &alphas[(i + 1) as usize];

        let eps = alpha(s as i64 - 1).clone();
        let eps_plus = if s % 2 == 0 {
            eps.clone()
        } else {
            alpha(2 * s as i64 - 1).clone()
        };

        // odd i in -1 ..= (period length of ε₊) - 3
        let span = if s % 2 == 0 { s } else { 2 * s } as i64;
        let mut indecomposables = Vec::new();
        let mut i = -1i64;
        while i <= span - 3 {
            let step = alpha(i + 1);
            let mut cur = alpha(i).clone();
            let r_max = u((i + 2) as usize);
            let mut r = BigInt::zero();
            while &r < r_max {
                indecomposables.push(cur.clone());
                cur = &cur + step;
                r += 1;
            }
            i += 2;
        }
        indecomposables.sort();
        indecomposables.dedup();

        Ok(FieldContext {
            discriminant: field.discriminant(),
            field,
            floor_xi,
            period,
            convergents,
            alphas,
            indecomposables,
            eps,
            eps_plus,
        })
    }

    pub fn new(d: i64) -> Result<Self> {
        Self::build(FieldId::new(d)?)
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    /// `α_i` for `i ≥ -1` within the stored range.
    pub fn alpha(&self, i: i64) -> Option<&QElement> {
        self.alphas.get((i + 1) as usize)
    }

    /// `⌊ε₊/(ξ + ω)⌋`.
    pub fn floor_ratio_eps(&self) -> BigInt {
        // ε₊ = (A + B√D)/scale and ξ + ω = 2√D/scale in both classes
        let (a, b, _) = self.field.sqrt_coords(&self.eps_plus);
        let d = BigInt::from(self.field.d());
        floor_surd(&(&b * &d), &a, &(&d * 2), &d)
    }

    /// `ε₊⁻¹ = ε₊'` since `N(ε₊) = 1`.
    pub fn eps_plus_inverse(&self) -> QElement {
        self.field.conjugate(&self.eps_plus)
    }

    /// Sign of `ε₊·α' - α`; non-negative iff `α/α' ≤ ε₊` (for `α ≻ 0`).
    pub fn ratio_slack(&self, alpha: &QElement) -> Ordering {
        let k = &self.field;
        let scaled = k.mul(&self.eps_plus, &k.conjugate(alpha));
        k.sign_of(&(&scaled - alpha))
    }

    /// Whether `α` lies in the fundamental domain `x ≥ 1, y ≥ 0, α/α' ≤ ε₊`.
    pub fn in_fundamental_domain(&self, alpha: &QElement) -> bool {
        alpha.a >= BigInt::one()
            && alpha.b >= BigInt::zero()
            && self.ratio_slack(alpha) != Ordering::Less
    }

    /// Moves a totally positive `α` into the fundamental domain using
    /// conjugation and multiplication by powers of `ε₊`.
    pub fn canonical_rep(&self, alpha: &QElement) -> QElement {
        let k = &self.field;
        let inv = self.eps_plus_inverse();
        let mut cur = alpha.clone();
        loop {
            let conj = k.conjugate(&cur);
            // α/α' < 1
            if k.sign_of(&(&cur - &conj)) == Ordering::Less {
                cur = conj;
                continue;
            }
            if self.ratio_slack(&cur) == Ordering::Less {
                cur = k.mul(&cur, &inv);
                continue;
            }
            // ratio in [1, ε₊]; with ratio exactly 1 the element is rational
            return cur;
        }
    }

    /// Indecomposables moved into the fundamental domain, sorted and deduplicated.
    pub fn indecomposable_reps(&self) -> Vec<QElement> {
        let mut reps: Vec<QElement> = self
            .indecomposables
            .iter()
            .map(|e| self.canonical_rep(e))
            .collect();
        reps.sort();
        reps.dedup();
        reps
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: i64) -> FieldContext {
        FieldContext::new(d).unwrap()
    }

    fn el(a: i64, b: i64) -> QElement {
        QElement::from_i64(a, b)
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Independent expansion of `x = (P + √D)/Q` using floats with wide margin
    /// checks, for small D only.
    fn float_cf(d: i64, p: f64, q: f64, terms: usize) -> Vec<i64> {
        let mut x = (p + (d as f64).sqrt()) / q;
        let mut out = Vec::new();
        for _ in 0..terms {
            let a = x.floor();
            out.push(a as i64);
            x = 1.0 / (x - a);
        }
        out
    }

    #[test]
    fn small_periods() {
        assert_eq!(expand_sigma(&FieldId::new(2).unwrap()).unwrap(), big(&[2]));
        assert_eq!(
            expand_sigma(&FieldId::new(3).unwrap()).unwrap(),
            big(&[2, 1])
        );
        assert_eq!(expand_sigma(&FieldId::new(5).unwrap()).unwrap(), big(&[1]));
        // σ_3 = 1 + √3 = [2, 1, 2, 1, ...]
        assert_eq!(float_cf(3, 1.0, 1.0, 6), vec![2, 1, 2, 1, 2, 1]);
        assert_eq!(float_cf(5, 1.0, 2.0, 5), vec![1, 1, 1, 1, 1]);
    }

    #[test]
    fn periods_match_float_oracle() {
        for d in [6, 7, 13, 14, 17, 19, 21, 22, 23] {
            let field = FieldId::new(d).unwrap();
            let period = expand_sigma(&field).unwrap();
            let fx = field.floor_xi();
            let fx: f64 = fx.to_string().parse().unwrap();
            let (p, q) = match field.class() {
                Congruence::TwoThree => (fx, 1.0),
                Congruence::One => (2.0 * fx + 1.0, 2.0),
            };
            let n = period.len() * 2;
            let expect = float_cf(d, p, q, n.min(12));
            for (i, e) in expect.iter().enumerate() {
                assert_eq!(period[i % period.len()], BigInt::from(*e), "D={d} i={i}");
            }
        }
    }

    #[test]
    fn units_from_table() {
        assert_eq!(ctx(2).eps_plus, el(3, 2));
        assert_eq!(ctx(3).eps_plus, el(2, 1));
        assert_eq!(ctx(5).eps_plus, el(1, 1));
        assert_eq!(ctx(6).eps_plus, el(5, 2));
        assert_eq!(ctx(7).eps_plus, el(8, 3));
        assert_eq!(ctx(13).eps_plus, el(4, 3));
        assert_eq!(ctx(17).eps_plus, el(25, 16));
        assert_eq!(ctx(21).eps_plus, el(2, 1));
    }

    #[test]
    fn floor_ratios() {
        let expect = [
            (2, 2),
            (3, 1),
            (5, 1),
            (6, 2),
            (7, 3),
            (13, 3),
            (17, 16),
            (21, 1),
        ];
        for (d, r) in expect {
            assert_eq!(ctx(d).floor_ratio_eps(), BigInt::from(r), "D={d}");
        }
    }

    #[test]
    fn indecomposables_d6() {
        assert_eq!(ctx(6).indecomposable_reps(), vec![el(1, 0), el(3, 1)]);
        assert_eq!(ctx(2).indecomposable_reps(), vec![el(1, 0), el(2, 1)]);
    }

    #[test]
    fn unit_structure() {
        for d in [2, 3, 5, 6, 7, 10, 13, 14, 17, 19, 21, 22, 31, 46, 94, 139] {
            let c = ctx(d);
            let k = c.field;
            let n = k.norm(&c.eps);
            assert!(n == BigInt::one() || n == BigInt::from(-1), "D={d}");
            assert_eq!(k.norm(&c.eps_plus), BigInt::one());
            assert!(k.is_totally_positive(&c.eps_plus));
            let s = c.period_len() as i64;
            for i in -1..=s {
                assert_eq!(
                    c.alpha(i + s).unwrap(),
                    &k.mul(&c.eps, c.alpha(i).unwrap()),
                    "D={d} i={i}"
                );
            }
            for e in &c.indecomposables {
                assert!(k.is_totally_positive(e));
            }
            // |α_i'| decreasing: α_i' = p_i - q_i ω = conjugate of α_i
            let mut prev: Option<QElement> = None;
            for i in 0..2 * s {
                let conj = k.conjugate(c.alpha(i).unwrap());
                let abs = if k.sign_of(&conj) == Ordering::Less {
                    -conj
                } else {
                    conj
                };
                if let Some(p) = prev {
                    assert!(k.succ_gt(&p, &abs) || k.sign_of(&(&p - &abs)) == Ordering::Greater);
                }
                prev = Some(abs);
            }
        }
    }
}
