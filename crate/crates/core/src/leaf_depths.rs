//! Counts of trees by leaf index and edge-type profile of the path to that
//! leaf.
//!
//! Leaves are numbered `0..=(d-1)n` from left to right. An edge into slot
//! `l` (1-based) moves the leaf index right by `l - 1`, so the profile
//! `(m_1, ..., m_d)` of leaf `s` satisfies `s = sum (l-1) m_l (mod d-1)`.
//! With `M_1 = sum m_l` and `M_2 = sum l m_l` the count is
//!
//! ```text
//! multinomial(m) [z^(n-M_1) u^(s-M_2+M_1)] T(z u^(d-1))^(M_2-M_1) T(z)^(d M_1 - M_2)
//! ```

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::series::{Coefficient, Ring};
use crate::ternary::{big_binomial, dary_count, dary_power_coeff, ternary_count};
use crate::trees::DepthProfile;

/// Which inequality between `s_1` and `m_3` guards the general ternary case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GuardReading {
    /// `0 <= m_3 <= s_1` and `0 <= mu_2 <= s_1 - m_3`.
    #[default]
    Derived,
    /// `0 <= s_1 <= m_3` and `0 <= mu_2 <= s_1 - m_3`.
    Literal,
}

/// A leaf-depth query: tree size, leaf index and profile.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeafDepthQuery {
    pub n: u64,
    pub s: u64,
    pub m: DepthProfile,
}

impl LeafDepthQuery {
    /// Whether the profile can occur at all: the congruence on `s` and at
    /// most `n` internal nodes on the path.
    pub fn is_valid(&self) -> bool {
        let d = self.m.arity() as u64;
        if d < 2 || self.s > (d - 1) * self.n || self.m.depth() as u64 > self.n {
            return false;
        }
        let shift = self.m.weighted_shift();
        self.s >= shift && (self.s - shift).is_multiple_of(d - 1)
    }

    /// The count for this query, zero when invalid.
    pub fn count(&self) -> BigInt {
        dary_leaf_depth_count(self.m.arity() as u64, self.n, self.s, &self.m.0)
    }
}

/// `(m_1 + ... + m_k)! / (m_1! ... m_k!)`.
pub fn multinomial(m: &[u32]) -> BigInt {
    let mut total = 0u64;
    let mut out = BigInt::one();
    for &k in m {
        total += k as u64;
        out *= big_binomial(total, k as u64);
    }
    out
}

/// `[x_1^m_1 ... x_k^m_k] 1 / (1 - sum x_l alpha_l) = multinomial(m) prod alpha_l^m_l`.
pub fn multinomial_extract<R: Ring>(ctx: &R::Ctx, m: &[u32], alpha: &[R]) -> R {
    assert_eq!(m.len(), alpha.len(), "one factor per exponent");
    let mut out = R::from_scalar(ctx, Coefficient::from_integer(multinomial(m)));
    for (a, &k) in alpha.iter().zip(m) {
        for _ in 0..k {
            out = out.mul(a);
        }
    }
    out
}

/// Number of ternary trees of size `n` whose leaf `s` has `m_1` left,
/// `m_2` middle and `m_3` right edges on its root path.
pub fn leaf_depth_count(n: u64, s: u64, m1: u64, m2: u64, m3: u64) -> BigInt {
    leaf_depth_count_with(GuardReading::Derived, n, s, m1, m2, m3)
}

/// [`leaf_depth_count`] with an explicit reading of the `s_1`/`m_3` guard.
pub fn leaf_depth_count_with(reading: GuardReading, n: u64, s: u64, m1: u64, m2: u64, m3: u64) -> BigInt {
    if n == 0 || s > 2 * n {
        return BigInt::zero();
    }
    if (m2, m3) == (0, 0) {
        return if s == 0 && m1 <= n {
            boundary_count(n, m1)
        } else {
            BigInt::zero()
        };
    }
    if (m1, m2) == (0, 0) {
        return if s == 2 * n && m3 <= n {
            boundary_count(n, m3)
        } else {
            BigInt::zero()
        };
    }
    let (s1, s2) = (s / 2, s % 2);
    if m2 < s2 || !(m2 - s2).is_multiple_of(2) {
        return BigInt::zero();
    }
    let mu2 = (m2 - s2) / 2;
    let s1_ok = match reading {
        GuardReading::Derived => m3 <= s1,
        GuardReading::Literal => s1 <= m3,
    };
    if !s1_ok || s1 < m3 || mu2 > s1 - m3 {
        return BigInt::zero();
    }
    let (n, s1, s2, m1, m2, m3, mu2) = (
        n as i64, s1 as i64, s2 as i64, m1 as i64, m2 as i64, m3 as i64, mu2 as i64,
    );
    let rest = n - m1 - m2 - s1 + mu2;
    if rest < 0 {
        return BigInt::zero();
    }
    let top1 = 3 * s1 + s2 - m3 - mu2;
    let top2 = 3 * n - m1 - 2 * m2 - 3 * s1 + 3 * mu2;
    let num = BigInt::from((2 * m3 + m2) * (2 * m1 + m2))
        * multinomial(&[m1 as u32, m2 as u32, m3 as u32])
        * big_binomial(top1 as u64, (s1 - m3 - mu2) as u64)
        * big_binomial(top2 as u64, rest as u64);
    let den = BigInt::from(top1 * top2);
    assert!((&num % &den).is_zero(), "non-integral leaf-depth count at n={n}, s={s}");
    num / den
}

/// `(2k / (3n - k)) binom(3n - k, 2n)`.
fn boundary_count(n: u64, k: u64) -> BigInt {
    if k == 0 {
        return BigInt::zero();
    }
    BigInt::from(2 * k) * big_binomial(3 * n - k, 2 * n) / BigInt::from(3 * n - k)
}

/// Number of `d`-ary trees of size `n` whose leaf `s` has profile `m`.
pub fn dary_leaf_depth_count(d: u64, n: u64, s: u64, m: &[u32]) -> BigInt {
    if d < 2 || m.len() as u64 != d {
        return BigInt::zero();
    }
    let m1: u64 = m.iter().map(|&k| k as u64).sum();
    let m2: u64 = m.iter().enumerate().map(|(i, &k)| (i as u64 + 1) * k as u64).sum();
    let a = m2 - m1;
    let b = d * m1 - m2;
    if s < a || !(s - a).is_multiple_of(d - 1) || m1 > n {
        return BigInt::zero();
    }
    let i = (s - a) / (d - 1);
    if i > n - m1 {
        return BigInt::zero();
    }
    multinomial(m) * dary_power_coeff(d, i, a) * dary_power_coeff(d, n - m1 - i, b)
}

/// Every profile in `N^d` with at most `n` edges in total, in lexicographic order.
pub fn profiles(d: usize, n: u32) -> Vec<DepthProfile> {
    fn go(d: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<DepthProfile>) {
        if cur.len() == d {
            out.push(DepthProfile(cur.clone()));
            return;
        }
        for k in 0..=left {
            cur.push(k);
            go(d, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(d, n, &mut Vec::with_capacity(d), &mut out);
    out
}

/// Nonzero counts `(s, m) -> T_{n,s,m}` for ternary trees of size `n`.
pub fn leaf_depth_table(n: u64) -> BTreeMap<(u64, DepthProfile), BigInt> {
    table_by(3, n, |s, m| {
        leaf_depth_count(n, s, m[0] as u64, m[1] as u64, m[2] as u64)
    })
}

/// Nonzero counts `(s, m) -> T_{n,s,m}` for `d`-ary trees of size `n`.
pub fn dary_leaf_depth_table(d: u64, n: u64) -> BTreeMap<(u64, DepthProfile), BigInt> {
    table_by(d, n, |s, m| dary_leaf_depth_count(d, n, s, m))
}

fn table_by<F>(d: u64, n: u64, count: F) -> BTreeMap<(u64, DepthProfile), BigInt>
where
    F: Fn(u64, &[u32]) -> BigInt + Sync,
{
    let all = profiles(d as usize, n as u32);
    (0..=(d - 1) * n)
        .into_par_iter()
        .flat_map_iter(|s| {
            all.iter()
                .filter_map(|m| {
                    let c = count(s, &m.0);
                    (!c.is_zero()).then(|| ((s, m.clone()), c))
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// `P{H_{n,s} = m} = T_{n,s,m} / T_n` over ternary trees of size `n`.
pub fn leaf_depth_distribution(n: u64, s: u64) -> BTreeMap<DepthProfile, Coefficient> {
    let total = ternary_count(n);
    profiles(3, n as u32)
        .into_iter()
        .filter_map(|m| {
            let c = leaf_depth_count(n, s, m.0[0] as u64, m.0[1] as u64, m.0[2] as u64);
            (!c.is_zero()).then(|| (m, Coefficient::new(c, total.clone())))
        })
        .collect()
}

/// `sum_{s, m} T_{n,s,m}`, which is `((d-1)n + 1)` times the number of trees.
pub fn dary_table_total(d: u64, n: u64) -> (BigInt, BigInt) {
    let sum = dary_leaf_depth_table(d, n).into_values().sum();
    (sum, BigInt::from((d - 1) * n + 1) * dary_count(d, n))
}
