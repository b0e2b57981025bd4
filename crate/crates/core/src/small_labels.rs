//! Trees whose labels never exceed a bound `j`.
//!
//! `T_j` counts embedded trees with every internal label at most `j`. For a
//! step set `(b_1, ..., b_d)` a child in slot `l` starts a subtree whose
//! labels may rise by at most `j - b_l`, so
//!
//! ```text
//! T_j = 1 + z * prod_l T_{j - b_l}   (j >= 0),   T_j = 1   (j < 0).
//! ```
//!
//! For the ternary step set this is `T_j = 1 + z T_{j-1} T_j T_{j+1}` and the
//! system has the closed solution
//! `T_j = T (1 - X^{j+2})(1 - X^{j+5}) / ((1 - X^{j+3})(1 - X^{j+4}))`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::series::{
    coef, to_integer, Coefficient, Factor, IdentityCheck, MarkPolynomial, Marks, PolySeries, ProductEquation,
    ProductSystem, Ring, TruncatedSeries,
};
use crate::ternary::{series_t, series_x};
use crate::trees::StepSet;

/// `T_{-1}, ..., T_{j_max}` for one step set, all to the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallLabelFamily {
    pub j_max: i64,
    pub series: BTreeMap<i64, TruncatedSeries>,
}

impl SmallLabelFamily {
    pub fn get(&self, j: i64) -> Option<&TruncatedSeries> {
        self.series.get(&j)
    }

    /// Coefficient-wise `T_j <= T_{j+1} <= T` for every member.
    pub fn is_monotone(&self, full: &TruncatedSeries) -> bool {
        let mut prev: Option<&TruncatedSeries> = None;
        for s in self.series.values() {
            let n = s.order().min(full.order());
            if (0..=n).any(|k| s.coeff(k) > full.coeff(k)) {
                return false;
            }
            if let Some(p) = prev {
                if (0..=n).any(|k| p.coeff(k) > s.coeff(k)) {
                    return false;
                }
            }
            prev = Some(s);
        }
        true
    }
}

/// Index beyond which `T_k` agrees with `T` to order `order`: a tree with
/// at most `order` internal nodes has labels at most `(order - 1) * max(b)`.
pub fn boundary_index(steps: &StepSet, j: i64, order: usize) -> i64 {
    let reach = (order as i64) * steps.max_increment().max(1);
    (j + 1).max(reach)
}

/// Solves the label system for `T_{-1}, ..., T_{j_max}` under `steps`.
pub fn small_label_family(steps: &StepSet, j_max: i64, order: usize) -> Result<SmallLabelFamily> {
    if j_max < -1 {
        return Err(Error::InvalidArgument(format!(
            "label bound must be at least -1, got {j_max}"
        )));
    }
    let d = steps.arity();
    let k_bound = boundary_index(steps, j_max, order);
    let mut sys = ProductSystem::new(());
    let full = sys.add_known(series_t(d, order)?);
    for k in 0..k_bound {
        let mut factors = Vec::with_capacity(d);
        for &b in steps.increments() {
            let idx = k - b;
            if idx < 0 {
                continue;
            }
            factors.push(if idx >= k_bound {
                full
            } else {
                Factor::Unknown(idx as usize)
            });
        }
        sys.add_equation(ProductEquation {
            weight: coef(1),
            factors,
        });
    }
    let solved = sys.solve(order)?;
    let mut series = BTreeMap::new();
    series.insert(-1, TruncatedSeries::one(&(), order));
    for (k, s) in solved.into_iter().enumerate().take((j_max + 1).max(0) as usize) {
        series.insert(k as i64, s);
    }
    Ok(SmallLabelFamily { j_max, series })
}

/// `T_j` for an arbitrary step set by the truncated system.
pub fn small_label_system(steps: &StepSet, j: i64, order: usize) -> Result<TruncatedSeries> {
    let fam = small_label_family(steps, j, order)?;
    Ok(fam
        .series
        .get(&j)
        .cloned()
        .unwrap_or_else(|| TruncatedSeries::one(&(), order)))
}

/// Ternary `T_j` by the truncated system.
pub fn tj_system(j: i64, order: usize) -> Result<TruncatedSeries> {
    small_label_system(&StepSet::ternary(), j, order)
}

/// `1 - X^k` for `k >= 1`.
fn one_minus_power(x: &TruncatedSeries, k: u32) -> TruncatedSeries {
    x.pow(k).one_minus()
}

/// Ternary `T_j` by the closed form in `T` and `X`.
pub fn tj_closed(j: i64, order: usize) -> Result<TruncatedSeries> {
    if j < -1 {
        return Err(Error::InvalidArgument(format!("closed form needs j >= -1, got {j}")));
    }
    let t = series_t(3, order)?;
    let x = series_x(order)?;
    tj_closed_from(&t, &x, j)
}

/// Closed form with `T` and `X` supplied by the caller.
pub fn tj_closed_from(t: &TruncatedSeries, x: &TruncatedSeries, j: i64) -> Result<TruncatedSeries> {
    let e = |k: i64| (j + k) as u32;
    let num = &one_minus_power(x, e(2)) * &one_minus_power(x, e(5));
    let den = &one_minus_power(x, e(3)) * &one_minus_power(x, e(4));
    (t * &num).try_div(&den)
}

/// `3T - 1 - T^2`, the simplified form of `T_0`.
pub fn t0_simple(order: usize) -> Result<TruncatedSeries> {
    let t = series_t(3, order)?;
    t.scale(&coef(3)).add_constant(&coef(-1)).try_sub(&(&t * &t))
}

/// `[z^n] T_0 = 2 binom(3n, n) / ((n+1)(2n+1))`, and 1 for `n = 0`.
pub fn t0_coeff(n: u64) -> Result<BigInt> {
    if n == 0 {
        return Ok(BigInt::one());
    }
    let c = Coefficient::new(
        BigInt::from(2) * binomial(BigInt::from(3 * n), BigInt::from(n)),
        BigInt::from((n + 1) * (2 * n + 1)),
    );
    to_integer(&c)
}

/// Fibonacci numbers with `F_0 = 0`, `F_1 = F_2 = 1`.
pub fn fibonacci(k: u64) -> BigInt {
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 0..k {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// `[z^n] T_1` by the Fibonacci sum
/// `2/(n+1) binom(3n,n) + sum_{k=0}^{n} (-1)^{k+1} F_{k+1} binom(3n, n-k)
///  (n(11k+5) - 2k(k+1)) / (n(2n+k+1))`, and 1 for `n = 0`.
pub fn t1_coeff(n: u64) -> Result<BigInt> {
    if n == 0 {
        return Ok(BigInt::one());
    }
    let big = |x: u64| BigInt::from(x);
    let bin = |a: u64, b: u64| binomial(big(a), big(b));
    let mut total = Coefficient::new(big(2) * bin(3 * n, n), big(n + 1));
    for k in 0..=n {
        let weight = BigInt::from(n as i64 * (11 * k as i64 + 5) - 2 * k as i64 * (k as i64 + 1));
        let mut term = Coefficient::new(fibonacci(k + 1) * bin(3 * n, n - k) * weight, big(n * (2 * n + k + 1)));
        if k % 2 == 0 {
            term = -term;
        }
        total += term;
    }
    to_integer(&total)
}

/// Result of checking the one-parameter family identity for one `j`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct LambdaCheck {
    pub j: i64,
    pub order: usize,
    pub lambda_degree: u32,
    /// First `(n, lambda power)` where the two sides differ.
    pub first_mismatch: Option<(usize, u32)>,
}

impl LambdaCheck {
    pub fn holds(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Checks, for every `j` in the range, that `v_i = 1 - lambda X^{i+1}` satisfy
/// `T v_{j+1}^2 v_{j+2} v_{j+3} v_{j+4}^2 = v_{j+1} v_{j+2}^2 v_{j+3}^2 v_{j+4}
///  + z T^3 v_j v_{j+1} v_{j+2} v_{j+3} v_{j+4} v_{j+5}`
/// with `lambda` a formal variable.
///
/// A factor with `i + 1 < 0` is written `X^{i+1} (X^{-(i+1)} - lambda)` and
/// the whole identity is multiplied by a common power of `X` so that every
/// term is a power series.
pub fn verify_lambda_family(
    js: impl IntoIterator<Item = i64>,
    order: usize,
    lambda_degree: u32,
) -> Result<Vec<LambdaCheck>> {
    let marks = Marks::new(&["lambda"]);
    let t = series_t(3, order)?.to_poly(&marks);
    let x = series_x(order)?.to_poly(&marks);
    let z = PolySeries::z(&marks, order);
    let lambda = MarkPolynomial::variable(&marks, 0);
    let mut x_powers = vec![PolySeries::one(&marks, order)];
    let power = |k: usize, xp: &mut Vec<PolySeries>| -> PolySeries {
        while xp.len() <= k {
            let next = xp.last().expect("nonempty").try_mul(&x).expect("same marks");
            xp.push(next);
        }
        xp[k].clone()
    };

    let mut out = Vec::new();
    for j in js {
        // (X shift, factor) for v_i
        let v = |i: i64, xp: &mut Vec<PolySeries>| -> (i64, PolySeries) {
            let e = i + 1;
            if e >= 0 {
                let term = power(e as usize, xp).mul_coeff(&lambda);
                (0, PolySeries::one(&marks, order).try_sub(&term).expect("same marks"))
            } else {
                let s = power((-e) as usize, xp);
                (e, s.add_constant(&Ring::neg(&lambda)))
            }
        };
        let product = |idx: &[i64], xp: &mut Vec<PolySeries>| -> (i64, PolySeries) {
            let mut shift = 0;
            let mut acc = PolySeries::one(&marks, order);
            for &i in idx {
                let (s, f) = v(j + i, xp);
                shift += s;
                acc = acc.try_mul(&f).expect("same marks").truncate_degree(0, lambda_degree);
            }
            (shift, acc)
        };
        let (sl, left) = product(&[1, 1, 2, 3, 4, 4], &mut x_powers);
        let (s1, right1) = product(&[1, 2, 2, 3, 3, 4], &mut x_powers);
        let (s2, right2) = product(&[0, 1, 2, 3, 4, 5], &mut x_powers);
        let base = sl.min(s1).min(s2);
        let lift = |s: i64, p: PolySeries, xp: &mut Vec<PolySeries>| -> Result<PolySeries> {
            p.try_mul(&power((s - base) as usize, xp))
        };
        let lhs = lift(sl, t.try_mul(&left)?, &mut x_powers)?;
        let zt3 = z.try_mul(&t.pow(3))?;
        let rhs = lift(s1, right1, &mut x_powers)?.try_add(&lift(s2, zt3.try_mul(&right2)?, &mut x_powers)?)?;
        let lhs = lhs.truncate_degree(0, lambda_degree);
        let rhs = rhs.truncate_degree(0, lambda_degree);
        out.push(LambdaCheck {
            j,
            order,
            lambda_degree,
            first_mismatch: first_poly_mismatch(&lhs, &rhs),
        });
    }
    Ok(out)
}

fn first_poly_mismatch(a: &PolySeries, b: &PolySeries) -> Option<(usize, u32)> {
    let n = a.first_difference(b)?;
    let diff = a.coeff(n).try_add(&Ring::neg(b.coeff(n))).expect("same marks");
    let deg = diff.terms().map(|(e, _)| e[0]).min().unwrap_or(0);
    Some((n, deg))
}

/// The family `T (1 - l X^{j+2})(1 - l X^{j+5}) / ((1 - l X^{j+3})(1 - l X^{j+4}))`
/// at a rational `l`, for `j >= -1`.
pub fn lambda_member(lambda: &Coefficient, j: i64, order: usize) -> Result<TruncatedSeries> {
    if j < -1 {
        return Err(Error::InvalidArgument(format!("family member needs j >= -1, got {j}")));
    }
    let t = series_t(3, order)?;
    let x = series_x(order)?;
    let f = |k: i64| x.pow((j + k) as u32).scale(lambda).one_minus();
    (&t * &(&f(2) * &f(5))).try_div(&(&f(3) * &f(4)))
}

/// Closed form against system for every `j` in `-1..=j_max`.
pub fn closed_vs_system(j_max: i64, order: usize) -> Result<Vec<IdentityCheck>> {
    let fam = small_label_family(&StepSet::ternary(), j_max, order)?;
    let t = series_t(3, order)?;
    let x = series_x(order)?;
    (-1..=j_max)
        .map(|j| {
            let closed = tj_closed_from(&t, &x, j)?;
            Ok(IdentityCheck::compare(
                format!("T_{j} closed = system"),
                &closed,
                fam.get(j).expect("solved"),
            ))
        })
        .collect()
}

/// Integer coefficients of a counting series.
pub fn integer_coeffs(s: &TruncatedSeries) -> Result<Vec<BigInt>> {
    s.coeffs()
        .iter()
        .map(|c| {
            let v = to_integer(c)?;
            if v.is_negative() {
                Err(Error::Consistency(format!("negative count {v}")))
            } else {
                Ok(v)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> TruncatedSeries {
        TruncatedSeries::from_ints(v)
    }

    #[test]
    fn system_sequences() {
        assert_eq!(tj_system(0, 6).unwrap(), ints(&[1, 1, 2, 6, 22, 91, 408]));
        assert_eq!(tj_system(1, 6).unwrap(), ints(&[1, 1, 3, 11, 46, 209, 1006]));
        assert_eq!(tj_system(-1, 6).unwrap(), TruncatedSeries::one(&(), 6));
    }

    #[test]
    fn closed_sequences() {
        assert_eq!(tj_closed(0, 6).unwrap(), ints(&[1, 1, 2, 6, 22, 91, 408]));
        assert_eq!(tj_closed(1, 6).unwrap(), ints(&[1, 1, 3, 11, 46, 209, 1006]));
        assert_eq!(tj_closed(-1, 12).unwrap(), TruncatedSeries::one(&(), 12));
        assert_eq!(tj_closed(0, 15).unwrap(), t0_simple(15).unwrap());
    }

    #[test]
    fn closed_form_matches_system() {
        for c in closed_vs_system(10, 20).unwrap() {
            assert!(c.holds(), "{c:?}");
        }
    }

    #[test]
    fn large_bound_is_inactive() {
        let n = 10;
        assert_eq!(tj_system(n as i64, n).unwrap(), series_t(3, n).unwrap());
        assert_eq!(tj_closed(n as i64 + 3, n).unwrap(), series_t(3, n).unwrap());
        // [z^n] T_j = [z^n] T once j >= n
        let t = series_t(3, 12).unwrap();
        for j in 0..12i64 {
            let tj = tj_system(j, 12).unwrap();
            for k in 0..=12usize {
                if j >= k as i64 {
                    assert_eq!(tj.coeff(k), t.coeff(k), "j={j} n={k}");
                }
            }
        }
    }

    #[test]
    fn family_is_monotone() {
        let fam = small_label_family(&StepSet::ternary(), 8, 15).unwrap();
        assert!(fam.is_monotone(&series_t(3, 15).unwrap()));
        assert_eq!(fam.get(-1), Some(&TruncatedSeries::one(&(), 15)));
    }

    #[test]
    fn corollary_coefficients() {
        let t0 = tj_system(0, 25).unwrap();
        let t1 = tj_system(1, 25).unwrap();
        for n in 0..=25u64 {
            assert_eq!(
                Coefficient::from_integer(t0_coeff(n).unwrap()),
                *t0.coeff(n as usize),
                "T0 n={n}"
            );
            assert_eq!(
                Coefficient::from_integer(t1_coeff(n).unwrap()),
                *t1.coeff(n as usize),
                "T1 n={n}"
            );
        }
        assert_eq!(t0_coeff(2).unwrap(), BigInt::from(2));
        assert_eq!(t0_coeff(5).unwrap(), BigInt::from(91));
        assert_eq!(t1_coeff(1).unwrap(), BigInt::from(1));
        assert_eq!(t1_coeff(6).unwrap(), BigInt::from(1006));
    }

    #[test]
    fn fibonacci_numbers() {
        let f: Vec<_> = (0..10).map(fibonacci).collect();
        let want: Vec<BigInt> = [0, 1, 1, 2, 3, 5, 8, 13, 21, 34]
            .iter()
            .map(|&x| BigInt::from(x))
            .collect();
        assert_eq!(f, want);
    }

    #[test]
    fn lambda_identity() {
        for c in verify_lambda_family(-3..=5, 10, 6).unwrap() {
            assert!(c.holds(), "{c:?}");
        }
    }

    #[test]
    fn lambda_specializations() {
        let t = series_t(3, 10).unwrap();
        for j in [0, 3] {
            assert_eq!(lambda_member(&coef(0), j, 10).unwrap(), t);
        }
        assert_eq!(lambda_member(&coef(1), -1, 10).unwrap(), TruncatedSeries::one(&(), 10));
        assert_eq!(lambda_member(&coef(1), 2, 10).unwrap(), tj_system(2, 10).unwrap());
    }

    #[test]
    fn binary_small_labels() {
        let steps = StepSet::binary();
        let a = small_label_system(&steps, 0, 10).unwrap();
        let t = series_t(2, 10).unwrap();
        assert_eq!(small_label_system(&steps, 10, 10).unwrap(), t);
        assert_eq!(*a.coeff(1), coef(1));
        assert_eq!(*a.coeff(2), coef(1));
    }

    #[test]
    fn invalid_bounds() {
        assert!(tj_closed(-2, 5).is_err());
        assert!(small_label_family(&StepSet::ternary(), -2, 5).is_err());
    }
}
