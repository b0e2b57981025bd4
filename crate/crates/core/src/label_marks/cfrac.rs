//! Finite continued fractions
//!
//! ```text
//! <a_n, ..., a_1, a_0>_n = 1 / (1 - a_n / (1 - a_{n-1} / ( ... / (1 - a_0))))
//! ```
//!
//! and their denominator polynomials `k_n`, with `k_{-1} = 1`,
//! `k_0 = 1 - a_0` and `k_n = k_{n-1} - a_n k_{n-2}`, so that
//! `<a_n, ..., a_0>_n = k_{n-1} / k_n`.
//!
//! Operands are indexed as written: `a[i]` is `a_i`, so `a[0]` sits in the
//! innermost level.

use crate::error::{Error, Result};
use crate::series::{Ring, Series};

/// `k_{-1}, k_0, ..., k_n` for `a = [a_0, ..., a_n]`, by the three-term
/// recurrence. The first entry is `k_{-1} = 1`.
pub fn kn_sequence<R: Ring>(ctx: &R::Ctx, a: &[R]) -> Vec<R> {
    let mut k = Vec::with_capacity(a.len() + 1);
    k.push(R::one_in(ctx));
    for (i, ai) in a.iter().enumerate() {
        let prev = &k[i];
        let mut next = prev.clone();
        let before = if i == 0 { R::one_in(ctx) } else { k[i - 1].clone() };
        next.sub_assign(&ai.mul(&before));
        k.push(next);
    }
    k
}

/// `k_n(a_n, ..., a_0)` by the recurrence; `a` empty gives `k_{-1} = 1`.
pub fn kn_poly<R: Ring>(ctx: &R::Ctx, a: &[R]) -> R {
    kn_sequence(ctx, a).pop().expect("never empty")
}

/// `k_n` by the explicit sum: one plus, for every nonempty set of indices in
/// `0..=n` with no two adjacent, `(-1)^(size)` times the product of the
/// chosen `a_i`.
pub fn kn_explicit<R: Ring>(ctx: &R::Ctx, a: &[R]) -> R {
    fn walk<R: Ring>(a: &[R], start: usize, sign: bool, prod: &R, acc: &mut R) {
        for i in start..a.len() {
            let p = prod.mul(&a[i]);
            if sign {
                acc.add_assign(&p);
            } else {
                acc.sub_assign(&p);
            }
            walk(a, i + 2, !sign, &p, acc);
        }
    }
    let one = R::one_in(ctx);
    let mut acc = one.clone();
    walk(a, 0, false, &one, &mut acc);
    acc
}

/// `<a_n, ..., a_0>_n` evaluated level by level from the inside out.
pub fn cf_eval<C: Ring>(a: &[Series<C>]) -> Result<Series<C>> {
    let first = a
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty continued fraction".into()))?;
    let mut value = first.one_minus().recip()?;
    for ai in &a[1..] {
        value = ai.try_mul(&value)?.one_minus().recip()?;
    }
    Ok(value)
}

/// `k_{n-1} / k_n`, failing if `k_n` has no invertible constant term.
pub fn cf_quotient<C: Ring>(a: &[Series<C>]) -> Result<Series<C>> {
    let first = a
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty continued fraction".into()))?;
    let ctx = Ring::ctx(first);
    let k = kn_sequence(&ctx, a);
    let n = k.len() - 1;
    k[n - 1].try_div(&k[n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{coef, MarkPolynomial, Marks, TruncatedSeries};

    fn symbols(n: usize) -> (Marks, Vec<MarkPolynomial>) {
        let m = Marks::indexed("a", n + 1);
        let a = (0..=n).map(|i| MarkPolynomial::variable(&m, i)).collect();
        (m, a)
    }

    #[test]
    fn small_k() {
        let (m, a) = symbols(2);
        let k = kn_sequence(&m, &a);
        assert_eq!(k[0].to_string(), "1");
        assert_eq!(
            k[1],
            MarkPolynomial::constant(&m, coef(1))
                .try_add(&Ring::neg(&a[0]))
                .unwrap()
        );
        // k_1 = 1 - a_0 - a_1
        let want = MarkPolynomial::constant(&m, coef(1))
            .try_add(&Ring::neg(&a[0]))
            .unwrap()
            .try_add(&Ring::neg(&a[1]))
            .unwrap();
        assert_eq!(k[2], want);
        // k_2 = 1 - a_0 - a_1 - a_2 + a_0 a_2
        let k2 = &k[3];
        assert_eq!(k2.coefficient(&[1, 0, 1]), coef(1));
        assert_eq!(k2.coefficient(&[0, 0, 1]), coef(-1));
        assert_eq!(k2.coefficient(&[1, 1, 0]), coef(0));
    }

    #[test]
    fn recurrence_equals_explicit_sum() {
        for n in 0..=8 {
            let (m, a) = symbols(n);
            assert_eq!(kn_poly(&m, &a), kn_explicit(&m, &a), "n = {n}");
        }
    }

    #[test]
    fn explicit_sum_term_count() {
        // nonadjacent subsets of an (n+1)-set number F_{n+3}, here fib[i] = F_{i+1}
        let fib = [1usize, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89];
        for n in 0..=7 {
            let (m, a) = symbols(n);
            assert_eq!(kn_explicit(&m, &a).num_terms(), fib[n + 2], "n = {n}");
        }
    }

    #[test]
    fn single_level() {
        let a0 = TruncatedSeries::z(&(), 6);
        let v = cf_eval(std::slice::from_ref(&a0)).unwrap();
        assert_eq!(v, TruncatedSeries::from_ints(&[1; 7]));
        assert_eq!(cf_quotient(&[a0]).unwrap(), v);
    }

    #[test]
    fn nested_equals_quotient() {
        let z = TruncatedSeries::z(&(), 10);
        let a: Vec<_> = (1..=5)
            .map(|i| z.scale(&coef(i)).one_plus().pow(i as u32).shift_up(1))
            .collect();
        assert_eq!(cf_eval(&a).unwrap(), cf_quotient(&a).unwrap());
    }

    #[test]
    fn empty_fraction_is_rejected() {
        assert!(cf_eval::<crate::series::Coefficient>(&[]).is_err());
    }
}
