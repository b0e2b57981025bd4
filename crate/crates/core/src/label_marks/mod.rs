//! Trees weighted by the number of internal nodes at chosen labels.
//!
//! With marks `u_0, ..., u_m`, `S_j` is the generating function of trees
//! rooted at label 0 in which every internal node with label in
//! `{j - l, j + l}` carries a factor `u_l`. Equivalently `S_j` counts trees
//! rooted at label `j` marked by distance from label 0, which gives
//!
//! ```text
//! S_j = 1 + z S_{j-1} S_j S_{j+1}          (j > m)
//! S_j = 1 + u_j z S_{j-1} S_j S_{j+1}      (1 <= j <= m)
//! S_0 = 1 + u_0 z S_0 S_1^2
//! ```
//!
//! together with `S_j = S_{-j}`. For `m = 0` and `m = 1` the system has a
//! closed solution in `T`, `X` and a series `mu` in the shifted marks
//! `t_l = u_l - 1`.

pub mod cfrac;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::series::{
    coef, fixed_point_solve, Coefficient, Factor, IdentityCheck, MarkPolynomial, Marks, PolySeries, ProductEquation,
    ProductSystem, Ring, TruncatedSeries,
};
use crate::ternary::{series_t, series_x};

pub use cfrac::{cf_eval, cf_quotient, kn_explicit, kn_poly, kn_sequence};

/// Solutions `S_0, ..., S_{K-1}` of a marked system; beyond `K` every `S_k`
/// equals `T` to the computed order.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedFamily {
    pub marks: Marks,
    pub series: BTreeMap<i64, PolySeries>,
    full: PolySeries,
}

impl MarkedFamily {
    /// `S_j`, using `S_j = S_{-j}`.
    pub fn get(&self, j: i64) -> &PolySeries {
        self.series.get(&j.abs()).unwrap_or(&self.full)
    }

    /// The window size `m`: marks are `u_0, ..., u_m`.
    pub fn window(&self) -> usize {
        self.marks.len() - 1
    }

    /// Largest index solved explicitly.
    pub fn boundary(&self) -> i64 {
        self.series.len() as i64
    }
}

/// Index `K` from which `S_k` equals `T` to order `order`: a node at
/// distance at most `m` from label 0 lies at least `k - m` levels below a
/// root at label `k`.
pub fn marked_boundary(m: usize, j: i64, order: usize) -> i64 {
    (j.abs() + 1).max((order + m) as i64)
}

/// Solves the system with one mark per distance `0..marks.len()`, keeping
/// at least `S_0, ..., S_{|j_max|}`.
pub fn marked_system(marks: &Marks, j_max: i64, order: usize) -> Result<MarkedFamily> {
    if marks.is_empty() {
        return Err(Error::InvalidArgument("a marked system needs at least one mark".into()));
    }
    let m = marks.len() - 1;
    let k_bound = marked_boundary(m, j_max, order) as usize;
    let full = series_t(3, order)?.to_poly(marks);
    let mut sys = ProductSystem::new(marks.clone());
    let t = sys.add_known(full.clone());
    let one = MarkPolynomial::constant(marks, coef(1));
    let factor = |k: usize| if k >= k_bound { t } else { Factor::Unknown(k) };
    for k in 0..k_bound {
        let weight = if k <= m {
            MarkPolynomial::variable(marks, k)
        } else {
            one.clone()
        };
        let factors = if k == 0 {
            vec![Factor::Unknown(0), factor(1), factor(1)]
        } else {
            vec![Factor::Unknown(k - 1), Factor::Unknown(k), factor(k + 1)]
        };
        sys.add_equation(ProductEquation { weight, factors });
    }
    let series = sys
        .solve(order)?
        .into_iter()
        .enumerate()
        .map(|(k, s)| (k as i64, s))
        .collect();
    Ok(MarkedFamily {
        marks: marks.clone(),
        series,
        full,
    })
}

/// `S_0, ..., S_K` for marks `u0, ..., u{m}`.
pub fn s_general_system(m: usize, order: usize) -> Result<MarkedFamily> {
    marked_system(&Marks::indexed("u", m + 1), (m + 1) as i64, order)
}

/// `S_j(z, u)`: `u` marks internal nodes with label `j`.
pub fn sj_system(j: i64, order: usize) -> Result<PolySeries> {
    Ok(marked_system(&Marks::new(&["u"]), j, order)?.get(j).clone())
}

/// `S_j(z, u0, u1)`: `u0` marks label `j`, `u1` marks labels `j - 1` and `j + 1`.
pub fn sj_pm_system(j: i64, order: usize) -> Result<PolySeries> {
    Ok(marked_system(&Marks::new(&["u0", "u1"]), j, order)?.get(j).clone())
}

/// A series in `z` whose coefficients are polynomials in the shifted marks
/// `t = u - 1`, vanishing at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MuSeries {
    pub series: PolySeries,
}

impl MuSeries {
    /// Whether setting every shifted mark to 0 gives the zero series.
    pub fn vanishes_at_origin(&self) -> bool {
        let zeros = vec![coef(0); self.series.ctx().len()];
        self.series.eval_marks(&zeros).is_zero()
    }
}

struct Base {
    t: PolySeries,
    x_powers: Vec<PolySeries>,
}

impl Base {
    fn new(marks: &Marks, order: usize, max_power: usize) -> Result<Self> {
        let t = series_t(3, order)?.to_poly(marks);
        let x = series_x(order)?.to_poly(marks);
        let mut x_powers = vec![PolySeries::one(marks, order)];
        for _ in 0..max_power {
            let next = x_powers.last().expect("nonempty").try_mul(&x)?;
            x_powers.push(next);
        }
        Ok(Base { t, x_powers })
    }

    fn x(&self, k: usize) -> &PolySeries {
        &self.x_powers[k]
    }

    /// `1 / ((1+X)^2 (1-X)^3)`.
    fn denominator_inverse(&self) -> Result<PolySeries> {
        let x = self.x(1);
        x.one_plus().pow(2).try_mul(&x.one_minus().pow(3))?.recip()
    }

    /// `T (1 + m X^a)(1 + m X^{a+3}) / ((1 + m X^{a+1})(1 + m X^{a+2}))`.
    fn member(&self, m: &PolySeries, a: usize) -> Result<PolySeries> {
        let f = |k: usize| -> Result<PolySeries> { Ok(m.try_mul(self.x(k))?.one_plus()) };
        let num = f(a)?.try_mul(&f(a + 3)?)?;
        let den = f(a + 1)?.try_mul(&f(a + 2)?)?;
        self.t.try_mul(&num)?.try_div(&den)
    }
}

/// Rewrites a series in `t_i = u_i - 1` as a series in `u_i`.
fn unshift(s: &PolySeries, names: &Marks) -> PolySeries {
    let mut out = s.clone();
    for i in 0..s.ctx().len() {
        out = out.shift_var(i, &coef(-1));
    }
    out.with_marks(names)
}

/// The unique `mu` with `mu(t = 0) = 0` and
/// `mu = t (1 + mu X)(1 + mu X^2)^2 (1 + mu X^5) / ((1+X)^2 (1-X)^3 (1 - mu^2 X^5))`,
/// where `t = u - 1`.
pub fn mu_series(order: usize) -> Result<MuSeries> {
    let marks = Marks::new(&["t"]);
    let base = Base::new(&marks, order, 5)?;
    Ok(MuSeries {
        series: solve_mu(&base, &marks, order)?,
    })
}

fn solve_mu(base: &Base, marks: &Marks, order: usize) -> Result<PolySeries> {
    let t = MarkPolynomial::variable(marks, 0);
    let dinv = base.denominator_inverse()?;
    let f = |mu: &PolySeries| -> Result<PolySeries> {
        let p = |k: usize| -> Result<PolySeries> { Ok(mu.try_mul(base.x(k))?.one_plus()) };
        let num = p(1)?.try_mul(&p(2)?.pow(2))?.try_mul(&p(5)?)?;
        let mu2 = mu.try_mul(mu)?.try_mul(base.x(5))?.one_minus();
        num.mul_coeff(&t).try_mul(&dinv)?.try_div(&mu2)
    };
    fixed_point_solve(f, &PolySeries::zero(marks, 0), order)
}

/// The printed closed form `T (1 + mu X^{j+1})(1 + mu X^{j+4}) / ((1 + mu X^{j+2})(1 + mu X^{j+3}))`
/// for `j >= -1`, as a series in `u`.
///
/// For `j >= 0` this is `S_j`. At `j = -1` it is `u S_1`, not `S_{-1}`: the
/// one-parameter family solves the unmarked recurrence at every index, so
/// its value below the marked index is what the marked equation at 0
/// expects in place of `u S_{-1}`.
pub fn sj_closed_raw(j: i64, order: usize) -> Result<PolySeries> {
    if j < -1 {
        return Err(Error::InvalidArgument(format!("closed form needs j >= -1, got {j}")));
    }
    let shifted = Marks::new(&["t"]);
    let base = Base::new(&shifted, order, (j + 4).max(5) as usize)?;
    let mu = solve_mu(&base, &shifted, order)?;
    Ok(unshift(&base.member(&mu, (j + 1) as usize)?, &Marks::new(&["u"])))
}

/// `S_j(z, u)` from the closed form, for every integer `j` by `S_j = S_{-j}`.
pub fn sj_closed(j: i64, order: usize) -> Result<PolySeries> {
    sj_closed_raw(j.abs(), order)
}

/// The two-mark series `nu = mu X`, with `t_0 = u_0 - 1`, `t_1 = u_1 - 1`.
///
/// Requiring the one-parameter family to satisfy both marked equations
/// gives `nu` as the fixed point of
///
/// ```text
/// nu = t_0 X (1+nu)(1+nu X)^2 (1+nu X^4) / (D (1 - nu^2 X^3))
///    + t_1 (1+X^2)(1+nu X)(1+nu X^2)^3 (1+nu X^3) / (D (1+nu X^4)(1 - nu^2 X^3))
/// ```
///
/// with `D = (1+X)^2 (1-X)^3`, a contraction for power series. `mu` itself
/// has a pole in `z` whenever `t_1 != 0`.
pub fn pm_nu_series(order: usize) -> Result<MuSeries> {
    let marks = Marks::new(&["t0", "t1"]);
    let base = Base::new(&marks, order, 4)?;
    Ok(MuSeries {
        series: solve_nu(&base, &marks, order, NuEquation::Derived)?,
    })
}

/// The fixed point of the alternative two-mark equation whose `t_1` term is
/// `t_1 (1+X+X^2)(1+nu X)^2 (1+nu X^2)^2 / (D (1 - nu^2 X^3))`. Its family
/// does not solve the marked system once `t_1 != 0`; kept for comparison.
pub fn pm_nu_series_alternative(order: usize) -> Result<MuSeries> {
    let marks = Marks::new(&["t0", "t1"]);
    let base = Base::new(&marks, order, 4)?;
    Ok(MuSeries {
        series: solve_nu(&base, &marks, order, NuEquation::Alternative)?,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum NuEquation {
    Derived,
    Alternative,
}

/// [`solve_nu_uncached`], memoised by order since every family member needs it.
fn solve_nu(base: &Base, marks: &Marks, order: usize, eq: NuEquation) -> Result<PolySeries> {
    type Cache = Mutex<HashMap<(usize, NuEquation, Marks), PolySeries>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (order, eq, marks.clone());
    if let Some(nu) = cache.lock().expect("cache lock").get(&key) {
        return Ok(nu.clone());
    }
    let nu = solve_nu_uncached(base, marks, order, eq)?;
    cache.lock().expect("cache lock").insert(key, nu.clone());
    Ok(nu)
}

fn solve_nu_uncached(base: &Base, marks: &Marks, order: usize, eq: NuEquation) -> Result<PolySeries> {
    let t0 = MarkPolynomial::variable(marks, 0);
    let t1 = MarkPolynomial::variable(marks, 1);
    let dinv = base.denominator_inverse()?;
    let x = base.x(1);
    let f = |nu: &PolySeries| -> Result<PolySeries> {
        let p = |k: usize| -> Result<PolySeries> { Ok(nu.try_mul(base.x(k))?.one_plus()) };
        let p1sq = p(1)?.pow(2);
        let first = x.try_mul(&nu.one_plus())?.try_mul(&p1sq)?;
        let mut den = nu.try_mul(nu)?.try_mul(base.x(3))?.one_minus();
        let num = match eq {
            NuEquation::Derived => {
                let p4 = p(4)?;
                let second = base
                    .x(2)
                    .one_plus()
                    .try_mul(&p(1)?)?
                    .try_mul(&p(2)?.pow(3))?
                    .try_mul(&p(3)?)?;
                den = den.try_mul(&p4)?;
                first
                    .try_mul(&p4.try_mul(&p4)?)?
                    .mul_coeff(&t0)
                    .try_add(&second.mul_coeff(&t1))?
            }
            NuEquation::Alternative => {
                let second = x
                    .one_plus()
                    .try_add(base.x(2))?
                    .try_mul(&p1sq)?
                    .try_mul(&p(2)?.pow(2))?;
                first.try_mul(&p(4)?)?.mul_coeff(&t0).try_add(&second.mul_coeff(&t1))?
            }
        };
        num.try_mul(&dinv)?.try_div(&den)
    };
    fixed_point_solve(f, &PolySeries::zero(marks, 0), order)
}

/// The one-parameter family at index `j >= 0` with `mu X = nu`, as a series in
/// `(u0, u1)`. It equals `S_j` for `j >= 1`; at `j = 0` it is `u1 S_0`.
pub fn sj_pm_closed_raw(j: i64, order: usize) -> Result<PolySeries> {
    if j < 0 {
        return Err(Error::InvalidArgument(format!("family member needs j >= 0, got {j}")));
    }
    let shifted = Marks::new(&["t0", "t1"]);
    let base = Base::new(&shifted, order, (j + 3).max(4) as usize)?;
    let nu = solve_nu(&base, &shifted, order, NuEquation::Derived)?;
    Ok(unshift(&base.member(&nu, j as usize)?, &Marks::new(&["u0", "u1"])))
}

/// [`sj_pm_closed_raw`] built from [`pm_nu_series_alternative`].
pub fn sj_pm_alternative_raw(j: i64, order: usize) -> Result<PolySeries> {
    if j < 0 {
        return Err(Error::InvalidArgument(format!("family member needs j >= 0, got {j}")));
    }
    let shifted = Marks::new(&["t0", "t1"]);
    let base = Base::new(&shifted, order, (j + 3).max(4) as usize)?;
    let nu = solve_nu(&base, &shifted, order, NuEquation::Alternative)?;
    Ok(unshift(&base.member(&nu, j as usize)?, &Marks::new(&["u0", "u1"])))
}

/// `S_{j, j±1}(z, u0, u1)` from the closed form: the family for `|j| >= 1`
/// and `S_0 = 1 / (1 - u0 z S_1^2)`.
pub fn sj_pm_closed(j: i64, order: usize) -> Result<PolySeries> {
    let j = j.abs();
    if j >= 1 {
        return sj_pm_closed_raw(j, order);
    }
    let s1 = sj_pm_closed_raw(1, order)?;
    let marks = s1.ctx().clone();
    let u0 = MarkPolynomial::variable(&marks, 0);
    let a0 = s1.try_mul(&s1)?.shift_up(1).mul_coeff(&u0);
    a0.one_minus().recip()
}

/// `a_m = z u_m S_{m+1}`, ..., `a_1 = z u_1 S_2`, `a_0 = z u_0 S_1^2`, indexed
/// by subscript.
pub fn gen1_operands(family: &MarkedFamily) -> Result<Vec<PolySeries>> {
    let m = family.window();
    let marks = &family.marks;
    (0..=m)
        .map(|i| {
            let u = MarkPolynomial::variable(marks, i);
            let s = family.get(i as i64 + 1);
            let base = if i == 0 { s.try_mul(s)? } else { s.clone() };
            Ok(base.shift_up(1).mul_coeff(&u))
        })
        .collect()
}

/// Checks `S_m = <a_m, ..., a_0>_m` with the system solution, by nested
/// evaluation, by `k_{m-1}/k_m` from the recurrence and from the explicit
/// sum, plus the recurrence against the explicit sum itself.
pub fn verify_gen1(m: usize, order: usize) -> Result<Vec<IdentityCheck>> {
    let family = s_general_system(m, order)?;
    let a = gen1_operands(&family)?;
    let sm = family.get(m as i64);
    let ctx = Ring::ctx(sm);
    let nested = cf_eval(&a)?;
    let by_recurrence = cf_quotient(&a)?;
    let k_prev = kn_explicit(&ctx, &a[..m]);
    let k_last = kn_explicit(&ctx, &a);
    let by_sum = k_prev.try_div(&k_last)?;
    Ok(vec![
        IdentityCheck::compare(format!("S_{m} = nested continued fraction"), sm, &nested),
        IdentityCheck::compare(
            format!("S_{m} = k_{}/k_{m} (recurrence)", m as i64 - 1),
            sm,
            &by_recurrence,
        ),
        IdentityCheck::compare(format!("S_{m} = k_{}/k_{m} (explicit sum)", m as i64 - 1), sm, &by_sum),
        IdentityCheck::compare(format!("k_{m} recurrence = explicit sum"), &kn_poly(&ctx, &a), &k_last),
    ])
}

/// Closed forms against the systems for `j` in `js`, to order `order`.
pub fn closed_vs_system(js: impl IntoIterator<Item = i64> + Clone, order: usize) -> Result<Vec<IdentityCheck>> {
    let j_max = js.clone().into_iter().map(i64::abs).max().unwrap_or(0);
    let one = marked_system(&Marks::new(&["u"]), j_max, order)?;
    let two = marked_system(&Marks::new(&["u0", "u1"]), j_max, order)?;
    let mut out = Vec::new();
    for j in js {
        out.push(IdentityCheck::compare(
            format!("S_{j}(z,u) closed = system"),
            &sj_closed(j, order)?,
            one.get(j),
        ));
        out.push(IdentityCheck::compare(
            format!("S_{j}(z,u0,u1) closed = system"),
            &sj_pm_closed(j, order)?,
            two.get(j),
        ));
    }
    Ok(out)
}

/// `sum_{|j| <= n} dS_j/du (z, 1)` at `z^n`, which must equal `n [z^n] T`.
pub fn mark_total(order: usize) -> Result<TruncatedSeries> {
    let fam = marked_system(&Marks::new(&["u"]), order as i64, order)?;
    let mut total = vec![Coefficient::from_integer(0.into()); order + 1];
    for j in -(order as i64)..=(order as i64) {
        let s = fam.get(j);
        for (n, slot) in total.iter_mut().enumerate() {
            for (e, c) in s.coeff(n).terms() {
                *slot += c * coef(e[0] as i64);
            }
        }
    }
    Ok(TruncatedSeries::new((), total))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(marks: &Marks, terms: &[(&[u32], i64)]) -> MarkPolynomial {
        MarkPolynomial::from_terms(marks, terms.iter().map(|(e, c)| (e.to_vec(), coef(*c))))
    }

    #[test]
    fn small_coefficients() {
        let u = Marks::new(&["u"]);
        let s0 = sj_system(0, 4).unwrap();
        assert_eq!(*s0.coeff(1), poly(&u, &[(&[1], 1)]));
        assert_eq!(*s0.coeff(2), poly(&u, &[(&[2], 1), (&[1], 2)]));
        let s1 = sj_system(1, 4).unwrap();
        assert_eq!(*s1.coeff(1), poly(&u, &[(&[0], 1)]));
        assert_eq!(*s1.coeff(2), poly(&u, &[(&[0], 2), (&[1], 1)]));
    }

    #[test]
    fn ones_give_tree_series() {
        let t = series_t(3, 10).unwrap();
        for j in -3..=3 {
            assert_eq!(sj_system(j, 10).unwrap().eval_ones(), t);
            assert_eq!(sj_pm_system(j, 10).unwrap().eval_ones(), t);
        }
        assert_eq!(
            s_general_system(2, 8).unwrap().get(1).eval_ones(),
            series_t(3, 8).unwrap()
        );
    }

    #[test]
    fn symmetry_and_degree_bound() {
        for j in 0..4 {
            let s = sj_system(j, 10).unwrap();
            assert_eq!(s, sj_system(-j, 10).unwrap());
            for (n, d) in s.mark_degrees().into_iter().enumerate() {
                assert!(d.unwrap_or(0) as usize <= n);
            }
        }
    }

    #[test]
    fn mu_vanishes_at_u_one() {
        let mu = mu_series(8).unwrap();
        assert!(mu.vanishes_at_origin());
        assert!(pm_nu_series(6).unwrap().vanishes_at_origin());
    }

    #[test]
    fn one_mark_closed_form() {
        for j in -2..=4 {
            assert_eq!(sj_closed(j, 10).unwrap(), sj_system(j, 10).unwrap(), "j = {j}");
        }
        let u = Marks::new(&["u"]);
        let s = sj_closed(0, 2).unwrap();
        assert_eq!(*s.coeff(1), poly(&u, &[(&[1], 1)]));
        assert_eq!(*s.coeff(2), poly(&u, &[(&[2], 1), (&[1], 2)]));
        assert_eq!(sj_closed(0, 10).unwrap().eval_ones(), series_t(3, 10).unwrap());
    }

    #[test]
    fn raw_formula_below_the_mark() {
        let raw = sj_closed_raw(-1, 10).unwrap();
        let s1 = sj_system(1, 10).unwrap();
        let u = MarkPolynomial::variable(&Marks::new(&["u"]), 0);
        assert_eq!(raw, s1.mul_coeff(&u));
    }

    #[test]
    fn two_mark_closed_form() {
        for j in -2..=3 {
            assert_eq!(sj_pm_closed(j, 8).unwrap(), sj_pm_system(j, 8).unwrap(), "j = {j}");
        }
        let raw0 = sj_pm_closed_raw(0, 8).unwrap();
        let s0 = sj_pm_system(0, 8).unwrap();
        let u1 = MarkPolynomial::variable(&Marks::new(&["u0", "u1"]), 1);
        assert_eq!(raw0, s0.mul_coeff(&u1));
    }

    #[test]
    fn alternative_equation_misses_the_system() {
        let alt = sj_pm_alternative_raw(2, 6).unwrap();
        let sys = sj_pm_system(2, 6).unwrap();
        assert_eq!(alt.first_difference(&sys), Some(3));
        let alt_nu = pm_nu_series_alternative(6).unwrap().series.specialize(1, &coef(0));
        assert_eq!(alt_nu, pm_nu_series(6).unwrap().series.specialize(1, &coef(0)));
    }

    #[test]
    fn two_marks_reduce_to_one() {
        for j in 0..3 {
            let two = sj_pm_system(j, 8)
                .unwrap()
                .specialize(1, &coef(1))
                .with_marks(&Marks::new(&["u"]));
            assert_eq!(two, sj_system(j, 8).unwrap());
        }
        let nu = pm_nu_series(8).unwrap().series.specialize(1, &coef(0));
        let mu = mu_series(8).unwrap().series;
        let x = series_x(8).unwrap().to_poly(mu.ctx());
        assert_eq!(nu.with_marks(mu.ctx()), mu.try_mul(&x).unwrap());
    }

    #[test]
    fn size_two_pm_oracle() {
        let m = Marks::new(&["u0", "u1"]);
        let s = sj_pm_system(0, 3).unwrap();
        assert_eq!(*s.coeff(2), poly(&m, &[(&[2, 0], 1), (&[1, 1], 2)]));
    }

    #[test]
    fn specialization_chain() {
        let big = s_general_system(2, 8).unwrap();
        let small = s_general_system(1, 8).unwrap();
        for j in 0..4 {
            let reduced = big.get(j).specialize(2, &coef(1));
            assert_eq!(reduced, *small.get(j), "j = {j}");
        }
        let m0 = s_general_system(0, 8).unwrap();
        assert_eq!(m0.get(0).with_marks(&Marks::new(&["u"])), sj_system(0, 8).unwrap());
    }

    #[test]
    fn gen1_small() {
        for m in 0..=2 {
            for c in verify_gen1(m, 8).unwrap() {
                assert!(c.holds(), "{c:?}");
            }
        }
    }

    #[test]
    fn mark_conservation() {
        let total = mark_total(7).unwrap();
        let t = series_t(3, 7).unwrap();
        for n in 0..=7 {
            assert_eq!(*total.coeff(n), t.coeff(n) * coef(n as i64));
        }
    }
}
